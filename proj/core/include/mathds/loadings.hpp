#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mathds/kronecker_batch.hpp"
#include "mathds/matrix.hpp"
#include "mathds/partitions.hpp"

namespace mathds {

/// Y_n = P_n P_n^T: entry (lambda, mu) = sum_i lambda_i mu_i.
struct SimilitudeMatrix {
    int n = 0;
    Matrix<std::int64_t> entries;
};

/// Z_n: entry (lambda, mu) = ||lambda - mu||_1 of the zero-padded vectors.
struct DifferenceMatrix {
    int n = 0;
    Matrix<std::int64_t> entries;
};

SimilitudeMatrix similitude_matrix(const PartitionTable& table);
DifferenceMatrix difference_matrix(const PartitionTable& table);

struct PerronOptions {
    double tol = 1e-12;           // relative change of the Rayleigh quotient
    double residual_tol = 1e-10;  // ||Mv - lv|| / ||M||_F
    std::size_t max_iter = 100000;
};

struct PerronResult {
    double eigenvalue = 0.0;
    std::vector<double> vector;  // unit L2 norm, strictly positive
    std::size_t iterations = 0;
    double residual = 0.0;       // ||Mv - lv||_2 / ||M||_F
};

/// Power iteration from the all-ones vector for a symmetric non-negative
/// irreducible matrix. Stops once successive Rayleigh quotients agree to
/// tol * |l| and the relative residual is below residual_tol. Throws
/// NumericalError after max_iter iterations and ConsistencyError if the
/// converged vector has a non-positive coordinate.
PerronResult perron_vector(const Matrix<double>& m, const PerronOptions& options = {});

enum class LoadingKind { a, b };

std::string to_string(LoadingKind kind);

/// 100 * (v - v_min) / (v_max - v_min) of the Perron vector of Y_n (kind a)
/// or Z_n (kind b), indexed like enumerate_partitions(n).
struct LoadingVector {
    int n = 0;
    LoadingKind kind = LoadingKind::a;
    std::vector<double> values;
    double eigenvalue = 0.0;

    double operator[](std::size_t i) const noexcept { return values[i]; }
    std::size_t size() const noexcept { return values.size(); }
};

/// Throws DomainError for n = 1, where the eigenvector is constant.
LoadingVector loadings(const PartitionTable& table, LoadingKind kind);

/// L(a) + L(b) + L(c), summed in ascending order of the three terms so the
/// value does not depend on argument order.
double triple_loading(std::size_t a, std::size_t b, std::size_t c, const LoadingVector& loading) noexcept;
double triple_loading(const Partition& lambda, const Partition& mu, const Partition& nu,
                      const LoadingVector& loading);

/// Triple loadings closer than this are treated as equal. Loadings that agree
/// in exact arithmetic (b_lambda = b_lambda' makes whole families of triples
/// tie) differ by ~1e-13 after rounding.
inline constexpr double kLoadingTieTolerance = 1e-9;

struct BStarResult {
    bool found = false;  // false: no vanishing triple, value is +inf
    double value = std::numeric_limits<double>::infinity();
    std::array<std::size_t, 3> argmin{};  // sorted indices i <= j <= k
    std::size_t evaluated = 0;           // coefficients computed (diagnostic)
};

/// min { b(t) : g(t) = 0 } over all triples of the cube. Vanishing triples
/// within kLoadingTieTolerance of the minimum are ties and go to the
/// lexicographically least sorted index triple.
BStarResult b_star(const KroneckerCube& cube, const LoadingVector& b_loading);

/// Same result without materialising the cube: triples are visited in
/// ascending loading order and any triple whose loading already exceeds the
/// best vanishing one is skipped.
BStarResult b_star_search(const CharacterTable& table, const LoadingVector& b_loading, unsigned threads);

struct CertificateFraction {
    std::uint64_t total = 0;  // p(n)^3 ordered triples
    std::uint64_t below = 0;        // ordered triples with b(t) < b_star (ties excluded)
    std::uint64_t at_or_below = 0;  // ordered triples with b(t) <= b_star (ties included)
    double fraction = 0.0;          // below / total; 0 by convention when b_star = +inf
    BStarResult b_star;
};

/// b-loadings for the certificate, or nullopt when they are undefined because
/// the Perron vector of Z_n is constant (n = 2). No certificate exists then:
/// b_star is the +inf sentinel and nothing counts as below it.
std::optional<LoadingVector> certificate_loadings(const PartitionTable& table);

/// Counts ordered triples strictly below b_star, and those tied with it.
CertificateFraction certificate_fraction(const LoadingVector& b_loading, const BStarResult& bstar);

/// Full pipeline for n: table, b-loadings, b_star search, count.
CertificateFraction certificate_fraction(int n, unsigned threads);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::uint64_t nonzero = 0;  // ordered triples with g != 0
    std::uint64_t zero = 0;     // ordered triples with g = 0
};

/// Histogram of triple loadings over [0, 300] split by g = 0 / g != 0.
std::vector<HistogramBin> loading_histogram(const KroneckerCube& cube, const LoadingVector& loading,
                                            std::size_t bins);

enum class DistributionFamily { normal, gamma };

struct DistributionFit {
    DistributionFamily family = DistributionFamily::normal;
    double param1 = 0.0;  // normal: mean, gamma: shape
    double param2 = 0.0;  // normal: sd,   gamma: scale
    double ks_statistic = 0.0;
};

/// Method-of-moments fit plus the Kolmogorov-Smirnov distance between the
/// empirical and fitted CDFs. Needs at least 100 samples and non-zero
/// variance; gamma also needs a positive mean.
DistributionFit fit_distribution(std::vector<double> samples, DistributionFamily family);

}  // namespace mathds
