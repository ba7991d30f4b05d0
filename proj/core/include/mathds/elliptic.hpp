#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mathds/kronecker.hpp"  // BigInt

namespace mathds {

/// Largest prime accepted by the point counter (naive O(p) per prime).
inline constexpr std::uint32_t kMaxPointCountPrime = 100000;

/// Largest k for ap_vector (p_1000 = 7919).
inline constexpr std::size_t kMaxApPrimes = 1000;

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6, assumed globally minimal.
/// Conductor and rank are ingested labels; this library never computes them.
struct CurveRecord {
    std::string label;
    std::array<std::int64_t, 5> a{};  // a1, a2, a3, a4, a6
    std::uint64_t conductor = 1;
    int rank = 0;
    std::optional<std::vector<int>> ap;
};

BigInt discriminant(const CurveRecord& curve);

struct PointCount {
    std::uint64_t n_points = 0;  // non-singular projective points, incl. infinity
    bool smooth = true;          // false when the reduction is singular
};

bool is_prime(std::uint64_t n) noexcept;

/// First k primes.
std::vector<std::uint32_t> first_primes(std::size_t k);

/// Points of the reduction mod p. For p > 3 uses a table of square roots and
/// the completed square; p = 2, 3 go through count_points_exhaustive. At bad
/// reduction the unique singular point is excluded. Throws DomainError for
/// non-prime or too large p.
PointCount count_points_mod_p(const CurveRecord& curve, std::uint32_t p);

/// Reference counter: tries every (x, y) in F_p^2, keeps points where the
/// partial derivatives do not both vanish, adds the point at infinity.
PointCount count_points_exhaustive(const CurveRecord& curve, std::uint32_t p);

/// a_p of y^2 = x^3 + a x + b for p > 3 as -sum_x (x^3+ax+b | p), with the
/// Legendre symbol from Euler's criterion. Independent of the table path.
int ap_character_sum(std::int64_t a, std::int64_t b, std::uint32_t p);

/// Good p (p does not divide the conductor): p + 1 - #E(F_p). Bad p: p minus
/// the non-singular count, giving +1 / -1 / 0 for split / non-split /
/// additive reduction. Throws DataError when the labels and the model
/// disagree (singular reduction at a good prime, smooth reduction or a value
/// outside {-1,0,1} at a bad prime), which is how a non-minimal model shows.
int ap(const CurveRecord& curve, std::uint32_t p);

/// (a_{p_1}, ..., a_{p_k}). Checks the Hasse bound at good primes.
std::vector<int> ap_vector(const CurveRecord& curve, std::size_t k);

/// ap_vector through a per-curve cache file <dir>/<label>.k<k>.csv of `p,ap`
/// rows with a checksum sidecar. A missing or corrupt entry is recomputed
/// and replaced atomically.
std::vector<int> ap_vector_cached(const CurveRecord& curve, std::size_t k, const std::filesystem::path& dir);

struct CurveFilter {
    std::optional<std::pair<std::uint64_t, std::uint64_t>> conductor_range;  // inclusive
    std::optional<std::vector<int>> ranks;
    std::optional<std::size_t> max_count;
    bool balanced = false;
    std::uint64_t seed = 0;
};

struct IngestReport {
    std::size_t rows = 0;
    std::size_t rejected_singular = 0;
    std::vector<std::size_t> rejected_lines;
};

/// Parses the curve CSV (header `label,a1,a2,a3,a4,a6,conductor,rank`).
/// Throws DataError naming the line of the first malformed row. Rows with
/// zero discriminant are rejected and reported.
std::vector<CurveRecord> read_curves(std::istream& in, IngestReport* report = nullptr);

/// read_curves + filtering. Conductor range and rank filters first; then,
/// when balanced, an equal number per requested rank (max_count / #ranks, or
/// the smallest class) drawn uniformly with the seed; otherwise max_count
/// drawn uniformly. Selected curves keep file order.
std::vector<CurveRecord> ingest_curves(const std::filesystem::path& path, const CurveFilter& filter,
                                       IngestReport* report = nullptr);
std::vector<CurveRecord> filter_curves(std::vector<CurveRecord> curves, const CurveFilter& filter);

/// One a_p vector per curve over the first k primes.
struct ApMatrix {
    std::vector<std::uint32_t> primes;
    std::vector<std::vector<int>> rows;
    std::vector<std::string> labels;
    std::vector<std::uint64_t> conductors;
    std::vector<int> ranks;

    std::size_t size() const noexcept { return rows.size(); }
    std::size_t k() const noexcept { return primes.size(); }
};

/// Computes (or loads from `cache_dir` when given) every curve's vector,
/// parallel over curves.
ApMatrix build_ap_matrix(const std::vector<CurveRecord>& curves, std::size_t k, unsigned threads,
                         const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

}  // namespace mathds
