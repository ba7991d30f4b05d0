#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mathds/kronecker.hpp"

namespace mathds {

/// One Kronecker coefficient g_{lambda,mu}^nu; partitions are row indices
/// into enumerate_partitions(n).
struct TripleRecord {
    std::uint16_t lambda = 0;
    std::uint16_t mu = 0;
    std::uint16_t nu = 0;
    std::uint64_t g = 0;

    friend bool operator==(const TripleRecord&, const TripleRecord&) = default;
};

/// Fast evaluator for many coefficients of one table. Works modulo the
/// Mersenne prime 2^61 - 1 with weights 1/z_rho; since 0 <= g <= min(f) is far
/// below the modulus the residue is the exact value. Every result is checked
/// against that bound, so a corrupt table surfaces as ConsistencyError rather
/// than a wrong count.
class KroneckerKernel {
public:
    static constexpr std::uint64_t kModulus = (std::uint64_t{1} << 61) - 1;

    explicit KroneckerKernel(const CharacterTable& table);

    std::size_t size() const noexcept { return p_; }

    /// w_rho = chi_lambda(rho) chi_mu(rho) / z_rho mod P, reused for every nu.
    void pair_weights(std::size_t lambda, std::size_t mu, std::span<std::uint64_t> out) const;

    /// g for (lambda, mu, nu) given pair_weights(lambda, mu).
    std::uint64_t evaluate(std::span<const std::uint64_t> weights, std::size_t lambda, std::size_t mu,
                           std::size_t nu) const;

    std::uint64_t operator()(std::size_t lambda, std::size_t mu, std::size_t nu) const;

    std::span<const std::int64_t> dimensions() const noexcept { return dims_; }

private:
    std::size_t p_ = 0;
    std::vector<std::int64_t> chi_;      // row-major copy of the table
    std::vector<std::uint64_t> chi_mod_;  // residues of chi_
    std::vector<std::uint64_t> inv_z_;    // 1 / z_rho mod P
    std::vector<std::int64_t> dims_;
};

/// g over all unordered triples lambda <= mu <= nu (index order).
class KroneckerCube {
public:
    KroneckerCube() = default;
    explicit KroneckerCube(std::size_t p);

    std::size_t size() const noexcept { return p_; }

    /// Any argument order.
    std::uint64_t operator()(std::size_t a, std::size_t b, std::size_t c) const noexcept {
        return g_[packed(a, b, c)];
    }
    void set(std::size_t a, std::size_t b, std::size_t c, std::uint64_t g) noexcept { g_[packed(a, b, c)] = g; }

    /// Index of a sorted triple i <= j <= k in tetrahedral order.
    static std::size_t packed_sorted(std::size_t i, std::size_t j, std::size_t k) noexcept {
        return k * (k + 1) * (k + 2) / 6 + j * (j + 1) / 2 + i;
    }
    static std::size_t packed(std::size_t a, std::size_t b, std::size_t c) noexcept;

    /// Number of unordered triples, C(p+2, 3).
    std::size_t unordered_count() const noexcept { return g_.size(); }

private:
    std::size_t p_ = 0;
    std::vector<std::uint64_t> g_;
};

/// Evaluates every unordered triple, parallel over lambda.
KroneckerCube compute_kronecker_cube(const CharacterTable& table, unsigned threads);

/// Visits all p^3 ordered triples in (lambda, mu, nu) lexicographic index order.
void for_each_triple(const KroneckerCube& cube, const std::function<void(const TripleRecord&)>& visit);

struct BatchMode {
    enum class Kind { all, sampled };
    Kind kind = Kind::all;
    std::size_t count = 0;  // per class, sampled mode
    std::uint64_t seed = 0;

    static BatchMode all() { return {}; }
    static BatchMode sampled(std::size_t count, std::uint64_t seed) { return {Kind::sampled, count, seed}; }
};

struct BatchResult {
    std::vector<TripleRecord> records;
    /// Sampled mode: set when a class held fewer than `count` distinct ordered
    /// triples and sampling fell back to drawing with replacement.
    bool with_replacement = false;
    std::size_t available_zero = 0;
    std::size_t available_nonzero = 0;
};

/// all: p^3 records in lexicographic order. sampled: `count` records with
/// g = 0 followed by `count` with g != 0, each drawn uniformly from the
/// ordered triples of its class without replacement (with replacement plus a
/// warning flag when the class is too small). Deterministic in the seed.
BatchResult batch_kronecker(const CharacterTable& table, const BatchMode& mode, unsigned threads);

/// Same as batch_kronecker but on a precomputed cube.
BatchResult batch_kronecker(const KroneckerCube& cube, const BatchMode& mode);

}  // namespace mathds
