#include "mathds/kronecker_batch.hpp"

#include <algorithm>
#include <string>

#include "mathds/errors.hpp"
#include "mathds/parallel.hpp"
#include "mathds/random.hpp"

namespace mathds {
namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

constexpr u64 P = KroneckerKernel::kModulus;

u64 reduce(u128 x) {
    u64 r = static_cast<u64>(x & P) + static_cast<u64>(x >> 61);
    r = (r & P) + (r >> 61);
    return r == P ? 0 : r;
}

u64 mulmod(u64 a, u64 b) { return reduce(static_cast<u128>(a) * b); }

u64 powmod(u64 base, u64 e) {
    u64 r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, base);
        base = mulmod(base, base);
        e >>= 1;
    }
    return r;
}

u64 to_residue(std::int64_t v) {
    i128 r = static_cast<i128>(v) % static_cast<i128>(P);
    if (r < 0) r += P;
    return static_cast<u64>(r);
}

u64 to_residue(const BigInt& v) {
    BigInt r = v % BigInt(P);
    if (r < 0) r += P;
    return r.convert_to<u64>();
}

}  // namespace

KroneckerKernel::KroneckerKernel(const CharacterTable& table)
    : p_(table.size()), chi_(table.values().begin(), table.values().end()), dims_(table.dimensions()) {
    chi_mod_.resize(chi_.size());
    for (std::size_t i = 0; i < chi_.size(); ++i) chi_mod_[i] = to_residue(chi_[i]);
    inv_z_.resize(p_);
    for (std::size_t c = 0; c < p_; ++c) {
        const u64 z = to_residue(centralizer_order(table.partitions()[c]));
        if (z == 0) throw ConsistencyError("KroneckerKernel: centralizer order divisible by modulus");
        inv_z_[c] = powmod(z, P - 2);
    }
}

void KroneckerKernel::pair_weights(std::size_t lambda, std::size_t mu, std::span<u64> out) const {
    const u64* a = chi_mod_.data() + lambda * p_;
    const u64* b = chi_mod_.data() + mu * p_;
    for (std::size_t c = 0; c < p_; ++c) out[c] = mulmod(mulmod(a[c], b[c]), inv_z_[c]);
}

u64 KroneckerKernel::evaluate(std::span<const u64> weights, std::size_t lambda, std::size_t mu,
                              std::size_t nu) const {
    const std::int64_t* x = chi_.data() + nu * p_;
    // |w * chi| < 2^61 * 2^36, so p <= 1002 terms never overflow 127 bits.
    i128 acc = 0;
    for (std::size_t c = 0; c < p_; ++c) acc += static_cast<i128>(weights[c]) * x[c];
    i128 r = acc % static_cast<i128>(P);
    if (r < 0) r += P;
    const u64 g = static_cast<u64>(r);
    const auto bound = static_cast<u64>(std::min({dims_[lambda], dims_[mu], dims_[nu]}));
    if (g > bound)
        throw ConsistencyError("KroneckerKernel: coefficient residue exceeds min dimension bound at (" +
                               std::to_string(lambda) + "," + std::to_string(mu) + "," + std::to_string(nu) +
                               ")");
    return g;
}

u64 KroneckerKernel::operator()(std::size_t lambda, std::size_t mu, std::size_t nu) const {
    std::vector<u64> w(p_);
    pair_weights(lambda, mu, w);
    return evaluate(w, lambda, mu, nu);
}

KroneckerCube::KroneckerCube(std::size_t p) : p_(p), g_(p * (p + 1) * (p + 2) / 6, 0) {}

std::size_t KroneckerCube::packed(std::size_t a, std::size_t b, std::size_t c) noexcept {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return packed_sorted(a, b, c);
}

KroneckerCube compute_kronecker_cube(const CharacterTable& table, unsigned threads) {
    const KroneckerKernel kernel(table);
    const std::size_t p = kernel.size();
    KroneckerCube cube(p);
    // Work item i covers every triple whose smallest index is i, so writes
    // from different items never overlap.
    parallel_for(p, threads, [&](std::size_t i) {
        std::vector<u64> w(p);
        for (std::size_t j = i; j < p; ++j) {
            kernel.pair_weights(i, j, w);
            for (std::size_t k = j; k < p; ++k) cube.set(i, j, k, kernel.evaluate(w, i, j, k));
        }
    });
    return cube;
}

void for_each_triple(const KroneckerCube& cube, const std::function<void(const TripleRecord&)>& visit) {
    const std::size_t p = cube.size();
    TripleRecord rec;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k) {
                rec.lambda = static_cast<std::uint16_t>(i);
                rec.mu = static_cast<std::uint16_t>(j);
                rec.nu = static_cast<std::uint16_t>(k);
                rec.g = cube(i, j, k);
                visit(rec);
            }
}

BatchResult batch_kronecker(const KroneckerCube& cube, const BatchMode& mode) {
    BatchResult result;
    const std::size_t p = cube.size();
    if (mode.kind == BatchMode::Kind::all) {
        result.records.reserve(p * p * p);
        for_each_triple(cube, [&](const TripleRecord& r) { result.records.push_back(r); });
        return result;
    }

    std::vector<u64> zero, nonzero;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k) {
                const u64 id = (i * p + j) * p + k;
                (cube(i, j, k) == 0 ? zero : nonzero).push_back(id);
            }
    result.available_zero = zero.size();
    result.available_nonzero = nonzero.size();

    Rng rng(mode.seed);
    auto draw = [&](std::vector<u64>& pool) {
        if (pool.empty() && mode.count > 0)
            throw DataError("batch_kronecker: a label class is empty at n; cannot sample");
        std::vector<u64> picked;
        picked.reserve(mode.count);
        if (pool.size() >= mode.count) {
            // Partial Fisher-Yates: first `count` slots become the sample.
            for (std::size_t s = 0; s < mode.count; ++s) {
                const std::size_t r = s + rng.below(pool.size() - s);
                std::swap(pool[s], pool[r]);
                picked.push_back(pool[s]);
            }
        } else {
            result.with_replacement = true;
            for (std::size_t s = 0; s < mode.count; ++s) picked.push_back(pool[rng.below(pool.size())]);
        }
        for (u64 id : picked) {
            TripleRecord rec;
            rec.nu = static_cast<std::uint16_t>(id % p);
            rec.mu = static_cast<std::uint16_t>((id / p) % p);
            rec.lambda = static_cast<std::uint16_t>(id / (p * p));
            rec.g = cube(rec.lambda, rec.mu, rec.nu);
            result.records.push_back(rec);
        }
    };
    result.records.reserve(2 * mode.count);
    draw(zero);
    draw(nonzero);
    return result;
}

BatchResult batch_kronecker(const CharacterTable& table, const BatchMode& mode, unsigned threads) {
    return batch_kronecker(compute_kronecker_cube(table, threads), mode);
}

}  // namespace mathds
