#include <string>

#include "mathds/errors.hpp"
#include "mathds/kronecker.hpp"

namespace mathds {
namespace {

// Number of ways to place the (labelled) cycles of a permutation into rows
// with prescribed sizes: the number of tabloids it fixes.
std::int64_t fixed_tabloids(const std::vector<int>& cycles, std::size_t next, std::vector<int>& room) {
    if (next == cycles.size()) return 1;
    std::int64_t total = 0;
    const int len = cycles[next];
    for (auto& r : room) {
        if (r < len) continue;
        r -= len;
        total += fixed_tabloids(cycles, next + 1, room);
        r += len;
    }
    return total;
}

// Kostka numbers by peeling horizontal strips for the largest entry.
std::int64_t kostka_rec(std::vector<int> shape, std::vector<int> content) {
    while (!content.empty() && content.back() == 0) content.pop_back();
    while (!shape.empty() && shape.back() == 0) shape.pop_back();
    if (content.empty()) return shape.empty() ? 1 : 0;
    const int strip = content.back();
    content.pop_back();

    std::int64_t total = 0;
    std::vector<int> inner(shape.size());
    // Choose inner[i] in [shape[i+1], shape[i]] with total removal == strip.
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
        if (i == shape.size()) {
            if (left == 0) total += kostka_rec(inner, content);
            return;
        }
        const int lo = i + 1 < shape.size() ? shape[i + 1] : 0;
        for (int v = shape[i]; v >= lo; --v) {
            const int take = shape[i] - v;
            if (take > left) break;
            inner[i] = v;
            self(self, i + 1, left - take);
        }
    };
    rec(rec, 0, strip);
    return total;
}

}  // namespace

std::int64_t kostka_number(const Partition& lambda, const Partition& mu) {
    if (lambda.n() != mu.n()) throw DomainError("kostka_number: partitions of different n");
    return kostka_rec(lambda.trimmed(), mu.trimmed());
}

CharacterTable permutation_character_oracle(int n) {
    if (n < 1 || n > 8) throw DomainError("permutation_character_oracle: n must lie in [1, 8]");
    const PartitionTable parts = enumerate_partitions(n);
    const std::size_t p = parts.size();

    // perm[mu][rho] = number of tabloids of shape mu fixed by a rho-permutation.
    std::vector<std::int64_t> perm(p * p);
    for (std::size_t mu = 0; mu < p; ++mu)
        for (std::size_t rho = 0; rho < p; ++rho) {
            auto room = parts[mu].trimmed();
            perm[mu * p + rho] = fixed_tabloids(parts[rho].trimmed(), 0, room);
        }

    // perm^mu = sum_{lambda >= mu} K_{lambda mu} chi^lambda with K_{mu mu} = 1,
    // and lambda dominating mu implies lambda precedes mu in lex order.
    std::vector<std::int64_t> chi(p * p);
    for (std::size_t mu = 0; mu < p; ++mu) {
        for (std::size_t rho = 0; rho < p; ++rho) chi[mu * p + rho] = perm[mu * p + rho];
        for (std::size_t lambda = 0; lambda < mu; ++lambda) {
            const std::int64_t k = kostka_number(parts[lambda], parts[mu]);
            if (k == 0) continue;
            for (std::size_t rho = 0; rho < p; ++rho) chi[mu * p + rho] -= k * chi[lambda * p + rho];
        }
        if (kostka_number(parts[mu], parts[mu]) != 1)
            throw ConsistencyError("permutation_character_oracle: Kostka diagonal is not 1");
    }

    std::vector<BigInt> sizes(p);
    const BigInt order = factorial(n);
    for (std::size_t c = 0; c < p; ++c) sizes[c] = order / centralizer_order(parts[c]);
    return CharacterTable(n, std::move(chi), std::move(sizes));
}

void verify_character_table(int n) {
    const CharacterTable mn = character_table(n);
    const CharacterTable oracle = permutation_character_oracle(n);
    const std::size_t p = mn.size();
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c)
            if (mn(r, c) != oracle(r, c))
                throw ConsistencyError("character table mismatch at n=" + std::to_string(n) + " irrep " +
                                       to_string(mn.partitions()[r]) + " class " +
                                       to_string(mn.partitions()[c]) + ": " + std::to_string(mn(r, c)) +
                                       " vs " + std::to_string(oracle(r, c)));
}

}  // namespace mathds
