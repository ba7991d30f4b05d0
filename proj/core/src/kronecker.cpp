#include "mathds/kronecker.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mathds/errors.hpp"

namespace mathds {
namespace {

// Row of `table` whose non-zero parts equal `trimmed`; rows are strictly
// decreasing in lex order with implicit trailing zeros.
std::size_t find_row(const PartitionTable& table, std::span<const int> trimmed) {
    auto less = [&](const Partition& row) {
        // true when row > trimmed lexicographically (row comes first)
        auto parts = row.parts();
        for (std::size_t i = 0; i < parts.size(); ++i) {
            int t = i < trimmed.size() ? trimmed[i] : 0;
            if (parts[i] != t) return parts[i] > t;
        }
        return false;
    };
    std::size_t lo = 0, hi = table.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (less(table[mid])) lo = mid + 1;
        else hi = mid;
    }
    if (lo == table.size()) throw ConsistencyError("character_table: shape lookup failed");
    return lo;
}

// Character table of S_m for every m <= n, built bottom-up. Level 0 is the
// trivial group with a single 1x1 table.
struct Level {
    PartitionTable table;
    std::size_t p = 1;
    std::vector<std::int64_t> chi{1};
};

}  // namespace

CharacterTable::CharacterTable(int n, std::vector<std::int64_t> chi, std::vector<BigInt> class_sizes)
    : n_(n), partitions_(enumerate_partitions(n)), chi_(std::move(chi)), class_sizes_(std::move(class_sizes)),
      order_(factorial(n)) {
    const std::size_t p = partitions_.size();
    if (chi_.size() != p * p || class_sizes_.size() != p)
        throw DataError("character table: dimensions do not match p(n) for n=" + std::to_string(n));
}

std::vector<std::int64_t> CharacterTable::dimensions() const {
    std::vector<std::int64_t> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = (*this)(i, size() - 1);
    return out;
}

BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

BigInt centralizer_order(const Partition& rho) {
    std::vector<int> mult(static_cast<std::size_t>(rho.n()) + 1, 0);
    for (int part : rho.parts())
        if (part > 0) ++mult[static_cast<std::size_t>(part)];
    BigInt z = 1;
    for (std::size_t i = 1; i < mult.size(); ++i)
        for (int k = 1; k <= mult[i]; ++k) z *= BigInt(i) * k;
    return z;
}

CharacterTable character_table(int n) {
    if (n < 1) throw DomainError("character_table: n must be positive");
    if (n > kMaxCharacterTableN)
        throw ResourceError("character_table: n=" + std::to_string(n) + " exceeds limit " +
                            std::to_string(kMaxCharacterTableN));

    std::vector<Level> levels(static_cast<std::size_t>(n) + 1);
    std::vector<int> beta, shape;
    for (int m = 1; m <= n; ++m) {
        Level& cur = levels[static_cast<std::size_t>(m)];
        cur.table = enumerate_partitions(m);
        cur.p = cur.table.size();
        cur.chi.assign(cur.p * cur.p, 0);

        for (std::size_t c = 0; c < cur.p; ++c) {
            const Partition& sigma = cur.table[c];
            const int r = sigma[0];
            const int rest_m = m - r;
            const Level& prev = levels[static_cast<std::size_t>(rest_m)];
            std::size_t rest_col = 0;
            if (rest_m > 0) {
                auto tail = sigma.trimmed();
                tail.erase(tail.begin());
                rest_col = find_row(prev.table, tail);
            }

            for (std::size_t row = 0; row < cur.p; ++row) {
                const Partition& lambda = cur.table[row];
                const int len = lambda.length();
                beta.resize(static_cast<std::size_t>(len));
                for (int i = 0; i < len; ++i) beta[static_cast<std::size_t>(i)] = lambda[static_cast<std::size_t>(i)] + (len - 1 - i);

                std::int64_t value = 0;
                for (int i = 0; i < len; ++i) {
                    const int from = beta[static_cast<std::size_t>(i)];
                    const int to = from - r;
                    if (to < 0) continue;
                    // beta is strictly decreasing: beads between `to` and `from`
                    // sit at indices i+1 .. j-1 where beta[j] <= to.
                    int j = i + 1;
                    while (j < len && beta[static_cast<std::size_t>(j)] > to) ++j;
                    if (j < len && beta[static_cast<std::size_t>(j)] == to) continue;  // occupied
                    const int height = j - i - 1;

                    // New bead set: remove `from`, insert `to` at position j-1.
                    shape.clear();
                    int pos = 0;
                    auto emit = [&](int b) {
                        int part = b - (len - 1 - pos);
                        ++pos;
                        if (part > 0) shape.push_back(part);
                    };
                    for (int k = 0; k < len; ++k) {
                        if (k == i) continue;
                        if (k == j) emit(to);
                        emit(beta[static_cast<std::size_t>(k)]);
                    }
                    if (j == len) emit(to);

                    std::int64_t sub = 1;
                    if (rest_m > 0) {
                        std::size_t sub_row = find_row(prev.table, shape);
                        sub = prev.chi[sub_row * prev.p + rest_col];
                    }
                    value += (height % 2 == 0) ? sub : -sub;
                }
                cur.chi[row * cur.p + c] = value;
            }
        }
    }

    Level& top = levels[static_cast<std::size_t>(n)];
    std::vector<BigInt> sizes(top.p);
    const BigInt order = factorial(n);
    for (std::size_t c = 0; c < top.p; ++c) sizes[c] = order / centralizer_order(top.table[c]);
    return CharacterTable(n, std::move(top.chi), std::move(sizes));
}

std::uint64_t kronecker_coefficient(std::size_t lambda, std::size_t mu, std::size_t nu,
                                    const CharacterTable& table) {
    const std::size_t p = table.size();
    if (lambda >= p || mu >= p || nu >= p) throw DomainError("kronecker_coefficient: index out of range");
    BigInt sum = 0;
    for (std::size_t c = 0; c < p; ++c) {
        std::int64_t a = table(lambda, c), b = table(mu, c), d = table(nu, c);
        if (a == 0 || b == 0 || d == 0) continue;
        sum += table.class_size(c) * a * b * d;
    }
    BigInt q, r;
    boost::multiprecision::divide_qr(sum, table.group_order(), q, r);
    if (r != 0 || q < 0)
        throw ConsistencyError("kronecker_coefficient: character sum is not a non-negative multiple of n!");
    return q.convert_to<std::uint64_t>();
}

std::uint64_t kronecker_coefficient(const Partition& lambda, const Partition& mu, const Partition& nu,
                                    const CharacterTable& table) {
    if (lambda.n() != table.n() || mu.n() != table.n() || nu.n() != table.n())
        throw DomainError("kronecker_coefficient: partitions must all be of n=" + std::to_string(table.n()));
    const auto& parts = table.partitions();
    return kronecker_coefficient(index_of(lambda, parts), index_of(mu, parts), index_of(nu, parts), table);
}

void write_character_table(std::ostream& out, const CharacterTable& table) {
    const std::size_t p = table.size();
    out << table.n() << ' ' << p << '\n';
    for (std::size_t c = 0; c < p; ++c) out << (c ? " " : "") << table.class_size(c);
    out << '\n';
    for (std::size_t r = 0; r < p; ++r) {
        auto row = table.row(r);
        for (std::size_t c = 0; c < p; ++c) out << (c ? " " : "") << row[c];
        out << '\n';
    }
}

CharacterTable read_character_table(std::istream& in) {
    int n = 0;
    std::size_t p = 0;
    if (!(in >> n >> p) || n < 1 || n > kMaxCharacterTableN)
        throw DataError("character table file: bad header");
    std::vector<BigInt> sizes(p);
    std::string tok;
    for (auto& s : sizes) {
        if (!(in >> tok)) throw DataError("character table file: truncated class sizes");
        try {
            s = BigInt(tok);
        } catch (const std::exception&) {
            throw DataError("character table file: bad class size '" + tok + "'");
        }
    }
    std::vector<std::int64_t> chi(p * p);
    for (auto& v : chi)
        if (!(in >> v)) throw DataError("character table file: truncated character values");
    if (in >> tok) throw DataError("character table file: trailing data");
    return CharacterTable(n, std::move(chi), std::move(sizes));
}

}  // namespace mathds
