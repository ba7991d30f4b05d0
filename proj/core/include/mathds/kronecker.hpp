#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mathds/partitions.hpp"

namespace mathds {

using BigInt = boost::multiprecision::cpp_int;

/// Largest n for which character_table() will build a table (p(22) = 1002).
inline constexpr int kMaxCharacterTableN = 22;

/// Exact character table of S_n. Rows are irreducibles, columns are
/// conjugacy classes (cycle types); both follow the decreasing lexicographic
/// order of enumerate_partitions(n), so the identity class (1^n) is the last
/// column.
class CharacterTable {
public:
    CharacterTable() = default;

    /// Takes ownership of a p(n) x p(n) row-major value matrix and the class
    /// sizes. Throws DataError when the shapes disagree.
    CharacterTable(int n, std::vector<std::int64_t> chi, std::vector<BigInt> class_sizes);

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return partitions_.size(); }
    const PartitionTable& partitions() const noexcept { return partitions_; }

    std::int64_t operator()(std::size_t irrep, std::size_t cls) const noexcept {
        return chi_[irrep * size() + cls];
    }
    std::span<const std::int64_t> row(std::size_t irrep) const noexcept {
        return {chi_.data() + irrep * size(), size()};
    }
    std::span<const std::int64_t> values() const noexcept { return chi_; }

    const BigInt& class_size(std::size_t cls) const noexcept { return class_sizes_[cls]; }
    std::span<const BigInt> class_sizes() const noexcept { return class_sizes_; }

    /// n!
    const BigInt& group_order() const noexcept { return order_; }

    /// Character degrees f_lambda, i.e. the column of the identity class.
    std::vector<std::int64_t> dimensions() const;

    friend bool operator==(const CharacterTable& a, const CharacterTable& b) {
        return a.n_ == b.n_ && a.chi_ == b.chi_ && a.class_sizes_ == b.class_sizes_;
    }

private:
    int n_ = 0;
    PartitionTable partitions_;
    std::vector<std::int64_t> chi_;
    std::vector<BigInt> class_sizes_;
    BigInt order_;
};

/// prod_i i^{m_i} * m_i!, the centralizer order of a permutation of cycle
/// type rho.
BigInt centralizer_order(const Partition& rho);

BigInt factorial(int n);

/// Murnaghan-Nakayama table. The recursion strips a border strip of length
/// rho_1 and is memoised on (remaining shape, remaining cycle type), which
/// amounts to building the tables of S_m for every m <= n bottom-up.
/// Throws ResourceError when n > kMaxCharacterTableN, DomainError for n < 1.
CharacterTable character_table(int n);

/// Second, independent construction for n <= 8: permutation characters of
/// the Young subgroups (fixed tabloids) inverted through the unitriangular
/// Kostka matrix.
CharacterTable permutation_character_oracle(int n);

/// Compares the Murnaghan-Nakayama table with the oracle and throws
/// ConsistencyError on the first disagreement.
void verify_character_table(int n);

/// Kostka number K_{lambda,mu}: semistandard tableaux of shape lambda and
/// content mu.
std::int64_t kostka_number(const Partition& lambda, const Partition& mu);

/// g_{lambda,mu}^nu = (1/n!) sum_rho |C_rho| chi_lambda chi_mu chi_nu, in exact
/// big-integer arithmetic. Throws DomainError when the partitions are not all
/// of table.n(), ConsistencyError when the sum is not a non-negative multiple
/// of n!.
std::uint64_t kronecker_coefficient(const Partition& lambda, const Partition& mu,
                                    const Partition& nu, const CharacterTable& table);
std::uint64_t kronecker_coefficient(std::size_t lambda, std::size_t mu, std::size_t nu,
                                    const CharacterTable& table);

/// Cache file: "n p" header line, one line of class sizes, then p rows of
/// p decimal integers, whitespace separated.
void write_character_table(std::ostream& out, const CharacterTable& table);
CharacterTable read_character_table(std::istream& in);

}  // namespace mathds
