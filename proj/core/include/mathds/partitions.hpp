#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mathds {

/// Largest n accepted by enumerate_partitions. p(40) = 37338 rows.
inline constexpr int kMaxPartitionN = 40;

/// A partition of n stored as a weakly decreasing vector of exactly n
/// non-negative parts (zero padded), e.g. (5,1) of 6 is (5,1,0,0,0,0).
class Partition {
public:
    Partition() = default;

    /// Validates and zero-pads `parts` to length `n`. Throws DomainError if
    /// the parts are not weakly decreasing, negative, longer than n, or do
    /// not sum to n.
    Partition(std::vector<int> parts, int n);

    int n() const noexcept { return static_cast<int>(parts_.size()); }
    std::span<const int> parts() const noexcept { return parts_; }
    int operator[](std::size_t i) const noexcept { return parts_[i]; }

    /// Number of non-zero parts.
    int length() const noexcept;

    /// Non-zero parts only.
    std::vector<int> trimmed() const;

    friend bool operator==(const Partition&, const Partition&) = default;
    friend std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
        return a.parts_ <=> b.parts_;
    }

private:
    std::vector<int> parts_;
};

/// All partitions of n, strictly decreasing in lexicographic order: row 0 is
/// (n), the last row is (1^n).
class PartitionTable {
public:
    PartitionTable() = default;
    PartitionTable(int n, std::vector<Partition> rows);

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return rows_.size(); }
    const Partition& operator[](std::size_t i) const noexcept { return rows_[i]; }
    auto begin() const noexcept { return rows_.begin(); }
    auto end() const noexcept { return rows_.end(); }

    /// Dense p(n) x n matrix of parts, row-major.
    std::vector<int> matrix() const;

private:
    int n_ = 0;
    std::vector<Partition> rows_;
};

/// Enumerates the partitions of n in decreasing lexicographic order.
/// Requires 1 <= n <= kMaxPartitionN.
PartitionTable enumerate_partitions(int n);

/// Transpose of the Young diagram, zero-padded to the same n.
Partition conjugate(const Partition& lambda);

/// 0-based row of `lambda` in `table`. Throws DomainError when lambda is not
/// a partition of table.n().
std::size_t index_of(const Partition& lambda, const PartitionTable& table);

/// Text form: non-zero parts joined by commas, e.g. "12,4,2".
std::string to_string(const Partition& lambda);

/// Parses the comma text form and zero-pads to n. Throws DomainError on
/// malformed text or when the parts do not form a partition of n.
Partition parse_partition(std::string_view text, int n);

}  // namespace mathds
