#include "mathds/partitions.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "mathds/errors.hpp"

namespace mathds {

Partition::Partition(std::vector<int> parts, int n) {
    if (n < 1) throw DomainError("partition: n must be positive");
    if (static_cast<int>(parts.size()) > n)
        throw DomainError("partition: more than n parts");
    long sum = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] < 0) throw DomainError("partition: negative part");
        if (i > 0 && parts[i] > parts[i - 1])
            throw DomainError("partition: parts must be weakly decreasing");
        sum += parts[i];
    }
    if (sum != n) throw DomainError("partition: parts do not sum to n");
    parts.resize(static_cast<std::size_t>(n), 0);
    parts_ = std::move(parts);
}

int Partition::length() const noexcept {
    return static_cast<int>(std::count_if(parts_.begin(), parts_.end(), [](int p) { return p > 0; }));
}

std::vector<int> Partition::trimmed() const {
    return {parts_.begin(), parts_.begin() + length()};
}

PartitionTable::PartitionTable(int n, std::vector<Partition> rows) : n_(n), rows_(std::move(rows)) {}

std::vector<int> PartitionTable::matrix() const {
    std::vector<int> out;
    out.reserve(rows_.size() * static_cast<std::size_t>(n_));
    for (const auto& row : rows_) out.insert(out.end(), row.parts().begin(), row.parts().end());
    return out;
}

PartitionTable enumerate_partitions(int n) {
    if (n < 1 || n > kMaxPartitionN)
        throw DomainError("enumerate_partitions: n must lie in [1, " + std::to_string(kMaxPartitionN) + "]");

    std::vector<Partition> rows;
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    cur[0] = n;
    int len = 1;  // number of non-zero parts in cur
    while (true) {
        rows.emplace_back(cur, n);
        // Rightmost part larger than one.
        int i = len - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == 1) --i;
        if (i < 0) break;
        int rest = len - i;  // ones after position i plus the one taken from cur[i]
        int cap = --cur[static_cast<std::size_t>(i)];
        std::fill(cur.begin() + i + 1, cur.end(), 0);
        int pos = i + 1;
        while (rest > 0) {
            int take = std::min(cap, rest);
            cur[static_cast<std::size_t>(pos++)] = take;
            rest -= take;
        }
        len = pos;
    }
    return PartitionTable(n, std::move(rows));
}

Partition conjugate(const Partition& lambda) {
    const int n = lambda.n();
    std::vector<int> out(static_cast<std::size_t>(n), 0);
    for (int part : lambda.parts())
        for (int c = 0; c < part; ++c) ++out[static_cast<std::size_t>(c)];
    return Partition(std::move(out), n);
}

std::size_t index_of(const Partition& lambda, const PartitionTable& table) {
    if (lambda.n() != table.n())
        throw DomainError("index_of: partition of " + std::to_string(lambda.n()) +
                          " looked up in table for n=" + std::to_string(table.n()));
    // Rows are strictly decreasing, so search with the reversed comparison.
    auto it = std::lower_bound(table.begin(), table.end(), lambda,
                               [](const Partition& a, const Partition& b) { return a > b; });
    if (it == table.end() || *it != lambda) throw DomainError("index_of: partition not in table");
    return static_cast<std::size_t>(it - table.begin());
}

std::string to_string(const Partition& lambda) {
    std::string out;
    for (int part : lambda.parts()) {
        if (part == 0) break;
        if (!out.empty()) out += ',';
        out += std::to_string(part);
    }
    return out;
}

Partition parse_partition(std::string_view text, int n) {
    std::vector<int> parts;
    bool zero_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view tok = text.substr(pos, comma - pos);
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        int value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
            throw DomainError("parse_partition: malformed part in \"" + std::string(text) + "\"");
        if (value < 0 || (value > 0 && zero_seen))
            throw DomainError("parse_partition: invalid part in \"" + std::string(text) + "\"");
        if (value > 0) parts.push_back(value);
        else zero_seen = true;
        pos = comma + 1;
    }
    return Partition(std::move(parts), n);
}

}  // namespace mathds
