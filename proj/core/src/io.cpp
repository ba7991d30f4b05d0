#include "mathds/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "mathds/errors.hpp"

namespace mathds {
namespace {

std::string escape(std::string_view v) {
    std::string out;
    for (char c : v) {
        if (c == '%' || c == '=' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", static_cast<unsigned char>(c));
            out += buf;
        } else {
            out += c;
        }
    }
    return out;
}

std::string unescape(std::string_view v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == '%' && i + 2 < v.size()) {
            int code = 0;
            auto [ptr, ec] = std::from_chars(v.data() + i + 1, v.data() + i + 3, code, 16);
            if (ec != std::errc{} || ptr != v.data() + i + 3) throw DataError("metadata: bad escape");
            out += static_cast<char>(code);
            i += 2;
        } else if (v[i] == '%') {
            throw DataError("metadata: truncated escape");
        } else {
            out += v[i];
        }
    }
    return out;
}

std::string getline_checked(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(std::string(what) + ": unexpected end of file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

template <class T>
T parse_number(std::string_view s, const char* what) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError(std::string(what) + ": bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace

std::string format_metadata(const Metadata& meta) {
    std::string out = "#";
    for (const auto& [k, v] : meta) out += " " + escape(k) + "=" + escape(v);
    return out;
}

Metadata parse_metadata(std::string_view line) {
    if (line.empty() || line[0] != '#') throw DataError("metadata: line does not start with '#'");
    Metadata meta;
    std::size_t pos = 1;
    while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        if (pos >= line.size()) break;
        std::size_t end = line.find(' ', pos);
        if (end == std::string_view::npos) end = line.size();
        std::string_view tok = line.substr(pos, end - pos);
        const std::size_t eq = tok.find('=');
        if (eq == std::string_view::npos) throw DataError("metadata: token without '='");
        meta.emplace_back(unescape(tok.substr(0, eq)), unescape(tok.substr(eq + 1)));
        pos = end;
    }
    return meta;
}

std::optional<std::string> metadata_value(const Metadata& meta, std::string_view key) {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    return std::nullopt;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_checksummed(const std::filesystem::path& path, std::string_view content) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
    atomic_write(path, content);
    auto sidecar = path;
    sidecar += ".fnv1a";
    atomic_write(sidecar, std::string(buf) + "\n");
}

std::optional<std::string> read_checksummed(const std::filesystem::path& path) {
    auto sidecar = path;
    sidecar += ".fnv1a";
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || !std::filesystem::exists(sidecar, ec)) return std::nullopt;
    std::string content = read_file(path);
    std::string sum = read_file(sidecar);
    while (!sum.empty() && (sum.back() == '\n' || sum.back() == '\r')) sum.pop_back();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
    if (sum != buf) return std::nullopt;
    return content;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
    if (ec != std::errc{}) throw DomainError("format_fixed: value out of range");
    std::string s(buf, ptr);
    if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.00"
    return s;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw DomainError("format_double: conversion failed");
    return {buf, ptr};
}

std::vector<std::string> split_csv_line(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == sep) {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted) throw DataError("csv: unterminated quote");
    out.push_back(std::move(cur));
    return out;
}

TripleDatasetWriter::TripleDatasetWriter(std::ostream& out, const PartitionTable& table, const Metadata& meta)
    : out_(out) {
    names_.reserve(table.size());
    for (const auto& row : table) names_.push_back(to_string(row));
    out_ << format_metadata(meta) << '\n' << "lambda;mu;nu;g\n";
    buffer_.reserve(1 << 16);
}

void TripleDatasetWriter::write(const TripleRecord& rec) {
    buffer_.clear();
    buffer_ += names_[rec.lambda];
    buffer_ += ';';
    buffer_ += names_[rec.mu];
    buffer_ += ';';
    buffer_ += names_[rec.nu];
    buffer_ += ';';
    char num[24];
    auto [ptr, ec] = std::to_chars(num, num + sizeof num, rec.g);
    buffer_.append(num, ptr);
    buffer_ += '\n';
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    ++rows_;
}

TripleDataset read_triple_dataset(std::istream& in) {
    TripleDataset ds;
    ds.meta = parse_metadata(getline_checked(in, "triple dataset"));
    auto n_text = metadata_value(ds.meta, "n");
    if (!n_text) throw DataError("triple dataset: metadata lacks n");
    ds.n = parse_number<int>(*n_text, "triple dataset n");
    if (getline_checked(in, "triple dataset") != "lambda;mu;nu;g")
        throw DataError("triple dataset: expected header lambda;mu;nu;g");
    const PartitionTable table = enumerate_partitions(ds.n);
    std::string line;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line, ';');
        if (fields.size() != 4)
            throw DataError("triple dataset line " + std::to_string(lineno) + ": expected 4 fields");
        TripleRecord rec;
        try {
            rec.lambda = static_cast<std::uint16_t>(index_of(parse_partition(fields[0], ds.n), table));
            rec.mu = static_cast<std::uint16_t>(index_of(parse_partition(fields[1], ds.n), table));
            rec.nu = static_cast<std::uint16_t>(index_of(parse_partition(fields[2], ds.n), table));
        } catch (const DomainError& e) {
            throw DataError("triple dataset line " + std::to_string(lineno) + ": " + e.what());
        }
        rec.g = parse_number<std::uint64_t>(fields[3], "triple dataset g");
        ds.records.push_back(rec);
    }
    return ds;
}

void write_loadings_csv(std::ostream& out, const PartitionTable& table, std::span<const LoadingVector> columns,
                        const Metadata& meta) {
    for (const auto& c : columns)
        if (c.size() != table.size())
            throw DomainError("write_loadings_csv: loading vectors do not match the partition table");
    out << format_metadata(meta) << '\n' << "partition";
    for (const auto& c : columns) out << ',' << to_string(c.kind) << "_loading";
    out << '\n';
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << '"' << to_string(table[i]) << '"';
        for (const auto& c : columns) out << ',' << format_fixed(c[i], 2);
        out << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins, const Metadata& meta) {
    out << format_metadata(meta) << '\n' << "bin_left,bin_right,count_nonzero_g,count_zero_g\n";
    for (const auto& b : bins)
        out << format_double(b.left) << ',' << format_double(b.right) << ',' << b.nonzero << ',' << b.zero << '\n';
}

std::vector<HistogramBin> read_histogram_csv(std::istream& in, Metadata* meta) {
    Metadata m = parse_metadata(getline_checked(in, "histogram"));
    if (meta) *meta = m;
    if (getline_checked(in, "histogram") != "bin_left,bin_right,count_nonzero_g,count_zero_g")
        throw DataError("histogram: bad header");
    std::vector<HistogramBin> bins;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 4) throw DataError("histogram: expected 4 fields");
        bins.push_back({parse_number<double>(f[0], "bin_left"), parse_number<double>(f[1], "bin_right"),
                        parse_number<std::uint64_t>(f[2], "count_nonzero_g"),
                        parse_number<std::uint64_t>(f[3], "count_zero_g")});
    }
    return bins;
}

void write_ap_matrix(std::ostream& out, const ApMatrix& data, const Metadata& meta) {
    out << format_metadata(meta) << '\n' << "label,conductor,rank";
    for (auto p : data.primes) out << ',' << p;
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << data.labels[i] << ',' << data.conductors[i] << ',' << data.ranks[i];
        for (int a : data.rows[i]) out << ',' << a;
        out << '\n';
    }
}

ApMatrix read_ap_matrix(std::istream& in, Metadata* meta) {
    Metadata m = parse_metadata(getline_checked(in, "a_p matrix"));
    if (meta) *meta = m;
    auto header = split_csv_line(getline_checked(in, "a_p matrix"));
    if (header.size() < 3 || header[0] != "label" || header[1] != "conductor" || header[2] != "rank")
        throw DataError("a_p matrix: header must start with label,conductor,rank");
    ApMatrix data;
    for (std::size_t i = 3; i < header.size(); ++i) data.primes.push_back(parse_number<std::uint32_t>(header[i], "prime"));
    std::string line;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != header.size())
            throw DataError("a_p matrix line " + std::to_string(lineno) + ": wrong field count");
        data.labels.push_back(f[0]);
        data.conductors.push_back(parse_number<std::uint64_t>(f[1], "conductor"));
        data.ranks.push_back(parse_number<int>(f[2], "rank"));
        std::vector<int> row;
        row.reserve(data.primes.size());
        for (std::size_t i = 3; i < f.size(); ++i) row.push_back(parse_number<int>(f[i], "a_p"));
        data.rows.push_back(std::move(row));
    }
    return data;
}

}  // namespace mathds
