#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mathds/elliptic.hpp"
#include "mathds/kronecker_batch.hpp"
#include "mathds/loadings.hpp"
#include "mathds/matrix.hpp"

namespace mathds {

// ---- metadata headers -------------------------------------------------------

/// Ordered key=value pairs written as a single "# key=value ..." line at the
/// top of every CSV artifact. Keys and values may not contain whitespace or
/// '='; values are escaped otherwise.
using Metadata = std::vector<std::pair<std::string, std::string>>;

std::string format_metadata(const Metadata& meta);
/// Inverse of format_metadata. Throws DataError if the line is not a
/// metadata line.
Metadata parse_metadata(std::string_view line);
std::optional<std::string> metadata_value(const Metadata& meta, std::string_view key);

// ---- files --------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes);

/// Writes to a temporary sibling and renames over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// atomic_write plus a `<path>.fnv1a` sidecar holding the content checksum.
void write_checksummed(const std::filesystem::path& path, std::string_view content);

/// Content of `path` if it exists and matches its sidecar checksum.
std::optional<std::string> read_checksummed(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Fixed-point with `decimals` digits, correctly rounded (ties to even on the
/// exact binary value).
std::string format_fixed(double value, int decimals);

/// Shortest round-trip representation.
std::string format_double(double value);

/// Splits on `sep` with RFC 4180 double-quote handling.
std::vector<std::string> split_csv_line(std::string_view line, char sep = ',');

// ---- triple dataset -------------------------------------------------------------

/// "# ..." metadata line, `lambda;mu;nu;g` header, then one row per record
/// with partitions in comma text form.
class TripleDatasetWriter {
public:
    TripleDatasetWriter(std::ostream& out, const PartitionTable& table, const Metadata& meta);
    void write(const TripleRecord& rec);
    std::size_t rows() const noexcept { return rows_; }

private:
    std::ostream& out_;
    std::vector<std::string> names_;
    std::string buffer_;
    std::size_t rows_ = 0;
};

struct TripleDataset {
    Metadata meta;
    int n = 0;
    std::vector<TripleRecord> records;
};

/// Reads a dataset written by TripleDatasetWriter; n comes from the metadata.
TripleDataset read_triple_dataset(std::istream& in);

// ---- loadings ---------------------------------------------------------------------

/// `partition,<kind>_loading,...` with one column per vector; partitions are
/// quoted (they contain commas), loadings have 2 decimals.
void write_loadings_csv(std::ostream& out, const PartitionTable& table, std::span<const LoadingVector> columns,
                        const Metadata& meta);

/// `bin_left,bin_right,count_nonzero_g,count_zero_g`.
void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins, const Metadata& meta);
std::vector<HistogramBin> read_histogram_csv(std::istream& in, Metadata* meta = nullptr);

// ---- a_p matrix -------------------------------------------------------------------

/// `label,conductor,rank,<p_1>,...,<p_k>`.
void write_ap_matrix(std::ostream& out, const ApMatrix& data, const Metadata& meta);
ApMatrix read_ap_matrix(std::istream& in, Metadata* meta = nullptr);

}  // namespace mathds
