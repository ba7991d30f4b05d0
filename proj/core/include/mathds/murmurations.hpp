#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mathds/elliptic.hpp"
#include "mathds/io.hpp"

namespace mathds {

enum class XAxis { prime, prime_over_N };
enum class Parity { even, odd };

/// Class means of a_{p_n} over a conductor window: values[c][n-1] is the
/// average of a_{p_n} over the curves of class c.
struct MurmurationSeries {
    std::vector<std::uint32_t> primes;
    std::vector<std::string> class_names;  // "r0", "r1", ... or "even"/"odd"
    std::vector<std::vector<double>> values;
    std::vector<std::size_t> populations;
    std::uint64_t range_lo = 0;
    std::uint64_t range_hi = 0;      // inclusive
    XAxis x_axis = XAxis::prime;
    double x_scale = 1.0;            // x = p / x_scale

    std::size_t k() const noexcept { return primes.size(); }
};

/// f_r(n) for each requested rank over conductors in [lo, hi] (inclusive),
/// n = 1..k. Throws DataError naming an empty class, DomainError when k
/// exceeds the matrix width.
MurmurationSeries murmuration(const ApMatrix& data, const std::vector<int>& ranks, std::uint64_t lo,
                              std::uint64_t hi, std::size_t k);

/// Mean over curves of the given rank parity with conductor in
/// [2^exponent, 2^(exponent+1)). With XAxis::prime_over_N the series carries
/// x_scale = 2^exponent so scales can be overlaid.
MurmurationSeries dyadic_murmuration(const ApMatrix& data, Parity parity, int exponent, std::size_t k,
                                     XAxis x_axis);

/// Number of sign changes of a - b, skipping exact zeros.
std::size_t count_crossings(const std::vector<double>& a, const std::vector<double>& b);

/// Centered moving average; window 0 or 1 returns the input. Edges use the
/// available part of the window.
std::vector<double> moving_average(const std::vector<double>& v, std::size_t window);

/// `n,p,<class_1>,...` with a metadata line (range, classes, populations,
/// x axis).
void write_series_csv(std::ostream& out, const MurmurationSeries& series, Metadata meta);
MurmurationSeries read_series_csv(std::istream& in, Metadata* meta = nullptr);

}  // namespace mathds
