#include "mathds/murmurations.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "mathds/errors.hpp"

namespace mathds {
namespace {

// a_p are integers, so per-class sums are exact in int64 and the mean is a
// single correctly rounded division: bit-stable for any summation order.
template <class Select>
std::vector<double> class_mean(const ApMatrix& data, std::size_t k, Select&& select, std::size_t& population) {
    std::vector<std::int64_t> sums(k, 0);
    population = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!select(i)) continue;
        ++population;
        for (std::size_t n = 0; n < k; ++n) sums[n] += data.rows[i][n];
    }
    std::vector<double> mean(k, 0.0);
    if (population == 0) return mean;
    for (std::size_t n = 0; n < k; ++n) mean[n] = static_cast<double>(sums[n]) / static_cast<double>(population);
    return mean;
}

void check_width(const ApMatrix& data, std::size_t k) {
    if (k > data.k()) throw DomainError("murmuration: k=" + std::to_string(k) + " exceeds the " +
                                        std::to_string(data.k()) + " primes in the data");
}

}  // namespace

MurmurationSeries murmuration(const ApMatrix& data, const std::vector<int>& ranks, std::uint64_t lo,
                              std::uint64_t hi, std::size_t k) {
    check_width(data, k);
    if (ranks.empty()) throw DomainError("murmuration: no classes requested");
    MurmurationSeries s;
    s.primes.assign(data.primes.begin(), data.primes.begin() + static_cast<std::ptrdiff_t>(k));
    s.range_lo = lo;
    s.range_hi = hi;
    for (int r : ranks) {
        std::size_t pop = 0;
        auto mean = class_mean(data, k, [&](std::size_t i) {
            return data.ranks[i] == r && data.conductors[i] >= lo && data.conductors[i] <= hi;
        }, pop);
        if (pop == 0)
            throw DataError("murmuration: class r" + std::to_string(r) + " has no curves with conductor in [" +
                            std::to_string(lo) + "," + std::to_string(hi) + "]");
        s.class_names.push_back("r" + std::to_string(r));
        s.values.push_back(std::move(mean));
        s.populations.push_back(pop);
    }
    return s;
}

MurmurationSeries dyadic_murmuration(const ApMatrix& data, Parity parity, int exponent, std::size_t k,
                                     XAxis x_axis) {
    check_width(data, k);
    if (exponent < 0 || exponent > 62) throw DomainError("dyadic_murmuration: exponent out of range");
    const std::uint64_t lo = std::uint64_t{1} << exponent;
    const std::uint64_t hi = (lo << 1) - 1;
    const int want = parity == Parity::even ? 0 : 1;
    MurmurationSeries s;
    s.primes.assign(data.primes.begin(), data.primes.begin() + static_cast<std::ptrdiff_t>(k));
    s.range_lo = lo;
    s.range_hi = hi;
    s.x_axis = x_axis;
    s.x_scale = x_axis == XAxis::prime_over_N ? static_cast<double>(lo) : 1.0;
    std::size_t pop = 0;
    auto mean = class_mean(data, k, [&](std::size_t i) {
        return data.ranks[i] % 2 == want && data.conductors[i] >= lo && data.conductors[i] <= hi;
    }, pop);
    const std::string name = parity == Parity::even ? "even" : "odd";
    if (pop == 0)
        throw DataError("dyadic_murmuration: class " + name + " has no curves with conductor in [2^" +
                        std::to_string(exponent) + ", 2^" + std::to_string(exponent + 1) + ")");
    s.class_names.push_back(name);
    s.values.push_back(std::move(mean));
    s.populations.push_back(pop);
    return s;
}

std::size_t count_crossings(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    int last = 0;
    std::size_t crossings = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        const int sign = d > 0 ? 1 : d < 0 ? -1 : 0;
        if (sign == 0) continue;
        if (last != 0 && sign != last) ++crossings;
        last = sign;
    }
    return crossings;
}

std::vector<double> moving_average(const std::vector<double>& v, std::size_t window) {
    if (window <= 1) return v;
    const std::size_t half = window / 2;
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(v.size(), i + (window - half));
        double sum = 0.0;
        for (std::size_t j = lo; j < hi; ++j) sum += v[j];
        out[i] = sum / static_cast<double>(hi - lo);
    }
    return out;
}

void write_series_csv(std::ostream& out, const MurmurationSeries& s, Metadata meta) {
    std::string classes, pops;
    for (std::size_t c = 0; c < s.class_names.size(); ++c) {
        classes += (c ? "," : "") + s.class_names[c];
        pops += (c ? "," : "") + std::to_string(s.populations[c]);
    }
    meta.emplace_back("range", std::to_string(s.range_lo) + ":" + std::to_string(s.range_hi));
    meta.emplace_back("classes", classes);
    meta.emplace_back("populations", pops);
    meta.emplace_back("x_axis", s.x_axis == XAxis::prime ? "prime" : "prime_over_N");
    meta.emplace_back("x_scale", format_double(s.x_scale));
    out << format_metadata(meta) << '\n' << "n,p";
    for (const auto& name : s.class_names) out << ',' << name;
    out << '\n';
    for (std::size_t n = 0; n < s.k(); ++n) {
        out << n + 1 << ',' << s.primes[n];
        for (const auto& v : s.values) out << ',' << format_double(v[n]);
        out << '\n';
    }
}

MurmurationSeries read_series_csv(std::istream& in, Metadata* meta_out) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("series: empty file");
    Metadata meta = parse_metadata(line);
    if (meta_out) *meta_out = meta;
    if (!std::getline(in, line)) throw DataError("series: missing header");
    auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "n" || header[1] != "p") throw DataError("series: header must start with n,p");

    MurmurationSeries s;
    s.class_names.assign(header.begin() + 2, header.end());
    s.values.resize(s.class_names.size());
    if (auto pops = metadata_value(meta, "populations")) {
        for (const auto& tok : split_csv_line(*pops)) s.populations.push_back(std::stoull(tok));
    }
    if (auto range = metadata_value(meta, "range")) {
        const auto colon = range->find(':');
        if (colon == std::string::npos) throw DataError("series: bad range metadata");
        s.range_lo = std::stoull(range->substr(0, colon));
        s.range_hi = std::stoull(range->substr(colon + 1));
    }
    if (auto axis = metadata_value(meta, "x_axis")) s.x_axis = *axis == "prime_over_N" ? XAxis::prime_over_N : XAxis::prime;
    if (auto scale = metadata_value(meta, "x_scale")) s.x_scale = std::stod(*scale);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != header.size()) throw DataError("series: wrong field count");
        s.primes.push_back(static_cast<std::uint32_t>(std::stoul(f[1])));
        for (std::size_t c = 0; c < s.class_names.size(); ++c) s.values[c].push_back(std::stod(f[c + 2]));
    }
    return s;
}

}  // namespace mathds
