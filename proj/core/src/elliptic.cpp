#include "mathds/elliptic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "mathds/errors.hpp"
#include "mathds/io.hpp"
#include "mathds/parallel.hpp"
#include "mathds/random.hpp"

namespace mathds {
namespace {

using i64 = std::int64_t;

i64 mod(i64 a, i64 p) {
    i64 r = a % p;
    return r < 0 ? r + p : r;
}

struct Reduced {
    i64 a1, a2, a3, a4, a6;
};

Reduced reduce(const CurveRecord& c, i64 p) {
    return {mod(c.a[0], p), mod(c.a[1], p), mod(c.a[2], p), mod(c.a[3], p), mod(c.a[4], p)};
}

// Discriminant mod p from reduced coefficients (p < 2^17 keeps every product
// inside 64 bits).
i64 discriminant_mod(const Reduced& r, i64 p) {
    const i64 b2 = mod(r.a1 * r.a1 + 4 * r.a2, p);
    const i64 b4 = mod(2 * r.a4 + r.a1 * r.a3, p);
    const i64 b6 = mod(r.a3 * r.a3 + 4 * r.a6, p);
    i64 b8 = r.a1 * r.a1 % p * r.a6 % p;
    b8 += 4 * r.a2 % p * r.a6 % p;
    b8 -= r.a1 * r.a3 % p * r.a4 % p;
    b8 += r.a2 * r.a3 % p * r.a3 % p;
    b8 -= r.a4 * r.a4 % p;
    b8 = mod(b8, p);
    i64 d = -(b2 * b2 % p * b8 % p);
    d -= 8 * (b4 * b4 % p * b4 % p);
    d -= 27 * (b6 * b6 % p);
    d += 9 * (b2 * b4 % p * b6 % p);
    return mod(d, p);
}

void check_prime(std::uint32_t p) {
    if (p > kMaxPointCountPrime) throw DomainError("point counting: p=" + std::to_string(p) + " above limit");
    if (!is_prime(p)) throw DomainError("point counting: " + std::to_string(p) + " is not prime");
}

i64 powmod(i64 b, i64 e, i64 p) {
    i64 r = 1;
    b = mod(b, p);
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

}  // namespace

BigInt discriminant(const CurveRecord& c) {
    const BigInt a1 = c.a[0], a2 = c.a[1], a3 = c.a[2], a4 = c.a[3], a6 = c.a[4];
    const BigInt b2 = a1 * a1 + 4 * a2;
    const BigInt b4 = 2 * a4 + a1 * a3;
    const BigInt b6 = a3 * a3 + 4 * a6;
    const BigInt b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::uint32_t> first_primes(std::size_t k) {
    std::vector<std::uint32_t> out;
    out.reserve(k);
    for (std::uint32_t c = 2; out.size() < k; ++c)
        if (is_prime(c)) out.push_back(c);
    return out;
}

PointCount count_points_exhaustive(const CurveRecord& curve, std::uint32_t p) {
    check_prime(p);
    const i64 q = p;
    const Reduced r = reduce(curve, q);
    std::uint64_t count = 1;  // point at infinity is always non-singular
    bool smooth = true;
    for (i64 x = 0; x < q; ++x)
        for (i64 y = 0; y < q; ++y) {
            const i64 f = mod(y * y + r.a1 * x % q * y + r.a3 * y - x * x % q * x - r.a2 * x % q * x - r.a4 * x - r.a6, q);
            if (f != 0) continue;
            const i64 fx = mod(r.a1 * y - 3 * (x * x % q) - 2 * r.a2 * x - r.a4, q);
            const i64 fy = mod(2 * y + r.a1 * x + r.a3, q);
            if (fx == 0 && fy == 0) smooth = false;
            else ++count;
        }
    return {count, smooth};
}

PointCount count_points_mod_p(const CurveRecord& curve, std::uint32_t p) {
    check_prime(p);
    if (p <= 3) return count_points_exhaustive(curve, p);
    const i64 q = p;
    const Reduced r = reduce(curve, q);

    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6 =: R(x); each x has
    // roots[R(x)] solutions in y.
    std::vector<std::uint8_t> roots(p, 0);
    for (i64 s = 0; s < q; ++s) ++roots[static_cast<std::size_t>(s * s % q)];

    const i64 b2 = mod(r.a1 * r.a1 + 4 * r.a2, q);
    const i64 b4 = mod(2 * r.a4 + r.a1 * r.a3, q);
    const i64 b6 = mod(r.a3 * r.a3 + 4 * r.a6, q);
    // Walk R with forward differences: R(0), dR, d2R, d3R = 24.
    i64 value = b6;
    i64 d1 = mod(4 + b2 + 2 * b4, q);
    i64 d2 = mod(24 + 2 * b2, q);
    const i64 d3 = 24 % q;
    std::uint64_t affine = 0;
    for (i64 x = 0; x < q; ++x) {
        affine += roots[static_cast<std::size_t>(value)];
        value += d1;
        if (value >= q) value -= q;
        d1 += d2;
        if (d1 >= q) d1 -= q;
        d2 += d3;
        if (d2 >= q) d2 -= q;
    }
    const bool smooth = discriminant_mod(r, q) != 0;
    // A singular cubic has exactly one singular point, and it is rational.
    return {affine + 1 - (smooth ? 0 : 1), smooth};
}

int ap_character_sum(std::int64_t a, std::int64_t b, std::uint32_t p) {
    check_prime(p);
    if (p <= 3) throw DomainError("ap_character_sum: needs p > 3");
    const i64 q = p;
    i64 sum = 0;
    for (i64 x = 0; x < q; ++x) {
        const i64 v = mod(x * x % q * x + mod(a, q) * x + mod(b, q), q);
        if (v == 0) continue;
        sum += powmod(v, (q - 1) / 2, q) == 1 ? 1 : -1;
    }
    return static_cast<int>(-sum);
}

int ap(const CurveRecord& curve, std::uint32_t p) {
    const PointCount pc = count_points_mod_p(curve, p);
    const auto q = static_cast<i64>(p);
    if (curve.conductor % p != 0) {
        if (!pc.smooth)
            throw DataError("curve " + curve.label + ": singular reduction at p=" + std::to_string(p) +
                            " which does not divide the conductor (model not minimal?)");
        return static_cast<int>(q + 1 - static_cast<i64>(pc.n_points));
    }
    const i64 value = q - static_cast<i64>(pc.n_points);
    if (pc.smooth || value < -1 || value > 1)
        throw DataError("curve " + curve.label + ": p=" + std::to_string(p) +
                        " divides the conductor but the reduction is not of multiplicative/additive type");
    return static_cast<int>(value);
}

std::vector<int> ap_vector(const CurveRecord& curve, std::size_t k) {
    if (k > kMaxApPrimes) throw DomainError("ap_vector: k above " + std::to_string(kMaxApPrimes));
    std::vector<int> out;
    out.reserve(k);
    for (std::uint32_t p : first_primes(k)) {
        const int a = ap(curve, p);
        if (curve.conductor % p != 0 && static_cast<i64>(a) * a > 4 * static_cast<i64>(p))
            throw ConsistencyError("curve " + curve.label + ": Hasse bound violated at p=" + std::to_string(p));
        out.push_back(a);
    }
    return out;
}

namespace {

std::string cache_name(const std::string& label, std::size_t k) {
    std::string safe;
    for (char c : label) safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') ? c : '_';
    return safe + ".k" + std::to_string(k) + ".csv";
}

std::optional<std::vector<int>> parse_ap_cache(const std::string& text, std::size_t k) {
    const auto primes = first_primes(k);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "p,ap") return std::nullopt;
    std::vector<int> out;
    while (std::getline(in, line)) {
        auto fields = split_csv_line(line);
        if (fields.size() != 2) return std::nullopt;
        long p = 0;
        int a = 0;
        if (std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), p).ec != std::errc{}) return std::nullopt;
        if (std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), a).ec != std::errc{}) return std::nullopt;
        if (out.size() >= primes.size() || primes[out.size()] != p) return std::nullopt;
        out.push_back(a);
    }
    if (out.size() != k) return std::nullopt;
    return out;
}

}  // namespace

std::vector<int> ap_vector_cached(const CurveRecord& curve, std::size_t k, const std::filesystem::path& dir) {
    const auto path = dir / cache_name(curve.label, k);
    if (auto text = read_checksummed(path))
        if (auto cached = parse_ap_cache(*text, k)) return *cached;
    auto values = ap_vector(curve, k);
    const auto primes = first_primes(k);
    std::string text = "p,ap\n";
    for (std::size_t i = 0; i < k; ++i) text += std::to_string(primes[i]) + "," + std::to_string(values[i]) + "\n";
    std::filesystem::create_directories(dir);
    write_checksummed(path, text);
    return values;
}

std::vector<CurveRecord> read_curves(std::istream& in, IngestReport* report) {
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    std::vector<CurveRecord> out;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "label,a1,a2,a3,a4,a6,conductor,rank")
                throw DataError("curve file line " + std::to_string(lineno) +
                                ": expected header label,a1,a2,a3,a4,a6,conductor,rank");
            header = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 8)
            throw DataError("curve file line " + std::to_string(lineno) + ": expected 8 fields, got " +
                            std::to_string(fields.size()));
        CurveRecord c;
        c.label = fields[0];
        auto parse = [&](const std::string& s, auto& v, const char* what) {
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
                throw DataError("curve file line " + std::to_string(lineno) + ": bad " + what + " '" + s + "'");
        };
        static const char* names[] = {"a1", "a2", "a3", "a4", "a6"};
        for (int i = 0; i < 5; ++i) parse(fields[static_cast<std::size_t>(i + 1)], c.a[static_cast<std::size_t>(i)], names[i]);
        parse(fields[6], c.conductor, "conductor");
        parse(fields[7], c.rank, "rank");
        if (c.conductor == 0) throw DataError("curve file line " + std::to_string(lineno) + ": conductor must be positive");
        if (c.rank < 0) throw DataError("curve file line " + std::to_string(lineno) + ": negative rank");
        ++rep.rows;
        if (discriminant(c) == 0) {
            ++rep.rejected_singular;
            rep.rejected_lines.push_back(lineno);
            continue;
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<CurveRecord> filter_curves(std::vector<CurveRecord> curves, const CurveFilter& filter) {
    std::vector<CurveRecord> kept;
    for (auto& c : curves) {
        if (filter.conductor_range &&
            (c.conductor < filter.conductor_range->first || c.conductor > filter.conductor_range->second))
            continue;
        if (filter.ranks && std::find(filter.ranks->begin(), filter.ranks->end(), c.rank) == filter.ranks->end())
            continue;
        kept.push_back(std::move(c));
    }

    Rng rng(filter.seed);
    // Uniform subset of `want` positions out of `pool`, returned sorted.
    auto choose = [&](std::vector<std::size_t> pool, std::size_t want) {
        for (std::size_t s = 0; s < want; ++s) std::swap(pool[s], pool[s + rng.below(pool.size() - s)]);
        pool.resize(want);
        std::sort(pool.begin(), pool.end());
        return pool;
    };

    std::vector<std::size_t> selected;
    if (filter.balanced) {
        std::vector<int> ranks;
        if (filter.ranks) ranks = *filter.ranks;
        else {
            std::set<int> seen;
            for (const auto& c : kept) seen.insert(c.rank);
            ranks.assign(seen.begin(), seen.end());
        }
        std::sort(ranks.begin(), ranks.end());
        ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
        std::map<int, std::vector<std::size_t>> by_rank;
        for (int r : ranks) by_rank[r];
        for (std::size_t i = 0; i < kept.size(); ++i) by_rank[kept[i].rank].push_back(i);

        std::size_t smallest = SIZE_MAX;
        for (const auto& [r, idx] : by_rank) smallest = std::min(smallest, idx.size());
        const std::size_t per_rank =
            filter.max_count ? *filter.max_count / std::max<std::size_t>(1, ranks.size()) : smallest;
        if (ranks.empty() || per_rank > smallest || per_rank == 0) {
            std::string msg = "balanced selection infeasible: need " + std::to_string(per_rank) + " per rank, available";
            for (const auto& [r, idx] : by_rank) msg += " rank " + std::to_string(r) + ": " + std::to_string(idx.size()) + ";";
            throw DataError(msg);
        }
        for (const auto& [r, idx] : by_rank) {
            auto pick = choose(idx, per_rank);
            selected.insert(selected.end(), pick.begin(), pick.end());
        }
        std::sort(selected.begin(), selected.end());
    } else {
        selected.resize(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) selected[i] = i;
        if (filter.max_count && *filter.max_count < kept.size()) selected = choose(selected, *filter.max_count);
    }

    std::vector<CurveRecord> out;
    out.reserve(selected.size());
    for (std::size_t i : selected) out.push_back(std::move(kept[i]));
    return out;
}

std::vector<CurveRecord> ingest_curves(const std::filesystem::path& path, const CurveFilter& filter,
                                       IngestReport* report) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open curve file " + path.string());
    return filter_curves(read_curves(in, report), filter);
}

ApMatrix build_ap_matrix(const std::vector<CurveRecord>& curves, std::size_t k, unsigned threads,
                         const std::optional<std::filesystem::path>& cache_dir) {
    ApMatrix m;
    m.primes = first_primes(k);
    m.rows.resize(curves.size());
    parallel_for(curves.size(), threads, [&](std::size_t i) {
        const auto& c = curves[i];
        if (c.ap && c.ap->size() == k) m.rows[i] = *c.ap;
        else m.rows[i] = cache_dir ? ap_vector_cached(c, k, *cache_dir) : ap_vector(c, k);
    });
    for (const auto& c : curves) {
        m.labels.push_back(c.label);
        m.conductors.push_back(c.conductor);
        m.ranks.push_back(c.rank);
    }
    return m;
}

}  // namespace mathds
