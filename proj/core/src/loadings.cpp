#include "mathds/loadings.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include "mathds/errors.hpp"
#include "mathds/parallel.hpp"

namespace mathds {

SimilitudeMatrix similitude_matrix(const PartitionTable& table) {
    const std::size_t p = table.size();
    SimilitudeMatrix y{table.n(), Matrix<std::int64_t>(p, p)};
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            std::int64_t s = 0;
            auto u = table[a].parts(), v = table[b].parts();
            for (std::size_t i = 0; i < u.size(); ++i) s += static_cast<std::int64_t>(u[i]) * v[i];
            y.entries(a, b) = y.entries(b, a) = s;
        }
    return y;
}

DifferenceMatrix difference_matrix(const PartitionTable& table) {
    const std::size_t p = table.size();
    DifferenceMatrix z{table.n(), Matrix<std::int64_t>(p, p)};
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b) {
            std::int64_t s = 0;
            auto u = table[a].parts(), v = table[b].parts();
            for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]);
            z.entries(a, b) = z.entries(b, a) = s;
        }
    return z;
}

PerronResult perron_vector(const Matrix<double>& m, const PerronOptions& options) {
    const std::size_t d = m.rows();
    if (d == 0 || m.cols() != d) throw DomainError("perron_vector: matrix must be square and non-empty");
    double frob = 0.0;
    for (double x : m.data()) {
        if (x < 0.0) throw DomainError("perron_vector: matrix has a negative entry");
        frob += x * x;
    }
    frob = std::sqrt(frob);
    if (frob == 0.0) throw DomainError("perron_vector: zero matrix");

    std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d))), w(d);
    double previous = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        for (std::size_t r = 0; r < d; ++r) {
            auto row = m.row(r);
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += row[c] * v[c];
            w[r] = s;
        }
        const double lambda = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
        double res2 = 0.0, norm2 = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            const double e = w[r] - lambda * v[r];
            res2 += e * e;
            norm2 += w[r] * w[r];
        }
        residual = std::sqrt(res2) / frob;
        const bool settled = std::abs(lambda - previous) < options.tol * std::abs(lambda);
        if (settled && residual < options.residual_tol) {
            for (std::size_t r = 0; r < d; ++r)
                if (!(v[r] > 0.0))
                    throw ConsistencyError("perron_vector: converged vector has a non-positive coordinate at " +
                                           std::to_string(r));
            return {lambda, v, iter, residual};
        }
        previous = lambda;
        const double norm = std::sqrt(norm2);
        if (norm == 0.0) throw NumericalError("perron_vector: iterate collapsed to zero");
        for (std::size_t r = 0; r < d; ++r) v[r] = w[r] / norm;
    }
    std::ostringstream msg;
    msg << "perron_vector: no convergence after " << options.max_iter << " iterations (last eigenvalue "
        << previous << ", relative residual " << residual << ")";
    throw NumericalError(msg.str());
}

std::string to_string(LoadingKind kind) { return kind == LoadingKind::a ? "a" : "b"; }

LoadingVector loadings(const PartitionTable& table, LoadingKind kind) {
    if (table.n() < 2) throw DomainError("loading undefined: constant eigenvector (n must be at least 2)");
    const Matrix<double> m = kind == LoadingKind::a ? similitude_matrix(table).entries.cast<double>()
                                                    : difference_matrix(table).entries.cast<double>();
    const PerronResult perron = perron_vector(m);
    const auto [lo, hi] = std::minmax_element(perron.vector.begin(), perron.vector.end());
    const double vmin = *lo, span = *hi - *lo;
    if (!(span > 0.0)) throw DomainError("loading undefined: constant eigenvector");

    LoadingVector out{table.n(), kind, std::vector<double>(perron.vector.size()), perron.eigenvalue};
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = 100.0 * ((perron.vector[i] - vmin) / span);
    return out;
}

double triple_loading(std::size_t a, std::size_t b, std::size_t c, const LoadingVector& loading) noexcept {
    double x = loading[a], y = loading[b], z = loading[c];
    if (x > y) std::swap(x, y);
    if (y > z) std::swap(y, z);
    if (x > y) std::swap(x, y);
    return (x + y) + z;
}

double triple_loading(const Partition& lambda, const Partition& mu, const Partition& nu,
                      const LoadingVector& loading) {
    if (lambda.n() != loading.n || mu.n() != loading.n || nu.n() != loading.n)
        throw DomainError("triple_loading: partitions must all be of n=" + std::to_string(loading.n));
    const PartitionTable table = enumerate_partitions(loading.n);
    return triple_loading(index_of(lambda, table), index_of(mu, table), index_of(nu, table), loading);
}

namespace {

bool better(double value, const std::array<std::size_t, 3>& idx, const BStarResult& best) {
    if (!best.found) return true;
    if (value < best.value - kLoadingTieTolerance) return true;
    if (value > best.value + kLoadingTieTolerance) return false;
    return idx < best.argmin;
}

void check_sizes(std::size_t p, const LoadingVector& loading) {
    if (loading.size() != p) throw DomainError("b_star: loading vector and triples disagree on p(n)");
}

}  // namespace

BStarResult b_star(const KroneckerCube& cube, const LoadingVector& b_loading) {
    const std::size_t p = cube.size();
    check_sizes(p, b_loading);
    BStarResult best;
    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t j = 0; j <= k; ++j)
            for (std::size_t i = 0; i <= j; ++i) {
                ++best.evaluated;
                if (cube(i, j, k) != 0) continue;
                const double value = triple_loading(i, j, k, b_loading);
                const std::array<std::size_t, 3> idx{i, j, k};
                if (better(value, idx, best)) {
                    best.found = true;
                    best.value = value;
                    best.argmin = idx;
                }
            }
    return best;
}

BStarResult b_star_search(const CharacterTable& table, const LoadingVector& b_loading, unsigned threads) {
    const std::size_t p = table.size();
    check_sizes(p, b_loading);
    const KroneckerKernel kernel(table);

    // Partition indices sorted by loading; walking positions s <= t <= r gives
    // non-decreasing triple loadings along each inner loop.
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return b_loading[x] < b_loading[y]; });

    std::mutex mutex;
    BStarResult best;
    std::size_t evaluated = 0;
    auto current = [&] {
        std::lock_guard lock(mutex);
        return best.value + kLoadingTieTolerance;
    };

    parallel_for(p, threads, [&](std::size_t s) {
        const std::size_t u = order[s];
        const double bu = b_loading[u];
        if ((bu + bu) + bu > current()) return;
        std::vector<std::uint64_t> w(p);
        std::size_t local_evaluated = 0;
        for (std::size_t t = s; t < p; ++t) {
            const std::size_t v = order[t];
            const double bv = b_loading[v];
            if ((bu + bv) + bv > current()) break;
            bool have_weights = false;
            for (std::size_t r = t; r < p; ++r) {
                const std::size_t x = order[r];
                const double value = triple_loading(u, v, x, b_loading);
                if (value > current()) break;
                if (!have_weights) {
                    kernel.pair_weights(u, v, w);
                    have_weights = true;
                }
                ++local_evaluated;
                if (kernel.evaluate(w, u, v, x) != 0) continue;
                std::array<std::size_t, 3> idx{u, v, x};
                std::sort(idx.begin(), idx.end());
                std::lock_guard lock(mutex);
                if (better(value, idx, best)) {
                    best.found = true;
                    best.value = value;
                    best.argmin = idx;
                }
            }
        }
        std::lock_guard lock(mutex);
        evaluated += local_evaluated;
    });
    best.evaluated = evaluated;
    return best;
}

CertificateFraction certificate_fraction(const LoadingVector& b_loading, const BStarResult& bstar) {
    const auto p = static_cast<std::uint64_t>(b_loading.size());
    CertificateFraction out;
    out.total = p * p * p;
    out.b_star = bstar;
    if (!bstar.found) return out;
    const double strict = bstar.value - kLoadingTieTolerance;
    const double loose = bstar.value + kLoadingTieTolerance;
    std::uint64_t below = 0, at_or_below = 0;
    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t j = 0; j <= k; ++j)
            for (std::size_t i = 0; i <= j; ++i) {
                const double value = triple_loading(i, j, k, b_loading);
                if (value > loose) continue;
                const std::uint64_t mult = (i == k) ? 1 : (i == j || j == k) ? 3 : 6;
                at_or_below += mult;
                if (value < strict) below += mult;
            }
    out.below = below;
    out.at_or_below = at_or_below;
    out.fraction = static_cast<double>(below) / static_cast<double>(out.total);
    return out;
}

std::optional<LoadingVector> certificate_loadings(const PartitionTable& table) {
    if (table.n() < 2) return std::nullopt;
    const PerronResult perron = perron_vector(difference_matrix(table).entries.cast<double>());
    const auto [lo, hi] = std::minmax_element(perron.vector.begin(), perron.vector.end());
    if (!(*hi - *lo > 0.0)) return std::nullopt;
    return loadings(table, LoadingKind::b);
}

CertificateFraction certificate_fraction(int n, unsigned threads) {
    const CharacterTable table = character_table(n);
    const auto b = certificate_loadings(table.partitions());
    if (!b) {
        const std::uint64_t p = table.size();
        CertificateFraction none;
        none.total = p * p * p;
        return none;
    }
    return certificate_fraction(*b, b_star_search(table, *b, threads));
}

std::vector<HistogramBin> loading_histogram(const KroneckerCube& cube, const LoadingVector& loading,
                                            std::size_t bins) {
    if (bins == 0) throw DomainError("loading_histogram: need at least one bin");
    const std::size_t p = cube.size();
    if (loading.size() != p) throw DomainError("loading_histogram: loading vector and cube disagree on p(n)");
    const double width = 300.0 / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].left = width * static_cast<double>(b);
        out[b].right = b + 1 == bins ? 300.0 : width * static_cast<double>(b + 1);
    }
    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t j = 0; j <= k; ++j)
            for (std::size_t i = 0; i <= j; ++i) {
                const double value = triple_loading(i, j, k, loading);
                auto b = static_cast<std::size_t>(value / width);
                if (b >= bins) b = bins - 1;
                const std::uint64_t mult = (i == k) ? 1 : (i == j || j == k) ? 3 : 6;
                (cube(i, j, k) == 0 ? out[b].zero : out[b].nonzero) += mult;
            }
    return out;
}

}  // namespace mathds
