#include <algorithm>
#include <cmath>
#include <numeric>

#include "mathds/errors.hpp"
#include "mathds/mlkit.hpp"
#include "mathds/parallel.hpp"

namespace mathds {

namespace {

constexpr std::size_t kChunkRows = 1024;

// Adds b into a; both d x d.
void add_into(std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

}  // namespace

void symmetric_eigen(const Matrix<double>& a, std::vector<double>& values, Matrix<double>& vectors) {
    const std::size_t d = a.rows();
    if (a.cols() != d) throw DomainError("symmetric_eigen: matrix is not square");
    Matrix<double> m = a;
    Matrix<double> v(d, d, 0.0);
    for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

    double scale = 0.0;
    for (double x : m.data()) scale = std::max(scale, std::abs(x));
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off += m(p, q) * m(p, q);
        if (std::sqrt(off) <= 1e-15 * std::max(scale, 1e-300) * static_cast<double>(d)) break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                m(p, q) = m(q, p) = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return m(x, x) > m(y, y); });
    values.assign(d, 0.0);
    vectors = Matrix<double>(d, d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t src = order[j];
        values[j] = m(src, src);
        std::size_t big = 0;
        for (std::size_t k = 1; k < d; ++k)
            if (std::abs(v(k, src)) > std::abs(v(big, src)) + 1e-12) big = k;
        const double sign = v(big, src) < 0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < d; ++k) vectors(k, j) = sign * v(k, src);
    }
}

PcaModel pca_fit(const PointCloud& data, std::size_t n_components, bool centered, unsigned threads) {
    data.validate();
    const std::size_t n = data.size(), d = data.dim();
    if (n_components == 0 || n_components > d)
        throw DomainError("pca_fit: n_components must be in [1, " + std::to_string(d) + "]");

    PcaModel model;
    model.centered = centered;
    model.mean.assign(d, 0.0);
    if (centered) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) model.mean[j] += data.x(i, j);
        for (double& m : model.mean) m /= static_cast<double>(n);
    }

    // Fixed row chunks summed pairwise, so the result does not depend on the
    // thread count.
    const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
    std::vector<std::vector<double>> partial(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        std::vector<double> acc(d * d, 0.0);
        std::vector<double> row(d);
        const std::size_t end = std::min(n, (c + 1) * kChunkRows);
        for (std::size_t i = c * kChunkRows; i < end; ++i) {
            for (std::size_t j = 0; j < d; ++j) row[j] = data.x(i, j) - model.mean[j];
            for (std::size_t a = 0; a < d; ++a) {
                const double ra = row[a];
                if (ra == 0.0) continue;
                for (std::size_t b = a; b < d; ++b) acc[a * d + b] += ra * row[b];
            }
        }
        partial[c] = std::move(acc);
    });
    for (std::size_t stride = 1; stride < chunks; stride *= 2)
        for (std::size_t c = 0; c + stride < chunks; c += 2 * stride) add_into(partial[c], partial[c + stride]);

    model.second_moment = Matrix<double>(d, d, 0.0);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            const double v = partial[0][a * d + b] / static_cast<double>(n);
            model.second_moment(a, b) = model.second_moment(b, a) = v;
        }

    Matrix<double> vectors;
    symmetric_eigen(model.second_moment, model.all_eigenvalues, vectors);
    model.eigenvalues.assign(model.all_eigenvalues.begin(), model.all_eigenvalues.begin() + n_components);
    model.components = Matrix<double>(d, n_components, 0.0);
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < n_components; ++j) model.components(k, j) = vectors(k, j);

    const double tol = 1e-10 * std::max(1.0, std::abs(model.all_eigenvalues.front()));
    const std::size_t last = std::min(n_components + 1, d);
    for (std::size_t j = 0; j + 1 < last; ++j)
        if (std::abs(model.all_eigenvalues[j] - model.all_eigenvalues[j + 1]) <= tol) model.degenerate = true;
    return model;
}

std::vector<double> pca_project(const PcaModel& model, const PointCloud& data, std::size_t m) {
    if (m >= model.n_components()) throw DomainError("pca_project: component index out of range");
    if (data.dim() != model.components.rows()) throw DataError("pca_project: feature count differs from the model");
    std::vector<double> out(data.size(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < data.dim(); ++k) s += (data.x(i, k) - model.mean[k]) * model.components(k, m);
        out[i] = s;
    }
    return out;
}

}  // namespace mathds
