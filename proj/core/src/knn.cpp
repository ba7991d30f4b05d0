#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "mathds/errors.hpp"
#include "mathds/mlkit.hpp"
#include "mathds/parallel.hpp"

namespace mathds {

namespace {

struct Neighbor {
    double dist;
    std::size_t index;
};

// Keeps the k smallest (distance, index) pairs. Candidates arrive in
// increasing index order, so an equal distance never displaces.
class TopK {
public:
    explicit TopK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

    double worst() const {
        return items_.size() < k_ ? std::numeric_limits<double>::infinity() : items_.back().dist;
    }

    void offer(double dist, std::size_t index) {
        if (items_.size() == k_ && !(dist < items_.back().dist)) return;
        Neighbor nb{dist, index};
        auto pos = std::upper_bound(items_.begin(), items_.end(), nb,
                                    [](const Neighbor& a, const Neighbor& b) { return a.dist < b.dist; });
        items_.insert(pos, nb);
        if (items_.size() > k_) items_.pop_back();
    }

    const std::vector<Neighbor>& items() const { return items_; }

private:
    std::size_t k_;
    std::vector<Neighbor> items_;
};

int vote(const std::vector<Neighbor>& nbs, const std::vector<int>& labels, std::size_t classes) {
    std::vector<std::size_t> count(classes, 0);
    std::vector<double> dist_sum(classes, 0.0);
    for (const auto& nb : nbs) {
        const auto c = static_cast<std::size_t>(labels[nb.index]);
        ++count[c];
        dist_sum[c] += std::sqrt(nb.dist);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
        if (count[c] > count[best] || (count[c] == count[best] && count[c] > 0 && dist_sum[c] < dist_sum[best]) ||
            (count[best] == 0 && count[c] > 0))
            best = c;
    }
    return static_cast<int>(best);
}

// Small-integer features: squared distances are computed exactly in 32-bit
// lanes, which also vectorises well.
bool fits_int16(const Matrix<double>& a, double& max_abs) {
    for (double v : a.data()) {
        if (v != std::nearbyint(v) || std::abs(v) > 16000.0) return false;
        max_abs = std::max(max_abs, std::abs(v));
    }
    return true;
}

constexpr std::size_t kBlock = 256;

}  // namespace

std::vector<int> knn_classify(const PointCloud& train, const Matrix<double>& test, std::size_t k_neighbors,
                              unsigned threads) {
    train.validate();
    if (!train.labeled()) throw DataError("knn_classify: training data has no labels");
    if (test.cols() != train.dim()) throw DataError("knn_classify: feature count differs between train and test");
    if (k_neighbors == 0) throw DomainError("knn_classify: k must be >= 1");
    const std::size_t n = train.size(), d = train.dim(), m = test.rows();
    const std::size_t k = std::min(k_neighbors, n);
    const std::size_t classes = train.num_classes();
    std::vector<int> out(m, 0);

    double max_abs = 0.0;
    const bool exact = fits_int16(train.x, max_abs) && fits_int16(test, max_abs) &&
                       static_cast<double>(d) * 4.0 * max_abs * max_abs < 2147483647.0;
    const std::size_t blocks = (m + kBlock - 1) / kBlock;

    if (exact) {
        const std::size_t stride = (d + 15) / 16 * 16;
        std::vector<std::int16_t> tr(n * stride, 0), te(m * stride, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) tr[i * stride + j] = static_cast<std::int16_t>(train.x(i, j));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < d; ++j) te[i * stride + j] = static_cast<std::int16_t>(test(i, j));
        parallel_for(blocks, threads, [&](std::size_t b) {
            std::vector<std::int32_t> dist(n);
            const std::size_t end = std::min(m, (b + 1) * kBlock);
            for (std::size_t q = b * kBlock; q < end; ++q) {
                const std::int16_t* x = te.data() + q * stride;
                for (std::size_t i = 0; i < n; ++i) {
                    const std::int16_t* y = tr.data() + i * stride;
                    std::int32_t s = 0;
                    for (std::size_t j = 0; j < stride; ++j) {
                        const std::int32_t t = x[j] - y[j];
                        s += t * t;
                    }
                    dist[i] = s;
                }
                TopK top(k);
                for (std::size_t i = 0; i < n; ++i)
                    if (dist[i] < top.worst()) top.offer(static_cast<double>(dist[i]), i);
                out[q] = vote(top.items(), train.y, classes);
            }
        });
        return out;
    }

    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::size_t end = std::min(m, (b + 1) * kBlock);
        for (std::size_t q = b * kBlock; q < end; ++q) {
            const auto x = test.row(q);
            TopK top(k);
            for (std::size_t i = 0; i < n; ++i) {
                const auto y = train.x.row(i);
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double t = x[j] - y[j];
                    s += t * t;
                }
                top.offer(s, i);
            }
            out[q] = vote(top.items(), train.y, classes);
        }
    });
    return out;
}

}  // namespace mathds
