#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mathds/elliptic.hpp"
#include "mathds/io.hpp"
#include "mathds/matrix.hpp"

namespace mathds {

/// N x d feature matrix with optional labels in {0, ..., C-1}.
struct PointCloud {
    Matrix<double> x;
    std::vector<int> y;                      // empty when unlabeled
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;    // display name of each label value

    std::size_t size() const noexcept { return x.rows(); }
    std::size_t dim() const noexcept { return x.cols(); }
    bool labeled() const noexcept { return !y.empty(); }
    std::size_t num_classes() const;

    /// Throws DataError on empty data, non-finite entries, or labels that are
    /// negative or mismatched in count.
    void validate() const;

    PointCloud subset(std::span<const std::size_t> rows) const;
};

/// Seeded uniform shuffle, first round(fraction * N) rows become train.
std::pair<PointCloud, PointCloud> train_test_split(const PointCloud& data, double fraction, std::uint64_t seed);

/// Features: the three zero-padded partitions concatenated (3n values).
/// Label: 1 if g != 0, else 0.
PointCloud point_cloud_from_triples(const std::vector<TripleRecord>& records, int n);

/// Features: a_p columns. Labels: ranks mapped to 0..C-1 in increasing rank
/// order (class_names "r0", "r1", ...).
PointCloud point_cloud_from_ap_matrix(const ApMatrix& data);

/// Generic numeric CSV with a header row; a column named `label` holds
/// integer labels. Lines starting with '#' are skipped.
PointCloud read_point_cloud_csv(std::istream& in);

/// Detects the file kind (triple dataset, a_p matrix, generic CSV) and loads it.
PointCloud load_point_cloud(const std::string& path);

// ---- PCA --------------------------------------------------------------------

struct PcaModel {
    Matrix<double> second_moment;      // (1/N) sum x x^T, or the covariance when centered
    std::vector<double> eigenvalues;   // kept components, descending
    std::vector<double> all_eigenvalues;
    Matrix<double> components;         // d x m, orthonormal columns
    std::vector<double> mean;          // zero vector when uncentered
    bool centered = false;
    bool degenerate = false;           // a kept eigenvalue ties its neighbour

    std::size_t n_components() const noexcept { return eigenvalues.size(); }
};

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues descending, eigenvectors in the matching columns of
/// `vectors`, each with its largest-magnitude entry positive.
void symmetric_eigen(const Matrix<double>& a, std::vector<double>& values, Matrix<double>& vectors);

/// Top eigenpairs of the second-moment matrix. Uncentered by default.
PcaModel pca_fit(const PointCloud& data, std::size_t n_components, bool centered = false, unsigned threads = 1);

/// Coordinate of every row on component m (0-based).
std::vector<double> pca_project(const PcaModel& model, const PointCloud& data, std::size_t m);

// ---- logistic regression ------------------------------------------------------

struct LogRegConfig {
    double lr = 0.5;
    std::size_t epochs = 1000;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
    std::size_t patience = 50;
};

struct LogRegModel {
    std::size_t classes = 0;
    std::size_t features = 0;
    std::vector<double> mean;    // standardisation statistics from train
    std::vector<double> scale;
    Matrix<double> weights;      // classes x (features + 1); last column is the bias
    LogRegConfig config;
    double loss = 0.0;
    std::size_t epochs_run = 0;
    std::string warning;         // non-empty when training stalled
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// Mean cross-entropy against one-hot targets plus (l2/2)||W||^2 (bias
/// excluded). `x` must already be standardised. Writes the gradient when
/// `grad` is non-null.
double logreg_loss(const Matrix<double>& weights, const Matrix<double>& x, std::span<const int> y, double l2,
                   Matrix<double>* grad);

/// Full-batch gradient descent on z-scored features. Returns the best
/// weights seen; sets `warning` when the loss stopped decreasing for
/// `patience` epochs while still far from a stationary point.
LogRegModel logreg_train(const PointCloud& train, std::size_t classes, const LogRegConfig& config);

Matrix<double> logreg_predict_proba(const LogRegModel& model, const Matrix<double>& x);
std::vector<int> logreg_predict(const LogRegModel& model, const Matrix<double>& x);

/// Applies the model's standardisation.
Matrix<double> standardize(const LogRegModel& model, const Matrix<double>& x);

std::string logreg_to_json(const LogRegModel& model);
LogRegModel logreg_from_json(const std::string& text);

// ---- nearest neighbours ----------------------------------------------------------

/// L2 k-nearest-neighbour vote on raw features. Neighbours at equal distance
/// are taken in train order; a tied vote goes to the label with the smallest
/// summed distance, then the lowest label.
std::vector<int> knn_classify(const PointCloud& train, const Matrix<double>& test, std::size_t k_neighbors,
                              unsigned threads);

// ---- metrics -----------------------------------------------------------------------

struct Evaluation {
    double accuracy = 0.0;
    std::vector<double> per_class_precision;      // 0 for a class never predicted
    std::vector<std::vector<std::uint64_t>> confusion;  // [truth][prediction]
};

/// Throws DomainError when the vectors differ in length or are empty.
Evaluation evaluate(std::span<const int> pred, std::span<const int> truth, std::size_t classes = 0);

}  // namespace mathds
