#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "mathds/errors.hpp"
#include "mathds/mlkit.hpp"
#include "mathds/random.hpp"

namespace mathds {

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) sum += out[c] = std::exp(logits[c] - top);
    for (double& v : out) v /= sum;
    return out;
}

double logreg_loss(const Matrix<double>& weights, const Matrix<double>& x, std::span<const int> y, double l2,
                   Matrix<double>* grad) {
    const std::size_t n = x.rows(), d = x.cols(), classes = weights.rows();
    if (weights.cols() != d + 1) throw DomainError("logreg_loss: weight shape does not match features");
    if (y.size() != n || n == 0) throw DomainError("logreg_loss: label count mismatch");
    if (grad) *grad = Matrix<double>(classes, d + 1, 0.0);

    std::vector<double> z(classes);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = x.row(i);
        for (std::size_t c = 0; c < classes; ++c) {
            double s = weights(c, d);
            for (std::size_t j = 0; j < d; ++j) s += weights(c, j) * row[j];
            z[c] = s;
        }
        const double top = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - top);
        const double log_norm = top + std::log(sum);
        loss -= z[static_cast<std::size_t>(y[i])] - log_norm;
        if (!grad) continue;
        for (std::size_t c = 0; c < classes; ++c) {
            const double r = std::exp(z[c] - log_norm) - (static_cast<int>(c) == y[i] ? 1.0 : 0.0);
            auto g = grad->row(c);
            for (std::size_t j = 0; j < d; ++j) g[j] += r * row[j];
            g[d] += r;
        }
    }
    const double inv = 1.0 / static_cast<double>(n);
    loss *= inv;
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t j = 0; j < d; ++j) loss += 0.5 * l2 * weights(c, j) * weights(c, j);
    if (grad) {
        for (std::size_t c = 0; c < classes; ++c) {
            for (std::size_t j = 0; j < d; ++j) (*grad)(c, j) = (*grad)(c, j) * inv + l2 * weights(c, j);
            (*grad)(c, d) *= inv;
        }
    }
    return loss;
}

Matrix<double> standardize(const LogRegModel& model, const Matrix<double>& x) {
    if (x.cols() != model.features) throw DataError("logreg: feature count differs from the model");
    Matrix<double> out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - model.mean[j]) / model.scale[j];
    return out;
}

LogRegModel logreg_train(const PointCloud& train, std::size_t classes, const LogRegConfig& config) {
    train.validate();
    if (!train.labeled()) throw DataError("logreg_train: training data has no labels");
    if (classes < 2) throw DomainError("logreg_train: need at least two classes");
    for (int label : train.y)
        if (static_cast<std::size_t>(label) >= classes) throw DataError("logreg_train: label outside class range");
    if (!(config.lr > 0.0) || config.l2 < 0.0) throw DomainError("logreg_train: lr must be > 0 and l2 >= 0");

    const std::size_t n = train.size(), d = train.dim();
    LogRegModel model;
    model.classes = classes;
    model.features = d;
    model.config = config;
    model.mean.assign(d, 0.0);
    model.scale.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += train.x(i, j);
    for (double& m : model.mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double t = train.x(i, j) - model.mean[j];
            model.scale[j] += t * t;
        }
    for (double& s : model.scale) {
        s = std::sqrt(s / static_cast<double>(n));
        if (s == 0.0) s = 1.0;  // constant column
    }
    const Matrix<double> xs = standardize(model, train.x);

    Rng rng(config.seed);
    Matrix<double> w(classes, d + 1, 0.0);
    for (double& v : w.data()) v = 0.01 * rng.normal();

    Matrix<double> grad;
    Matrix<double> best = w;
    double best_loss = std::numeric_limits<double>::infinity();
    double best_grad_norm = 0.0;
    std::size_t stale = 0;
    std::size_t epoch = 0;
    bool diverged = false;
    for (; epoch < config.epochs; ++epoch) {
        const double loss = logreg_loss(w, xs, train.y, config.l2, &grad);
        if (!std::isfinite(loss)) {
            diverged = true;
            break;
        }
        double gnorm = 0.0;
        for (double g : grad.data()) gnorm += g * g;
        gnorm = std::sqrt(gnorm);
        if (std::isinf(best_loss) || loss < best_loss - 1e-12 * std::abs(best_loss)) {
            best_loss = loss;
            best = w;
            best_grad_norm = gnorm;
            stale = 0;
        } else if (++stale >= config.patience) {
            break;
        }
        if (gnorm < 1e-10) break;
        auto wd = w.data();
        auto gd = grad.data();
        for (std::size_t t = 0; t < wd.size(); ++t) wd[t] -= config.lr * gd[t];
    }
    model.weights = best;
    model.loss = best_loss;
    model.epochs_run = epoch;
    if (diverged)
        model.warning = "loss diverged after " + std::to_string(epoch) +
                        " epochs; returning best weights, lower the learning rate";
    else if (stale >= config.patience && best_grad_norm > 1e-4)
        model.warning = "loss stopped decreasing after " + std::to_string(epoch) +
                        " epochs; returning best weights (gradient norm " + std::to_string(best_grad_norm) + ")";
    return model;
}

Matrix<double> logreg_predict_proba(const LogRegModel& model, const Matrix<double>& x) {
    const Matrix<double> xs = standardize(model, x);
    const std::size_t d = model.features;
    Matrix<double> out(x.rows(), model.classes);
    std::vector<double> z(model.classes);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t c = 0; c < model.classes; ++c) {
            double s = model.weights(c, d);
            for (std::size_t j = 0; j < d; ++j) s += model.weights(c, j) * xs(i, j);
            z[c] = s;
        }
        const auto p = softmax(z);
        std::copy(p.begin(), p.end(), out.row(i).begin());
    }
    return out;
}

std::vector<int> logreg_predict(const LogRegModel& model, const Matrix<double>& x) {
    const Matrix<double> p = logreg_predict_proba(model, x);
    std::vector<int> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto r = p.row(i);
        out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    return out;
}

std::string logreg_to_json(const LogRegModel& model) {
    nlohmann::ordered_json j;
    j["classes"] = model.classes;
    j["features"] = model.features;
    j["config"] = {{"lr", model.config.lr},
                   {"epochs", model.config.epochs},
                   {"l2", model.config.l2},
                   {"seed", model.config.seed},
                   {"patience", model.config.patience}};
    j["mean"] = model.mean;
    j["scale"] = model.scale;
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < model.weights.rows(); ++c) {
        const auto r = model.weights.row(c);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["weights"] = rows;
    j["loss"] = model.loss;
    j["epochs_run"] = model.epochs_run;
    if (!model.warning.empty()) j["warning"] = model.warning;
    return j.dump(2);
}

LogRegModel logreg_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        LogRegModel m;
        m.classes = j.at("classes").get<std::size_t>();
        m.features = j.at("features").get<std::size_t>();
        const auto& cfg = j.at("config");
        m.config.lr = cfg.at("lr").get<double>();
        m.config.epochs = cfg.at("epochs").get<std::size_t>();
        m.config.l2 = cfg.at("l2").get<double>();
        m.config.seed = cfg.at("seed").get<std::uint64_t>();
        m.config.patience = cfg.at("patience").get<std::size_t>();
        m.mean = j.at("mean").get<std::vector<double>>();
        m.scale = j.at("scale").get<std::vector<double>>();
        const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
        if (rows.size() != m.classes || m.mean.size() != m.features || m.scale.size() != m.features)
            throw DataError("logreg model: inconsistent shapes");
        m.weights = Matrix<double>(m.classes, m.features + 1);
        for (std::size_t c = 0; c < m.classes; ++c) {
            if (rows[c].size() != m.features + 1) throw DataError("logreg model: inconsistent shapes");
            std::copy(rows[c].begin(), rows[c].end(), m.weights.row(c).begin());
        }
        m.loss = j.value("loss", 0.0);
        m.epochs_run = j.value("epochs_run", std::size_t{0});
        m.warning = j.value("warning", std::string{});
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("logreg model: ") + e.what());
    }
}

}  // namespace mathds
