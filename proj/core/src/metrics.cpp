#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "mathds/errors.hpp"
#include "mathds/mlkit.hpp"
#include "mathds/partitions.hpp"
#include "mathds/random.hpp"

namespace mathds {

std::size_t PointCloud::num_classes() const {
    if (y.empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(y.begin(), y.end())) + 1;
}

void PointCloud::validate() const {
    if (x.rows() == 0 || x.cols() == 0) throw DataError("point cloud is empty");
    for (double v : x.data())
        if (!std::isfinite(v)) throw DataError("point cloud has a non-finite entry");
    if (!y.empty()) {
        if (y.size() != x.rows()) throw DataError("point cloud: label count differs from row count");
        for (int label : y)
            if (label < 0) throw DataError("point cloud: negative label");
    }
}

PointCloud PointCloud::subset(std::span<const std::size_t> rows) const {
    PointCloud out;
    out.x = Matrix<double>(rows.size(), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = x.row(rows[i]);
        std::copy(src.begin(), src.end(), out.x.row(i).begin());
        if (!y.empty()) out.y.push_back(y[rows[i]]);
    }
    out.feature_names = feature_names;
    out.class_names = class_names;
    return out;
}

std::pair<PointCloud, PointCloud> train_test_split(const PointCloud& data, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("train_test_split: fraction must be in (0, 1)");
    const std::size_t n = data.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    const auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (cut == 0 || cut == n) throw DomainError("train_test_split: split leaves one side empty");
    return {data.subset(std::span(idx).first(cut)), data.subset(std::span(idx).subspan(cut))};
}

PointCloud point_cloud_from_triples(const std::vector<TripleRecord>& records, int n) {
    const PartitionTable table = enumerate_partitions(n);
    PointCloud pc;
    const auto d = static_cast<std::size_t>(n);
    pc.x = Matrix<double>(records.size(), 3 * d);
    pc.y.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TripleRecord& r = records[i];
        const std::uint16_t idx[3] = {r.lambda, r.mu, r.nu};
        for (std::size_t t = 0; t < 3; ++t) {
            if (idx[t] >= table.size()) throw DataError("triple dataset: partition index out of range");
            const Partition& p = table[idx[t]];
            for (std::size_t j = 0; j < d; ++j) pc.x(i, t * d + j) = p[j];
        }
        pc.y.push_back(r.g != 0 ? 1 : 0);
    }
    for (const char* part : {"lambda", "mu", "nu"})
        for (std::size_t j = 0; j < d; ++j) pc.feature_names.push_back(std::string(part) + std::to_string(j + 1));
    pc.class_names = {"zero", "nonzero"};
    return pc;
}

PointCloud point_cloud_from_ap_matrix(const ApMatrix& data) {
    if (data.size() == 0) throw DataError("a_p matrix is empty");
    std::vector<int> ranks = data.ranks;
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    PointCloud pc;
    pc.x = Matrix<double>(data.size(), data.k());
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.rows[i].size() != data.k()) throw DataError("a_p matrix row has the wrong length");
        for (std::size_t j = 0; j < data.k(); ++j) pc.x(i, j) = data.rows[i][j];
        pc.y.push_back(static_cast<int>(std::lower_bound(ranks.begin(), ranks.end(), data.ranks[i]) - ranks.begin()));
    }
    for (auto p : data.primes) pc.feature_names.push_back("a" + std::to_string(p));
    for (int r : ranks) pc.class_names.push_back("r" + std::to_string(r));
    return pc;
}

PointCloud read_point_cloud_csv(std::istream& in) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        header = split_csv_line(line);
        break;
    }
    if (header.empty()) throw DataError("point cloud CSV: missing header");
    std::ptrdiff_t label_col = -1;
    PointCloud pc;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == "label") label_col = static_cast<std::ptrdiff_t>(j);
        else pc.feature_names.push_back(header[j]);
    }
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("point cloud CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
        for (std::size_t j = 0; j < fields.size(); ++j) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(fields[j], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != fields[j].size() || fields[j].empty())
                throw DataError("point cloud CSV line " + std::to_string(line_no) + ": '" + fields[j] +
                                "' is not a number");
            if (static_cast<std::ptrdiff_t>(j) == label_col) {
                if (v != std::floor(v) || v < 0)
                    throw DataError("point cloud CSV line " + std::to_string(line_no) + ": bad label");
                pc.y.push_back(static_cast<int>(v));
            } else {
                values.push_back(v);
            }
        }
        ++rows;
    }
    pc.x = Matrix<double>(rows, pc.feature_names.size(), std::move(values));
    for (std::size_t c = 0; c < pc.num_classes(); ++c) pc.class_names.push_back(std::to_string(c));
    pc.validate();
    return pc;
}

PointCloud load_point_cloud(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::string header;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        header = line;
        break;
    }
    if (!header.empty() && header.back() == '\r') header.pop_back();
    in.clear();
    in.seekg(0);
    if (header == "lambda;mu;nu;g") {
        const TripleDataset ds = read_triple_dataset(in);
        return point_cloud_from_triples(ds.records, ds.n);
    }
    if (header.rfind("label,conductor,rank", 0) == 0) return point_cloud_from_ap_matrix(read_ap_matrix(in));
    return read_point_cloud_csv(in);
}

Evaluation evaluate(std::span<const int> pred, std::span<const int> truth, std::size_t classes) {
    if (pred.size() != truth.size()) throw DomainError("evaluate: prediction and truth lengths differ");
    if (pred.empty()) throw DomainError("evaluate: no predictions");
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0 || truth[i] < 0) throw DomainError("evaluate: negative label");
        classes = std::max({classes, static_cast<std::size_t>(pred[i]) + 1, static_cast<std::size_t>(truth[i]) + 1});
    }
    Evaluation ev;
    ev.confusion.assign(classes, std::vector<std::uint64_t>(classes, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ++ev.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];
        if (pred[i] == truth[i]) ++correct;
    }
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
    ev.per_class_precision.assign(classes, 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
        std::uint64_t predicted = 0;
        for (std::size_t t = 0; t < classes; ++t) predicted += ev.confusion[t][c];
        if (predicted) ev.per_class_precision[c] = static_cast<double>(ev.confusion[c][c]) / static_cast<double>(predicted);
    }
    return ev;
}

}  // namespace mathds
