#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "context.hpp"
#include "mathds/errors.hpp"
#include "mathds/mlkit.hpp"
#include "mathds/murmurations.hpp"
#include "mathds/svg.hpp"

namespace mathds::cli {

namespace {

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

nlohmann::ordered_json evaluation_json(const Evaluation& ev, const PointCloud& data) {
    nlohmann::ordered_json j;
    j["accuracy"] = ev.accuracy;
    j["classes"] = data.class_names;
    j["per_class_precision"] = ev.per_class_precision;
    j["confusion"] = ev.confusion;
    return j;
}

PointCloud load_labeled(const std::string& path) {
    PointCloud data = load_point_cloud(path);
    if (!data.labeled()) throw DataError(path + ": no labels (expected a `label` column)");
    return data;
}

// Colour by class name: rK follows the palette index K, otherwise position.
std::string class_color(const std::string& name, std::size_t position) {
    if (name.size() > 1 && name[0] == 'r' && std::all_of(name.begin() + 1, name.end(), ::isdigit))
        return palette_color(static_cast<std::size_t>(std::stoul(name.substr(1))));
    return palette_color(position);
}

std::string first_data_header(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') return line;
    return {};
}

}  // namespace

void register_ml_commands(CLI::App& app, Globals& g) {
    auto* ml = app.add_subcommand("ml", "PCA, logistic regression and nearest neighbours");
    ml->require_subcommand(1);

    // ---- ml pca ----------------------------------------------------------------------
    {
        auto* cmd = ml->add_subcommand("pca", "Principal components of the (uncentered) second-moment matrix");
        auto data = std::make_shared<std::string>();
        auto centered = std::make_shared<bool>(false);
        auto m = std::make_shared<std::size_t>(2);
        cmd->add_option("--data", *data, "Triple dataset, a_p matrix or CSV with a label column")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_flag("--centered", *centered, "Subtract the mean first");
        cmd->add_option("--components", *m, "Number of components");
        cmd->callback([&g, data, centered, m] {
            g.action = [&g, data, centered, m] {
                const PointCloud pc = load_point_cloud(*data);
                const PcaModel model = pca_fit(pc, *m, *centered, g.threads);
                Metadata meta = base_metadata(g, "ml pca");
                meta.emplace_back("data", std::filesystem::path(*data).filename().string());
                meta.emplace_back("components", std::to_string(*m));
                meta.emplace_back("centered", *centered ? "true" : "false");

                nlohmann::ordered_json j;
                j["meta"] = metadata_json(meta);
                j["n"] = pc.size();
                j["d"] = pc.dim();
                j["centered"] = model.centered;
                j["degenerate"] = model.degenerate;
                j["eigenvalues"] = model.eigenvalues;
                double trace = 0.0;
                for (std::size_t i = 0; i < pc.dim(); ++i) trace += model.second_moment(i, i);
                j["trace"] = trace;
                auto comps = nlohmann::ordered_json::array();
                for (std::size_t c = 0; c < model.n_components(); ++c) {
                    std::vector<double> col(pc.dim());
                    for (std::size_t r = 0; r < pc.dim(); ++r) col[r] = model.components(r, c);
                    comps.push_back(col);
                }
                j["components"] = comps;
                const std::string stem = "pca_" + stem_of(*data);
                emit(g.output_dir / (stem + ".json"), j.dump(2) + "\n");
                if (model.degenerate) note(g, "warning: kept eigenvalues are degenerate within tolerance");

                std::vector<std::vector<double>> proj;
                for (std::size_t c = 0; c < model.n_components(); ++c) proj.push_back(pca_project(model, pc, c));
                Metadata pm = meta;
                if (pc.labeled()) {
                    std::string names;
                    for (const auto& cn : pc.class_names) names += (names.empty() ? "" : ",") + cn;
                    pm.emplace_back("classes", names);
                }
                std::ostringstream os;
                os << format_metadata(pm) << "\nrow,label";
                for (std::size_t c = 0; c < model.n_components(); ++c) os << ",pc" << c + 1;
                os << '\n';
                for (std::size_t i = 0; i < pc.size(); ++i) {
                    os << i << ',' << (pc.labeled() ? std::to_string(pc.y[i]) : std::string());
                    for (const auto& col : proj) os << ',' << format_double(col[i]);
                    os << '\n';
                }
                emit(g.output_dir / (stem + "_projection.csv"), os.str());
            };
        });
    }

    // ---- ml logreg --------------------------------------------------------------------
    {
        auto* cmd = ml->add_subcommand("logreg", "Multinomial logistic regression, seeded train/test split");
        auto data = std::make_shared<std::string>();
        auto split = std::make_shared<double>(0.8);
        auto cfg = std::make_shared<LogRegConfig>();
        cmd->add_option("--data", *data, "Labeled data file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--split", *split, "Train fraction")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--lr", cfg->lr, "Learning rate");
        cmd->add_option("--epochs", cfg->epochs, "Maximum epochs");
        cmd->add_option("--l2", cfg->l2, "L2 penalty on non-bias weights");
        cmd->add_option("--patience", cfg->patience, "Epochs without improvement before stopping");
        cmd->callback([&g, data, split, cfg] {
            g.action = [&g, data, split, cfg] {
                const PointCloud pc = load_labeled(*data);
                auto [train, test] = train_test_split(pc, *split, g.seed);
                LogRegConfig c = *cfg;
                c.seed = g.seed;
                const std::size_t classes = pc.num_classes();
                Stopwatch clock;
                const LogRegModel model = logreg_train(train, classes, c);
                if (!model.warning.empty()) note(g, "warning: " + model.warning);
                const auto pred = logreg_predict(model, test.x);
                const Evaluation ev = evaluate(pred, test.y, classes);

                Metadata meta = base_metadata(g, "ml logreg");
                meta.emplace_back("data", std::filesystem::path(*data).filename().string());
                meta.emplace_back("split", format_double(*split));
                const std::string stem = "logreg_" + stem_of(*data);
                nlohmann::ordered_json mj = nlohmann::ordered_json::parse(logreg_to_json(model));
                nlohmann::ordered_json model_json;
                model_json["meta"] = metadata_json(meta);
                for (auto& [k, v] : mj.items()) model_json[k] = v;
                emit(g.output_dir / (stem + "_model.json"), model_json.dump(2) + "\n");

                nlohmann::ordered_json j;
                j["meta"] = metadata_json(meta);
                const auto metrics = evaluation_json(ev, pc);
                for (auto& [k, v] : metrics.items()) j[k] = v;
                j["n_train"] = train.size();
                j["n_test"] = test.size();
                j["seed"] = g.seed;
                j["epochs_run"] = model.epochs_run;
                if (!model.warning.empty()) j["warning"] = model.warning;
                emit(g.output_dir / (stem + "_metrics.json"), j.dump(2) + "\n");
                note(g, "test accuracy " + format_fixed(ev.accuracy, 4) + " (" + std::to_string(clock.seconds()) +
                            " s)");
            };
        });
    }

    // ---- ml knn -------------------------------------------------------------------------
    {
        auto* cmd = ml->add_subcommand("knn", "k-nearest-neighbour classifier, seeded train/test split");
        auto data = std::make_shared<std::string>();
        auto split = std::make_shared<double>(0.8);
        auto k = std::make_shared<std::size_t>(5);
        cmd->add_option("--data", *data, "Labeled data file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--split", *split, "Train fraction")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--k-neighbors", *k, "Neighbours per vote (default 5)")->check(CLI::PositiveNumber);
        cmd->callback([&g, data, split, k] {
            g.action = [&g, data, split, k] {
                const PointCloud pc = load_labeled(*data);
                auto [train, test] = train_test_split(pc, *split, g.seed);
                Stopwatch clock;
                const auto pred = knn_classify(train, test.x, *k, g.threads);
                const Evaluation ev = evaluate(pred, test.y, pc.num_classes());
                Metadata meta = base_metadata(g, "ml knn");
                meta.emplace_back("data", std::filesystem::path(*data).filename().string());
                meta.emplace_back("split", format_double(*split));
                meta.emplace_back("k_neighbors", std::to_string(*k));
                nlohmann::ordered_json j;
                j["meta"] = metadata_json(meta);
                const auto metrics = evaluation_json(ev, pc);
                for (auto& [key, v] : metrics.items()) j[key] = v;
                j["n_train"] = train.size();
                j["n_test"] = test.size();
                j["seed"] = g.seed;
                emit(g.output_dir / ("knn_" + stem_of(*data) + "_metrics.json"), j.dump(2) + "\n");
                note(g, "test accuracy " + format_fixed(ev.accuracy, 4) + " (" + std::to_string(clock.seconds()) +
                            " s)");
            };
        });
    }

    // ---- plot -----------------------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("plot", "SVG of a murmuration series, histogram or PCA projection");
        auto series = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto title = std::make_shared<std::string>();
        auto smooth = std::make_shared<std::size_t>(0);
        auto bins = std::make_shared<std::size_t>(60);
        cmd->add_option("--series", *series, "CSV written by murmur, loadings --histogram or ml pca")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", *out, "Output SVG")->required();
        cmd->add_option("--title", *title, "Plot title");
        cmd->add_option("--smooth", *smooth, "Centered moving-average window for series");
        cmd->add_option("--bins", *bins, "Bins for a projection histogram")->check(CLI::PositiveNumber);
        cmd->callback([&g, series, out, title, smooth, bins] {
            g.action = [&g, series, out, title, smooth, bins] {
                const std::string text = read_file(*series);
                const std::string header = first_data_header(text);
                PlotOptions opt;
                opt.title = *title;
                opt.version = MATHDS_VERSION;
                std::string svg;
                std::istringstream in(text);
                if (header.rfind("n,p,", 0) == 0) {
                    Metadata meta;
                    const MurmurationSeries s = read_series_csv(in, &meta);
                    std::vector<PlotSeries> lines;
                    for (std::size_t c = 0; c < s.values.size(); ++c) {
                        PlotSeries ps;
                        ps.name = s.class_names[c] + " (" + std::to_string(s.populations[c]) + ")";
                        for (auto p : s.primes) ps.x.push_back(static_cast<double>(p) / s.x_scale);
                        ps.y = moving_average(s.values[c], *smooth);
                        ps.color = class_color(s.class_names[c], c);
                        lines.push_back(std::move(ps));
                    }
                    opt.x_label = s.x_axis == XAxis::prime ? "p" : "p / N";
                    opt.y_label = "mean a_p";
                    opt.scatter = *smooth <= 1;
                    if (opt.title.empty())
                        opt.title = "conductor " + std::to_string(s.range_lo) + " to " + std::to_string(s.range_hi);
                    svg = svg_line_plot(lines, opt);
                } else if (header.rfind("bin_left,", 0) == 0) {
                    Metadata meta;
                    const auto hist = read_histogram_csv(in, &meta);
                    std::vector<double> edges;
                    HistogramSeries nz{"g != 0", {}, palette_color(0)}, z{"g = 0", {}, palette_color(1)};
                    for (const auto& b : hist) {
                        edges.push_back(b.left);
                        nz.counts.push_back(static_cast<double>(b.nonzero));
                        z.counts.push_back(static_cast<double>(b.zero));
                    }
                    if (!hist.empty()) edges.push_back(hist.back().right);
                    opt.x_label = metadata_value(meta, "kind").value_or("") + "-loading of triple";
                    opt.y_label = "ordered triples";
                    svg = svg_histogram(edges, {nz, z}, opt);
                } else if (header.rfind("row,label,pc1", 0) == 0) {
                    std::string line;
                    Metadata meta;
                    std::vector<std::vector<double>> by_label;
                    while (std::getline(in, line)) {
                        if (line.empty()) continue;
                        if (line[0] == '#') {
                            meta = parse_metadata(line);
                            continue;
                        }
                        if (line == header) continue;
                        const auto f = split_csv_line(line);
                        if (f.size() < 3) throw DataError("projection CSV: short row");
                        const std::size_t lab = f[1].empty() ? 0 : std::stoul(f[1]);
                        if (by_label.size() <= lab) by_label.resize(lab + 1);
                        by_label[lab].push_back(std::stod(f[2]));
                    }
                    double lo = 0, hi = 0;
                    bool first = true;
                    for (const auto& v : by_label)
                        for (double x : v) {
                            lo = first ? x : std::min(lo, x);
                            hi = first ? x : std::max(hi, x);
                            first = false;
                        }
                    if (first) throw DataError("projection CSV: no rows");
                    if (!(lo < hi)) hi = lo + 1;
                    std::vector<double> edges;
                    for (std::size_t b = 0; b <= *bins; ++b)
                        edges.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(*bins));
                    std::vector<std::string> names;
                    if (auto cls = metadata_value(meta, "classes")) names = split_csv_line(*cls);
                    std::vector<HistogramSeries> hs;
                    for (std::size_t l = 0; l < by_label.size(); ++l) {
                        const std::string name = l < names.size() ? names[l] : std::to_string(l);
                        hs.push_back({name, bin_counts(by_label[l], lo, hi, *bins), class_color(name, l)});
                    }
                    opt.x_label = "PC1";
                    opt.y_label = "count";
                    svg = svg_histogram(edges, hs, opt);
                } else {
                    throw DataError(*series + ": not a series, histogram or projection CSV");
                }
                emit(*out, svg);
            };
        });
    }
}

}  // namespace mathds::cli
