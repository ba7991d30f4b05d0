#include <cmath>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "context.hpp"
#include "mathds/errors.hpp"
#include "mathds/kronecker_batch.hpp"
#include "mathds/loadings.hpp"
#include "mathds/partitions.hpp"

namespace mathds::cli {

namespace {

nlohmann::ordered_json triple_json(const PartitionTable& table, const std::array<std::size_t, 3>& t) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i : t) arr.push_back(to_string(table[i]));
    return arr;
}

// Non-finite values are not representable in JSON.
nlohmann::ordered_json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

std::vector<LoadingVector> requested_loadings(const PartitionTable& table, const std::string& kind) {
    std::vector<LoadingVector> out;
    if (kind == "a" || kind == "both") out.push_back(loadings(table, LoadingKind::a));
    if (kind == "b" || kind == "both") out.push_back(loadings(table, LoadingKind::b));
    return out;
}

}  // namespace

void register_kron_commands(CLI::App& app, Globals& g) {
    // ---- partitions gen ------------------------------------------------------
    {
        auto* parts = app.add_subcommand("partitions", "Integer partitions");
        parts->require_subcommand(1);
        auto* gen = parts->add_subcommand("gen", "List the partitions of n in decreasing lex order");
        auto n = std::make_shared<int>(0);
        auto out = std::make_shared<std::string>();
        gen->add_option("--n", *n, "Size n (1..40)")->required();
        gen->add_option("--out", *out, "Output file");
        gen->callback([&g, n, out] {
            g.action = [&g, n, out] {
                const PartitionTable table = enumerate_partitions(*n);
                Metadata meta = base_metadata(g, "partitions gen");
                meta.emplace_back("n", std::to_string(*n));
                meta.emplace_back("count", std::to_string(table.size()));
                std::ostringstream os;
                os << format_metadata(meta) << "\nindex,partition,length\n";
                for (std::size_t i = 0; i < table.size(); ++i)
                    os << i << ",\"" << to_string(table[i]) << "\"," << table[i].length() << '\n';
                emit(output_path(g, "partitions_n" + std::to_string(*n) + ".csv", *out), os.str());
            };
        });
    }

    auto* kron = app.add_subcommand("kron", "Character tables and Kronecker coefficients");
    kron->require_subcommand(1);

    // ---- kron table -----------------------------------------------------------
    {
        auto* table_cmd = kron->add_subcommand("table", "Character table of S_n (cached)");
        auto n = std::make_shared<int>(0);
        auto out = std::make_shared<std::string>();
        table_cmd->add_option("--n", *n, "Size n (1..22)")->required();
        table_cmd->add_option("--out", *out, "Output file");
        table_cmd->callback([&g, n, out] {
            g.action = [&g, n, out] {
                const CharacterTable t = cached_character_table(g, *n);
                Metadata meta = base_metadata(g, "kron table");
                meta.emplace_back("n", std::to_string(*n));
                meta.emplace_back("irreps", std::to_string(t.size()));
                meta.emplace_back("columns", "class sizes in the first data row, then one row per irrep");
                std::ostringstream os;
                os << format_metadata(meta) << "\nirrep";
                for (std::size_t c = 0; c < t.size(); ++c) os << ",\"" << to_string(t.partitions()[c]) << '"';
                os << "\n\"class_size\"";
                for (std::size_t c = 0; c < t.size(); ++c) os << ',' << t.class_size(c).str();
                os << '\n';
                for (std::size_t r = 0; r < t.size(); ++r) {
                    os << '"' << to_string(t.partitions()[r]) << '"';
                    for (std::size_t c = 0; c < t.size(); ++c) os << ',' << t(r, c);
                    os << '\n';
                }
                emit(output_path(g, "character_table_n" + std::to_string(*n) + ".csv", *out), os.str());
            };
        });
    }

    // ---- kron batch -------------------------------------------------------------
    {
        auto* batch = kron->add_subcommand("batch", "Labeled triple dataset (lambda;mu;nu;g)");
        auto n = std::make_shared<int>(0);
        auto all = std::make_shared<bool>(false);
        auto sample = std::make_shared<std::size_t>(0);
        auto out = std::make_shared<std::string>();
        batch->add_option("--n", *n, "Size n")->required();
        auto* all_opt = batch->add_flag("--all", *all, "Every ordered triple");
        auto* sample_opt = batch->add_option("--sample", *sample, "Balanced sample: COUNT triples per class");
        all_opt->excludes(sample_opt);
        batch->add_option("--out", *out, "Output file");
        batch->callback([&g, n, all, sample, out] {
            g.action = [&g, n, all, sample, out] {
                if (!*all && *sample == 0) throw UsageError("kron batch: give --all or --sample COUNT");
                guard_triples(g, *n, "kron batch");
                Stopwatch clock;
                const CharacterTable table = cached_character_table(g, *n);
                const KroneckerCube cube = compute_kronecker_cube(table, g.threads);
                const PartitionTable& parts = table.partitions();
                Metadata meta = base_metadata(g, "kron batch");
                meta.emplace_back("n", std::to_string(*n));
                std::string name = "kron_n" + std::to_string(*n);
                if (*all) {
                    const auto p = static_cast<std::uint64_t>(parts.size());
                    meta.emplace_back("mode", "all");
                    meta.emplace_back("records", std::to_string(p * p * p));
                    emit_stream(output_path(g, name + "_all.csv", *out), [&](std::ostream& os) {
                        TripleDatasetWriter writer(os, parts, meta);
                        for_each_triple(cube, [&](const TripleRecord& r) { writer.write(r); });
                    });
                } else {
                    const BatchResult res = batch_kronecker(cube, BatchMode::sampled(*sample, g.seed));
                    meta.emplace_back("mode", "sample");
                    meta.emplace_back("count_per_class", std::to_string(*sample));
                    meta.emplace_back("records", std::to_string(res.records.size()));
                    meta.emplace_back("available_zero", std::to_string(res.available_zero));
                    meta.emplace_back("available_nonzero", std::to_string(res.available_nonzero));
                    meta.emplace_back("with_replacement", res.with_replacement ? "true" : "false");
                    if (res.with_replacement)
                        note(g, "warning: a class has fewer than " + std::to_string(*sample) +
                                    " triples; sampled with replacement");
                    emit_stream(output_path(g, name + "_sample" + std::to_string(*sample) + "_seed" +
                                                   std::to_string(g.seed) + ".csv",
                                               *out),
                                [&](std::ostream& os) {
                                    TripleDatasetWriter writer(os, parts, meta);
                                    for (const auto& r : res.records) writer.write(r);
                                });
                }
                note(g, "kron batch: " + std::to_string(clock.seconds()) + " s");
            };
        });
    }

    // ---- loadings -----------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("loadings", "a- and b-loadings of the partitions of n");
        auto n = std::make_shared<int>(0);
        auto kind = std::make_shared<std::string>("both");
        auto bins = std::make_shared<std::size_t>(0);
        auto fit = std::make_shared<bool>(false);
        auto out = std::make_shared<std::string>();
        cmd->add_option("--n", *n, "Size n (>= 2)")->required();
        cmd->add_option("--kind", *kind, "a, b or both")->check(CLI::IsMember({"a", "b", "both"}));
        cmd->add_option("--histogram", *bins, "Also write a BINS-bin histogram of triple loadings by g = 0 / g != 0");
        cmd->add_flag("--fit", *fit, "Also fit normal and gamma laws to the triple loadings");
        cmd->add_option("--out", *out, "Output file for the loadings CSV");
        cmd->callback([&g, n, kind, bins, fit, out] {
            g.action = [&g, n, kind, bins, fit, out] {
                const PartitionTable table = enumerate_partitions(*n);
                const std::vector<LoadingVector> cols = requested_loadings(table, *kind);
                Metadata meta = base_metadata(g, "loadings");
                meta.emplace_back("n", std::to_string(*n));
                meta.emplace_back("kind", *kind);
                for (const auto& c : cols)
                    meta.emplace_back("eigenvalue_" + to_string(c.kind), format_double(c.eigenvalue));
                std::ostringstream os;
                write_loadings_csv(os, table, cols, meta);
                const std::string stem = "loadings_n" + std::to_string(*n);
                emit(output_path(g, stem + ".csv", *out), os.str());

                if (*bins > 0) {
                    guard_triples(g, *n, "loadings --histogram");
                    const CharacterTable ct = cached_character_table(g, *n);
                    const KroneckerCube cube = compute_kronecker_cube(ct, g.threads);
                    for (const auto& c : cols) {
                        Metadata hm = base_metadata(g, "loadings --histogram");
                        hm.emplace_back("n", std::to_string(*n));
                        hm.emplace_back("kind", to_string(c.kind));
                        hm.emplace_back("bins", std::to_string(*bins));
                        std::ostringstream hs;
                        write_histogram_csv(hs, loading_histogram(cube, c, *bins), hm);
                        emit(g.output_dir / (stem + "_" + to_string(c.kind) + "_hist.csv"), hs.str());
                    }
                }
                if (*fit) {
                    const std::size_t p = table.size();
                    for (const auto& c : cols) {
                        std::vector<double> samples;
                        samples.reserve(p * p * p);
                        for (std::size_t i = 0; i < p; ++i)
                            for (std::size_t j = 0; j < p; ++j)
                                for (std::size_t k = 0; k < p; ++k) samples.push_back(triple_loading(i, j, k, c));
                        nlohmann::ordered_json j;
                        Metadata fm = base_metadata(g, "loadings --fit");
                        fm.emplace_back("n", std::to_string(*n));
                        fm.emplace_back("kind", to_string(c.kind));
                        j["meta"] = metadata_json(fm);
                        j["samples"] = samples.size();
                        for (auto family : {DistributionFamily::normal, DistributionFamily::gamma}) {
                            const DistributionFit f = fit_distribution(samples, family);
                            const bool normal = family == DistributionFamily::normal;
                            j[normal ? "normal" : "gamma"] = {{normal ? "mean" : "shape", f.param1},
                                                              {normal ? "sd" : "scale", f.param2},
                                                              {"ks_statistic", f.ks_statistic}};
                        }
                        emit(g.output_dir / (stem + "_" + to_string(c.kind) + "_fit.json"), j.dump(2) + "\n");
                    }
                }
            };
        });
    }

    // ---- bstar ----------------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("bstar", "Smallest b-loading over triples with g = 0");
        auto n = std::make_shared<int>(0);
        auto out = std::make_shared<std::string>();
        cmd->add_option("--n", *n, "Size n")->required();
        cmd->add_option("--out", *out, "Output JSON file");
        cmd->callback([&g, n, out] {
            g.action = [&g, n, out] {
                guard_triples(g, *n, "bstar");
                Stopwatch clock;
                const CharacterTable table = cached_character_table(g, *n);
                const auto b = certificate_loadings(table.partitions());
                const BStarResult r = b ? b_star_search(table, *b, g.threads) : BStarResult{};
                nlohmann::ordered_json j;
                Metadata meta = base_metadata(g, "bstar");
                meta.emplace_back("n", std::to_string(*n));
                j["meta"] = metadata_json(meta);
                j["n"] = *n;
                j["found"] = r.found;
                if (!b) j["reason"] = "b-loading undefined (constant Perron vector)";
                j["b_star"] = number_or_null(r.value);
                j["argmin_triple"] = r.found ? triple_json(table.partitions(), r.argmin) : nlohmann::ordered_json();
                emit(output_path(g, "bstar_n" + std::to_string(*n) + ".json", *out), j.dump(2) + "\n");
                note(g, "b_star = " + (r.found ? format_fixed(r.value, 4) : std::string("inf")) + " (" +
                            std::to_string(clock.seconds()) + " s)");
            };
        });
    }

    // ---- fraction ---------------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("fraction", "Share of triples certified nonzero by b(t) < b_star");
        auto n = std::make_shared<int>(0);
        auto out = std::make_shared<std::string>();
        cmd->add_option("--n", *n, "Size n")->required();
        cmd->add_option("--out", *out, "Output JSON file");
        cmd->callback([&g, n, out] {
            g.action = [&g, n, out] {
                guard_triples(g, *n, "fraction");
                Stopwatch clock;
                const CharacterTable table = cached_character_table(g, *n);
                const auto b = certificate_loadings(table.partitions());
                const BStarResult bs = b ? b_star_search(table, *b, g.threads) : BStarResult{};
                CertificateFraction f;
                if (b) {
                    f = certificate_fraction(*b, bs);
                } else {
                    const std::uint64_t p = table.size();
                    f.total = p * p * p;
                }
                nlohmann::ordered_json j;
                Metadata meta = base_metadata(g, "fraction");
                meta.emplace_back("n", std::to_string(*n));
                j["meta"] = metadata_json(meta);
                j["n"] = *n;
                j["b_star"] = number_or_null(bs.value);
                j["argmin_triple"] = bs.found ? triple_json(table.partitions(), bs.argmin) : nlohmann::ordered_json();
                j["total"] = f.total;
                j["below"] = f.below;
                j["at_or_below"] = f.at_or_below;
                j["fraction"] = f.fraction;
                emit(output_path(g, "fraction_n" + std::to_string(*n) + ".json", *out), j.dump(2) + "\n");
                note(g, "fraction = " + format_fixed(f.fraction, 6) + " (" + std::to_string(clock.seconds()) + " s)");
            };
        });
    }
}

}  // namespace mathds::cli
