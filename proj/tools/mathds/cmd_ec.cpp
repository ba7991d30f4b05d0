#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "context.hpp"
#include "mathds/elliptic.hpp"
#include "mathds/errors.hpp"
#include "mathds/murmurations.hpp"

namespace mathds::cli {

namespace {

struct CurveOptions {
    std::string curves;
    std::string ap_file;
    std::size_t k = 300;
    std::string conductor;
    std::string ranks;
    std::size_t max_count = 0;
    bool balanced = false;
};

void add_curve_source(CLI::App* cmd, CurveOptions& o, bool allow_ap) {
    auto* c = cmd->add_option("--curves", o.curves, "Curve CSV (label,a1,a2,a3,a4,a6,conductor,rank)")
                  ->check(CLI::ExistingFile);
    if (allow_ap) {
        auto* a = cmd->add_option("--ap", o.ap_file, "Precomputed a_p matrix (from `ec ap`)")->check(CLI::ExistingFile);
        c->excludes(a);
    } else {
        c->required();
    }
    cmd->add_option("--k", o.k, "Number of primes (first k primes)");
    cmd->add_option("--max-count", o.max_count, "Keep at most this many curves (seeded)");
    cmd->add_flag("--balanced", o.balanced, "Equal number of curves per requested rank");
}

void describe_input(Metadata& meta, const std::string& path) {
    meta.emplace_back("input", std::filesystem::path(path).filename().string());
    std::ostringstream h;
    h << std::hex << fnv1a64(read_file(path));
    meta.emplace_back("input_fnv1a", h.str());
}

// Curves for the request, turned into a_p vectors (cached per curve).
ApMatrix load_ap_matrix(const Globals& g, const CurveOptions& o, const CurveFilter& filter, Metadata& meta) {
    if (!o.ap_file.empty()) {
        describe_input(meta, o.ap_file);
        std::istringstream in(read_file(o.ap_file));
        ApMatrix m = read_ap_matrix(in);
        if (m.k() < o.k)
            throw DataError("a_p matrix has " + std::to_string(m.k()) + " primes, " + std::to_string(o.k) +
                            " requested");
        return m;
    }
    if (o.curves.empty()) throw UsageError("give --curves FILE or --ap FILE");
    describe_input(meta, o.curves);
    IngestReport report;
    const auto curves = ingest_curves(o.curves, filter, &report);
    meta.emplace_back("curves", std::to_string(curves.size()));
    meta.emplace_back("rejected_singular", std::to_string(report.rejected_singular));
    if (report.rejected_singular)
        note(g, "skipped " + std::to_string(report.rejected_singular) + " singular rows");
    if (curves.empty()) throw DataError("no curves match the filter");
    std::optional<std::filesystem::path> cache;
    if (!g.no_cache) cache = g.cache_dir / "ap";
    return build_ap_matrix(curves, o.k, g.threads, cache);
}

}  // namespace

void register_ec_commands(CLI::App& app, Globals& g) {
    auto* ec = app.add_subcommand("ec", "Elliptic curves");
    ec->require_subcommand(1);

    // ---- ec ap ---------------------------------------------------------------------
    {
        auto* cmd = ec->add_subcommand("ap", "a_p over the first k primes for every curve");
        auto o = std::make_shared<CurveOptions>();
        auto out = std::make_shared<std::string>();
        add_curve_source(cmd, *o, false);
        cmd->add_option("--conductor", o->conductor, "Conductor range LO:HI (inclusive)");
        cmd->add_option("--ranks", o->ranks, "Comma-separated ranks to keep");
        cmd->add_option("--out", *out, "Output file");
        cmd->callback([&g, o, out] {
            g.action = [&g, o, out] {
                CurveFilter filter;
                filter.seed = g.seed;
                filter.balanced = o->balanced;
                if (!o->conductor.empty()) filter.conductor_range = parse_range(o->conductor);
                if (!o->ranks.empty()) filter.ranks = parse_int_list(o->ranks);
                if (o->max_count) filter.max_count = o->max_count;
                if (o->balanced && !filter.ranks) throw UsageError("--balanced needs --ranks");
                Metadata meta = base_metadata(g, "ec ap");
                meta.emplace_back("k", std::to_string(o->k));
                if (!o->conductor.empty()) meta.emplace_back("conductor", o->conductor);
                if (!o->ranks.empty()) meta.emplace_back("ranks", o->ranks);
                if (o->max_count) meta.emplace_back("max_count", std::to_string(o->max_count));
                meta.emplace_back("balanced", o->balanced ? "true" : "false");
                Stopwatch clock;
                const ApMatrix m = load_ap_matrix(g, *o, filter, meta);
                std::ostringstream os;
                write_ap_matrix(os, m, meta);
                emit(output_path(g, "ap_k" + std::to_string(o->k) + ".csv", *out), os.str());
                note(g, "ec ap: " + std::to_string(m.size()) + " curves in " + std::to_string(clock.seconds()) + " s");
            };
        });
    }

    // ---- murmur -----------------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("murmur", "Rank-class averages of a_p over a conductor window");
        auto o = std::make_shared<CurveOptions>();
        auto range = std::make_shared<std::string>();
        auto dyadic = std::make_shared<int>(-1);
        auto parity = std::make_shared<std::string>("even");
        auto normalize = std::make_shared<bool>(false);
        auto out = std::make_shared<std::string>();
        o->ranks = "0,1";
        add_curve_source(cmd, *o, true);
        cmd->add_option("--ranks", o->ranks, "Comma-separated ranks (default 0,1)");
        auto* range_opt = cmd->add_option("--range", *range, "Conductor range N1:N2 (inclusive)");
        auto* dyadic_opt = cmd->add_option("--dyadic", *dyadic, "Use conductors in [2^EXP, 2^(EXP+1))")
                               ->check(CLI::Range(0, 62));
        range_opt->excludes(dyadic_opt);
        cmd->add_option("--parity", *parity, "Rank parity for --dyadic")->check(CLI::IsMember({"even", "odd"}));
        cmd->add_flag("--normalize", *normalize, "With --dyadic, put p / 2^EXP on the x-axis");
        cmd->add_option("--out", *out, "Output file");
        cmd->callback([&g, o, range, dyadic, parity, normalize, out] {
            g.action = [&g, o, range, dyadic, parity, normalize, out] {
                if (range->empty() && *dyadic < 0) throw UsageError("murmur: give --range N1:N2 or --dyadic EXP");
                if (*normalize && *dyadic < 0) throw UsageError("--normalize only applies with --dyadic");
                CurveFilter filter;
                filter.seed = g.seed;
                filter.balanced = o->balanced;
                if (o->max_count) filter.max_count = o->max_count;
                Metadata meta = base_metadata(g, "murmur");
                meta.emplace_back("k", std::to_string(o->k));
                std::string name;
                std::uint64_t lo = 0, hi = 0;
                if (*dyadic >= 0) {
                    lo = std::uint64_t{1} << *dyadic;
                    hi = 2 * lo - 1;
                    name = "murmur_dyadic_e" + std::to_string(*dyadic) + "_" + *parity + "_k" + std::to_string(o->k);
                } else {
                    std::tie(lo, hi) = parse_range(*range);
                    filter.ranks = parse_int_list(o->ranks);
                    name = "murmur_r" + o->ranks + "_" + std::to_string(lo) + "-" + std::to_string(hi) + "_k" +
                           std::to_string(o->k);
                    for (char& c : name)
                        if (c == ',') c = '-';
                }
                filter.conductor_range = std::make_pair(lo, hi);
                const ApMatrix m = load_ap_matrix(g, *o, filter, meta);
                const MurmurationSeries s =
                    *dyadic >= 0
                        ? dyadic_murmuration(m, *parity == "even" ? Parity::even : Parity::odd, *dyadic, o->k,
                                             *normalize ? XAxis::prime_over_N : XAxis::prime)
                        : murmuration(m, parse_int_list(o->ranks), lo, hi, o->k);
                std::ostringstream os;
                write_series_csv(os, s, meta);
                emit(output_path(g, name + ".csv", *out), os.str());
                if (s.values.size() == 2)
                    note(g, "crossings between " + s.class_names[0] + " and " + s.class_names[1] + ": " +
                                std::to_string(count_crossings(s.values[0], s.values[1])));
            };
        });
    }
}

}  // namespace mathds::cli
