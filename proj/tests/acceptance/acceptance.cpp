// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mathds/elliptic.hpp"
#include "mathds/io.hpp"
#include "mathds/kronecker.hpp"
#include "mathds/kronecker_batch.hpp"
#include "mathds/loadings.hpp"
#include "mathds/mlkit.hpp"
#include "mathds/murmurations.hpp"
#include "mathds/parallel.hpp"
#include "mathds/partitions.hpp"

using namespace mathds;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v, int d = 4) { return format_fixed(v, d); }

unsigned threads() { return default_threads(); }

const fs::path kCurves = fs::path(MATHDS_REPO_DATA_DIR) / "curves_conductor_le_10000.csv";

std::vector<CurveRecord> fixture_curves(const CurveFilter& filter = {}) {
    if (!fs::exists(kCurves)) return {};
    return ingest_curves(kCurves, filter);
}

// ---- 1

Outcome exact_matrices() {
    const std::vector<std::vector<int>> y6{
        {36, 30, 24, 24, 18, 18, 18, 12, 12, 12, 6}, {30, 26, 22, 21, 18, 17, 16, 12, 12, 11, 6},
        {24, 22, 20, 18, 18, 16, 14, 12, 12, 10, 6}, {24, 21, 18, 18, 15, 15, 14, 12, 11, 10, 6},
        {18, 18, 18, 15, 18, 15, 12, 12, 12, 9, 6},  {18, 17, 16, 15, 15, 14, 12, 12, 11, 9, 6},
        {18, 16, 14, 14, 12, 12, 12, 10, 10, 9, 6},  {12, 12, 12, 12, 12, 12, 10, 12, 10, 8, 6},
        {12, 12, 12, 11, 12, 11, 10, 10, 10, 8, 6},  {12, 11, 10, 10, 9, 9, 9, 8, 8, 8, 6},
        {6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6}};
    const std::vector<std::vector<int>> z6{
        {0, 2, 4, 4, 6, 6, 6, 8, 8, 8, 10}, {2, 0, 2, 2, 4, 4, 4, 6, 6, 6, 8}, {4, 2, 0, 2, 2, 2, 4, 4, 4, 6, 8},
        {4, 2, 2, 0, 4, 2, 2, 4, 4, 4, 6},  {6, 4, 2, 4, 0, 2, 4, 4, 4, 6, 8}, {6, 4, 2, 2, 2, 0, 2, 2, 2, 4, 6},
        {6, 4, 4, 2, 4, 2, 0, 4, 2, 2, 4},  {8, 6, 4, 4, 4, 2, 4, 0, 2, 4, 6}, {8, 6, 4, 4, 4, 2, 2, 2, 0, 2, 4},
        {8, 6, 6, 4, 6, 4, 2, 4, 2, 0, 2},  {10, 8, 8, 6, 8, 6, 4, 6, 4, 2, 0}};
    const auto t = enumerate_partitions(6);
    const auto y = similitude_matrix(t).entries;
    const auto z = difference_matrix(t).entries;
    int mismatches = 0;
    for (std::size_t i = 0; i < 11; ++i)
        for (std::size_t j = 0; j < 11; ++j) mismatches += (y(i, j) != y6[i][j]) + (z(i, j) != z6[i][j]);
    return {mismatches == 0, std::to_string(mismatches) + " mismatched entries of 242"};
}

// ---- 2

Outcome golden_loadings() {
    const std::vector<double> a{100.00, 85.89, 71.79, 66.66, 57.68, 52.55, 45.23, 33.32, 31.12, 22.81, 0.00};
    const std::vector<double> b{100.00, 37.25, 19.93, 4.36, 43.01, 0.00, 4.36, 43.01, 19.93, 37.25, 100.00};
    const auto t = enumerate_partitions(6);
    const auto la = loadings(t, LoadingKind::a);
    const auto lb = loadings(t, LoadingKind::b);
    double worst = 0;
    for (std::size_t i = 0; i < 11; ++i) worst = std::max({worst, std::abs(la[i] - a[i]), std::abs(lb[i] - b[i])});
    return {worst <= 0.01, "max deviation " + fmt(worst)};
}

// ---- 3

Outcome kronecker_correctness() {
    std::size_t table_mismatch = 0, sum_rule = 0;
    for (int n = 1; n <= 8; ++n) {
        const auto mn = character_table(n);
        const auto oracle = permutation_character_oracle(n);
        for (std::size_t i = 0; i < mn.values().size(); ++i) table_mismatch += mn.values()[i] != oracle.values()[i];
        const auto dims = mn.dimensions();
        const auto cube = compute_kronecker_cube(mn, threads());
        const std::size_t p = mn.size();
        for (std::size_t l = 0; l < p; ++l)
            for (std::size_t m = 0; m < p; ++m) {
                std::int64_t s = 0;
                for (std::size_t v = 0; v < p; ++v) s += static_cast<std::int64_t>(cube(l, m, v)) * dims[v];
                sum_rule += s != dims[l] * dims[m];
            }
    }
    const auto t12 = character_table(12);
    const KroneckerKernel kernel(t12);
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> pick(0, t12.size() - 1);
    std::size_t symmetry = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
        const auto g = kernel(a, b, c);
        symmetry += g != kernel(b, a, c) || g != kernel(c, b, a) || g != kernel(a, c, b) || g != kernel(b, c, a) ||
                    g != kernel(c, a, b);
    }
    return {table_mismatch == 0 && sum_rule == 0 && symmetry == 0,
            "table mismatches " + std::to_string(table_mismatch) + ", sum-rule violations " +
                std::to_string(sum_rule) + ", symmetry violations " + std::to_string(symmetry) + " of 10000"};
}

// ---- 4

int run_cli(const std::string& args, const fs::path& dir) {
#ifdef MATHDS_EXE
    const std::string cmd = std::string(MATHDS_EXE) + " --quiet --output-dir " + dir.string() + " --cache-dir " +
                            (dir / "cache").string() + " " + args + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    (void)args;
    (void)dir;
    return -1;
#endif
}

Outcome dataset_cardinality() {
    const fs::path dir = fs::temp_directory_path() / "mathds_acceptance_batch";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const int code = run_cli("kron batch --n 14 --all", dir);
    if (code != 0) return {false, "mathds exited with " + std::to_string(code)};
    std::ifstream in(dir / "kron_n14_all.csv");
    std::string line;
    std::size_t records = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line != "lambda;mu;nu;g") ++records;
    fs::remove_all(dir);
    return {records == 2460375, std::to_string(records) + " records"};
}

// ---- 5

Outcome bstar_reproduction() {
    const fs::path dir = fs::temp_directory_path() / "mathds_acceptance_bstar";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const int code = run_cli("bstar --n 18", dir);
    if (code != 0) return {false, "mathds exited with " + std::to_string(code)};
    const std::string json = read_file(dir / "bstar_n18.json");
    fs::remove_all(dir);
    const auto at = json.find("\"b_star\": ");
    const double value = std::stod(json.substr(at + 10));

    const auto lb = loadings(enumerate_partitions(18), LoadingKind::b);
    const double triple = triple_loading(parse_partition("12,4,2", 18), parse_partition("8,4,2,2,1,1", 18),
                                         parse_partition("5,4,3,3,1,1,1", 18), lb);
    std::size_t counterexamples = 0;
    for (int n = 3; n <= 10; ++n) {
        const auto t = character_table(n);
        const auto l = loadings(t.partitions(), LoadingKind::b);
        const auto cube = compute_kronecker_cube(t, threads());
        const auto bs = b_star(cube, l);
        if (!bs.found) continue;
        const std::size_t p = t.size();
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                for (std::size_t k = 0; k < p; ++k)
                    if (triple_loading(i, j, k, l) < bs.value - kLoadingTieTolerance && cube(i, j, k) == 0)
                        ++counterexamples;
    }
    return {std::abs(value - 44.18) <= 0.05 && std::abs(triple - 41.07) <= 0.05 && counterexamples == 0,
            "b* = " + fmt(value) + ", triple b-loading " + fmt(triple) + ", certificate counterexamples n<=10: " +
                std::to_string(counterexamples)};
}

// ---- 6

Outcome certificate_fraction_check() {
    const auto f12 = certificate_fraction(12, threads());
    const bool pin = f12.total == 456533 && f12.below == 101102 && f12.at_or_below == 101110;
    std::string detail = "n=12 pin below " + std::to_string(f12.below) + " at_or_below " +
                         std::to_string(f12.at_or_below) + (pin ? " (matches)" : " (MISMATCH)");
    bool ok = pin;
    if (std::getenv("MATHDS_ACCEPTANCE_LIGHT") == nullptr) {
        const auto f20 = certificate_fraction(20, threads());
        const bool heavy = f20.total == 246491883 && f20.at_or_below == 78382890 &&
                           std::abs(static_cast<double>(f20.at_or_below) / f20.total - 0.318) <= 0.001;
        ok = ok && heavy;
        detail += "; n=20 total " + std::to_string(f20.total) + " at_or_below " + std::to_string(f20.at_or_below) +
                  " (strict below " + std::to_string(f20.below) + ") fraction " +
                  fmt(static_cast<double>(f20.at_or_below) / f20.total);
    } else {
        detail += "; n=20 skipped (MATHDS_ACCEPTANCE_LIGHT)";
    }
    return {ok, detail};
}

// ---- 7

Outcome knn_accuracy() {
    const auto table = character_table(12);
    const auto batch = batch_kronecker(table, BatchMode::sampled(126900, 2024), threads());
    const auto cloud = point_cloud_from_triples(batch.records, 12);
    const auto [train, test] = train_test_split(cloud, 0.8, 7);
    const auto pred = knn_classify(train, test.x, 5, threads());
    const auto ev = evaluate(pred, test.y, 2);
    return {std::abs(ev.accuracy - 0.9155) <= 0.02,
            "k=5 accuracy " + fmt(ev.accuracy) + " on " + std::to_string(test.size()) + " test rows (" +
                std::to_string(batch.records.size()) + " sampled" +
                (batch.with_replacement ? ", zero class drawn with replacement" : "") + ")"};
}

// ---- 8

Outcome elliptic_invariants() {
    const auto curves = fixture_curves();
    const auto primes = first_primes(300);
    std::size_t hasse = 0, bad = 0, checked = 0;
    std::vector<CurveRecord> pool = curves;
    if (pool.empty()) {
        for (std::int64_t a = -6; a <= 6; ++a)
            for (std::int64_t b = -6; b <= 6; ++b) {
                CurveRecord c;
                c.a = {0, 0, 0, a, b};
                if (discriminant(c) != 0) pool.push_back(c);
            }
    }
    std::vector<std::size_t> hasse_v(pool.size()), bad_v(pool.size());
    parallel_for(pool.size(), threads(), [&](std::size_t i) {
        const auto& c = pool[i];
        const BigInt disc = discriminant(c);
        for (std::uint32_t p : primes) {
            const bool good = curves.empty() ? BigInt(disc % p) != 0 : c.conductor % p != 0;
            if (!good && curves.empty()) continue;
            const int a = ap(c, p);
            if (good) hasse_v[i] += static_cast<double>(a) * a > 4.0 * p;
            else bad_v[i] += a < -1 || a > 1;
        }
    });
    for (std::size_t i = 0; i < pool.size(); ++i) {
        hasse += hasse_v[i];
        bad += bad_v[i];
    }
    checked = pool.size() * primes.size();

    std::mt19937_64 rng(8);
    std::size_t disagreements = 0;
    for (int trial = 0; trial < 100; ++trial) {
        CurveRecord c;
        std::uint32_t p;
        do {
            c.a = {0, 0, 0, std::uniform_int_distribution<std::int64_t>(-500, 500)(rng),
                   std::uniform_int_distribution<std::int64_t>(-500, 500)(rng)};
            p = primes[std::uniform_int_distribution<std::size_t>(2, primes.size() - 1)(rng)];
        } while (BigInt(discriminant(c) % p) == 0);
        const int fast = static_cast<int>(p + 1) - static_cast<int>(count_points_mod_p(c, p).n_points);
        disagreements += fast != ap_character_sum(c.a[3], c.a[4], p);
    }
    std::string detail = std::to_string(pool.size()) + (curves.empty() ? " synthetic" : " ingested") +
                         " curves x 300 primes (" + std::to_string(checked) + " pairs): Hasse violations " +
                         std::to_string(hasse) + ", bad-prime violations " + std::to_string(bad) +
                         "; two-path disagreements " + std::to_string(disagreements) + " of 100";
    bool ok = hasse == 0 && bad == 0 && disagreements == 0;

    if (!curves.empty()) {
        CurveFilter filter;
        filter.ranks = std::vector<int>{0, 1};
        filter.balanced = true;
        filter.seed = 8;
        const auto ap_data = build_ap_matrix(filter_curves(curves, filter), 300, threads());
        const auto cloud = point_cloud_from_ap_matrix(ap_data);
        const auto [train, test] = train_test_split(cloud, 0.8, 8);
        const auto model = logreg_train(train, 2, LogRegConfig{});
        const auto ev = evaluate(logreg_predict(model, test.x), test.y, 2);
        ok = ok && ev.accuracy >= 0.96;
        detail += "; logistic rank 0/1 accuracy " + fmt(ev.accuracy) + " on " + std::to_string(test.size()) +
                  " held-out curves";
    } else {
        detail += "; no labeled curve file, logistic stand-ins covered by criterion 9";
    }
    return {ok, detail};
}

// ---- 9

Outcome ml_properties() {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;

    // logistic gradient
    const std::size_t n = 40, d = 5, classes = 3;
    Matrix<double> x(n, d), w(classes, d + 1);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) x(i, j) = normal(rng);
        y[i] = static_cast<int>(i % classes);
    }
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t j = 0; j <= d; ++j) w(c, j) = 0.3 * normal(rng);
    Matrix<double> grad;
    logreg_loss(w, x, y, 1e-3, &grad);
    double diff2 = 0, norm2 = 0;
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t j = 0; j <= d; ++j) {
            const double h = 1e-6;
            Matrix<double> wp = w, wm = w;
            wp(c, j) += h;
            wm(c, j) -= h;
            const double fd = (logreg_loss(wp, x, y, 1e-3, nullptr) - logreg_loss(wm, x, y, 1e-3, nullptr)) / (2 * h);
            diff2 += (fd - grad(c, j)) * (fd - grad(c, j));
            norm2 += fd * fd;
        }
    const double worst_grad = std::sqrt(diff2 / norm2);

    // PCA
    PointCloud cloud;
    cloud.x = Matrix<double>(600, 12);
    for (std::size_t i = 0; i < 600; ++i)
        for (std::size_t j = 0; j < 12; ++j) cloud.x(i, j) = normal(rng) * (1.0 + static_cast<double>(j)) + 0.5 * j;
    const auto model = pca_fit(cloud, 12);
    const auto& m = model.second_moment;
    double residual = 0, ortho = 0, trace = 0, eig_sum = 0;
    for (std::size_t i = 0; i < 12; ++i) trace += m(i, i);
    for (double v : model.all_eigenvalues) eig_sum += v;
    const double scale = std::max(1.0, std::abs(model.eigenvalues[0]));
    for (std::size_t c = 0; c < 12; ++c) {
        for (std::size_t i = 0; i < 12; ++i) {
            double mv = 0;
            for (std::size_t j = 0; j < 12; ++j) mv += m(i, j) * model.components(j, c);
            residual = std::max(residual, std::abs(mv - model.eigenvalues[c] * model.components(i, c)) / scale);
        }
        for (std::size_t c2 = 0; c2 < 12; ++c2) {
            double dot = 0;
            for (std::size_t i = 0; i < 12; ++i) dot += model.components(i, c) * model.components(i, c2);
            ortho = std::max(ortho, std::abs(dot - (c == c2 ? 1.0 : 0.0)));
        }
    }
    const double trace_err = std::abs(trace - eig_sum) / std::max(1.0, std::abs(trace));

    // softmax
    double softmax_err = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> logits(7);
        for (auto& v : logits) v = 50.0 * normal(rng);
        double s = 0;
        for (double p : softmax(logits)) s += p;
        softmax_err = std::max(softmax_err, std::abs(s - 1.0));
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "gradient rel err %.2e, PCA residual %.2e, orthonormality %.2e, trace %.2e, softmax %.2e",
                  worst_grad, residual, ortho, trace_err, softmax_err);
    return {worst_grad < 1e-5 && residual < 1e-9 && ortho < 1e-10 && trace_err < 1e-9 && softmax_err <= 1e-12, buf};
}

// ---- 10

Outcome murmuration_identities() {
    // decomposition of the pooled mean into class means
    ApMatrix data;
    data.primes = first_primes(50);
    std::mt19937_64 rng(10);
    for (int i = 0; i < 400; ++i) {
        std::vector<int> row(50);
        for (int j = 0; j < 50; ++j)
            row[j] = std::uniform_int_distribution<int>(-2 * 7, 2 * 7)(rng) % static_cast<int>(data.primes[j] + 1);
        data.rows.push_back(row);
        data.labels.push_back("c" + std::to_string(i));
        data.conductors.push_back(100 + i);
        data.ranks.push_back(i % 3);
    }
    const auto by_rank = murmuration(data, {0, 1, 2}, 100, 499, 50);
    double worst = 0;
    for (std::size_t j = 0; j < 50; ++j) {
        double pooled = 0;
        for (const auto& row : data.rows) pooled += row[j];
        pooled /= static_cast<double>(data.rows.size());
        double mix = 0;
        for (std::size_t r = 0; r < 3; ++r)
            mix += by_rank.values[r][j] * static_cast<double>(by_rank.populations[r]) / data.rows.size();
        worst = std::max(worst, std::abs(mix - pooled));
    }
    std::string detail = "decomposition error " + std::to_string(worst);
    bool ok = worst <= 1e-12;

    const auto write = [](const MurmurationSeries& s) {
        std::ostringstream out;
        write_series_csv(out, s, {});
        return out.str();
    };
    const auto again = murmuration(data, {0, 1, 2}, 100, 499, 50);
    ok = ok && write(by_rank) == write(again);

    const auto curves = fixture_curves();
    if (!curves.empty()) {
        CurveFilter window;
        window.conductor_range = std::pair<std::uint64_t, std::uint64_t>{7500, 10000};
        window.ranks = std::vector<int>{0, 1};
        const auto selected = filter_curves(curves, window);
        const std::size_t k = 300;
        const auto apm = build_ap_matrix(selected, k, threads());
        const auto s = murmuration(apm, {0, 1}, 7500, 10000, k);
        const auto rerun = murmuration(build_ap_matrix(selected, k, 1), {0, 1}, 7500, 10000, k);
        const std::size_t crossings = count_crossings(s.values[0], s.values[1]);
        const bool identical = write(s) == write(rerun);
        ok = ok && crossings >= 3 && identical;
        detail += "; fixture window [7500,10000]: " + std::to_string(s.populations[0]) + " rank-0 and " +
                  std::to_string(s.populations[1]) + " rank-1 curves, " + std::to_string(crossings) +
                  " sign changes of f0-f1 over n<=" + std::to_string(k) +
                  (identical ? ", reruns byte-identical" : ", RERUN DIFFERS");
    } else {
        detail += "; no labeled curve file, crossing check not applicable";
    }
    return {ok, detail};
}

}  // namespace

int main() {
    criterion(1, "Y_6 and Z_6 entrywise", exact_matrices);
    criterion(2, "n=6 loadings within 0.01", golden_loadings);
    criterion(3, "Kronecker correctness", kronecker_correctness);
    criterion(4, "kron batch --n 14 --all cardinality", dataset_cardinality);
    criterion(5, "b* at n=18 and certificate soundness", bstar_reproduction);
    criterion(6, "certificate fraction", certificate_fraction_check);
    criterion(7, "nearest-neighbour accuracy at n=12", knn_accuracy);
    criterion(8, "elliptic invariants", elliptic_invariants);
    criterion(9, "ML kit properties", ml_properties);
    criterion(10, "murmuration identities", murmuration_identities);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
