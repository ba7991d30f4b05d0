#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mathds/elliptic.hpp"
#include "mathds/errors.hpp"
#include "mathds/io.hpp"
#include "mathds/random.hpp"

using namespace mathds;
namespace fs = std::filesystem;

namespace {

CurveRecord curve(std::string label, std::array<std::int64_t, 5> a, std::uint64_t conductor, int rank = 0) {
    CurveRecord c;
    c.label = std::move(label);
    c.a = a;
    c.conductor = conductor;
    c.rank = rank;
    return c;
}

std::int64_t md(std::int64_t v, std::int64_t p) { return ((v % p) + p) % p; }

// Nonsingular projective points by brute force over F_p^2, including infinity.
std::int64_t brute_nonsingular(const CurveRecord& c, std::int64_t p) {
    const auto [a1, a2, a3, a4, a6] = c.a;
    std::int64_t count = 1;
    for (std::int64_t x = 0; x < p; ++x)
        for (std::int64_t y = 0; y < p; ++y) {
            const std::int64_t f = md(y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6, p);
            if (f != 0) continue;
            const std::int64_t fx = md(a1 * y - 3 * x * x - 2 * a2 * x - a4, p);
            const std::int64_t fy = md(2 * y + a1 * x + a3, p);
            if (fx == 0 && fy == 0) continue;
            ++count;
        }
    return count;
}

const CurveRecord k496 = curve("496.a1", {0, 0, 0, 1, 1}, 496, 1);
const CurveRecord k11 = curve("11.a1", {0, -1, 1, -10, -20}, 11, 0);
const CurveRecord k65 = curve("65.a1", {1, 0, 0, -1, 0}, 65, 1);

}  // namespace

TEST_CASE("496.a1 small primes agree with brute force") {
    for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u}) {
        const auto pc = count_points_mod_p(k496, p);
        CHECK(static_cast<std::int64_t>(pc.n_points) == brute_nonsingular(k496, p));
        CHECK(count_points_exhaustive(k496, p).n_points == pc.n_points);
    }
    // Reference values from an independent computer-algebra system.
    const std::vector<int> expected{0, 0, -3, 3, -2, -4};
    CHECK(ap_vector(k496, 6) == expected);
    CHECK(ap_vector(k496, 3) == std::vector<int>{0, 0, -3});
    CHECK(ap_vector(k496, 0).empty());
    CHECK_FALSE(count_points_mod_p(k496, 2).smooth);
    CHECK(count_points_mod_p(k496, 5).smooth);
}

TEST_CASE("y^2 = x^3 + x over F_5 by two paths") {
    const auto c = curve("x3x", {0, 0, 0, 1, 0}, 64);
    CHECK(static_cast<std::int64_t>(count_points_mod_p(c, 5).n_points) == brute_nonsingular(c, 5));
    CHECK(5 + 1 - static_cast<int>(count_points_mod_p(c, 5).n_points) == ap_character_sum(1, 0, 5));
}

TEST_CASE("bad primes: multiplicative and additive reduction") {
    CHECK(ap(k11, 11) == 1);   // split
    CHECK(ap(k65, 5) == -1);   // non-split
    CHECK(ap(k65, 13) == -1);  // non-split
    CHECK(ap(k496, 2) == 0);   // additive
    CHECK(ap(k496, 31) == static_cast<int>(31 - brute_nonsingular(k496, 31)));
    for (std::uint32_t p : {5u, 13u}) CHECK(ap(k65, p) == static_cast<int>(p - brute_nonsingular(k65, p)));
}

TEST_CASE("bad-prime inconsistency is a data error") {
    // Claimed conductor 7 but the model has good reduction at 7.
    const auto wrong = curve("bad", {0, -1, 1, -10, -20}, 7);
    CHECK_THROWS_AS(ap(wrong, 7), DataError);
    // Claimed conductor 1 but the model is singular at 11.
    const auto missing = curve("bad2", {0, -1, 1, -10, -20}, 1);
    CHECK_THROWS_AS(ap(missing, 11), DataError);
}

TEST_CASE("two counting paths agree on 100 random (curve, p) pairs") {
    Rng rng(2024);
    const auto primes = first_primes(300);
    int checked = 0;
    while (checked < 100) {
        const std::int64_t a = static_cast<std::int64_t>(rng.below(2001)) - 1000;
        const std::int64_t b = static_cast<std::int64_t>(rng.below(2001)) - 1000;
        const std::uint32_t p = primes[2 + rng.below(primes.size() - 2)];
        const auto c = curve("r", {0, 0, 0, a, b}, 1);
        if (md(4 * a * a * a + 27 * b * b, p) == 0) continue;
        const int via_table = static_cast<int>(p) + 1 - static_cast<int>(count_points_mod_p(c, p).n_points);
        CHECK(via_table == ap_character_sum(a, b, p));
        if (p < 200) CHECK(count_points_exhaustive(c, p).n_points == count_points_mod_p(c, p).n_points);
        ++checked;
    }
}

TEST_CASE("general Weierstrass forms: table path matches brute force") {
    Rng rng(9);
    for (int t = 0; t < 60; ++t) {
        std::array<std::int64_t, 5> a{};
        for (auto& v : a) v = static_cast<std::int64_t>(rng.below(41)) - 20;
        const auto c = curve("g", a, 1);
        for (std::uint32_t p : {2u, 3u, 5u, 7u, 17u, 101u})
            CHECK(static_cast<std::int64_t>(count_points_mod_p(c, p).n_points) == brute_nonsingular(c, p));
    }
}

TEST_CASE("Hasse bound over the first 300 primes") {
    for (const auto& c : {k11, k65, k496}) {
        const auto v = ap_vector(c, 300);
        const auto primes = first_primes(300);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (c.conductor % primes[i] == 0) CHECK(std::abs(v[i]) <= 1);
            else CHECK(v[i] * v[i] <= 4 * static_cast<double>(primes[i]));
        }
    }
}

TEST_CASE("primes and discriminant") {
    CHECK(first_primes(5) == std::vector<std::uint32_t>{2, 3, 5, 7, 11});
    CHECK(first_primes(1000).back() == 7919);
    CHECK(is_prime(7919));
    CHECK_FALSE(is_prime(7917));
    CHECK(discriminant(k496) == -496);
    CHECK(discriminant(k65) == 65);
    CHECK(discriminant(curve("s", {0, 0, 0, 0, 0}, 1)) == 0);
    CHECK_THROWS_AS(count_points_mod_p(k11, 15), DomainError);
    CHECK_THROWS_AS(ap_vector(k11, kMaxApPrimes + 1), DomainError);
}

TEST_CASE("curve CSV ingestion") {
    std::istringstream one("label,a1,a2,a3,a4,a6,conductor,rank\n496.a1,0,0,0,1,1,496,1\n");
    const auto curves = read_curves(one);
    REQUIRE(curves.size() == 1);
    CHECK(curves[0].label == "496.a1");
    CHECK(curves[0].conductor == 496);
    CHECK(curves[0].rank == 1);

    std::istringstream empty("label,a1,a2,a3,a4,a6,conductor,rank\n");
    CHECK(read_curves(empty).empty());

    std::istringstream bad("label,a1,a2,a3,a4,a6,conductor,rank\n11.a1,0,-1,1,-10,-20,11,0\nx,1,2,3\n");
    try {
        read_curves(bad);
        FAIL("expected a data error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    std::istringstream singular("label,a1,a2,a3,a4,a6,conductor,rank\ns,0,0,0,0,0,1,0\n11.a1,0,-1,1,-10,-20,11,0\n");
    IngestReport report;
    CHECK(read_curves(singular, &report).size() == 1);
    CHECK(report.rejected_singular == 1);
}

TEST_CASE("filtering and balancing") {
    std::vector<CurveRecord> all;
    for (int i = 0; i < 40; ++i) all.push_back(curve("c" + std::to_string(i), {0, 0, 0, i + 1, 1}, 100 + i, i % 3 == 0));
    CurveFilter f;
    f.conductor_range = std::make_pair(std::uint64_t{110}, std::uint64_t{129});
    CHECK(filter_curves(all, f).size() == 20);
    f.ranks = std::vector<int>{0, 1};
    f.balanced = true;
    f.seed = 5;
    const auto bal = filter_curves(all, f);
    int r0 = 0, r1 = 0;
    for (const auto& c : bal) (c.rank == 0 ? r0 : r1)++;
    CHECK(r0 == r1);
    CHECK(r0 > 0);
    for (std::size_t i = 1; i < bal.size(); ++i) CHECK(bal[i - 1].conductor < bal[i].conductor);
    CHECK(filter_curves(all, f).size() == bal.size());
    f.max_count = 1000;
    CHECK_THROWS_AS(filter_curves(all, f), DataError);
}

TEST_CASE("a_p cache round-trips and heals corruption") {
    const fs::path dir = fs::temp_directory_path() / "mathds_test_ap_cache";
    fs::remove_all(dir);
    const auto v = ap_vector_cached(k496, 50, dir);
    CHECK(v == ap_vector(k496, 50));
    const fs::path file = dir / "496.a1.k50.csv";
    REQUIRE(fs::exists(file));
    const std::string first = read_file(file);
    CHECK(ap_vector_cached(k496, 50, dir) == v);
    {
        std::ofstream out(file, std::ios::trunc);
        out << "p,ap\n2,99\n";
    }
    CHECK(ap_vector_cached(k496, 50, dir) == v);
    CHECK(read_file(file) == first);
    fs::remove_all(dir);
}

TEST_CASE("a_p matrix over several curves") {
    const auto m = build_ap_matrix({k11, k65, k496}, 25, 2);
    CHECK(m.size() == 3);
    CHECK(m.k() == 25);
    CHECK(m.rows[2] == ap_vector(k496, 25));
    CHECK(m.labels[1] == "65.a1");
    CHECK(m.ranks == std::vector<int>{0, 1, 1});
}
