#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mathds/errors.hpp"
#include "mathds/io.hpp"
#include "mathds/kronecker.hpp"
#include "mathds/kronecker_batch.hpp"
#include "mathds/loadings.hpp"
#include "mathds/partitions.hpp"

using namespace mathds;
namespace fs = std::filesystem;

TEST_CASE("metadata escapes and round-trips") {
    const Metadata meta{{"tool", "mathds"}, {"path", "a b=c%d\te"}, {"empty", ""}, {"k y", "line\nbreak"}};
    const std::string line = format_metadata(meta);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(line.rfind("# ", 0) == 0);
    CHECK(parse_metadata(line) == meta);
    CHECK(metadata_value(meta, "path") == "a b=c%d\te");
    CHECK_FALSE(metadata_value(meta, "missing"));
    CHECK_THROWS_AS(parse_metadata("no hash"), DataError);
    CHECK_THROWS_AS(parse_metadata("# novalue"), DataError);
}

TEST_CASE("fnv1a reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("checksummed files detect corruption") {
    const fs::path dir = fs::temp_directory_path() / "mathds_test_io";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path file = dir / "x.txt";
    write_checksummed(file, "hello\n");
    CHECK(read_checksummed(file) == "hello\n");
    {
        std::ofstream out(file, std::ios::app);
        out << "tampered";
    }
    CHECK_FALSE(read_checksummed(file));
    CHECK_FALSE(read_checksummed(dir / "missing.txt"));
    atomic_write(file, "plain");
    CHECK(read_file(file) == "plain");
    CHECK_FALSE(fs::exists(dir / "x.txt.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("number formatting") {
    CHECK(format_fixed(85.8912, 2) == "85.89");
    CHECK(format_fixed(-0.001, 2) == "0.00");
    CHECK(format_fixed(100.0, 2) == "100.00");
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("CSV splitting follows quoting rules") {
    CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_csv_line("\"12,4,2\",1.5") == std::vector<std::string>{"12,4,2", "1.5"});
    CHECK(split_csv_line("\"say \"\"hi\"\"\",x") == std::vector<std::string>{"say \"hi\"", "x"});
    CHECK(split_csv_line("a;b", ';') == std::vector<std::string>{"a", "b"});
    CHECK(split_csv_line(",") == std::vector<std::string>{"", ""});
}

TEST_CASE("triple dataset round-trip") {
    const auto t = character_table(5);
    const auto res = batch_kronecker(t, BatchMode::all(), 1);
    std::ostringstream out;
    {
        TripleDatasetWriter w(out, t.partitions(), {{"n", "5"}, {"mode", "all"}, {"seed", "0"}});
        for (const auto& r : res.records) w.write(r);
        CHECK(w.rows() == 343);
    }
    const std::string text = out.str();
    CHECK(text.find("\n5;5;5;1\n") != std::string::npos);
    std::istringstream in(text);
    const auto back = read_triple_dataset(in);
    CHECK(back.n == 5);
    REQUIRE(back.records.size() == res.records.size());
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        CHECK(back.records[i].lambda == res.records[i].lambda);
        CHECK(back.records[i].nu == res.records[i].nu);
        CHECK(back.records[i].g == res.records[i].g);
    }
    std::istringstream broken("# n=5\nlambda;mu;nu;g\n5;5;9;1\n");
    CHECK_THROWS_AS(read_triple_dataset(broken), DataError);
}

TEST_CASE("loadings and histogram CSV") {
    const auto t = enumerate_partitions(6);
    const std::vector<LoadingVector> cols{loadings(t, LoadingKind::a), loadings(t, LoadingKind::b)};
    std::ostringstream out;
    write_loadings_csv(out, t, cols, {{"n", "6"}});
    CHECK(out.str().find("partition,a_loading,b_loading\n\"6\",100.00,100.00\n\"5,1\",85.89,37.25\n") !=
          std::string::npos);

    std::vector<HistogramBin> bins{{0, 10, 3, 1}, {10, 20, 0, 5}};
    std::ostringstream h;
    write_histogram_csv(h, bins, {{"kind", "a"}});
    std::istringstream in(h.str());
    Metadata meta;
    const auto back = read_histogram_csv(in, &meta);
    REQUIRE(back.size() == 2);
    CHECK(back[1].zero == 5);
    CHECK(back[0].right == 10);
    CHECK(metadata_value(meta, "kind") == "a");
}

TEST_CASE("a_p matrix CSV round-trip") {
    ApMatrix m;
    m.primes = {2, 3, 5};
    m.rows = {{0, 0, -3}, {-2, -1, 1}};
    m.labels = {"496.a1", "11.a1"};
    m.conductors = {496, 11};
    m.ranks = {1, 0};
    std::ostringstream out;
    write_ap_matrix(out, m, {{"k", "3"}});
    std::istringstream in(out.str());
    const auto back = read_ap_matrix(in);
    CHECK(back.primes == m.primes);
    CHECK(back.rows == m.rows);
    CHECK(back.labels == m.labels);
    CHECK(back.conductors == m.conductors);
    CHECK(back.ranks == m.ranks);
}
