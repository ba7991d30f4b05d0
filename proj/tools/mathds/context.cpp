#include "context.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mathds/errors.hpp"
#include "mathds/partitions.hpp"

namespace mathds::cli {

Metadata base_metadata(const Globals& g, const std::string& command) {
    return {{"tool", "mathds"}, {"version", MATHDS_VERSION}, {"command", command}, {"seed", std::to_string(g.seed)}};
}

nlohmann::ordered_json metadata_json(const Metadata& meta) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) j[k] = v;
    return j;
}

fs::path output_path(const Globals& g, const std::string& name, const std::string& explicit_path) {
    if (!explicit_path.empty()) return explicit_path;
    return g.output_dir / name;
}

namespace {

void ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

}  // namespace

void emit(const fs::path& path, std::string_view content) {
    ensure_parent(path);
    atomic_write(path, content);
    std::cout << path.string() << '\n';
}

void emit_stream(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
    ensure_parent(path);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        fill(out);
        out.flush();
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
    std::cout << path.string() << '\n';
}

void note(const Globals& g, const std::string& message) {
    if (!g.quiet) std::cerr << message << '\n';
}

CharacterTable cached_character_table(const Globals& g, int n) {
    const fs::path file = g.cache_dir / ("character_table_n" + std::to_string(n) + ".txt");
    if (!g.no_cache) {
        if (fs::exists(file)) {
            if (auto text = read_checksummed(file)) {
                std::istringstream in(*text);
                CharacterTable t = read_character_table(in);
                if (t.n() == n) return t;
            }
            note(g, "cache entry " + file.string() + " failed its checksum; recomputing");
        }
    }
    CharacterTable t = character_table(n);
    if (!g.no_cache) {
        fs::create_directories(g.cache_dir);
        std::ostringstream out;
        write_character_table(out, t);
        write_checksummed(file, out.str());
    }
    return t;
}

void guard_triples(const Globals& g, int n, const std::string& what) {
    const double p = static_cast<double>(enumerate_partitions(n).size());
    const double terms = p * p * p * p / 6.0;
    // Rough single-core throughput of the modular kernel.
    const double eta = terms / 2.0e9;
    if (terms > kTermBudget && !g.force) {
        std::ostringstream msg;
        msg << what << " at n=" << n << " needs about " << static_cast<long long>(terms)
            << " character-sum terms (budget " << static_cast<long long>(kTermBudget)
            << "); rerun with --force (estimated " << static_cast<long long>(eta / g.threads + 1) << " s)";
        throw ResourceError(msg.str());
    }
    if (terms > 1e9)
        note(g, what + " at n=" + std::to_string(n) + ": estimated " +
                    std::to_string(static_cast<long long>(eta / g.threads + 1)) + " s");
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string tok = text.substr(pos, end - pos);
        int v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
            throw UsageError("expected a comma-separated integer list, got '" + text + "'");
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text) {
    const std::size_t colon = text.find(':');
    auto parse = [&](std::string_view tok) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
            throw UsageError("expected a range LO:HI, got '" + text + "'");
        return v;
    };
    if (colon == std::string::npos) throw UsageError("expected a range LO:HI, got '" + text + "'");
    const auto lo = parse(std::string_view(text).substr(0, colon));
    const auto hi = parse(std::string_view(text).substr(colon + 1));
    if (lo > hi) throw UsageError("range " + text + " is empty");
    return {lo, hi};
}

}  // namespace mathds::cli
