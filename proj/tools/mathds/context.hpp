#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mathds/io.hpp"
#include "mathds/kronecker.hpp"

namespace CLI {
class App;
}

namespace mathds::cli {

namespace fs = std::filesystem;

/// Bad flag combinations found after parsing (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    fs::path cache_dir = ".mathds-cache";
    fs::path output_dir = ".";
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool no_cache = false;
    bool force = false;
    bool quiet = false;

    std::function<void()> action;  // set by the chosen subcommand
};

/// tool, version, command and seed; every artifact starts with these.
Metadata base_metadata(const Globals& g, const std::string& command);

nlohmann::ordered_json metadata_json(const Metadata& meta);

/// `explicit_path` when non-empty, else output_dir / name.
fs::path output_path(const Globals& g, const std::string& name, const std::string& explicit_path = {});

/// Atomic write, then the path on stdout.
void emit(const fs::path& path, std::string_view content);

/// Streams into a temporary sibling and renames it into place.
void emit_stream(const fs::path& path, const std::function<void(std::ostream&)>& fill);

void note(const Globals& g, const std::string& message);

/// Character table of S_n from the cache (verified against its checksum) or
/// computed and stored.
CharacterTable cached_character_table(const Globals& g, int n);

/// Refuses (ResourceError) when the number of character-sum terms over
/// unordered triples, p(n)^4 / 6, exceeds the budget and --force is absent.
/// Prints a rough ETA either way when the job is large.
void guard_triples(const Globals& g, int n, const std::string& what);

inline constexpr double kTermBudget = 1e10;

std::vector<int> parse_int_list(const std::string& text);
std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text);

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void register_kron_commands(CLI::App& app, Globals& g);
void register_ec_commands(CLI::App& app, Globals& g);
void register_ml_commands(CLI::App& app, Globals& g);

}  // namespace mathds::cli
