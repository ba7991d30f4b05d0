#include <iostream>

#include "CLI11.hpp"
#include "context.hpp"
#include "mathds/errors.hpp"
#include "mathds/parallel.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kResource = 4, kPanic = 5 };

}  // namespace

int main(int argc, char** argv) {
    using namespace mathds;
    cli::Globals g;
    g.threads = default_threads();

    CLI::App app{"mathds: Kronecker coefficients, partition loadings and elliptic-curve murmurations"};
    app.set_version_flag("--version", std::string(MATHDS_VERSION));
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--cache-dir", g.cache_dir, "Cache directory for character tables and a_p vectors");
    app.add_option("--output-dir,-o", g.output_dir, "Directory for artifacts");
    app.add_option("--seed", g.seed, "Seed for sampling and training");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--no-cache", g.no_cache, "Ignore and do not write caches");
    app.add_flag("--force", g.force, "Run jobs over the resource budget");
    app.add_flag("--quiet,-q", g.quiet, "No progress messages on stderr");

    cli::register_kron_commands(app, g);
    cli::register_ec_commands(app, g);
    cli::register_ml_commands(app, g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (!g.action) throw cli::UsageError("no command given");
        g.action();
        return kOk;
    } catch (const cli::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kUsage;
    } catch (const ResourceError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return kResource;
    } catch (const ConsistencyError& e) {
        std::cerr << "internal consistency failure: " << e.what() << '\n';
        return kPanic;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: unparsable number (" << e.what() << ")\n";
        return kData;
    } catch (const std::out_of_range& e) {
        std::cerr << "data error: number out of range (" << e.what() << ")\n";
        return kData;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kPanic;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
}
