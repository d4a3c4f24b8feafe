#include "cuspfs/experiment/runner.hpp"

#include <cstdlib>
#include <fstream>

#include "cuspfs/error.hpp"
#include "cuspfs/experiment/commands.hpp"
#include "cuspfs/experiment/config.hpp"
#include "cuspfs/experiment/report.hpp"
#include "cuspfs/parallel.hpp"

namespace cuspfs::experiment {

void apply_thread_env() {
    const char* env = std::getenv("CUSPFS_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 0) throw ConfigError("CUSPFS_THREADS must be a non-negative integer");
    thread_limit() = static_cast<unsigned>(n);
}

void list_checks(std::ostream& os) {
    std::size_t width = 0;
    for (const auto& c : check_catalog()) width = std::max(width, c.id.size());
    for (const auto& c : check_catalog()) os << c.id << std::string(width + 2 - c.id.size(), ' ') << c.description << '\n';
}

int run(const RunOptions& options, std::ostream& log) {
    ExperimentConfig config;
    std::filesystem::path out;
    try {
        apply_thread_env();
        config = load_config(options.config, options.seed);
        if (config.command != options.command)
            throw ConfigError("config command '" + config.command + "' does not match '" + options.command + "'");
        if (options.out) out = *options.out;
        else if (config.out) out = *config.out;
        else throw ConfigError("no output directory: pass --out or set \"out\"");
        validate_selection(config);
    } catch (const Error& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigFailure;
    }

    RunResult result;
    try {
        result = execute(config);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const DomainError& e) {
        log << "domain error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const Error& e) {
        std::filesystem::create_directories(out);
        std::ofstream diag(out / "diagnostic.txt");
        diag << config.command << ": " << e.what() << '\n';
        log << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }

    write_report(out, result);
    for (const auto& c : result.checks)
        log << (c.pass ? "PASS " : "FAIL ") << c.id << " value=" << format_number(c.value) << '\n';
    return result.all_pass() ? kAllPass : kCheckFailed;
}

}  // namespace cuspfs::experiment
