#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "cuspfs/error.hpp"
#include "cuspfs/experiment/commands.hpp"
#include "cuspfs/experiment/config.hpp"
#include "cuspfs/experiment/report.hpp"
#include "cuspfs/experiment/runner.hpp"

namespace ex = cuspfs::experiment;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    std::string config;
    std::string title;
};

const std::vector<Criterion> kCriteria{
    {1, "ac01_connection_identities", "connection and product-rule identities with second-order decay"},
    {2, "ac02_recursion_round_trip", "correction recursion round trip"},
    {3, "ac03_measure_change", "order-zero measure change is exact"},
    {4, "ac04_norm_equivalence", "weighted against regularized norm equivalence"},
    {5, "ac05_weight_isomorphism", "weight isomorphism and commutator brackets"},
    {6, "ac06_localization", "localization right inverse and localized norms"},
    {7, "ac07_cone_exactness", "cone and cusp embedding metric bounds"},
    {8, "ac08_analytic_oracles", "weighted L_q and arclength oracles"},
    {9, "ac09_solver", "manufactured-solution orders and heat-mode decay"},
    {10, "ac10_maximal_regularity", "maximal-regularity functional"},
    {11, "ac11_kondratiev", "Kondratiev norm equivalence"},
    {12, "ac12_embedding", "monotonicity, embedding and multiplication"},
};

}  // namespace

int main(int argc, char** argv) {
    const fs::path out_root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "cuspfs_acceptance";
    try {
        ex::apply_thread_env();
    } catch (const cuspfs::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    int failed = 0;
    for (const auto& c : kCriteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string line;
        bool pass = false;
        try {
            const auto config = ex::load_config(ex::config_dir() / "acceptance" / (c.config + ".json"));
            const auto result = ex::execute(config);
            ex::write_report(out_root / c.config, result);
            pass = !result.checks.empty() && result.all_pass();
            for (const auto& check : result.checks) {
                line += "\n    " + std::string(check.pass ? "pass " : "FAIL ") + check.id +
                        " value=" + ex::format_number(check.value) + " tolerance=" + check.tolerance.to_json().dump();
            }
        } catch (const std::exception& e) {
            line = "\n    error: " + std::string(e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "criterion " << c.number << ": " << (pass ? "PASS" : "FAIL") << "  " << c.title << " ("
                  << ex::format_number(std::round(secs * 10) / 10) << " s)" << line << std::endl;
        if (!pass) ++failed;
    }
    std::cout << (kCriteria.size() - failed) << "/" << kCriteria.size() << " criteria passed; reports in "
              << out_root.string() << '\n';
    return failed == 0 ? 0 : 1;
}
