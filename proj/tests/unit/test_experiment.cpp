#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cuspfs/error.hpp"
#include "cuspfs/experiment/commands.hpp"
#include "cuspfs/experiment/config.hpp"
#include "cuspfs/experiment/report.hpp"
#include "cuspfs/experiment/runner.hpp"
#include "doctest.h"

using namespace cuspfs::experiment;
using cuspfs::ConfigError;
namespace fs = std::filesystem;

namespace {

Json quadratic_cusp() {
    return Json::parse(R"({"characteristic": {"kind": "power", "alpha": 2}, "base": {"kind": "circle"}})");
}

Json small_equivalence(bool trivial) {
    Json doc;
    doc["command"] = "norm-equivalence";
    doc["seed"] = 3;
    doc["geometry"]["cusp"] = quadratic_cusp();
    doc["geometry"]["mesh"] = Json{{"s_len", 6}, {"n_s", 121}, {"n_theta", 16}};
    doc["spec"]["k"] = {0, 1, 2};
    doc["spec"]["q"] = {2};
    if (trivial) doc["spec"]["weight"] = "trivial";
    return doc;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cuspfs_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_json(const fs::path& dir, const Json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("catalog is sorted, unique and maps each id to one command") {
    const auto& cat = check_catalog();
    CHECK(cat.size() >= 14);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < cat.size(); ++i) {
        ids.insert(cat[i].id);
        if (i > 0) CHECK(cat[i - 1].id < cat[i].id);
        const auto& names = command_names();
        CHECK(std::find(names.begin(), names.end(), cat[i].command) != names.end());
        CHECK(!cat[i].operation.empty());
    }
    CHECK(ids.size() == cat.size());
    for (const auto& c : cat) CHECK(default_tolerances().count(c.id) == 1);
}

TEST_CASE("list-checks output is stable") {
    std::ostringstream a, b;
    list_checks(a);
    list_checks(b);
    const std::string text = a.str();
    CHECK(text == b.str());
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(check_catalog().size()));
}

TEST_CASE("unknown keys and missing q are config errors") {
    Json doc = small_equivalence(false);
    doc["spec"]["bogus"] = 1;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = small_equivalence(false);
    doc["spec"].erase("q");
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = small_equivalence(false);
    doc["geometry"]["cusp"]["characteristic"]["alpha"] = 0.5;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = small_equivalence(false);
    doc["tolerances"]["no-such-check"] = Json{{"max", 1}};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = small_equivalence(false);
    doc["checks"] = {"heat-mode-decay"};
    CHECK_THROWS_AS(validate_selection(parse_config(doc)), ConfigError);
}

TEST_CASE("tolerance relations") {
    const auto at_most = parse_tolerance(Json{{"max", 1.0}}, "t");
    CHECK(at_most.admits(1.0));
    CHECK_FALSE(at_most.admits(1.5));
    CHECK_FALSE(at_most.admits(std::nan("")));
    const auto range = parse_tolerance(Json{{"range", {0.9, 1.1}}}, "t");
    CHECK(range.admits(1.0));
    CHECK_FALSE(range.admits(0.8));
    CHECK(range.to_json() == Json{{"range", {0.9, 1.1}}});
    CHECK_THROWS_AS(parse_tolerance(Json{{"max", 1.0}, {"min", 0.0}}, "t"), ConfigError);
}

TEST_CASE("validate-characteristic reports c(1) = 2 for the quadratic cusp") {
    Json doc;
    doc["command"] = "validate-characteristic";
    doc["geometry"]["cusp"] = quadratic_cusp();
    const auto result = execute(parse_config(doc));
    REQUIRE(result.checks.size() == 2);
    const auto& bounds = result.checks[0];
    CHECK(bounds.id == "characteristic-bounds");
    CHECK(bounds.pass);
    CHECK(bounds.rows[0].k == 1.0);
    CHECK(bounds.rows[0].value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("trivial weight gives ratio one") {
    const auto result = execute(parse_config(small_equivalence(true)));
    REQUIRE(!result.checks.empty());
    for (const auto& c : result.checks) {
        CHECK(c.pass);
        for (const auto& r : c.rows) CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("number formatting round-trips and leaves NaN empty") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(kNone).empty());
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("runs are reproducible and exit codes follow the contract") {
    const fs::path dir = scratch("runner");
    const fs::path config = write_json(dir, small_equivalence(false));

    RunOptions opt{"norm-equivalence", config, dir / "a", std::nullopt};
    std::ostringstream log;
    CHECK(run(opt, log) == kAllPass);
    opt.out = dir / "b";
    CHECK(run(opt, log) == kAllPass);
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const fs::path other = dir / "b" / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
    }
    const Json summary = Json::parse(slurp(dir / "a" / "summary.json"));
    CHECK(summary.contains("measure-change"));
    CHECK(summary["measure-change"]["pass"] == true);
    const std::string csv = slurp(dir / "a" / "norm-equivalence-bracket.csv");
    CHECK(csv.rfind("check_id,function_id,k,q,lambda,value,ratio,refinement_level\n", 0) == 0);

    // Another seed changes the corpus and so the CSVs.
    opt.out = dir / "c";
    opt.seed = 11;
    CHECK(run(opt, log) == kAllPass);
    CHECK(slurp(dir / "a" / "norm-equivalence-bracket.csv") != slurp(dir / "c" / "norm-equivalence-bracket.csv"));

    // A tolerance no run can meet makes the run fail with exit 1.
    Json strict = small_equivalence(false);
    strict["tolerances"]["norm-equivalence-bracket"] = Json{{"max", 1.0}};
    opt = {"norm-equivalence", write_json(dir, strict), dir / "d", std::nullopt};
    CHECK(run(opt, log) == kCheckFailed);

    // Missing q: exit 2 and nothing written.
    Json bad = small_equivalence(false);
    bad["spec"].erase("q");
    opt = {"norm-equivalence", write_json(dir, bad), dir / "e", std::nullopt};
    CHECK(run(opt, log) == kConfigFailure);
    CHECK_FALSE(fs::exists(dir / "e"));

    // The command on the command line must match the config.
    opt = {"solve", write_json(dir, small_equivalence(false)), dir / "f", std::nullopt};
    CHECK(run(opt, log) == kConfigFailure);
    CHECK_FALSE(fs::exists(dir / "f"));
    fs::remove_all(dir);
}

TEST_CASE("numerical failure writes a diagnostic naming the step and exits 3") {
    const fs::path dir = scratch("numerical");
    Json doc;
    doc["command"] = "solve";
    doc["geometry"]["cusp"] = quadratic_cusp();
    doc["spec"] = Json{{"q", 2},         {"T", 0.02},           {"n_s", 41},
                       {"n_theta", 64},  {"dt", 0.01},          {"solver_tolerance", 1e-14},
                       {"max_iterations", 1}};
    doc["checks"] = {"manufactured-solution"};
    // With 64 angular nodes the incomplete factorization is inexact, so one iteration cannot converge.
    RunOptions opt{"solve", write_json(dir, doc), dir / "out", std::nullopt};
    std::ostringstream log;
    CHECK(run(opt, log) == kNumericalFailure);
    REQUIRE(fs::exists(dir / "out" / "diagnostic.txt"));
    CHECK(slurp(dir / "out" / "diagnostic.txt").find("step") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out" / "summary.json"));
    fs::remove_all(dir);
}
