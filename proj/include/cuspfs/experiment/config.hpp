#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cuspfs/cusp/model_cusp.hpp"
#include "cuspfs/kondratiev/kondratiev.hpp"
#include "cuspfs/parabolic/solver.hpp"
#include "cuspfs/parabolic/study.hpp"
#include "cuspfs/weighted/checks.hpp"
#include "cuspfs/weighted/discretization.hpp"
#include "json.hpp"

namespace cuspfs::experiment {

using Json = nlohmann::json;

/// Acceptance rule of one check: value <= hi, value >= lo, or lo <= value <= hi.
struct Tolerance {
    enum class Relation { at_most, at_least, within };
    Relation relation = Relation::at_most;
    double lo = 0.0;
    double hi = 0.0;

    bool admits(double value) const;
    Json to_json() const;
    std::string relation_name() const;
};

Tolerance parse_tolerance(const Json& j, const std::string& where);

/// Tolerances keyed by check id.
using ToleranceTable = std::map<std::string, Tolerance>;

/// Directory holding tolerances.json and csv_schema.json; CUSPFS_SHARE_DIR overrides the built-in path.
std::filesystem::path share_dir();
/// Directory holding the shipped configs.
std::filesystem::path config_dir();

ToleranceTable load_tolerances(const std::filesystem::path& path);
/// The shipped default table.
const ToleranceTable& default_tolerances();

struct CuspConfig {
    cusp::CharacteristicSpec characteristic;
    cusp::CuspBase base;
    cusp::CuspFlavor flavor = cusp::CuspFlavor::cusp;
    double epsilon = 1.0;
    bool cylinder = true;  ///< grading: cylinder (uniform s) or stretched (t) coordinates

    cusp::ModelCusp build() const;
    std::string label() const;
};

struct CorpusConfig {
    std::size_t count = 12;
    double cutoff = 0.75;
};

struct CharacteristicJob {
    std::vector<CuspConfig> cusps;
    double t_min = 1e-8;
    std::size_t samples = 2048;
    int j_max = 4;
};

struct LqCase {
    double mu = 1.0;
    double lambda = 0.0;
    double q = 2.0;
};

struct CuspReportJob {
    std::vector<CuspConfig> cusps;
    weighted::MeshSpec mesh;
    int k_max = 2;
    std::vector<LqCase> lq_cases;
    double lq_s_len = 20.0;
    std::size_t lq_n_s = 40001;
};

struct IdentityJob {
    CuspConfig cusp;
    weighted::MeshSpec mesh;
    double lambda = 1.0;
    int k_max = 3;
};

struct LocalizationJob {
    CuspConfig cusp;
    weighted::MeshSpec mesh;
    std::vector<double> overlaps{0.4, 0.6};
    int k_max = 2;
    std::vector<double> qs;
};

struct EquivalenceJob {
    std::vector<CuspConfig> cusps;
    weighted::MeshSpec mesh;
    std::vector<int> orders{0, 1, 2};
    std::vector<double> qs;
    std::vector<double> lambdas;
    bool trivial_weight = false;
};

struct MonotonicityConfig {
    int k = 1;
    double q = 2.0;
    double lambda0 = 0.0;
    double lambda1 = 1.0;
};

struct MultiplicationConfig {
    int k = 1;
    double q = 2.0;
    double lambda0 = 0.5;
    double lambda1 = 0.5;
};

/// Shared by the embedding and multiplication commands.
struct EmbeddingJob {
    std::vector<CuspConfig> cusps;
    weighted::MeshSpec mesh;
    std::vector<weighted::EmbeddingSpec> variants;
    std::optional<MonotonicityConfig> monotonicity;
    std::optional<MultiplicationConfig> multiplication;
};

struct HeatModeConfig {
    double T = 0.5;
    double dt = 0.005;
    std::size_t n = 32;
};

struct SolveJob {
    CuspConfig cusp;
    parabolic::MmsSpec mms;
    double dt = 0.01;
    parabolic::Scheme scheme = parabolic::Scheme::implicit_euler;
    double solver_tolerance = 1e-10;
    int max_iterations = 2000;  ///< per linear solve
    std::optional<double> time_study_dt;
    std::optional<double> space_study_dt;
    std::optional<HeatModeConfig> heat_mode;
};

struct MrJob {
    std::vector<double> alphas;
    std::vector<double> lambdas;
    std::vector<double> qs;
    parabolic::MmsSpec base;
    double dt = 0.02;
    parabolic::Scheme scheme = parabolic::Scheme::implicit_euler;
};

struct KondratievJob {
    kondratiev::DomainSpec domain;
    std::vector<int> orders{0, 1, 2};
    std::vector<double> as;
    std::vector<double> qs;
};

using Job = std::variant<CharacteristicJob, CuspReportJob, IdentityJob, LocalizationJob, EquivalenceJob,
                         EmbeddingJob, SolveJob, MrJob, KondratievJob>;

struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 0;
    CorpusConfig corpus;
    ToleranceTable tolerances;
    std::vector<std::string> selected;  ///< requested check ids; empty means all of the command's checks
    std::optional<std::filesystem::path> out;
    Job job;
};

/// Commands accepted in a config file.
const std::vector<std::string>& command_names();

/// Validate and convert a config document; throws ConfigError before any computation.
ExperimentConfig parse_config(const Json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace cuspfs::experiment
