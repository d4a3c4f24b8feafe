#include "cuspfs/experiment/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <set>

#include "cuspfs/cusp/characteristic.hpp"
#include "cuspfs/error.hpp"
#include "cuspfs/geometry/calculus.hpp"
#include "cuspfs/kondratiev/kondratiev.hpp"
#include "cuspfs/localization/atlas.hpp"
#include "cuspfs/parabolic/solver.hpp"
#include "cuspfs/parabolic/study.hpp"
#include "cuspfs/parallel.hpp"
#include "cuspfs/weighted/checks.hpp"
#include "cuspfs/weighted/corpus.hpp"
#include "cuspfs/weighted/norms.hpp"

namespace cuspfs::experiment {

using geometry::TensorField;
using weighted::Corpus;
using weighted::CuspDiscretization;

const std::vector<CheckInfo>& check_catalog() {
    static const std::vector<CheckInfo> catalog = [] {
        std::vector<CheckInfo> c{
            {"arclength-oracle", "cusp-report", "cusp::ArclengthMap",
             "arclength map and its inverse against closed forms or Simpson quadrature"},
            {"atlas-bracket-agreement", "localization", "localization::localized_norm",
             "localized-norm brackets of two atlases agree"},
            {"characteristic-bounds", "validate-characteristic", "cusp::validate_characteristic",
             "scaled derivative bounds c(j) against their closed forms"},
            {"commutator-bracket", "norm-equivalence", "weighted::commutator_ratios",
             "commutator ratio bracket for the weight rho^lambda"},
            {"commutator-drift", "norm-equivalence", "weighted::commutator_ratios",
             "commutator ratios under one refinement"},
            {"cone-metric-exactness", "cusp-report", "geometry::metric_equivalence_ratio",
             "cone metric equals the metric induced by the embedding"},
            {"connection-identity", "identities", "weighted::connection_residuals",
             "difference of the two connections equals S applied to 1-forms"},
            {"connection-identity-order", "identities", "weighted::connection_residuals",
             "observed order of the connection-identity residual"},
            {"cusp-metric-bounds", "cusp-report", "geometry::metric_equivalence_ratio",
             "embedding metric of a power cusp has eigenvalues in [1, 1 + alpha^2]"},
            {"divergence-certificate", "validate-characteristic", "cusp::certify_characteristic",
             "partial integrals of dt/R grow without bound"},
            {"embedding-drift", "embedding", "weighted::embedding_ratios",
             "embedding and Gagliardo-Nirenberg ratios under one refinement"},
            {"heat-mode-decay", "solve", "parabolic::heat_mode_decay",
             "Fourier mode on the flat torus decays like exp(-t)"},
            {"kondratiev-blend-drift", "kondratiev", "kondratiev::kondratiev_equivalence_report",
             "Kondratiev bracket under a 10% change of the blend radii"},
            {"kondratiev-bracket", "kondratiev", "kondratiev::kondratiev_equivalence_report",
             "Kondratiev norm against the weighted norm, bracket C"},
            {"kondratiev-order-zero", "kondratiev", "kondratiev::kondratiev_ratios",
             "order-zero Kondratiev ratio equals one"},
            {"kondratiev-refinement-drift", "kondratiev", "kondratiev::kondratiev_equivalence_report",
             "Kondratiev bracket under one refinement"},
            {"localization-right-inverse", "localization", "localization::retract",
             "retraction after coretraction is the identity"},
            {"localized-norm-bracket", "localization", "localization::localized_norm",
             "localized norm against the global norm, bracket C"},
            {"manufactured-solution", "solve", "parabolic::solve_ivp",
             "relative L2(L2) error against the manufactured solution"},
            {"maximal-regularity-drift", "mr-study", "parabolic::mr_study",
             "maximal-regularity ratio over two time and two space refinements"},
            {"maximal-regularity-ratio", "mr-study", "parabolic::mr_study",
             "maximal-regularity ratio lhs / rhs is bounded"},
            {"measure-change", "norm-equivalence", "weighted::equivalence_ratios",
             "order-zero equivalence ratio equals one"},
            {"mms-space-order", "solve", "parabolic::space_order_study",
             "observed spatial order of the manufactured-solution study"},
            {"mms-time-order", "solve", "parabolic::time_order_study",
             "observed temporal order of the manufactured-solution study"},
            {"multiplication-drift", "multiplication", "weighted::multiplication_ratios",
             "pointwise multiplier ratios under one refinement"},
            {"norm-equivalence-bracket", "norm-equivalence", "weighted::equivalence_ratios",
             "weighted norm against the regularized norm, bracket C"},
            {"norm-equivalence-drift", "norm-equivalence", "weighted::equivalence_ratios",
             "norm equivalence ratios under one refinement"},
            {"product-rule", "identities", "weighted::product_rule_residuals",
             "product rule for the weight rho^lambda"},
            {"product-rule-order", "identities", "weighted::product_rule_residuals",
             "observed order of the product-rule residual"},
            {"recursion-round-trip", "identities", "weighted::round_trip_residuals",
             "forward then backward correction recursion reproduces nabla^k u"},
            {"singularity-bound", "cusp-report", "cusp::singularity_bound",
             "weighted bounds on d log r_Z are stable under refinement"},
            {"weight-isomorphism-bracket", "norm-equivalence", "weighted::isomorphism_ratios",
             "isomorphism rho^lambda between weighted and regularized spaces, bracket C"},
            {"weight-isomorphism-drift", "norm-equivalence", "weighted::isomorphism_ratios",
             "isomorphism ratios under one refinement"},
            {"weight-monotonicity", "embedding", "weighted::monotonicity_violations",
             "weighted norms are monotone in lambda"},
            {"weighted-lq-oracle", "cusp-report", "weighted::weighted_sobolev_norm",
             "weighted L_q norm of rho^mu against ((mu - lambda) q)^(-1/q)"},
        };
        std::sort(c.begin(), c.end(), [](const CheckInfo& a, const CheckInfo& b) { return a.id < b.id; });
        return c;
    }();
    return catalog;
}

std::vector<std::string> command_checks(const std::string& command) {
    std::vector<std::string> out;
    for (const auto& c : check_catalog())
        if (c.command == command || (command == "embedding" && c.command == "multiplication")) out.push_back(c.id);
    return out;
}

void validate_selection(const ExperimentConfig& config) {
    const auto allowed = command_checks(config.command);
    for (const auto& id : config.selected)
        if (std::find(allowed.begin(), allowed.end(), id) == allowed.end())
            throw ConfigError("check '" + id + "' is not produced by command '" + config.command + "'");
}

namespace {

// Collects checks and tables from concurrently running families.
class Collector {
public:
    explicit Collector(const ExperimentConfig& cfg) : cfg_(cfg) {}

    bool wants(const std::string& id) const {
        return cfg_.selected.empty() ||
               std::find(cfg_.selected.begin(), cfg_.selected.end(), id) != cfg_.selected.end();
    }
    bool wants_any(std::initializer_list<const char*> ids) const {
        for (const char* id : ids)
            if (wants(id)) return true;
        return false;
    }

    void add(const std::string& id, double value, std::vector<CsvRow> rows) {
        if (!wants(id)) return;
        CheckResult r;
        r.id = id;
        r.value = value;
        r.tolerance = cfg_.tolerances.at(id);
        r.pass = r.tolerance.admits(value);
        r.rows = std::move(rows);
        std::lock_guard<std::mutex> lock(mutex_);
        result_.checks.push_back(std::move(r));
    }

    void add_table(Table t) {
        std::lock_guard<std::mutex> lock(mutex_);
        result_.tables.push_back(std::move(t));
    }

    RunResult finish() {
        auto by_name = [](const auto& a, const auto& b) { return a < b; };
        std::sort(result_.checks.begin(), result_.checks.end(),
                  [&](const CheckResult& a, const CheckResult& b) { return by_name(a.id, b.id); });
        std::sort(result_.tables.begin(), result_.tables.end(),
                  [&](const Table& a, const Table& b) { return by_name(a.name, b.name); });
        return std::move(result_);
    }

private:
    const ExperimentConfig& cfg_;
    std::mutex mutex_;
    RunResult result_;
};

void run_concurrently(const std::vector<std::function<void()>>& families) {
    parallel_map<int>(families.size(), [&](std::size_t i) {
        families[i]();
        return 0;
    });
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// NaN-propagating maximum.
double worst(double acc, double x) {
    if (std::isnan(acc) || std::isnan(x)) return kNaN;
    return std::max(acc, x);
}

double max_of(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = worst(m, x);
    return m;
}

double max_drift(const std::vector<double>& coarse, const std::vector<double>& fine) {
    double m = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) m = worst(m, weighted::drift(coarse[i], fine[i]));
    return m;
}

std::string fid(const std::string& prefix, std::size_t i) { return prefix + "f" + std::to_string(i); }

void append_rows(std::vector<CsvRow>& rows, const std::string& prefix, const std::vector<double>& values, double k,
                 double q, double lambda, int level, bool as_ratio) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        CsvRow r{fid(prefix, i), k, q, lambda, kNaN, kNaN, level};
        (as_ratio ? r.ratio : r.value) = values[i];
        rows.push_back(std::move(r));
    }
}

Corpus make_corpus(const ExperimentConfig& cfg) {
    return weighted::make_corpus(cfg.seed, cfg.corpus.count, cfg.corpus.cutoff);
}

// ---------------------------------------------------------------- validate-characteristic

// alpha (alpha - 1) ... (alpha - j + 1).
double falling(double alpha, int j) {
    double p = 1.0;
    for (int i = 0; i < j; ++i) p *= alpha - i;
    return p;
}

// Closed form of |R^(j-1) R^(j)| (a power of R times the j-th derivative) at t; the exponential
// case is known for j = 1 only.
double scaled_derivative_oracle(const cusp::CuspCharacteristic& R, double t, int j) {
    const double a = R.alpha();
    if (R.kind() == cusp::CharacteristicKind::power) return std::abs(falling(a, j)) * std::pow(t, (a - 1.0) * j);
    if (j != 1) return kNaN;
    const double b = R.beta();
    return a * b * std::pow(t, -b - 1.0) * std::exp(a * (1.0 - std::pow(t, -b)));
}

RunResult run_characteristic(const ExperimentConfig& cfg, const CharacteristicJob& job) {
    Collector out(cfg);
    std::vector<std::function<void()>> families;
    families.push_back([&] {
        if (!out.wants("characteristic-bounds")) return;
        const auto grid = cusp::log_grid(job.t_min, 1.0, job.samples);
        std::vector<CsvRow> rows;
        double dev = 0.0;
        for (const auto& c : job.cusps) {
            const auto R = cusp::make_characteristic(c.characteristic);
            const auto bounds = cusp::validate_characteristic(R, job.j_max, grid);
            for (int j = 1; j <= job.j_max; ++j) {
                double expect = 0.0;
                for (double t : grid) expect = worst(expect, scaled_derivative_oracle(R, t, j));
                const double v = bounds[j - 1];
                rows.push_back({c.label(), double(j), kNaN, kNaN, v, std::isnan(expect) ? kNaN : v / expect, 0});
                if (!std::isfinite(v)) dev = kNaN;
                else if (!std::isnan(expect)) dev = worst(dev, std::abs(v - expect) / std::max(1.0, expect));
            }
        }
        out.add("characteristic-bounds", dev, std::move(rows));
    });
    families.push_back([&] {
        if (!out.wants("divergence-certificate")) return;
        std::vector<CsvRow> rows;
        double min_step = std::numeric_limits<double>::infinity();
        for (const auto& c : job.cusps) {
            const auto cert = cusp::certify_characteristic(cusp::make_characteristic(c.characteristic));
            for (std::size_t i = 0; i < cert.eps.size(); ++i) {
                rows.push_back({c.label(), kNaN, kNaN, kNaN, cert.partial[i], kNaN, 0});
                rows.back().ratio = cert.eps[i];
                if (i > 0) min_step = std::min(min_step, cert.partial[i] - cert.partial[i - 1]);
            }
        }
        out.add("divergence-certificate", min_step, std::move(rows));
    });
    run_concurrently(families);
    return out.finish();
}

// ---------------------------------------------------------------- cusp-report

double simpson_arclength(const cusp::CuspCharacteristic& R, double t, int n) {
    const double a = std::log(t), h = -a / n;
    auto f = [&](double x) { return std::exp(x) / R.value(std::exp(x)); };
    double acc = f(a) + f(0.0);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

double arclength_oracle(const cusp::CuspCharacteristic& R, double t) {
    if (R.kind() == cusp::CharacteristicKind::power) {
        const double a = R.alpha();
        return a == 1.0 ? -std::log(t) : (std::pow(t, 1.0 - a) - 1.0) / (a - 1.0);
    }
    return simpson_arclength(R, t, 20000);
}

RunResult run_cusp_report(const ExperimentConfig& cfg, const CuspReportJob& job) {
    Collector out(cfg);
    std::vector<std::function<void()>> families;
    families.push_back([&] {
        if (!out.wants_any({"cone-metric-exactness", "cusp-metric-bounds"})) return;
        std::vector<CsvRow> cone_rows, cusp_rows;
        double cone_dev = kNaN, cusp_dev = kNaN;
        for (const auto& c : job.cusps) {
            if (c.base.kind == cusp::CuspBase::Kind::point) continue;
            const auto Z = c.build();
            const bool cone = c.flavor == cusp::CuspFlavor::cone;
            if (!cone && c.characteristic.kind != cusp::CharacteristicKind::power) continue;
            const auto mesh = Z.stretched_mesh(job.mesh.s_len, job.mesh.n_s, job.mesh.n_theta);
            const auto [lo, hi] = geometry::metric_equivalence_ratio(Z.metric(mesh), Z.embedding_metric(mesh));
            const double expect_hi = cone ? 1.0 : 1.0 + c.characteristic.alpha * c.characteristic.alpha;
            const double dev = std::max(std::abs(lo - 1.0), std::abs(hi - expect_hi));
            auto& rows = cone ? cone_rows : cusp_rows;
            rows.push_back({c.label() + ":lo", kNaN, kNaN, kNaN, lo, lo / 1.0, 0});
            rows.push_back({c.label() + ":hi", kNaN, kNaN, kNaN, hi, hi / expect_hi, 0});
            double& acc = cone ? cone_dev : cusp_dev;
            acc = std::isnan(acc) ? dev : worst(acc, dev);
        }
        if (!cone_rows.empty()) out.add("cone-metric-exactness", cone_dev, std::move(cone_rows));
        if (!cusp_rows.empty()) out.add("cusp-metric-bounds", cusp_dev, std::move(cusp_rows));
    });
    families.push_back([&] {
        if (!out.wants("arclength-oracle")) return;
        std::vector<CsvRow> rows;
        double dev = 0.0;
        for (const auto& c : job.cusps) {
            const auto Z = c.build();
            const auto& R = Z.characteristic();
            double t_lo = 0.1;
            if (R.kind() == cusp::CharacteristicKind::power) {
                // Stay below arclength 1e6, inside the tabulated range of the map.
                const double a = R.alpha();
                t_lo = a == 1.0 ? 1e-8 : std::max(1e-8, std::pow(1.0 + (a - 1.0) * 1e6, -1.0 / (a - 1.0)));
            }
            for (double t : cusp::log_grid(t_lo, 1.0, 33)) {
                const double got = Z.arclength()(t), expect = arclength_oracle(R, t);
                const double err = std::abs(got - expect) / std::max(1.0, std::abs(expect));
                const double back = Z.arclength().inverse(got);
                const double inv_err = std::abs(back - t) / t;
                rows.push_back({c.label(), kNaN, kNaN, kNaN, got, expect == 0.0 ? kNaN : got / expect, 0});
                rows.back().k = t;
                dev = worst(dev, std::max(err, inv_err));
            }
        }
        out.add("arclength-oracle", dev, std::move(rows));
    });
    if (!job.lq_cases.empty()) {
        families.push_back([&] {
            if (!out.wants("weighted-lq-oracle")) return;
            const cusp::ModelCusp cone(cusp::CuspCharacteristic::power(1.0), cusp::CuspBase::point(),
                                       cusp::CuspFlavor::cone);
            const CuspDiscretization d(cone, weighted::MeshSpec{job.lq_s_len, job.lq_n_s, 1, true});
            std::vector<CsvRow> rows;
            double dev = 0.0;
            for (std::size_t i = 0; i < job.lq_cases.size(); ++i) {
                const auto& c = job.lq_cases[i];
                const TensorField u = geometry::pow_scalar(d.rho(), c.mu);
                const double got = weighted::weighted_sobolev_norm(u, d.conn(), d.rho(), {0, c.lambda, c.q});
                const double rate = (c.mu - c.lambda) * c.q;
                // Exact integral of exp(-rate s) over the truncated range [0, s_len].
                const double expect = std::pow(-std::expm1(-rate * job.lq_s_len) / rate, 1.0 / c.q);
                rows.push_back({"mu=" + format_number(c.mu), 0.0, c.q, c.lambda, got, got / expect, 0});
                dev = worst(dev, std::abs(got - expect) / expect);
            }
            out.add("weighted-lq-oracle", dev, std::move(rows));
        });
    }
    families.push_back([&] {
        if (!out.wants("singularity-bound")) return;
        std::vector<CsvRow> rows;
        double dev = 0.0;
        for (const auto& c : job.cusps) {
            const auto Z = c.build();
            const std::size_t nt = c.base.kind == cusp::CuspBase::Kind::point ? 1 : job.mesh.n_theta;
            const auto coarse = Z.stretched_mesh(job.mesh.s_len, job.mesh.n_s, nt);
            const auto fine = Z.stretched_mesh(job.mesh.s_len, 2 * job.mesh.n_s - 1, nt);
            for (int k = 0; k <= job.k_max; ++k) {
                const double a = cusp::singularity_bound(Z, coarse, k), b = cusp::singularity_bound(Z, fine, k);
                rows.push_back({c.label(), double(k), kNaN, kNaN, a, kNaN, 0});
                rows.push_back({c.label(), double(k), kNaN, kNaN, b, kNaN, 1});
                dev = worst(dev, weighted::drift(a, b));
            }
        }
        out.add("singularity-bound", dev, std::move(rows));
    });
    run_concurrently(families);
    return out.finish();
}

// ---------------------------------------------------------------- identities

RunResult run_identities(const ExperimentConfig& cfg, const IdentityJob& job) {
    Collector out(cfg);
    const Corpus corpus = make_corpus(cfg);
    const auto Z = job.cusp.build();
    const bool want_conn = out.wants_any({"connection-identity", "connection-identity-order"});
    const bool want_prod = out.wants_any({"product-rule", "product-rule-order"});
    struct Level {
        std::vector<double> conn, prod;
    };
    std::vector<Level> levels(2);
    if (want_conn || want_prod) {
        for (int lvl = 0; lvl < 2; ++lvl) {
            const CuspDiscretization d(Z, job.mesh.refined(lvl));
            std::vector<std::function<void()>> families;
            if (want_conn) families.push_back([&] { levels[lvl].conn = weighted::connection_residuals(d, corpus); });
            if (want_prod)
                families.push_back([&] { levels[lvl].prod = weighted::product_rule_residuals(d, corpus, job.lambda); });
            run_concurrently(families);
        }
    }
    auto report = [&](const char* id, const char* order_id, std::vector<double> Level::*field) {
        std::vector<CsvRow> rows;
        for (int lvl = 0; lvl < 2; ++lvl) append_rows(rows, "", levels[lvl].*field, kNaN, kNaN, job.lambda, lvl, false);
        const double coarse = max_of(levels[0].*field), fine = max_of(levels[1].*field);
        out.add(id, fine, rows);
        out.add(order_id, weighted::observed_order(coarse, fine), std::move(rows));
    };
    if (want_conn) report("connection-identity", "connection-identity-order", &Level::conn);
    if (want_prod) report("product-rule", "product-rule-order", &Level::prod);
    if (out.wants("recursion-round-trip")) {
        weighted::MeshSpec m = job.mesh;
        m.n_s = std::min<std::size_t>(m.n_s, 241);
        const CuspDiscretization d(Z, m);
        const auto r = weighted::round_trip_residuals(d, corpus, job.k_max);
        std::vector<CsvRow> rows;
        append_rows(rows, "", r, job.k_max, kNaN, kNaN, 0, false);
        out.add("recursion-round-trip", max_of(r), std::move(rows));
    }
    return out.finish();
}

// ---------------------------------------------------------------- localization

RunResult run_localization(const ExperimentConfig& cfg, const LocalizationJob& job) {
    Collector out(cfg);
    const Corpus corpus = make_corpus(cfg);
    const auto Z = job.cusp.build();
    const CuspDiscretization d(Z, job.mesh);
    std::vector<TensorField> fields;
    for (std::size_t i = 0; i < corpus.size(); ++i) fields.push_back(weighted::evaluate(corpus, i, d));

    struct AtlasData {
        double inverse_error = 0.0;
        std::vector<std::vector<double>> C;  // [k][q index]
        std::vector<CsvRow> rows;
        Table charts;
    };
    const std::size_t nq = job.qs.size();
    auto data = parallel_map<AtlasData>(job.overlaps.size(), [&](std::size_t a) {
        AtlasData ad;
        const double r = job.overlaps[a];
        const auto sys = localization::build_localization(localization::build_cylinder_atlas(d.grid(), r));
        for (const auto& u : fields)
            ad.inverse_error = worst(ad.inverse_error,
                                     (localization::retract(sys, localization::coretract(sys, u)) - u).max_abs());
        ad.C.assign(job.k_max + 1, std::vector<double>(nq));
        for (int k = 0; k <= job.k_max; ++k) {
            for (std::size_t qi = 0; qi < nq; ++qi) {
                const double q = job.qs[qi];
                std::vector<double> ratios;
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    const auto loc = localization::localized_norm(sys, fields[i], k, q);
                    const double global = weighted::sobolev_norm(fields[i], d.hat_conn(), k, q);
                    ratios.push_back(loc.total / global);
                    CsvRow row{"r=" + format_number(r) + ":" + fid("", i), double(k), q, kNaN, loc.total,
                               ratios.back(), 0};
                    ad.rows.push_back(row);
                    for (std::size_t c = 0; c < loc.chart_norms.size(); ++c)
                        ad.charts.rows.push_back({r, double(i), double(k), q, double(c), loc.chart_norms[c], loc.total});
                }
                ad.C[k][qi] = weighted::bracket(ratios).C;
            }
        }
        return ad;
    });
    double inverse_error = 0.0, C = 0.0, agreement = 0.0;
    std::vector<CsvRow> inv_rows, bracket_rows, agree_rows;
    Table charts{"localized_norms", {"overlap", "function_index", "k", "q", "chart", "chart_norm", "total"}, {}};
    for (std::size_t a = 0; a < data.size(); ++a) {
        const double r = job.overlaps[a];
        inverse_error = worst(inverse_error, data[a].inverse_error);
        inv_rows.push_back({"r=" + format_number(r), kNaN, kNaN, kNaN, data[a].inverse_error, kNaN, 0});
        for (int k = 0; k <= job.k_max; ++k)
            for (std::size_t qi = 0; qi < nq; ++qi) {
                C = worst(C, data[a].C[k][qi]);
                bracket_rows.push_back({"r=" + format_number(r) + ":C", double(k), job.qs[qi], kNaN, data[a].C[k][qi],
                                        kNaN, 0});
                if (a > 0) {
                    const double c0 = data[0].C[k][qi], c1 = data[a].C[k][qi];
                    const double rel = std::abs(c1 - c0) / std::max(c0, c1);
                    agreement = worst(agreement, rel);
                    agree_rows.push_back({"r=" + format_number(job.overlaps[0]) + "|r=" + format_number(r), double(k),
                                          job.qs[qi], kNaN, rel, c1 / c0, 0});
                }
            }
        bracket_rows.insert(bracket_rows.end(), data[a].rows.begin(), data[a].rows.end());
        charts.rows.insert(charts.rows.end(), data[a].charts.rows.begin(), data[a].charts.rows.end());
    }
    out.add("localization-right-inverse", inverse_error, std::move(inv_rows));
    out.add("localized-norm-bracket", C, std::move(bracket_rows));
    if (data.size() > 1) out.add("atlas-bracket-agreement", agreement, std::move(agree_rows));
    if (out.wants("localized-norm-bracket")) out.add_table(std::move(charts));
    return out.finish();
}

// ---------------------------------------------------------------- norm-equivalence

RunResult run_equivalence(const ExperimentConfig& cfg, const EquivalenceJob& job) {
    Collector out(cfg);
    const Corpus corpus = make_corpus(cfg);
    // One ratio family evaluated on both refinement levels of every cusp.
    struct Sweep {
        std::string family;
        int k;
        double q;
        double lambda;
    };
    std::vector<Sweep> sweeps;
    for (int k : job.orders)
        for (double q : job.qs) {
            if (k == 0 && out.wants("measure-change")) sweeps.push_back({"measure", 0, q, kNaN});
            if (k > 0 && out.wants_any({"norm-equivalence-bracket", "norm-equivalence-drift"}))
                sweeps.push_back({"equivalence", k, q, kNaN});
            for (double lambda : job.lambdas) {
                if (out.wants_any({"weight-isomorphism-bracket", "weight-isomorphism-drift"}))
                    sweeps.push_back({"isomorphism", k, q, lambda});
                if (out.wants_any({"commutator-bracket", "commutator-drift"}))
                    sweeps.push_back({"commutator", k, q, lambda});
            }
        }
    const int levels = out.wants_any({"norm-equivalence-bracket", "norm-equivalence-drift", "weight-isomorphism-bracket",
                                      "weight-isomorphism-drift", "commutator-bracket", "commutator-drift"})
                           ? 2
                           : 1;
    struct Disc {
        std::size_t cusp;
        int level;
    };
    std::vector<Disc> discs;
    for (std::size_t c = 0; c < job.cusps.size(); ++c)
        for (int lvl = 0; lvl < levels; ++lvl) discs.push_back({c, lvl});
    // ratios[disc][sweep][function]
    const auto ratios = parallel_map<std::vector<std::vector<double>>>(discs.size(), [&](std::size_t di) {
        const auto Z = job.cusps[discs[di].cusp].build();
        const CuspDiscretization d(Z, job.mesh.refined(discs[di].level));
        std::vector<std::vector<double>> res(sweeps.size());
        for (std::size_t s = 0; s < sweeps.size(); ++s) {
            const auto& sw = sweeps[s];
            if (sw.family == "measure" && discs[di].level > 0) continue;
            if (sw.family == "measure" || sw.family == "equivalence")
                res[s] = job.trivial_weight ? weighted::trivial_weight_ratios(d, corpus, sw.k, sw.q)
                                            : weighted::equivalence_ratios(d, corpus, sw.k, sw.q);
            else if (sw.family == "isomorphism")
                res[s] = weighted::isomorphism_ratios(d, corpus, sw.k, sw.q, sw.lambda);
            else
                res[s] = weighted::commutator_ratios(d, corpus, sw.k, sw.q, sw.lambda);
        }
        return res;
    });
    auto index = [&](std::size_t c, int lvl) { return c * levels + lvl; };
    double measure = 0.0;
    std::vector<CsvRow> measure_rows;
    struct Agg {
        double C = 0.0, drift = 0.0;
        std::vector<CsvRow> rows;
        bool any = false;
    };
    std::map<std::string, Agg> agg;
    for (std::size_t s = 0; s < sweeps.size(); ++s) {
        const auto& sw = sweeps[s];
        for (std::size_t c = 0; c < job.cusps.size(); ++c) {
            const std::string prefix = job.cusps[c].label() + ":";
            const auto& coarse = ratios[index(c, 0)][s];
            if (sw.family == "measure") {
                for (double r : coarse) measure = worst(measure, std::abs(r - 1.0));
                append_rows(measure_rows, prefix, coarse, 0, sw.q, kNaN, 0, true);
                continue;
            }
            const auto& fine = ratios[index(c, 1)][s];
            auto& a = agg[sw.family];
            a.any = true;
            a.C = worst(a.C, weighted::bracket(fine).C);
            a.drift = worst(a.drift, max_drift(coarse, fine));
            append_rows(a.rows, prefix, coarse, sw.k, sw.q, sw.lambda, 0, true);
            append_rows(a.rows, prefix, fine, sw.k, sw.q, sw.lambda, 1, true);
        }
    }
    if (!measure_rows.empty()) out.add("measure-change", measure, std::move(measure_rows));
    const std::map<std::string, std::string> ids{
        {"equivalence", "norm-equivalence"}, {"isomorphism", "weight-isomorphism"}, {"commutator", "commutator"}};
    for (auto& [family, a] : agg) {
        const std::string base = ids.at(family);
        out.add(base + "-bracket", a.C, a.rows);
        out.add(base + "-drift", a.drift, std::move(a.rows));
    }
    return out.finish();
}

// ---------------------------------------------------------------- embedding / multiplication

RunResult run_embedding(const ExperimentConfig& cfg, const EmbeddingJob& job) {
    Collector out(cfg);
    const Corpus corpus = make_corpus(cfg);
    struct Disc {
        std::size_t cusp;
        int level;
    };
    std::vector<Disc> discs;
    for (std::size_t c = 0; c < job.cusps.size(); ++c)
        for (int lvl = 0; lvl < 2; ++lvl) discs.push_back({c, lvl});
    struct Data {
        std::vector<std::vector<double>> embedding;
        std::vector<double> multiplication;
        int violations = 0;
    };
    const bool want_emb = out.wants("embedding-drift") && !job.variants.empty();
    const bool want_mult = out.wants("multiplication-drift") && job.multiplication.has_value();
    const bool want_mono = out.wants("weight-monotonicity") && job.monotonicity.has_value();
    const auto data = parallel_map<Data>(discs.size(), [&](std::size_t di) {
        Data dd;
        const auto Z = job.cusps[discs[di].cusp].build();
        const CuspDiscretization d(Z, job.mesh.refined(discs[di].level));
        if (want_emb)
            for (const auto& v : job.variants) dd.embedding.push_back(weighted::embedding_ratios(d, corpus, v));
        if (want_mult) {
            const auto& m = *job.multiplication;
            dd.multiplication = weighted::multiplication_ratios(d, corpus, m.k, m.q, m.lambda0, m.lambda1);
        }
        if (want_mono && discs[di].level == 0) {
            const auto& m = *job.monotonicity;
            dd.violations = weighted::monotonicity_violations(d, corpus, m.k, m.q, m.lambda0, m.lambda1);
        }
        return dd;
    });
    if (want_emb) {
        double drift = 0.0;
        std::vector<CsvRow> rows;
        for (std::size_t c = 0; c < job.cusps.size(); ++c)
            for (std::size_t v = 0; v < job.variants.size(); ++v) {
                const auto& coarse = data[2 * c].embedding[v];
                const auto& fine = data[2 * c + 1].embedding[v];
                const std::string prefix = job.cusps[c].label() + ":v" + std::to_string(v) + ":";
                append_rows(rows, prefix, coarse, job.variants[v].s1, job.variants[v].q1, kNaN, 0, true);
                append_rows(rows, prefix, fine, job.variants[v].s1, job.variants[v].q1, kNaN, 1, true);
                drift = worst(drift, max_drift(coarse, fine));
                drift = worst(drift, std::isfinite(max_of(fine)) ? 0.0 : kNaN);
            }
        out.add("embedding-drift", drift, std::move(rows));
    }
    if (want_mult) {
        const auto& m = *job.multiplication;
        double drift = 0.0;
        std::vector<CsvRow> rows;
        for (std::size_t c = 0; c < job.cusps.size(); ++c) {
            const auto& coarse = data[2 * c].multiplication;
            const auto& fine = data[2 * c + 1].multiplication;
            const std::string prefix = job.cusps[c].label() + ":";
            append_rows(rows, prefix, coarse, m.k, m.q, m.lambda0 + m.lambda1, 0, true);
            append_rows(rows, prefix, fine, m.k, m.q, m.lambda0 + m.lambda1, 1, true);
            drift = worst(drift, max_drift(coarse, fine));
            drift = worst(drift, std::isfinite(max_of(fine)) ? 0.0 : kNaN);
        }
        out.add("multiplication-drift", drift, std::move(rows));
    }
    if (want_mono) {
        const auto& m = *job.monotonicity;
        double total = 0.0;
        std::vector<CsvRow> rows;
        for (std::size_t c = 0; c < job.cusps.size(); ++c) {
            total += data[2 * c].violations;
            rows.push_back({job.cusps[c].label(), double(m.k), m.q, m.lambda1, double(data[2 * c].violations), kNaN, 0});
        }
        out.add("weight-monotonicity", total, std::move(rows));
    }
    return out.finish();
}

// ---------------------------------------------------------------- solve

RunResult run_solve(const ExperimentConfig& cfg, const SolveJob& job) {
    Collector out(cfg);
    const auto Z = job.cusp.build();
    std::vector<std::function<void()>> families;
    families.push_back([&] {
        if (!out.wants("manufactured-solution")) return;
        const auto problem = parabolic::manufactured_problem(Z, job.mms);
        const auto traj = parabolic::solve_ivp(problem, {job.dt, job.scheme, job.solver_tolerance, job.max_iterations});
        const double err = parabolic::mms_error(traj, problem.geo, job.mms.s_max);
        double ref = 0.0;
        for (std::size_t n = 1; n < traj.times.size(); ++n) {
            const auto exact = parabolic::manufactured_u_hat(problem.geo, job.mms.s_max, traj.times[n]);
            ref += (traj.times[n] - traj.times[n - 1]) * geometry::integrate(exact, problem.geo.hat_conn.metric(), 2.0);
        }
        const double rel = err / std::sqrt(ref);
        const auto mr = parabolic::maximal_regularity_functional(traj, problem);
        out.add("manufactured-solution", rel,
                {{"error", kNaN, job.mms.q, job.mms.lambda, err, rel, 0},
                 {"mr-functional", kNaN, job.mms.q, job.mms.lambda, mr.lhs, mr.ratio, 0}});
        Table t{"trajectory", {"t", "step_norm"}, {}};
        for (std::size_t n = 0; n < traj.times.size(); ++n) t.rows.push_back({traj.times[n], traj.step_norms[n]});
        out.add_table(std::move(t));
    });
    auto order_rows = [&](const parabolic::OrderStudy& s) {
        std::vector<CsvRow> rows;
        for (std::size_t i = 0; i < s.dt.size(); ++i) {
            CsvRow r{"dt=" + format_number(s.dt[i]) + ":n_s=" + std::to_string(s.n_s[i]), kNaN, job.mms.q,
                     job.mms.lambda, s.exact_error[i], kNaN, int(i)};
            if (i > 0) r.ratio = s.differences[i - 1];
            rows.push_back(std::move(r));
        }
        rows.push_back({"exact-order", kNaN, job.mms.q, job.mms.lambda, s.exact_order, kNaN, 0});
        return rows;
    };
    if (job.time_study_dt)
        families.push_back([&] {
            if (!out.wants("mms-time-order")) return;
            const auto s = parabolic::time_order_study(Z, job.mms, *job.time_study_dt, job.scheme);
            out.add("mms-time-order", s.observed_order, order_rows(s));
        });
    if (job.space_study_dt)
        families.push_back([&] {
            if (!out.wants("mms-space-order")) return;
            const auto s = parabolic::space_order_study(Z, job.mms, *job.space_study_dt, job.scheme);
            out.add("mms-space-order", s.observed_order, order_rows(s));
        });
    if (job.heat_mode)
        families.push_back([&] {
            if (!out.wants("heat-mode-decay")) return;
            const auto& h = *job.heat_mode;
            const auto r = parabolic::heat_mode_decay(h.T, h.dt, h.n, job.scheme);
            out.add("heat-mode-decay", r.relative_error,
                    {{"n=" + std::to_string(h.n), kNaN, kNaN, kNaN, r.measured, r.measured / r.exact, 0}});
        });
    run_concurrently(families);
    return out.finish();
}

// ---------------------------------------------------------------- mr-study

RunResult run_mr(const ExperimentConfig& cfg, const MrJob& job) {
    Collector out(cfg);
    if (!out.wants_any({"maximal-regularity-drift", "maximal-regularity-ratio"})) return out.finish();
    const auto study = parabolic::mr_study(job.alphas, job.lambdas, job.qs, job.base, job.dt, job.scheme);
    std::vector<CsvRow> rows;
    Table t{"mr_runs", {"run", "alpha", "lambda", "q", "dt", "n_s", "lhs", "rhs", "ratio"}, {}};
    for (std::size_t i = 0; i < study.runs.size(); ++i) {
        const auto& r = study.runs[i];
        const int level = (r.dt < job.dt ? 1 : 0) + (r.n_s > job.base.n_s ? 2 : 0);
        rows.push_back({"alpha=" + format_number(r.alpha), kNaN, r.q, r.lambda, r.value.lhs, r.value.ratio, level});
        t.rows.push_back({double(i), r.alpha, r.lambda, r.q, r.dt, double(r.n_s), r.value.lhs, r.value.rhs,
                          r.value.ratio});
    }
    out.add("maximal-regularity-ratio", study.max_ratio, rows);
    std::vector<CsvRow> drift_rows;
    for (std::size_t i = 0; i < study.drift.size(); ++i)
        drift_rows.push_back({"combo" + std::to_string(i), kNaN, kNaN, kNaN, study.drift[i], kNaN, 0});
    out.add("maximal-regularity-drift", study.max_drift, std::move(drift_rows));
    out.add_table(std::move(t));
    return out.finish();
}

// ---------------------------------------------------------------- kondratiev

RunResult run_kondratiev(const ExperimentConfig& cfg, const KondratievJob& job) {
    Collector out(cfg);
    const Corpus corpus = make_corpus(cfg);
    struct Case {
        int k;
        double a, q;
    };
    std::vector<Case> cases;
    for (int k : job.orders)
        for (double a : job.as)
            for (double q : job.qs) cases.push_back({k, a, q});
    struct Data {
        std::vector<double> zero;
        kondratiev::EquivalenceReport report;
    };
    const auto data = parallel_map<Data>(cases.size(), [&](std::size_t i) {
        Data d;
        const auto& c = cases[i];
        if (c.k == 0) {
            if (out.wants("kondratiev-order-zero"))
                d.zero = kondratiev::kondratiev_ratios(kondratiev::ConicalDomain(job.domain), corpus, 0, c.a, c.q);
        } else if (out.wants_any({"kondratiev-bracket", "kondratiev-refinement-drift", "kondratiev-blend-drift"})) {
            d.report = kondratiev::kondratiev_equivalence_report(job.domain, corpus, c.k, c.a, c.q);
        }
        return d;
    });
    double zero = 0.0, C = 0.0, refine = 0.0, blend = 0.0;
    bool any_zero = false, any_k = false;
    std::vector<CsvRow> zero_rows, rows, refine_rows, blend_rows;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        const double lambda = c.a - 2.0 / c.q;
        if (c.k == 0) {
            any_zero = true;
            for (double r : data[i].zero) zero = worst(zero, std::abs(r - 1.0));
            append_rows(zero_rows, "a=" + format_number(c.a) + ":", data[i].zero, 0, c.q, lambda, 0, true);
            continue;
        }
        any_k = true;
        const auto& rep = data[i].report;
        C = worst(C, std::max({rep.coarse.C, rep.fine.C, rep.alternate_blend.C}));
        refine = worst(refine, rep.refinement_drift);
        blend = worst(blend, rep.blend_drift);
        const std::string id = "a=" + format_number(c.a);
        rows.push_back({id + ":min", double(c.k), c.q, lambda, rep.coarse.min, rep.coarse.C, 0});
        rows.push_back({id + ":max", double(c.k), c.q, lambda, rep.coarse.max, rep.coarse.C, 0});
        rows.push_back({id + ":min", double(c.k), c.q, lambda, rep.fine.min, rep.fine.C, 1});
        rows.push_back({id + ":max", double(c.k), c.q, lambda, rep.fine.max, rep.fine.C, 1});
        refine_rows.push_back({id, double(c.k), c.q, lambda, rep.refinement_drift, rep.fine.C / rep.coarse.C, 1});
        blend_rows.push_back({id, double(c.k), c.q, lambda, rep.blend_drift, rep.alternate_blend.C / rep.fine.C, 1});
    }
    if (any_zero) out.add("kondratiev-order-zero", zero, std::move(zero_rows));
    if (any_k) {
        out.add("kondratiev-bracket", C, std::move(rows));
        out.add("kondratiev-refinement-drift", refine, std::move(refine_rows));
        out.add("kondratiev-blend-drift", blend, std::move(blend_rows));
    }
    return out.finish();
}

}  // namespace

RunResult execute(const ExperimentConfig& config) {
    validate_selection(config);
    for (const auto& id : command_checks(config.command))
        if (!config.tolerances.count(id)) throw ConfigError("no tolerance for check '" + id + "'");
    return std::visit(
        [&](const auto& job) -> RunResult {
            using T = std::decay_t<decltype(job)>;
            if constexpr (std::is_same_v<T, CharacteristicJob>) return run_characteristic(config, job);
            else if constexpr (std::is_same_v<T, CuspReportJob>) return run_cusp_report(config, job);
            else if constexpr (std::is_same_v<T, IdentityJob>) return run_identities(config, job);
            else if constexpr (std::is_same_v<T, LocalizationJob>) return run_localization(config, job);
            else if constexpr (std::is_same_v<T, EquivalenceJob>) return run_equivalence(config, job);
            else if constexpr (std::is_same_v<T, EmbeddingJob>) return run_embedding(config, job);
            else if constexpr (std::is_same_v<T, SolveJob>) return run_solve(config, job);
            else if constexpr (std::is_same_v<T, MrJob>) return run_mr(config, job);
            else return run_kondratiev(config, job);
        },
        config.job);
}

}  // namespace cuspfs::experiment
