#include "cuspfs/experiment/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "cuspfs/error.hpp"

namespace cuspfs::experiment {

namespace {

// Reads typed values from one JSON object and rejects keys that were never asked for.
class Reader {
public:
    Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) fail("must be an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    double number(const std::string& key) {
        const Json& v = require(key);
        if (!v.is_number()) fail("'" + key + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail("'" + key + "' must be finite");
        return x;
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    long integer(const std::string& key) {
        const Json& v = require(key);
        if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
        return v.get<long>();
    }
    long integer(const std::string& key, long fallback) { return has(key) ? integer(key) : fallback; }

    std::size_t count(const std::string& key, std::size_t fallback, std::size_t minimum) {
        const long v = integer(key, static_cast<long>(fallback));
        if (v < static_cast<long>(minimum)) fail("'" + key + "' must be at least " + std::to_string(minimum));
        return static_cast<std::size_t>(v);
    }

    std::string text(const std::string& key) {
        const Json& v = require(key);
        if (!v.is_string()) fail("'" + key + "' must be a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const Json& v = j_.at(key);
        if (!v.is_boolean()) fail("'" + key + "' must be a boolean");
        return v.get<bool>();
    }

    // A number or a non-empty array of numbers.
    std::vector<double> numbers(const std::string& key) {
        const Json& v = require(key);
        std::vector<double> out;
        if (v.is_number()) {
            out.push_back(v.get<double>());
        } else if (v.is_array() && !v.empty()) {
            for (const auto& e : v) {
                if (!e.is_number()) fail("'" + key + "' must hold numbers");
                out.push_back(e.get<double>());
            }
        } else {
            fail("'" + key + "' must be a number or a non-empty array of numbers");
        }
        for (double x : out)
            if (!std::isfinite(x)) fail("'" + key + "' must be finite");
        return out;
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        return has(key) ? numbers(key) : fallback;
    }

    std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
        if (!has(key)) return fallback;
        std::vector<int> out;
        for (double x : numbers(key)) {
            if (x != std::floor(x)) fail("'" + key + "' must hold integers");
            out.push_back(static_cast<int>(x));
        }
        return out;
    }

    const Json& child(const std::string& key) {
        const Json& v = require(key);
        if (!v.is_object()) fail("'" + key + "' must be an object");
        return v;
    }

    const Json& raw(const std::string& key) { return require(key); }

    std::string path(const std::string& key) const { return where_ + "." + key; }

    // Call after all reads.
    void done() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) fail("unknown key '" + key + "'");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where_ + ": " + what); }

private:
    const Json& j_;
    std::string where_;
    std::set<std::string> seen_;

    const Json& require(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) fail("missing required key '" + key + "'");
        return j_.at(key);
    }
};

void require_positive(const Reader& r, const std::string& key, double v) {
    if (!(v > 0)) r.fail("'" + key + "' must be positive");
}

void require_q(const Reader& r, const std::vector<double>& qs) {
    for (double q : qs)
        if (!(q >= 1.0)) r.fail("'q' values must be >= 1");
}

CuspConfig parse_cusp(const Json& j, const std::string& where) {
    Reader r(j, where);
    CuspConfig c;
    const std::string flavor = r.text("flavor", "cusp");
    if (flavor == "cone") c.flavor = cusp::CuspFlavor::cone;
    else if (flavor == "cusp") c.flavor = cusp::CuspFlavor::cusp;
    else r.fail("flavor must be 'cone' or 'cusp'");
    {
        Reader ch(r.child("characteristic"), r.path("characteristic"));
        const std::string kind = ch.text("kind");
        if (kind == "power") {
            c.characteristic.kind = cusp::CharacteristicKind::power;
            c.characteristic.alpha = ch.number("alpha");
        } else if (kind == "exponential") {
            c.characteristic.kind = cusp::CharacteristicKind::exponential;
            c.characteristic.alpha = ch.number("alpha");
            c.characteristic.beta = ch.number("beta");
        } else {
            ch.fail("kind must be 'power' or 'exponential'");
        }
        ch.done();
    }
    if (r.has("base")) {
        Reader b(r.child("base"), r.path("base"));
        const std::string kind = b.text("kind");
        if (kind == "circle") {
            c.base = cusp::CuspBase::circle();
        } else if (kind == "point") {
            c.base = cusp::CuspBase::point();
        } else if (kind == "arc") {
            const double t0 = b.number("theta0", 0.0), t1 = b.number("theta1");
            if (!(t1 > t0) || t1 - t0 > 2.0 * std::numbers::pi) b.fail("arc needs theta0 < theta1 <= theta0 + 2 pi");
            c.base = cusp::CuspBase::arc(t0, t1);
        } else {
            b.fail("kind must be 'circle', 'arc' or 'point'");
        }
        b.done();
    }
    c.epsilon = r.number("epsilon", 1.0);
    if (!(c.epsilon > 0) || c.epsilon > 1.0) r.fail("epsilon must lie in (0, 1]");
    const std::string grading = r.text("grading", "cylinder");
    if (grading == "cylinder") c.cylinder = true;
    else if (grading == "stretched") c.cylinder = false;
    else r.fail("grading must be 'cylinder' or 'stretched'");
    r.done();
    if (c.flavor == cusp::CuspFlavor::cone &&
        (c.characteristic.kind != cusp::CharacteristicKind::power || c.characteristic.alpha != 1.0))
        throw ConfigError(where + ": a cone needs the power characteristic with alpha = 1");
    // Build once so that invalid characteristics fail during validation.
    try {
        (void)c.build();
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return c;
}

std::vector<CuspConfig> parse_cusps(Reader& geo) {
    std::vector<CuspConfig> out;
    const bool one = geo.has("cusp"), many = geo.has("cusps");
    if (one == many) geo.fail("exactly one of 'cusp' and 'cusps' is required");
    if (one) {
        out.push_back(parse_cusp(geo.raw("cusp"), geo.path("cusp")));
    } else {
        const Json& list = geo.raw("cusps");
        if (!list.is_array() || list.empty()) geo.fail("'cusps' must be a non-empty array");
        for (std::size_t i = 0; i < list.size(); ++i)
            out.push_back(parse_cusp(list[i], geo.path("cusps[" + std::to_string(i) + "]")));
    }
    return out;
}

CuspConfig parse_single_cusp(Reader& geo) {
    auto cusps = parse_cusps(geo);
    if (cusps.size() != 1) geo.fail("this command takes a single cusp");
    return cusps.front();
}

weighted::MeshSpec parse_mesh(Reader& geo, const weighted::MeshSpec& fallback) {
    weighted::MeshSpec m = fallback;
    if (!geo.has("mesh")) return m;
    Reader r(geo.child("mesh"), geo.path("mesh"));
    m.s_len = r.number("s_len", m.s_len);
    require_positive(r, "s_len", m.s_len);
    m.n_s = r.count("n_s", m.n_s, 4);
    m.n_theta = r.count("n_theta", m.n_theta, 1);
    r.done();
    return m;
}

void apply_grading(weighted::MeshSpec& mesh, const std::vector<CuspConfig>& cusps, const Reader& geo) {
    for (const auto& c : cusps)
        if (c.cylinder != cusps.front().cylinder) geo.fail("all cusps must share one grading");
    mesh.cylinder = cusps.front().cylinder;
    for (const auto& c : cusps)
        if (c.base.kind == cusp::CuspBase::Kind::point && mesh.n_theta != 1)
            geo.fail("a point base needs mesh.n_theta = 1");
}

parabolic::Scheme parse_scheme_key(Reader& r) {
    return parabolic::parse_scheme(r.text("scheme", "implicit-euler"));
}

void parse_mms(Reader& spec, parabolic::MmsSpec& mms) {
    mms.T = spec.number("T", mms.T);
    require_positive(spec, "T", mms.T);
    mms.s_max = spec.number("s_max", mms.s_max);
    require_positive(spec, "s_max", mms.s_max);
    mms.n_s = spec.count("n_s", mms.n_s, 4);
    mms.n_theta = spec.count("n_theta", mms.n_theta, 4);
}

Job parse_job(const std::string& command, Reader& geo, Reader& spec) {
    if (command == "validate-characteristic") {
        CharacteristicJob job;
        job.cusps = parse_cusps(geo);
        job.t_min = spec.number("t_min", job.t_min);
        if (!(job.t_min > 0) || !(job.t_min < 1)) spec.fail("t_min must lie in (0, 1)");
        job.samples = spec.count("samples", job.samples, 16);
        job.j_max = static_cast<int>(spec.integer("j_max", job.j_max));
        if (job.j_max < 1 || job.j_max > 4) spec.fail("j_max must lie in [1, 4]");
        return job;
    }
    if (command == "cusp-report") {
        CuspReportJob job;
        job.cusps = parse_cusps(geo);
        job.mesh = parse_mesh(geo, {6.0, 121, 16, true});
        job.k_max = static_cast<int>(spec.integer("k_max", job.k_max));
        if (job.k_max < 0 || job.k_max > 2) spec.fail("k_max must lie in [0, 2]");
        if (spec.has("lq_oracle")) {
            Reader lq(spec.child("lq_oracle"), spec.path("lq_oracle"));
            job.lq_s_len = lq.number("s_len", job.lq_s_len);
            require_positive(lq, "s_len", job.lq_s_len);
            job.lq_n_s = lq.count("n_s", job.lq_n_s, 4);
            const Json& cases = lq.raw("cases");
            if (!cases.is_array() || cases.empty()) lq.fail("'cases' must be a non-empty array");
            for (std::size_t i = 0; i < cases.size(); ++i) {
                Reader c(cases[i], lq.path("cases[" + std::to_string(i) + "]"));
                LqCase lc{c.number("mu"), c.number("lambda"), c.number("q")};
                if (!(lc.q >= 1.0)) c.fail("q must be >= 1");
                if (!(lc.mu > lc.lambda)) c.fail("the oracle needs mu > lambda");
                c.done();
                job.lq_cases.push_back(lc);
            }
            lq.done();
        }
        return job;
    }
    if (command == "identities") {
        IdentityJob job;
        job.cusp = parse_single_cusp(geo);
        job.mesh = parse_mesh(geo, {4.0, 8001, 4, true});
        apply_grading(job.mesh, {job.cusp}, geo);
        job.lambda = spec.number("lambda", job.lambda);
        job.k_max = static_cast<int>(spec.integer("k_max", job.k_max));
        if (job.k_max < 1 || job.k_max > 3) spec.fail("k_max must lie in [1, 3]");
        return job;
    }
    if (command == "localization") {
        LocalizationJob job;
        job.cusp = parse_single_cusp(geo);
        if (job.cusp.base.kind == cusp::CuspBase::Kind::arc) geo.fail("localization needs a circle or point base");
        job.mesh = parse_mesh(geo, {6.0, 121, 32, true});
        apply_grading(job.mesh, {job.cusp}, geo);
        if (!job.mesh.cylinder) geo.fail("localization works in cylinder coordinates");
        job.overlaps = spec.numbers("overlaps", job.overlaps);
        for (double r : job.overlaps)
            if (!(r > 0.3) || !(r < 0.9)) spec.fail("overlaps must lie in (0.3, 0.9)");
        job.k_max = static_cast<int>(spec.integer("k_max", job.k_max));
        if (job.k_max < 0 || job.k_max > 2) spec.fail("k_max must lie in [0, 2]");
        job.qs = spec.numbers("q");
        require_q(spec, job.qs);
        return job;
    }
    if (command == "norm-equivalence") {
        EquivalenceJob job;
        job.cusps = parse_cusps(geo);
        job.mesh = parse_mesh(geo, {6.0, 121, 32, true});
        apply_grading(job.mesh, job.cusps, geo);
        job.orders = spec.integers("k", job.orders);
        for (int k : job.orders)
            if (k < 0 || k > 3) spec.fail("k values must lie in [0, 3]");
        job.qs = spec.numbers("q");
        require_q(spec, job.qs);
        job.lambdas = spec.numbers("lambda", {});
        const std::string weight = spec.text("weight", "singularity");
        if (weight == "trivial") job.trivial_weight = true;
        else if (weight != "singularity") spec.fail("weight must be 'singularity' or 'trivial'");
        if (job.trivial_weight && !job.lambdas.empty()) spec.fail("lambda sweeps need the singularity weight");
        return job;
    }
    if (command == "embedding" || command == "multiplication") {
        EmbeddingJob job;
        job.cusps = parse_cusps(geo);
        job.mesh = parse_mesh(geo, {6.0, 121, 32, true});
        apply_grading(job.mesh, job.cusps, geo);
        auto parse_mult = [](Reader& r) {
            MultiplicationConfig m;
            m.k = static_cast<int>(r.integer("k", m.k));
            if (m.k < 0 || m.k > 2) r.fail("k must lie in [0, 2]");
            m.q = r.number("q");
            if (!(m.q >= 1.0)) r.fail("q must be >= 1");
            m.lambda0 = r.number("lambda0", m.lambda0);
            m.lambda1 = r.number("lambda1", m.lambda1);
            return m;
        };
        if (command == "multiplication") {
            job.multiplication = parse_mult(spec);
            return job;
        }
        if (spec.has("variants")) {
            const Json& list = spec.raw("variants");
            if (!list.is_array()) spec.fail("'variants' must be an array");
            for (std::size_t i = 0; i < list.size(); ++i) {
                Reader v(list[i], spec.path("variants[" + std::to_string(i) + "]"));
                weighted::EmbeddingSpec e;
                e.variant = weighted::parse_embedding_variant(v.text("variant"));
                e.s0 = static_cast<int>(v.integer("s0"));
                e.q0 = v.number("q0");
                e.s1 = static_cast<int>(v.integer("s1"));
                e.q1 = v.number("q1");
                v.done();
                for (const auto& c : job.cusps) weighted::validate_embedding(e, 1 + c.base.dim());
                job.variants.push_back(e);
            }
        }
        if (spec.has("monotonicity")) {
            Reader m(spec.child("monotonicity"), spec.path("monotonicity"));
            MonotonicityConfig mc;
            mc.k = static_cast<int>(m.integer("k", mc.k));
            if (mc.k < 0 || mc.k > 2) m.fail("k must lie in [0, 2]");
            mc.q = m.number("q");
            if (!(mc.q >= 1.0)) m.fail("q must be >= 1");
            mc.lambda0 = m.number("lambda0");
            mc.lambda1 = m.number("lambda1");
            if (mc.lambda0 > mc.lambda1) m.fail("monotonicity needs lambda0 <= lambda1");
            m.done();
            job.monotonicity = mc;
        }
        if (spec.has("multiplication")) {
            Reader m(spec.child("multiplication"), spec.path("multiplication"));
            job.multiplication = parse_mult(m);
            m.done();
        }
        if (job.variants.empty() && !job.monotonicity && !job.multiplication)
            spec.fail("nothing to check: give variants, monotonicity or multiplication");
        return job;
    }
    if (command == "solve") {
        SolveJob job;
        job.cusp = parse_single_cusp(geo);
        if (job.cusp.base.kind == cusp::CuspBase::Kind::point) geo.fail("solve needs a circle or arc base");
        job.mms.lambda = spec.number("lambda", 0.0);
        const auto qs = spec.numbers("q");
        if (qs.size() != 1) spec.fail("solve takes a single q");
        require_q(spec, qs);
        job.mms.q = qs.front();
        parse_mms(spec, job.mms);
        job.dt = spec.number("dt");
        require_positive(spec, "dt", job.dt);
        job.scheme = parse_scheme_key(spec);
        job.solver_tolerance = spec.number("solver_tolerance", job.solver_tolerance);
        require_positive(spec, "solver_tolerance", job.solver_tolerance);
        job.max_iterations = static_cast<int>(spec.integer("max_iterations", job.max_iterations));
        if (job.max_iterations < 1) spec.fail("max_iterations must be positive");
        if (spec.has("study")) {
            Reader st(spec.child("study"), spec.path("study"));
            if (st.has("time_dt")) {
                job.time_study_dt = st.number("time_dt");
                require_positive(st, "time_dt", *job.time_study_dt);
            }
            if (st.has("space_dt")) {
                job.space_study_dt = st.number("space_dt");
                require_positive(st, "space_dt", *job.space_study_dt);
            }
            if (st.has("heat_mode")) {
                Reader h(st.child("heat_mode"), st.path("heat_mode"));
                HeatModeConfig hm;
                hm.T = h.number("T", hm.T);
                hm.dt = h.number("dt", hm.dt);
                require_positive(h, "T", hm.T);
                require_positive(h, "dt", hm.dt);
                hm.n = h.count("n", hm.n, 4);
                h.done();
                job.heat_mode = hm;
            }
            st.done();
        }
        return job;
    }
    if (command == "mr-study") {
        MrJob job;
        job.alphas = spec.numbers("alpha");
        for (double a : job.alphas)
            if (!(a >= 1.0)) spec.fail("alpha values must be >= 1");
        job.lambdas = spec.numbers("lambda");
        job.qs = spec.numbers("q");
        require_q(spec, job.qs);
        parse_mms(spec, job.base);
        job.dt = spec.number("dt");
        require_positive(spec, "dt", job.dt);
        job.scheme = parse_scheme_key(spec);
        return job;
    }
    if (command == "kondratiev") {
        KondratievJob job;
        {
            Reader d(geo.child("domain"), geo.path("domain"));
            job.domain.theta1 = d.number("theta1", job.domain.theta1);
            const bool full = std::abs(job.domain.theta1 - 2.0 * std::numbers::pi) < 1e-12;
            if (!(job.domain.theta1 > 0) || job.domain.theta1 > 2.0 * std::numbers::pi + 1e-12)
                d.fail("theta1 must lie in (0, 2 pi]");
            if (d.flag("periodic", full) != full) d.fail("periodic holds exactly when theta1 = 2 pi");
            job.domain.s_len = d.number("s_len", job.domain.s_len);
            require_positive(d, "s_len", job.domain.s_len);
            job.domain.n_s = d.count("n_s", job.domain.n_s, 4);
            job.domain.n_theta = d.count("n_theta", job.domain.n_theta, 4);
            if (d.has("blend")) {
                Reader b(d.child("blend"), d.path("blend"));
                job.domain.blend.eps0 = b.number("eps0");
                job.domain.blend.eps1 = b.number("eps1");
                b.done();
                if (!(job.domain.blend.eps0 > 0) || !(job.domain.blend.eps0 < job.domain.blend.eps1) ||
                    job.domain.blend.eps1 > 1.0)
                    d.fail("blend needs 0 < eps0 < eps1 <= 1");
            }
            d.done();
        }
        job.orders = spec.integers("k", job.orders);
        for (int k : job.orders)
            if (k < 0 || k > 2) spec.fail("k values must lie in [0, 2]");
        job.as = spec.numbers("a");
        job.qs = spec.numbers("q");
        require_q(spec, job.qs);
        return job;
    }
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

bool Tolerance::admits(double value) const {
    if (!std::isfinite(value)) return false;
    switch (relation) {
        case Relation::at_most: return value <= hi;
        case Relation::at_least: return value >= lo;
        case Relation::within: return value >= lo && value <= hi;
    }
    return false;
}

Json Tolerance::to_json() const {
    switch (relation) {
        case Relation::at_most: return Json{{"max", hi}};
        case Relation::at_least: return Json{{"min", lo}};
        case Relation::within: return Json{{"range", {lo, hi}}};
    }
    return Json{};
}

std::string Tolerance::relation_name() const {
    switch (relation) {
        case Relation::at_most: return "max";
        case Relation::at_least: return "min";
        case Relation::within: return "range";
    }
    return "";
}

Tolerance parse_tolerance(const Json& j, const std::string& where) {
    Reader r(j, where);
    Tolerance t;
    const bool mx = r.has("max"), mn = r.has("min"), rg = r.has("range");
    if (mx + mn + rg != 1) r.fail("exactly one of 'max', 'min', 'range' is required");
    if (mx) {
        t.relation = Tolerance::Relation::at_most;
        t.hi = r.number("max");
    } else if (mn) {
        t.relation = Tolerance::Relation::at_least;
        t.lo = r.number("min");
    } else {
        t.relation = Tolerance::Relation::within;
        const auto v = r.numbers("range");
        if (v.size() != 2 || !(v[0] <= v[1])) r.fail("'range' must be [lo, hi] with lo <= hi");
        t.lo = v[0];
        t.hi = v[1];
    }
    r.done();
    return t;
}

std::filesystem::path share_dir() {
    if (const char* env = std::getenv("CUSPFS_SHARE_DIR")) return env;
    return CUSPFS_SHARE_DIR;
}

std::filesystem::path config_dir() { return CUSPFS_CONFIG_DIR; }

ToleranceTable load_tolerances(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tolerance table " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    Reader r(doc, path.filename().string());
    if (r.integer("version") != 1) r.fail("unsupported tolerance table version");
    const Json& tols = r.child("tolerances");
    r.done();
    ToleranceTable table;
    for (const auto& [id, value] : tols.items()) table[id] = parse_tolerance(value, "tolerances." + id);
    return table;
}

const ToleranceTable& default_tolerances() {
    static const ToleranceTable table = load_tolerances(share_dir() / "tolerances.json");
    return table;
}

cusp::ModelCusp CuspConfig::build() const {
    return cusp::ModelCusp(cusp::make_characteristic(characteristic), base, flavor, epsilon);
}

std::string CuspConfig::label() const {
    std::string name = flavor == cusp::CuspFlavor::cone ? "cone" : "cusp";
    auto num = [](double x) {
        std::ostringstream os;
        os << x;
        return os.str();
    };
    if (characteristic.kind == cusp::CharacteristicKind::power) name += "-power" + num(characteristic.alpha);
    else name += "-exp" + num(characteristic.alpha) + "_" + num(characteristic.beta);
    switch (base.kind) {
        case cusp::CuspBase::Kind::circle: name += "-circle"; break;
        case cusp::CuspBase::Kind::arc: name += "-arc"; break;
        case cusp::CuspBase::Kind::point: name += "-point"; break;
    }
    return name;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{
        "cusp-report",  "embedding",       "identities", "kondratiev",
        "localization", "mr-study",        "multiplication", "norm-equivalence",
        "solve",        "validate-characteristic"};
    return names;
}

ExperimentConfig parse_config(const Json& doc, std::optional<std::uint64_t> seed_override) {
    Reader top(doc, "config");
    ExperimentConfig cfg;
    cfg.command = top.text("command");
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), cfg.command) == names.end())
        top.fail("unknown command '" + cfg.command + "'");
    if (top.has("seed")) {
        const Json& s = top.raw("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            top.fail("'seed' must be a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (seed_override) cfg.seed = *seed_override;
    if (top.has("out")) cfg.out = top.text("out");
    if (top.has("corpus")) {
        Reader c(top.child("corpus"), "config.corpus");
        cfg.corpus.count = c.count("count", cfg.corpus.count, 12);
        cfg.corpus.cutoff = c.number("cutoff", cfg.corpus.cutoff);
        if (!(cfg.corpus.cutoff > 0) || cfg.corpus.cutoff > 1.0) c.fail("cutoff must lie in (0, 1]");
        c.done();
    }
    cfg.tolerances = default_tolerances();
    if (top.has("tolerances")) {
        Reader t(top.child("tolerances"), "config.tolerances");
        for (const auto& [id, value] : top.raw("tolerances").items()) {
            if (!cfg.tolerances.count(id)) t.fail("unknown check id '" + id + "'");
            t.has(id);
            cfg.tolerances[id] = parse_tolerance(value, "config.tolerances." + id);
        }
        t.done();
    }
    if (top.has("checks")) {
        const Json& list = top.raw("checks");
        if (!list.is_array() || list.empty()) top.fail("'checks' must be a non-empty array of check ids");
        for (const auto& id : list) {
            if (!id.is_string()) top.fail("'checks' must hold strings");
            cfg.selected.push_back(id.get<std::string>());
        }
    }
    static const Json empty = Json::object();
    const Json& geo_doc = top.has("geometry") ? top.child("geometry") : empty;
    const Json& spec_doc = top.has("spec") ? top.child("spec") : empty;
    top.done();
    Reader geo(geo_doc, "config.geometry");
    Reader spec(spec_doc, "config.spec");
    try {
        cfg.job = parse_job(cfg.command, geo, spec);
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    geo.done();
    spec.done();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(doc, seed_override);
}

}  // namespace cuspfs::experiment
