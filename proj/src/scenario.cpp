#include "ctrwlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "ctrwlab/decompositions.hpp"
#include "ctrwlab/error.hpp"
#include "ctrwlab/expr.hpp"
#include "ctrwlab/integral.hpp"
#include "ctrwlab/metrics.hpp"
#include "ctrwlab/parallel.hpp"
#include "ctrwlab/sde.hpp"

namespace ctrwlab {

using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t n) {
    // splitmix64 over the three words
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ tag) ^ n);
}

namespace {

enum Tag : std::uint64_t { kDriver = 1, kLimit = 2, kBn = 3, kGdci = 4, kPairs = 5 };

constexpr double kLimitStep = 1.0 / 1024.0;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::string tag_n(std::int64_t n) { return "n=" + std::to_string(n); }

// Strict reader: every key read is echoed (with its default when absent) and
// anything left over is an error.
class Reader {
public:
    Reader(json j, std::string where) : j_(std::move(j)), where_(std::move(where)) {
        if (!j_.is_object()) throw ParamError("CONFIG_TYPE", where_ + " must be an object");
    }

    bool has(const char* k) const { return j_.contains(k); }

    double number(const char* k, double def) {
        const double v = has(k) ? as_number(k) : def;
        echo[k] = v;
        return v;
    }
    std::optional<double> opt_number(const char* k) {
        if (!has(k)) return std::nullopt;
        const double v = as_number(k);
        echo[k] = v;
        return v;
    }
    std::int64_t integer(const char* k, std::int64_t def) {
        const std::int64_t v = has(k) ? as_integer(j_.at(k), k) : def;
        echo[k] = v;
        return v;
    }
    bool boolean(const char* k, bool def) {
        bool v = def;
        if (has(k)) {
            if (!j_.at(k).is_boolean()) type_error(k, "a boolean");
            v = j_.at(k).get<bool>();
        }
        echo[k] = v;
        return v;
    }
    std::string string(const char* k, const std::string& def) {
        std::string v = def;
        if (has(k)) {
            if (!j_.at(k).is_string()) type_error(k, "a string");
            v = j_.at(k).get<std::string>();
        }
        echo[k] = v;
        return v;
    }
    // Strings or bare numbers, for coefficient expressions.
    std::string expression(const char* k, const std::string& def) {
        std::string v = def;
        if (has(k)) {
            const auto& x = j_.at(k);
            if (x.is_string())
                v = x.get<std::string>();
            else if (x.is_number())
                v = fmt(x.get<double>());
            else
                type_error(k, "an expression string");
        }
        echo[k] = v;
        return v;
    }
    std::vector<double> numbers(const char* k, const std::vector<double>& def) {
        std::vector<double> v = def;
        if (has(k)) {
            const auto& x = j_.at(k);
            if (!x.is_array()) type_error(k, "an array of numbers");
            v.clear();
            for (const auto& e : x) {
                if (!e.is_number()) type_error(k, "an array of numbers");
                v.push_back(e.get<double>());
            }
        }
        echo[k] = v;
        return v;
    }
    std::vector<std::int64_t> integers(const char* k, const std::vector<std::int64_t>& def) {
        std::vector<std::int64_t> v = def;
        if (has(k)) {
            const auto& x = j_.at(k);
            if (!x.is_array()) type_error(k, "an array of integers");
            v.clear();
            for (const auto& e : x) v.push_back(as_integer(e, k));
        }
        echo[k] = v;
        return v;
    }
    std::vector<std::string> strings(const char* k) {
        std::vector<std::string> v;
        if (has(k)) {
            const auto& x = j_.at(k);
            if (!x.is_array()) type_error(k, "an array of strings");
            for (const auto& e : x) {
                if (!e.is_string()) type_error(k, "an array of strings");
                v.push_back(e.get<std::string>());
            }
            echo[k] = v;
        }
        return v;
    }
    // Sub-object; the caller echoes it.
    const json* object(const char* k) {
        if (!has(k)) return nullptr;
        if (!j_.at(k).is_object()) type_error(k, "an object");
        seen_.insert(k);
        return &j_.at(k);
    }
    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!echo.contains(k) && !seen_.count(k))
                throw ParamError("CONFIG_UNKNOWN_KEY", "unknown key '" + k + "' in " + where_);
    }

    json echo = json::object();

private:
    double as_number(const char* k) const {
        const auto& x = j_.at(k);
        if (!x.is_number()) type_error(k, "a number");
        return x.get<double>();
    }
    std::int64_t as_integer(const json& x, const char* k) const {
        if (x.is_number_integer()) return x.get<std::int64_t>();
        if (x.is_number_float()) {
            const double d = x.get<double>();
            if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
        }
        type_error(k, "an integer");
    }
    [[noreturn]] void type_error(const char* k, const char* what) const {
        throw ParamError("CONFIG_TYPE", where_ + "." + k + " must be " + what);
    }

    json j_;
    std::string where_;
    std::set<std::string> seen_;
};

InnovationMode mode_of(const std::string& s) {
    try {
        return innovation_mode_from_string(s);
    } catch (const Error&) {
        throw ParamError("PARAM_MODE", "unknown innovation mode '" + s + "'");
    }
}

ProcessConfig read_process(const json& j, json& echo) {
    Reader r(j, "params.process");
    ProcessConfig c;
    c.innovation.alpha = r.number("alpha", 1.5);
    c.innovation.mode = mode_of(r.string("innovation", "symmetric"));
    c.innovation.scale = r.number("scale", 1.0);
    if (auto b = r.opt_number("beta")) c.waiting = WaitingLaw{*b, r.number("wait_scale", 1.0)};
    c.coefficients = r.numbers("coefficients", {1.0});
    if (r.has("past")) c.past_horizon = static_cast<int>(r.integer("past", 0));
    const std::string coupling = r.string("coupling", "uncoupled");
    if (coupling == "uncoupled")
        c.coupling = Coupling::uncoupled;
    else if (coupling == "magnitude_coupled")
        c.coupling = Coupling::magnitude_coupled;
    else
        throw ParamError("PARAM_COUPLING", "unknown coupling '" + coupling + "'");
    r.finish();
    c.validate();
    echo = r.echo;
    return c;
}

// Normalised copy of a scenario with the kind-specific params parsed once.
struct Ctx {
    const Scenario& s;
    const RunOptions& opt;
    DiagnosticReport rep;
    std::string paths_dir;

    Ctx(const Scenario& sc, const RunOptions& o) : s(sc), opt(o) {
        rep.scenario = sc.name.empty() ? sc.kind : sc.name;
        rep.seed = sc.seed;
        if (o.write_files) {
            if (!sc.paths_dir.empty())
                paths_dir = sc.paths_dir;
            else if (!sc.report_path.empty()) {
                std::filesystem::path p(sc.report_path);
                paths_dir = (p.parent_path() / (p.stem().string() + "_paths")).string();
            }
        }
    }

    SeedSpec driver(std::int64_t n, std::size_t rep_i) const {
        return {derive_seed(s.seed, kDriver, static_cast<std::uint64_t>(n)), rep_i};
    }
    SeedSpec limit(std::size_t rep_i) const { return {derive_seed(s.seed, kLimit, 0), rep_i}; }

    template <class F>
    std::vector<double> replicate(F&& f) const {
        std::vector<double> out(s.reps);
        parallel_for(s.reps, opt.threads, [&](std::size_t i) { out[i] = f(i); });
        return out;
    }
};

double positive(Reader& r, const char* k, double def, const char* tag) {
    const double v = r.number(k, def);
    detail::require(std::isfinite(v) && v > 0.0, tag, std::string(k) + " must be positive");
    return v;
}

ProcessConfig process_param(Reader& r, json& echo_out) {
    const json* p = r.object("process");
    json e;
    ProcessConfig c = read_process(p ? *p : json::object(), e);
    echo_out["process"] = e;
    return c;
}

void require_grid(double T, double step) {
    const double k = T / step;
    detail::require(std::abs(k - std::round(k)) <= 1e-9 * k && k >= 1.0, "PARAM_LIMIT_STEP",
                    "limit_step must divide the horizon");
}

void add_ks(DiagnosticReport& rep, const std::string& what, std::int64_t n, const std::vector<double>& a,
            const std::vector<double>& b) {
    const auto k = ks_two_sample(SampleSet(a), SampleSet(b));
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    // 95% critical value of the two-sample statistic under the null
    const double w = 1.358 * std::sqrt((na + nb) / (na * nb));
    rep.add({what + " " + tag_n(n), k.statistic, std::max(0.0, k.statistic - w), std::min(1.0, k.statistic + w),
             a.size()});
    rep.add_point(what + "_p " + tag_n(n), k.p_value, a.size());
}

// Terminal values of psi Z_{D^{-1}} (CTRW) or psi Z (moving average) at T.
GridPath limit_driver(const ProcessConfig& c, double T, double step, SeedSpec seed, GridPath* d_inv = nullptr) {
    const StableParams z = c.innovation.limit_params();
    GridPath x;
    if (c.waiting) {
        auto tc = gen_time_changed_levy(z, SubordinatorSpec::from_waiting(*c.waiting), T, step, seed);
        x = std::move(tc.x);
        if (d_inv) *d_inv = std::move(tc.d_inv);
    } else {
        x = gen_levy(z, T, step, seed);
    }
    for (auto& v : x.values) v *= c.psi();
    return x;
}

double at_horizon(const GridPath& g, double T) { return g.value_at(T); }

// ---------------------------------------------------------------- simulate

void write_bundle(const std::string& dir, const SimulationBundle& b, std::int64_t n, std::size_t rep_i) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("IO_WRITE", "cannot create directory '" + dir + "'");
    const std::string stem = dir + "/n" + std::to_string(n) + "_rep" + std::to_string(rep_i);
    {
        std::ofstream os(stem + ".csv");
        if (!os) throw IoError("IO_WRITE", "cannot open '" + stem + ".csv'");
        write_csv(b.x, os);
        if (!os) throw IoError("IO_WRITE", "write to '" + stem + ".csv' failed");
    }
    json side;
    side["process"] = process_to_json(b.config);
    side["n"] = n;
    side["seed"] = b.seed.seed;
    side["stream"] = b.seed.stream;
    side["horizon"] = b.horizon;
    side["time_exponent"] = b.time_exponent;
    side["scaling"] = b.scaling();
    side["events"] = b.events();
    std::ofstream os(stem + ".json");
    os << side.dump(2) << "\n";
    if (!os) throw IoError("IO_WRITE", "write to '" + stem + ".json' failed");
}

void run_simulate(Ctx& c, Reader& r) {
    auto cfg = process_param(r, r.echo);
    const double T = positive(r, "horizon", 1.0, "PARAM_HORIZON");
    const auto keep = static_cast<std::size_t>(std::max<std::int64_t>(0, r.integer("paths", 10)));
    r.finish();
    for (std::int64_t n : c.s.n_list) {
        cfg.n = n;
        std::vector<double> events(c.s.reps);
        const auto xt = c.replicate([&](std::size_t i) {
            const auto b = gen_process(cfg, T, c.driver(n, i));
            events[i] = static_cast<double>(b.events());
            if (i < keep && !c.paths_dir.empty()) write_bundle(c.paths_dir, b, n, i);
            return b.x(T);
        });
        c.rep.add_interval("x_T " + tag_n(n), mean_ci(xt), xt.size());
        c.rep.add_interval("events " + tag_n(n), mean_ci(events), events.size());
    }
}

// -------------------------------------------------------------- attraction

void run_attraction(Ctx& c, Reader& r) {
    auto cfg = process_param(r, r.echo);
    const double T = positive(r, "horizon", 1.0, "PARAM_HORIZON");
    const double step = positive(r, "limit_step", kLimitStep, "PARAM_LIMIT_STEP");
    r.finish();
    if (cfg.coupling != Coupling::uncoupled)
        throw PreconditionError("ATTRACTION_COUPLED", "the limit comparison covers uncoupled walks only");
    require_grid(T, step);

    std::vector<double> lim_x, lim_d;
    if (cfg.waiting) {
        lim_d.resize(c.s.reps);
        lim_x = c.replicate([&](std::size_t i) {
            GridPath d;
            const auto x = limit_driver(cfg, T, step, c.limit(i), &d);
            lim_d[i] = at_horizon(d, T);
            return at_horizon(x, T);
        });
    } else {
        const auto p = cfg.innovation.limit_params();
        lim_x = sample_stable(p, c.limit(0), c.s.reps);
        const double f = cfg.psi() * std::pow(T, 1.0 / p.alpha);
        for (auto& v : lim_x) v *= f;
    }
    for (std::int64_t n : c.s.n_list) {
        cfg.n = n;
        std::vector<double> d(c.s.reps);
        const auto x = c.replicate([&](std::size_t i) {
            const auto b = gen_process(cfg, T, c.driver(n, i));
            if (cfg.waiting) d[i] = b.counting(T) * std::pow(static_cast<double>(n), -cfg.waiting->beta);
            return b.x(T);
        });
        add_ks(c.rep, "ks", n, x, lim_x);
        if (cfg.waiting) add_ks(c.rep, "time_ks", n, d, lim_d);
    }
}

// ---------------------------------------------------------------------- gd

void run_gd(Ctx& c, Reader& r) {
    auto cfg = process_param(r, r.echo);
    const double T = positive(r, "horizon", 1.0, "PARAM_HORIZON");
    const double a = r.number("truncation", 1.0);
    const auto Rs = r.numbers("R", {0.5, 1.0, 2.0});
    const auto cs = r.numbers("c", {0.5, 1.0, 2.0});
    const bool bn = r.boolean("bn", true);
    const auto bn_reps = static_cast<std::size_t>(r.integer("bn_reps", 10000));
    r.finish();
    detail::require(!Rs.empty(), "PARAM_R", "R list must not be empty");
    std::vector<GdEnsemble> ens;
    for (std::int64_t n : c.s.n_list) {
        cfg.n = n;
        GdEnsemble e;
        e.n = n;
        e.samples.resize(c.s.reps);
        const auto m = c.replicate([&](std::size_t i) {
            const auto split = split_martingale(gen_process(cfg, T, c.driver(n, i)), a);
            e.samples[i] = gd_sample(split, T, cs);
            return split.m(T);
        });
        c.rep.add_interval("mean_m " + tag_n(n), mean_ci(m), m.size());
        c.rep.add_point("se_m " + tag_n(n), standard_error(m), m.size());
        if (bn && cfg.waiting) {
            const auto est = estimate_bn(cfg.innovation, n, cfg.waiting->beta, a, bn_reps,
                                         {derive_seed(c.s.seed, kBn, static_cast<std::uint64_t>(n)), 0});
            c.rep.add_interval("bn " + tag_n(n), est.mc, est.reps);
            c.rep.add_point("bn_closed " + tag_n(n), est.closed_form);
        }
        ens.push_back(std::move(e));
    }
    for (const auto& e : gd_statistics(ens, Rs, cs).estimates) c.rep.add(e);
}

// -------------------------------------------------------------------- gdca

void run_gdca(Ctx& c, Reader& r) {
    auto cfg = process_param(r, r.echo);
    const double T = positive(r, "horizon", 1.0, "PARAM_HORIZON");
    const double beta = cfg.waiting ? cfg.waiting->beta : 1.0;
    const double gamma = positive(r, "gamma", beta - beta / cfg.innovation.alpha + 0.1, "PARAM_GAMMA");
    r.finish();
    for (std::int64_t n : c.s.n_list) {
        cfg.n = n;
        const auto v = c.replicate([&](std::size_t i) {
            const auto b = gen_process(cfg, T, c.driver(n, i));
            return gdca_statistic(split_uv(b), gamma, b);
        });
        c.rep.add_interval("median " + tag_n(n), median_ci(v), v.size());
        c.rep.add_point("q90 " + tag_n(n), quantile(v, 0.9), v.size());
    }
}

// -------------------------------------------------------------------- gdci

void run_gdci(Ctx& c, Reader& r) {
    auto cfg = process_param(r, r.echo);
    const double T = positive(r, "horizon", 1.0, "PARAM_HORIZON");
    const double K = positive(r, "K", 1.0, "PARAM_K");
    const double gamma = positive(r, "gamma", default_gdci_gamma(cfg.innovation.alpha), "PARAM_GAMMA");
    const auto qreps = static_cast<std::size_t>(r.integer("quantile_reps", 2000));
    r.finish();
    for (std::int64_t n : c.s.n_list) {
        cfg.n = n;
        std::vector<VniFamily> fam(c.s.reps);
        parallel_for(c.s.reps, c.opt.threads,
                     [&](std::size_t i) { fam[i] = build_vni_family(gen_process(cfg, T, c.driver(n, i))); });
        const auto ex = gdci_moment_sums(fam[0], K, gamma, qreps,
                                         {derive_seed(c.s.seed, kGdci, static_cast<std::uint64_t>(n)), 0});
        const auto mc = gdci_moment_sums_mc(fam, K, gamma);
        c.rep.add_point("large " + tag_n(n), ex.large, ex.modified ? qreps : 1);
        c.rep.add_point("small " + tag_n(n), ex.small);
        c.rep.add_point("large_mc " + tag_n(n), mc.large, fam.size());
        c.rep.add_point("small_mc " + tag_n(n), mc.small, fam.size());
    }
}

// --------------------------------------------------------------- integrals

Integrand read_integrand(const json* j, const ProcessConfig& cfg, json& echo) {
    Reader r(j ? *j : json::object(), "params.integrand");
    const std::string kind = r.string("kind", "const");
    Integrand h;
    if (kind == "const") {
        h = Integrand::constant(r.number("value", 1.0));
    } else if (kind == "deterministic") {
        const Expr e = Expr::parse(r.expression("expr", "t"));
        h = Integrand::deterministic([e](double t) {
            Vars v;
            v.t = t;
            return e(v);
        });
    } else if (kind == "lipschitz") {
        const Expr e = Expr::parse(r.expression("expr", "tanh(y)"));
        const double beta = cfg.waiting ? cfg.waiting->beta : 1.0;
        const double bound = positive(r, "bound", 1.0, "PARAM_BOUND");
        const double lc = positive(r, "c", 10.0, "PARAM_LIPSCHITZ");
        const double gamma = positive(r, "gamma", 0.5 * beta / cfg.innovation.alpha, "PARAM_GAMMA");
        h = Integrand::lipschitz(
            [e](double y) {
                Vars v;
                v.y = y;
                return e(v);
            },
            bound, lc, gamma);
    } else if (kind == "adversarial") {
        h = Integrand::adversarial(r.number("decay", 1.0 - 1.0 / cfg.innovation.alpha));
    } else {
        throw ParamError("PARAM_INTEGRAND", "unknown integrand kind '" + kind + "'");
    }
    r.finish();
    echo = r.echo;
    return h;
}

void run_integrals(Ctx& c, Reader& r) {
    auto cfg = process_param(r, r.echo);
    const double T = positive(r, "horizon", 1.0, "PARAM_HORIZON");
    json he;
    const Integrand h = read_integrand(r.object("integrand"), cfg, he);
    r.echo["integrand"] = he;
    const auto eps = r.numbers("eps", {});
    const int m = static_cast<int>(r.integer("m", 10));
    const bool limit = r.boolean("limit", false);
    const double step = positive(r, "limit_step", kLimitStep, "PARAM_LIMIT_STEP");
    r.finish();
    for (double e : eps) detail::require(e > 0.0, "PARAM_EPS", "eps must be positive");
    detail::require(m >= 1, "PARAM_M", "m must be >= 1");

    std::vector<double> lim;
    if (limit) {
        if (h.kind == IntegrandKind::adversarial)
            throw PreconditionError("LIMIT_ADVERSARIAL", "the adversarial integrand has no limit scheme");
        require_grid(T, step);
        lim = c.replicate([&](std::size_t i) { return at_horizon(grid_integral(h, limit_driver(cfg, T, step, c.limit(i))), T); });
    }
    for (std::int64_t n : c.s.n_list) {
        cfg.n = n;
        std::vector<std::vector<double>> ups(eps.size(), std::vector<double>(c.s.reps));
        const auto v = c.replicate([&](std::size_t i) {
            const auto b = gen_process(cfg, T, c.driver(n, i));
            const auto rh = realise(h, b.x, &b);
            for (std::size_t k = 0; k < eps.size(); ++k)
                ups[k][i] = upsilon_sample(rh, discretize_integrand(rh, eps[k], m), b.x);
            return ito_integral(rh, b.x)(T);
        });
        c.rep.add_interval("median " + tag_n(n), median_ci(v), v.size());
        for (std::size_t k = 0; k < eps.size(); ++k)
            c.rep.add_interval("upsilon " + tag_n(n) + " eps=" + fmt(eps[k]) + " m=" + std::to_string(m),
                               mean_ci(ups[k]), ups[k].size());
        if (limit) add_ks(c.rep, "ks", n, v, lim);
    }
}

// ------------------------------------------------------------- adversarial

void run_adversarial(Ctx& c, Reader& r) {
    auto cfg = process_param(r, r.echo);
    AdversarialOptions o;
    o.horizon = positive(r, "horizon", 1.0, "PARAM_HORIZON");
    o.decay = r.number("decay", 0.0);
    r.finish();
    o.n_list = c.s.n_list;
    o.reps = c.s.reps;
    o.seed = c.s.seed;
    o.threads = c.opt.threads;
    for (const auto& e : adversarial_experiment(cfg, o).estimates) c.rep.add(e);
}

// ------------------------------------------------------------- sde / sdde

Coef3 coef3_or_empty(const std::string& src) {
    const Expr e = Expr::parse(src);
    if (e.is_constant() && e.constant_value() == 0.0) return {};
    return coef3(e);
}

Coef2 coef2_or_empty(const std::string& src) {
    const Expr e = Expr::parse(src);
    if (e.is_constant() && e.constant_value() == 0.0) return {};
    return coef2(e);
}

void add_w1_family(Ctx& c, const std::vector<std::vector<double>>& by_n, const std::vector<double>& lim) {
    const auto& ns = c.s.n_list;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        c.rep.add_interval("mean " + tag_n(ns[k]), mean_ci(by_n[k]), by_n[k].size());
        if (k > 0)
            c.rep.add_point("w1 " + tag_n(ns[k - 1]) + " " + tag_n(ns[k]),
                            wasserstein1(SampleSet(by_n[k - 1]), SampleSet(by_n[k])), by_n[k].size());
        if (!lim.empty()) {
            c.rep.add_point("w1_limit " + tag_n(ns[k]), wasserstein1(SampleSet(by_n[k]), SampleSet(lim)),
                            by_n[k].size());
            add_ks(c.rep, "ks_limit", ns[k], by_n[k], lim);
        }
    }
}

void run_sde(Ctx& c, Reader& r) {
    auto cfg = process_param(r, r.echo);
    if (!cfg.waiting) throw ParamError("PARAM_WAITING", "the sde scenario needs a CTRW driver (process.beta)");
    const double T = positive(r, "horizon", 1.0, "PARAM_HORIZON");
    SdeSpec spec;
    spec.x0 = r.number("x0", 0.0);
    {
        const json* j = r.object("coefficients");
        Reader cr(j ? *j : json::object(), "params.coefficients");
        spec.b = coef3_or_empty(cr.expression("b", "0"));
        spec.mu = coef3_or_empty(cr.expression("mu", "0"));
        spec.sigma = coef3_or_empty(cr.expression("sigma", "0"));
        cr.finish();
        r.echo["coefficients"] = cr.echo;
    }
    if (const json* j = r.object("certificate")) {
        Reader cr(*j, "params.certificate");
        GrowthCertificate g;
        g.K = cr.number("K", g.K);
        g.C = cr.number("C", g.C);
        g.p = cr.number("p", g.p);
        g.R = cr.number("R", g.R);
        cr.finish();
        g.validate();
        spec.cert = g;
        r.echo["certificate"] = cr.echo;
    }
    const double mesh = positive(r, "mesh", default_mesh(T), "PARAM_MESH");
    const bool limit = r.boolean("limit", true);
    const double step = positive(r, "limit_step", kLimitStep, "PARAM_LIMIT_STEP");
    r.finish();
    c.rep.add_point("certificate_warnings", static_cast<double>(spec.check_growth(T).size()));

    std::vector<double> lim;
    if (limit) {
        require_grid(T, step);
        lim = c.replicate([&](std::size_t i) {
            GridPath d;
            const auto z = limit_driver(cfg, T, step, c.limit(i), &d);
            return at_horizon(solve_s_limit(spec, d, z), T);
        });
    }
    std::vector<std::vector<double>> by_n;
    for (std::int64_t n : c.s.n_list) {
        cfg.n = n;
        std::vector<double> warned(c.s.reps);
        by_n.push_back(c.replicate([&](std::size_t i) {
            const auto res = solve_sn(spec, gen_process(cfg, T, c.driver(n, i)), mesh);
            warned[i] = res.warnings.empty() ? 0.0 : 1.0;
            return res.x(T);
        }));
        c.rep.add_interval("warned " + tag_n(n), tail_estimate(static_cast<std::size_t>(
                                                                   std::count(warned.begin(), warned.end(), 1.0)),
                                                               warned.size()),
                           warned.size());
    }
    add_w1_family(c, by_n, lim);
}

void run_sdde(Ctx& c, Reader& r) {
    auto cfg = process_param(r, r.echo);
    const double T = positive(r, "horizon", 1.0, "PARAM_HORIZON");
    const double delay = positive(r, "r", 0.5, "PARAM_DELAY");
    const double eta = r.number("eta", 0.0);
    Coef2 b, sigma;
    {
        const json* j = r.object("coefficients");
        Reader cr(j ? *j : json::object(), "params.coefficients");
        b = coef2_or_empty(cr.expression("b", "0"));
        sigma = coef2_or_empty(cr.expression("sigma", "0"));
        cr.finish();
        r.echo["coefficients"] = cr.echo;
    }
    SddeSpec spec = make_sdde(b, sigma, delay, eta, cfg.psi());
    if (const json* j = r.object("kernel")) {
        Reader kr(*j, "params.kernel");
        spec.phi = kernel(Expr::parse(kr.expression("expr", "0")));
        spec.phi_bound = kr.number("bound", 1.0);
        spec.phi_lipschitz = kr.number("lipschitz", 1.0);
        kr.finish();
        r.echo["kernel"] = kr.echo;
    }
    const double bound = positive(r, "bound", 100.0, "PARAM_BOUND");
    const double mesh = positive(r, "mesh", default_mesh(T), "PARAM_MESH");
    const bool limit = r.boolean("limit", true);
    const double step = positive(r, "limit_step", kLimitStep, "PARAM_LIMIT_STEP");
    r.finish();
    c.rep.add_point("boundedness_warnings", static_cast<double>(spec.check_bounded(T, bound).size()));

    std::vector<double> lim;
    if (limit) {
        if (cfg.waiting) throw PreconditionError("SDDE_DRIVER", "the SDDE limit scheme needs a moving-average driver");
        require_grid(T, step);
        const StableParams zp = cfg.innovation.limit_params();
        lim = c.replicate([&](std::size_t i) { return at_horizon(solve_sdd_limit(spec, gen_levy(zp, T, step, c.limit(i))), T); });
    }
    std::vector<std::vector<double>> by_n;
    for (std::int64_t n : c.s.n_list) {
        cfg.n = n;
        by_n.push_back(c.replicate([&](std::size_t i) {
            const auto bd = gen_process(cfg, T, c.driver(n, i));
            const auto res = spec.phi ? solve_ext_sddn(spec, bd.x, mesh) : solve_sddn(spec, bd.x, mesh);
            return res.x(T);
        }));
    }
    add_w1_family(c, by_n, lim);
}

// ----------------------------------------------------------------- metrics

StepPath read_path(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw IoError("IO_READ", "cannot open '" + file + "'");
    return read_csv(is);
}

StepPath random_path(CounterRng& g, int max_breaks) {
    const int k = static_cast<int>(g.uniform_open() * max_breaks);
    std::vector<double> t{0.0}, v{std::round(g.normal() * 4.0) / 4.0};
    for (int i = 0; i < k; ++i) t.push_back(std::round(g.uniform_open() * 64.0) / 64.0);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.back() >= 1.0) t.pop_back();
    while (v.size() < t.size()) v.push_back(std::round(g.normal() * 4.0) / 4.0);
    return StepPath(t, v, 1.0);
}

void run_metrics(Ctx& c, Reader& r) {
    const auto files = r.strings("paths");
    const auto pairs = r.integer("pairs", files.empty() ? 1000 : 0);
    const int max_breaks = static_cast<int>(r.integer("max_breakpoints", 8));
    const int res = static_cast<int>(r.integer("resolution", 64));
    r.finish();
    if (!files.empty()) {
        if (files.size() != 2) throw ParamError("PARAM_PATHS", "metrics needs exactly two CSV paths");
        const StepPath x = read_path(files[0]), y = read_path(files[1]);
        if (x.horizon() != y.horizon()) throw ShapeError("HORIZON_MISMATCH", "paths have different horizons");
        c.rep.add_point("d_uniform", d_uniform(x, y).value);
        c.rep.add_point("d_j1", d_j1(x, y).value);
        const auto m1 = d_m1(x, y, res);
        c.rep.add({"d_m1", m1.value, std::max(0.0, m1.value - m1.mesh), m1.value + m1.mesh, 1});
        return;
    }
    detail::require(pairs >= 1 && max_breaks >= 1, "PARAM_PAIRS", "pairs and max_breakpoints must be >= 1");
    const auto N = static_cast<std::size_t>(pairs);
    std::vector<double> u(N), j(N), m(N), bad(N);
    parallel_for(N, c.opt.threads, [&](std::size_t i) {
        CounterRng g({derive_seed(c.s.seed, kPairs, 0), i});
        const StepPath x = random_path(g, max_breaks), y = random_path(g, max_breaks);
        u[i] = d_uniform(x, y).value;
        j[i] = d_j1(x, y).value;
        const auto mr = d_m1(x, y, res);
        m[i] = mr.value;
        const double tol = mr.mesh + 1e-12;
        bad[i] = (m[i] <= j[i] + tol && j[i] <= u[i] + 1e-12) ? 0.0 : 1.0;
    });
    c.rep.add_interval("d_uniform", mean_ci(u), N);
    c.rep.add_interval("d_j1", mean_ci(j), N);
    c.rep.add_interval("d_m1", mean_ci(m), N);
    c.rep.add_point("order_violations", static_cast<double>(std::count(bad.begin(), bad.end(), 1.0)), N);
}

}  // namespace

// ------------------------------------------------------------------ public

ProcessConfig process_from_json(const json& j) {
    json e;
    return read_process(j, e);
}

json process_to_json(const ProcessConfig& c) {
    json j;
    j["alpha"] = c.innovation.alpha;
    j["innovation"] = to_string(c.innovation.mode);
    j["scale"] = c.innovation.scale;
    if (c.waiting) {
        j["beta"] = c.waiting->beta;
        j["wait_scale"] = c.waiting->scale;
    }
    j["coefficients"] = c.coefficients;
    if (c.past_horizon) j["past"] = *c.past_horizon;
    j["coupling"] = c.coupling == Coupling::uncoupled ? "uncoupled" : "magnitude_coupled";
    return j;
}

Scenario Scenario::from_json(const json& j) {
    Reader r(j, "scenario");
    Scenario s;
    s.kind = r.string("kind", "");
    if (std::find(scenario_kinds().begin(), scenario_kinds().end(), s.kind) == scenario_kinds().end())
        throw ParamError("CONFIG_KIND", "unknown scenario kind '" + s.kind + "'");
    s.name = r.string("name", s.kind);
    const std::int64_t seed = r.integer("seed", 0);
    detail::require(seed >= 0, "PARAM_SEED", "seed must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
    const std::int64_t reps = r.integer("reps", 1000);
    detail::require(reps >= 2, "PARAM_REPS", "reps must be >= 2");
    s.reps = static_cast<std::size_t>(reps);
    s.n_list = r.integers("n_list", s.n_list);
    detail::require(!s.n_list.empty(), "PARAM_N", "n_list must not be empty");
    for (auto n : s.n_list) detail::require(n >= 1, "PARAM_N", "n must be >= 1");
    if (const json* o = r.object("output")) {
        Reader orr(*o, "output");
        s.report_path = orr.string("report", "");
        s.paths_dir = orr.string("paths", "");
        orr.finish();
    }
    if (const json* p = r.object("params")) s.params = *p;
    r.finish();
    return s;
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("IO_READ", "cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ParamError("CONFIG_PARSE", path + ": " + e.what());
    }
    return from_json(j);
}

json Scenario::to_json() const {
    json j;
    j["kind"] = kind;
    j["name"] = name;
    j["seed"] = seed;
    j["reps"] = reps;
    j["n_list"] = n_list;
    j["params"] = params;
    return j;
}

DiagnosticReport run_scenario(const Scenario& s, const RunOptions& opt) {
    Ctx c(s, opt);
    Reader r(s.params, "params");
    if (s.kind == "simulate")
        run_simulate(c, r);
    else if (s.kind == "attraction")
        run_attraction(c, r);
    else if (s.kind == "gd")
        run_gd(c, r);
    else if (s.kind == "gdca")
        run_gdca(c, r);
    else if (s.kind == "gdci")
        run_gdci(c, r);
    else if (s.kind == "integrals")
        run_integrals(c, r);
    else if (s.kind == "adversarial")
        run_adversarial(c, r);
    else if (s.kind == "sde")
        run_sde(c, r);
    else if (s.kind == "sdde")
        run_sdde(c, r);
    else if (s.kind == "metrics")
        run_metrics(c, r);
    else
        throw ParamError("CONFIG_KIND", "unknown scenario kind '" + s.kind + "'");
    Scenario norm = s;
    norm.params = r.echo;
    c.rep.params = norm.to_json();
    if (opt.write_files && !s.report_path.empty()) emit_report(c.rep, s.report_path);
    return c.rep;
}

}  // namespace ctrwlab
