#include "ctrwlab/integral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctrwlab/error.hpp"
#include "ctrwlab/parallel.hpp"

namespace ctrwlab {

Integrand Integrand::constant(double c) {
    return deterministic([c](double) { return c; });
}

Integrand Integrand::deterministic(std::function<double(double)> f) {
    Integrand h;
    h.kind = IntegrandKind::deterministic;
    h.f = std::move(f);
    return h;
}

Integrand Integrand::lipschitz(std::function<double(double)> g, double bound, double c, double gamma) {
    detail::require(bound > 0.0 && std::isfinite(bound), "PARAM_BOUND", "integrand bound must be positive");
    detail::require(c > 0.0 && std::isfinite(c), "PARAM_LIPSCHITZ", "Lipschitz constant must be positive");
    detail::require(gamma >= 0.0, "PARAM_GAMMA", "gamma must be >= 0");
    Integrand h;
    h.kind = IntegrandKind::lipschitz;
    h.f = std::move(g);
    h.bound = bound;
    h.lip_c = c;
    h.gamma = gamma;
    return h;
}

Integrand Integrand::adversarial(double decay) {
    detail::require(decay >= 0.0, "PARAM_DECAY", "decay must be >= 0");
    Integrand h;
    h.kind = IntegrandKind::adversarial;
    h.decay = decay;
    return h;
}

Integrand Integrand::pure_jump(StepPath p) {
    Integrand h;
    h.kind = IntegrandKind::pure_jump;
    h.path = std::move(p);
    return h;
}

Integrand Integrand::pathwise(std::function<double(double)> g) {
    Integrand h;
    h.kind = IntegrandKind::pathwise;
    h.f = std::move(g);
    return h;
}

namespace {

double interp(const RealisedIntegrand& h, std::size_t i, double t) {
    if (h.start[i] == h.end[i]) return h.start[i];
    const double k0 = h.knots[i];
    const double k1 = i + 1 < h.knots.size() ? h.knots[i + 1] : h.horizon;
    return h.start[i] + (h.end[i] - h.start[i]) * ((t - k0) / (k1 - k0));
}

}  // namespace

double RealisedIntegrand::value(double t) const {
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    const std::size_t i = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
    return interp(*this, i, t);
}

double RealisedIntegrand::left(double t) const {
    auto it = std::lower_bound(knots.begin(), knots.end(), t);
    if (it == knots.begin()) return start.front();
    const auto i = static_cast<std::size_t>(it - knots.begin()) - 1;
    if (i + 1 < knots.size() && knots[i + 1] == t) return end[i];
    return interp(*this, i, t);
}

bool RealisedIntegrand::is_step() const { return start == end; }

RealisedIntegrand realise(const Integrand& h, const StepPath& x, const SimulationBundle* bundle) {
    RealisedIntegrand r;
    const double T = x.horizon();
    r.horizon = T;
    switch (h.kind) {
        case IntegrandKind::deterministic: {
            if (!h.f) throw ParamError("INTEGRAND_FUNCTION", "deterministic integrand needs a function");
            const double dt = T / kDeterministicCells;
            for (int j = 0; j < kDeterministicCells; ++j) {
                const double a = j * dt;
                const double b = j + 1 == kDeterministicCells ? T : (j + 1) * dt;
                r.knots.push_back(a);
                r.start.push_back(h.f(a));
                r.end.push_back(h.f(b));
            }
            break;
        }
        case IntegrandKind::lipschitz: {
            if (!h.f) throw ParamError("INTEGRAND_FUNCTION", "Lipschitz integrand needs a function");
            const double n = bundle ? static_cast<double>(bundle->config.n) : 1.0;
            const double w = 2.0 * h.bound / (h.lip_c * std::pow(n, h.gamma));
            auto g = [&](double y) { return std::clamp(h.f(y), -h.bound, h.bound); };
            // On [t_j, t_{j+1}) H moves linearly from g(X_{t_{j-1}}) to g(X_{t_j}).
            double prev = g(x(0.0));
            for (std::int64_t j = 0;; ++j) {
                const double a = static_cast<double>(j) * w;
                if (a >= T && j > 0) break;
                const double cur = g(x(std::min(a, T)));
                r.knots.push_back(a);
                r.start.push_back(prev);
                r.end.push_back(cur);
                prev = cur;
            }
            // the last cell is cut at T; its end value is the left limit there
            const std::size_t last = r.knots.size() - 1;
            const double a = r.knots[last];
            const double full = a + w;
            if (full > T) r.end[last] = r.start[last] + (r.end[last] - r.start[last]) * ((T - a) / w);
            break;
        }
        case IntegrandKind::adversarial: {
            if (!bundle) throw PreconditionError("INTEGRAND_CONTEXT", "adversarial integrand needs a bundle");
            const double amp = std::pow(static_cast<double>(bundle->config.n), -h.decay);
            const std::size_t N = bundle->events();
            r.knots.push_back(0.0);
            r.start.push_back(0.0);
            for (std::size_t k = 1; k <= N; ++k) {
                // On [tau_k, tau_{k+1}) the filtration holds theta up to index k.
                const auto idx = static_cast<std::int64_t>(k) + h.lookahead;
                if (idx > static_cast<std::int64_t>(k))
                    throw AdaptednessViolation("ADAPTEDNESS", "integrand reads theta_" + std::to_string(idx) +
                                                                  " before time of event " + std::to_string(k + 1));
                const double th = bundle->theta(idx);
                const double v = th > 0 ? amp : (th < 0 ? -amp : 0.0);
                const double t = bundle->event_time(k);
                if (t == r.knots.back()) {
                    r.start.back() = v;
                } else {
                    r.knots.push_back(t);
                    r.start.push_back(v);
                }
            }
            r.end = r.start;
            break;
        }
        case IntegrandKind::pure_jump: {
            if (!h.path) throw ParamError("INTEGRAND_PATH", "pure-jump integrand needs a path");
            if (h.path->horizon() != T) throw ShapeError("PATH_HORIZON_MISMATCH", "integrand and integrator horizons differ");
            r.knots.assign(h.path->times().begin(), h.path->times().end());
            r.start.assign(h.path->values().begin(), h.path->values().end());
            r.end = r.start;
            break;
        }
        case IntegrandKind::pathwise: {
            if (!h.f) throw ParamError("INTEGRAND_FUNCTION", "pathwise integrand needs a function");
            r.knots.assign(x.times().begin(), x.times().end());
            for (double v : x.values()) r.start.push_back(h.f(v));
            r.end = r.start;
            break;
        }
    }
    return r;
}

StepPath ito_integral(const RealisedIntegrand& h, const StepPath& x) {
    if (h.horizon != x.horizon()) throw ShapeError("PATH_HORIZON_MISMATCH", "integrand and integrator horizons differ");
    const auto t = x.times();
    const auto v = x.values();
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) out[k] = out[k - 1] + h.left(t[k]) * (v[k] - v[k - 1]);
    return StepPath(std::vector<double>(t.begin(), t.end()), std::move(out), x.horizon());
}

StepPath ito_integral(const Integrand& h, const StepPath& x) { return ito_integral(realise(h, x), x); }

StepPath ito_integral(const Integrand& h, const SimulationBundle& bundle) {
    return ito_integral(realise(h, bundle.x, &bundle), bundle.x);
}

GridPath grid_integral(const GridPath& h, const GridPath& x) {
    h.validate();
    x.validate();
    if (h.values.size() != x.values.size() || std::abs(h.step - x.step) > 1e-12 * x.step)
        throw ShapeError("GRID_MISMATCH", "integrand and integrator grids differ");
    GridPath out{x.step, std::vector<double>(x.values.size(), 0.0), x.horizon, Interpolation::step};
    for (std::size_t k = 0; k + 1 < x.values.size(); ++k)
        out.values[k + 1] = out.values[k] + h.values[k] * (x.values[k + 1] - x.values[k]);
    return out;
}

GridPath grid_integral(const Integrand& h, const GridPath& x) {
    x.validate();
    GridPath hg{x.step, std::vector<double>(x.values.size()), x.horizon, Interpolation::step};
    for (std::size_t k = 0; k < x.values.size(); ++k) {
        const double t = std::min(x.node_time(k), x.horizon);
        switch (h.kind) {
            case IntegrandKind::deterministic:
                hg.values[k] = h.f(t);
                break;
            case IntegrandKind::lipschitz:
                hg.values[k] = std::clamp(h.f(x.values[k]), -h.bound, h.bound);
                break;
            case IntegrandKind::pathwise:
                hg.values[k] = h.f(x.values[k]);
                break;
            case IntegrandKind::pure_jump:
                if (!h.path) throw ParamError("INTEGRAND_PATH", "pure-jump integrand needs a path");
                hg.values[k] = (*h.path)(t);
                break;
            case IntegrandKind::adversarial:
                throw PreconditionError("INTEGRAND_CONTEXT", "adversarial integrand has no grid form");
        }
    }
    return grid_integral(hg, x);
}

StepPath discretize_integrand(const RealisedIntegrand& h, double eps, int m) {
    detail::require(eps > 0.0 && std::isfinite(eps), "PARAM_EPS", "eps must be positive");
    detail::require(m >= 1, "PARAM_M", "m must be >= 1");
    const double T = h.horizon;
    std::vector<double> grid;
    for (int j = 1; j <= m; ++j) grid.push_back(j == m ? T : T * j / m);
    std::vector<double> bps = h.knots;
    bps.insert(bps.end(), grid.begin(), grid.end());
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    while (!bps.empty() && bps.back() > T) bps.pop_back();

    std::vector<double> tau{0.0}, val{h.value(0.0)};
    double ref = val[0];
    std::size_t gi = 0;
    for (std::size_t q = 0; q < bps.size(); ++q) {
        const double b0 = bps[q];
        const double a = h.value(b0);
        if (q > 0) {
            bool is_grid = false;
            while (gi < grid.size() && grid[gi] < b0) ++gi;
            if (gi < grid.size() && grid[gi] == b0) is_grid = true;
            if (is_grid || std::abs(a - ref) >= eps) {
                tau.push_back(b0);
                val.push_back(a);
                ref = a;
            }
        }
        if (q + 1 == bps.size()) break;
        const double b1 = bps[q + 1];
        const double bb = h.left(b1);
        if (a == bb) continue;
        // linear piece from (b0, a) to (b1-, bb): walk its eps-crossings
        for (;;) {
            const double target = bb > a ? ref + eps : ref - eps;
            const bool reach = bb > a ? (target <= bb && target > a) : (target >= bb && target < a);
            if (!reach) break;
            const double ts = b0 + (target - a) / (bb - a) * (b1 - b0);
            if (!(ts < b1) || !(ts > tau.back())) break;
            tau.push_back(ts);
            val.push_back(target);
            ref = target;
        }
    }
    return StepPath(std::move(tau), std::move(val), T);
}

double upsilon_sample(const RealisedIntegrand& h, const StepPath& hd, const StepPath& x) {
    const auto t = x.times();
    const auto v = x.values();
    double acc = 0.0, sup = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        acc += (h.left(t[k]) - hd.left_limit(t[k])) * (v[k] - v[k - 1]);
        sup = std::max(sup, std::abs(acc));
    }
    return std::min(sup, 1.0);
}

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

}  // namespace

DiagnosticReport upsilon_estimate(const std::vector<SimulationBundle>& ensemble, const Integrand& h,
                                  const std::vector<double>& eps, int m) {
    if (ensemble.empty()) throw DataError("DATA_EMPTY", "empty ensemble");
    DiagnosticReport rep;
    rep.scenario = "upsilon";
    std::vector<std::int64_t> ns;
    for (const auto& b : ensemble)
        if (std::find(ns.begin(), ns.end(), b.config.n) == ns.end()) ns.push_back(b.config.n);
    for (std::int64_t n : ns) {
        std::vector<RealisedIntegrand> hs;
        std::vector<const SimulationBundle*> bs;
        for (const auto& b : ensemble)
            if (b.config.n == n) {
                hs.push_back(realise(h, b.x, &b));
                bs.push_back(&b);
            }
        for (double e : eps) {
            std::vector<double> u(hs.size());
            for (std::size_t i = 0; i < hs.size(); ++i)
                u[i] = upsilon_sample(hs[i], discretize_integrand(hs[i], e, m), bs[i]->x);
            rep.add_interval("upsilon n=" + std::to_string(n) + " eps=" + num(e) + " m=" + std::to_string(m),
                             mean_ci(u), u.size());
        }
    }
    return rep;
}

Interval median_ci(std::vector<double> x, double level) {
    if (x.empty()) throw DataError("DATA_EMPTY", "empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    const double z = normal_quantile(0.5 + level / 2.0);
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(n / 2.0 - z * std::sqrt(n) / 2.0)));
    const auto hi = static_cast<std::size_t>(std::min(n - 1.0, std::ceil(n / 2.0 + z * std::sqrt(n) / 2.0)));
    return {quantile(x, 0.5), x[lo], x[hi]};
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ShapeError("FIT_SHAPE", "need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nan("");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

namespace {

std::vector<double> adversarial_sups(const ProcessConfig& cfg, const AdversarialOptions& opt) {
    std::vector<double> sups(opt.reps);
    const auto h = Integrand::adversarial(opt.decay);
    parallel_for(opt.reps, opt.threads, [&](std::size_t r) {
        const auto b = gen_process(cfg, opt.horizon, {opt.seed, r});
        const auto path = ito_integral(h, b);
        double s = 0.0;
        for (double v : path.values()) s = std::max(s, std::abs(v));
        sups[r] = s;
    });
    return sups;
}

}  // namespace

DiagnosticReport adversarial_experiment(const ProcessConfig& config, const AdversarialOptions& opt) {
    config.validate();
    if (!config.correlated())
        throw PreconditionError("ADV_ZERO_ORDER", "adversarial experiment needs some c_j > 0 with j >= 1");
    const auto mode = config.innovation.mode;
    if (mode != InnovationMode::symmetric && mode != InnovationMode::centered)
        throw PreconditionError("ADV_LAW", "adversarial experiment needs symmetric or centered innovations");
    detail::require(!opt.n_list.empty(), "PARAM_N_LIST", "empty n list");
    detail::require(opt.reps >= 1, "PARAM_REPS", "need at least one replication");

    DiagnosticReport rep;
    rep.scenario = "adversarial";
    rep.seed = opt.seed;
    rep.params = {{"alpha", config.innovation.alpha},
                  {"mode", to_string(mode)},
                  {"coefficients", config.coefficients},
                  {"n_list", opt.n_list},
                  {"reps", opt.reps},
                  {"horizon", opt.horizon},
                  {"decay", opt.decay}};
    if (config.waiting) rep.params["beta"] = config.waiting->beta;

    ProcessConfig comp = config;
    comp.coefficients = {config.coefficients.front()};
    comp.past_horizon = 0;

    std::vector<double> ns, med, cmed;
    for (std::int64_t n : opt.n_list) {
        ProcessConfig c = config;
        c.n = n;
        ProcessConfig cc = comp;
        cc.n = n;
        const auto s = adversarial_sups(c, opt);
        const auto sc = adversarial_sups(cc, opt);
        const auto m = median_ci(s);
        const auto mc = median_ci(sc);
        const std::string tag = "n=" + std::to_string(n);
        rep.add_interval("median " + tag, m, s.size());
        rep.add_point("q90 " + tag, quantile(s, 0.9), s.size());
        rep.add_interval("companion_median " + tag, mc, sc.size());
        rep.add_point("companion_q90 " + tag, quantile(sc, 0.9), sc.size());
        ns.push_back(static_cast<double>(n));
        med.push_back(m.estimate);
        cmed.push_back(mc.estimate);
    }
    if (ns.size() >= 2) {
        const double g = log_log_slope(ns, med);
        const double gc = log_log_slope(ns, cmed);
        if (std::isfinite(g)) rep.add_point("growth_exponent", g);
        if (std::isfinite(gc)) rep.add_point("companion_growth_exponent", gc);
    }
    return rep;
}

}  // namespace ctrwlab
