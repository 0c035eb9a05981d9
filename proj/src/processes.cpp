#include "ctrwlab/processes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ctrwlab/error.hpp"

namespace ctrwlab {

void ProcessConfig::validate() const {
    innovation.validate();
    if (waiting) waiting->validate();
    detail::require(!coefficients.empty() && coefficients[0] > 0.0, "PARAM_COEFFS", "c_0 must be positive");
    for (double c : coefficients)
        detail::require(std::isfinite(c) && c >= 0.0, "PARAM_COEFFS", "coefficients must be finite and non-negative");
    detail::require(n >= 1, "PARAM_N", "scaling n must be positive");
    detail::require(past() >= 0, "PARAM_PAST", "past horizon must be non-negative");
    if (coupling != Coupling::uncoupled) {
        detail::require(waiting.has_value(), "PARAM_COUPLING", "coupling needs a waiting law");
        detail::require(!correlated(), "PARAM_COUPLING", "coupled CTRWs must be uncorrelated (c = (c_0))");
    }
}

double ProcessConfig::psi() const {
    double s = 0.0;
    for (double c : coefficients) s += c;
    return s;
}

bool ProcessConfig::correlated() const {
    return std::any_of(coefficients.begin() + 1, coefficients.end(), [](double c) { return c > 0.0; });
}

double SimulationBundle::theta(std::int64_t k) const {
    const std::int64_t idx = k + config.past();
    if (idx < 0 || idx >= static_cast<std::int64_t>(innovations.size()))
        throw DataError("RECORD_RANGE", "innovation index outside the record");
    return innovations[static_cast<std::size_t>(idx)];
}

double SimulationBundle::scaling() const {
    return std::pow(static_cast<double>(config.n), -time_exponent / config.innovation.alpha);
}

double SimulationBundle::zeta(std::int64_t k) const {
    const std::int64_t jmax = std::min<std::int64_t>(config.order(), k + config.past());
    double z = 0.0;
    for (std::int64_t j = 0; j <= jmax; ++j) z += config.coefficients[static_cast<std::size_t>(j)] * theta(k - j);
    return z;
}

namespace {

SimulationBundle assemble(const ProcessConfig& config, double T, std::vector<double> thetas,
                          std::vector<double> times, std::vector<double> waits, double exponent) {
    const std::size_t N = times.size();
    const std::size_t P = static_cast<std::size_t>(config.past());
    if (thetas.size() < P + 1 + N) throw DataError("RECORD_SHORT", "innovation record shorter than event count");
    thetas.resize(P + 1 + N);

    SimulationBundle b;
    b.config = config;
    b.horizon = T;
    b.time_exponent = exponent;
    b.innovations = std::move(thetas);
    b.waits = std::move(waits);

    std::vector<double> t(N + 1), xv(N + 1), nv(N + 1);
    t[0] = 0.0;
    xv[0] = 0.0;
    nv[0] = 0.0;
    const double s = b.scaling();
    double sum = 0.0;
    for (std::size_t k = 1; k <= N; ++k) {
        t[k] = times[k - 1];
        sum += b.zeta(static_cast<std::int64_t>(k));
        xv[k] = s * sum;
        nv[k] = static_cast<double>(k);
    }
    b.x = StepPath(t, std::move(xv), T);
    b.counting = StepPath(std::move(t), std::move(nv), T);
    return b;
}

void check_horizon(double T) {
    detail::require(std::isfinite(T) && T > 0.0, "PARAM_HORIZON", "horizon T must be positive");
}

}  // namespace

SimulationBundle build_moving_average(const ProcessConfig& config, double T, std::vector<double> thetas) {
    config.validate();
    check_horizon(T);
    const double nd = static_cast<double>(config.n);
    std::vector<double> times;
    for (std::int64_t k = 1; static_cast<double>(k) <= nd * T; ++k) times.push_back(static_cast<double>(k) / nd);
    return assemble(config, T, std::move(thetas), std::move(times), {}, 1.0);
}

SimulationBundle build_ctrw(const ProcessConfig& config, double T, std::vector<double> thetas,
                            std::vector<double> waits, std::optional<double> time_exponent) {
    config.validate();
    check_horizon(T);
    if (!time_exponent && !config.waiting)
        throw ParamError("PARAM_WAITING", "CTRW needs a waiting law or an explicit time exponent");
    const double nd = static_cast<double>(config.n);
    std::vector<double> times;
    double L = 0.0;
    std::size_t N = 0;
    for (double J : waits) {
        if (!(J > 0.0)) throw DataError("RECORD_WAITS", "waiting times must be positive");
        L += J;
        if (!(L <= nd * T)) break;
        const double tk = L / nd;
        if (!times.empty() && !(tk > times.back())) throw DataError("RECORD_WAITS", "event times collide");
        times.push_back(tk);
        ++N;
    }
    waits.resize(N);
    return assemble(config, T, std::move(thetas), std::move(times), std::move(waits),
                    time_exponent.value_or(config.waiting ? config.waiting->beta : 1.0));
}

SimulationBundle gen_moving_average(const ProcessConfig& config, double T, SeedSpec seed) {
    config.validate();
    check_horizon(T);
    if (config.waiting) throw ParamError("PARAM_WAITING", "moving average must not have a waiting law");
    const auto P = static_cast<std::size_t>(config.past());
    const double nd = static_cast<double>(config.n);
    std::size_t K = 0;
    while (static_cast<double>(K + 1) <= nd * T) ++K;
    CounterRng g(seed, Lane::innovations);
    std::vector<double> thetas(P + 1 + K);
    for (auto& th : thetas) th = draw_innovation(g, config.innovation);
    auto b = build_moving_average(config, T, std::move(thetas));
    b.seed = seed;
    return b;
}

SimulationBundle gen_ctrw(const ProcessConfig& config, double T, SeedSpec seed) {
    config.validate();
    check_horizon(T);
    if (!config.waiting) throw ParamError("PARAM_WAITING", "CTRW needs a waiting law");
    const auto P = static_cast<std::size_t>(config.past());
    const double nd = static_cast<double>(config.n);
    const WaitingLaw& wl = *config.waiting;
    CounterRng gi(seed, Lane::innovations);
    std::vector<double> thetas(P + 1);
    for (auto& th : thetas) th = draw_innovation(gi, config.innovation);
    std::vector<double> waits;
    double L = 0.0;
    if (config.coupling == Coupling::uncoupled) {
        CounterRng gw(seed, Lane::waits);
        for (;;) {
            const double J = draw_waiting(gw, wl);
            L += J;
            if (!(L <= nd * T)) break;
            waits.push_back(J);
        }
        for (std::size_t k = 0; k < waits.size(); ++k) thetas.push_back(draw_innovation(gi, config.innovation));
    } else {
        const double expo = config.innovation.alpha / wl.beta;
        for (;;) {
            const double th = draw_innovation(gi, config.innovation);
            const double J = wl.scale * std::max(1.0, std::pow(std::abs(th) / config.innovation.scale, expo));
            L += J;
            if (!(L <= nd * T)) break;
            thetas.push_back(th);
            waits.push_back(J);
        }
    }
    auto b = build_ctrw(config, T, std::move(thetas), std::move(waits));
    b.seed = seed;
    return b;
}

SimulationBundle gen_process(const ProcessConfig& config, double T, SeedSpec seed) {
    return config.waiting ? gen_ctrw(config, T, seed) : gen_moving_average(config, T, seed);
}

CountingPaths build_counting(const std::vector<double>& waits, std::int64_t n, double beta, double T) {
    detail::require(n >= 1, "PARAM_N", "scaling n must be positive");
    check_horizon(T);
    const double nd = static_cast<double>(n);
    std::vector<double> t{0.0}, v{0.0};
    double L = 0.0;
    CountingPaths out;
    for (double J : waits) {
        if (!(J > 0.0)) throw DataError("RECORD_WAITS", "waiting times must be positive");
        L += J;
        if (!(L <= nd * T)) break;
        t.push_back(L / nd);
        v.push_back(static_cast<double>(t.size() - 1));
        out.waits.push_back(J);
    }
    const double s = std::pow(nd, -beta);
    std::vector<double> d(v);
    for (auto& x : d) x *= s;
    out.d_path = StepPath(t, std::move(d), T);
    out.n_path = StepPath(std::move(t), std::move(v), T);
    return out;
}

CountingPaths gen_counting(const WaitingLaw& law, std::int64_t n, double T, SeedSpec seed) {
    law.validate();
    check_horizon(T);
    detail::require(n >= 1, "PARAM_N", "scaling n must be positive");
    CounterRng g(seed, Lane::waits);
    const double nd = static_cast<double>(n);
    std::vector<double> waits;
    double L = 0.0;
    for (;;) {
        const double J = draw_waiting(g, law);
        waits.push_back(J);
        L += J;
        if (!(L <= nd * T)) break;
    }
    return build_counting(waits, n, law.beta, T);
}

void SubordinatorSpec::validate() const {
    detail::require(std::isfinite(beta) && beta > 0.0 && beta < 1.0, "PARAM_BETA_RANGE", "beta must lie in (0,1)");
    detail::require(std::isfinite(kappa) && kappa > 0.0, "PARAM_SCALE", "kappa must be positive");
}

StableParams SubordinatorSpec::unit_law() const {
    validate();
    // Totally skewed S1 law with Laplace exponent sigma^beta s^beta / cos(pi beta / 2).
    return {beta, 1.0, std::pow(kappa * std::cos(std::numbers::pi * beta / 2.0), 1.0 / beta), 0.0};
}

SubordinatorSpec SubordinatorSpec::from_waiting(const WaitingLaw& law) {
    law.validate();
    return {law.beta, law.laplace_coefficient()};
}

GridPath generalized_inverse(const GridPath& d, double T, double t_step) {
    d.validate();
    check_horizon(T);
    detail::require(t_step > 0.0, "PARAM_STEP", "grid step must be positive");
    std::size_t J = 0;
    while (static_cast<double>(J + 1) * t_step <= T * (1.0 + 1e-12)) ++J;
    GridPath out{t_step, std::vector<double>(J + 1), T, Interpolation::linear};
    const auto& v = d.values;
    std::size_t k = 0;
    for (std::size_t j = 0; j <= J; ++j) {
        const double t = static_cast<double>(j) * t_step;
        if (d.interp == Interpolation::step) {
            while (k < v.size() && !(v[k] > t)) ++k;
            if (k == v.size()) throw DataError("SUBORDINATOR_SHORT", "D does not exceed the horizon");
            out.values[j] = d.node_time(k);
        } else {
            // Last node with D <= t; the crossing lies in the following segment.
            if (v[0] > t) {
                out.values[j] = 0.0;
                continue;
            }
            while (k + 1 < v.size() && !(v[k + 1] > t)) ++k;
            if (k + 1 == v.size()) throw DataError("SUBORDINATOR_SHORT", "D does not exceed the horizon");
            const double frac = (t - v[k]) / (v[k + 1] - v[k]);
            out.values[j] = frac == 0.0 ? d.node_time(k) : d.node_time(k) + frac * d.step;
        }
    }
    return out;
}

SubordinatorPaths gen_subordinator_inverse(const SubordinatorSpec& sub, double T, double step, SeedSpec seed) {
    check_horizon(T);
    detail::require(std::isfinite(step) && step > 0.0, "PARAM_STEP", "grid step must be positive");
    StableParams inc = sub.unit_law();
    inc.scale *= std::pow(step, 1.0 / sub.beta);
    CounterRng g(seed, Lane::subordinator);
    std::vector<double> d{0.0};
    while (!(d.back() > T)) d.push_back(d.back() + draw_stable(g, inc));
    SubordinatorPaths out;
    out.d = GridPath{step, std::move(d), 0.0, Interpolation::step};
    out.d.horizon = out.d.node_time(out.d.values.size() - 1);
    // The increment over [s_k, s_{k+1}] is attributed to s_k, so that
    // D^{-1}_0 = 0 as for the continuous-time subordinator.
    GridPath lead{step, std::vector<double>(out.d.values.begin() + 1, out.d.values.end()), 0.0, Interpolation::step};
    out.d_inv = generalized_inverse(lead, T, step);
    return out;
}

GridPath compose_time_change(const GridPath& z, const GridPath& d_inv) {
    z.validate();
    d_inv.validate();
    GridPath out{d_inv.step, std::vector<double>(d_inv.values.size()), d_inv.horizon, Interpolation::step};
    for (std::size_t j = 0; j < d_inv.values.size(); ++j) out.values[j] = z.value_at(d_inv.values[j]);
    return out;
}

GridPath gen_levy(const StableParams& z_unit, double s_max, double step, SeedSpec seed) {
    z_unit.validate();
    detail::require(std::isfinite(step) && step > 0.0, "PARAM_STEP", "grid step must be positive");
    StableParams inc = z_unit;
    inc.scale *= std::pow(step, 1.0 / z_unit.alpha);
    inc.shift *= step;
    std::size_t K = 0;
    while (static_cast<double>(K) * step < s_max * (1.0 - 1e-12)) ++K;
    CounterRng g(seed, Lane::levy);
    std::vector<double> z(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k) z[k] = z[k - 1] + draw_stable(g, inc);
    return GridPath{step, std::move(z), static_cast<double>(K) * step, Interpolation::step};
}

TimeChangedPaths gen_time_changed_levy(const StableParams& z_unit, const SubordinatorSpec& sub, double T,
                                       double step, SeedSpec seed) {
    auto sp = gen_subordinator_inverse(sub, T, step, seed);
    TimeChangedPaths out;
    out.z = gen_levy(z_unit, sp.d.horizon, step, seed);
    out.x = compose_time_change(out.z, sp.d_inv);
    out.d_inv = std::move(sp.d_inv);
    return out;
}

}  // namespace ctrwlab
