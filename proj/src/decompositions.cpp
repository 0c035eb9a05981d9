#include "ctrwlab/decompositions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ctrwlab/error.hpp"

namespace ctrwlab {

namespace {

void check_a(double a) {
    detail::require(std::isfinite(a) && a >= 1.0, "PARAM_TRUNCATION", "truncation level a must be >= 1");
}

// Pareto representation theta = sigma (P - m), P ~ Pareto(alpha) on [1, inf).
// Returns false for the gaussian mode.
bool pareto_shape(const InnovationLaw& law, double& m) {
    switch (law.mode) {
        case InnovationMode::centered:
            m = law.pareto_mean();
            return true;
        case InnovationMode::raw:
        case InnovationMode::symmetric:
            m = 0.0;
            return true;
        case InnovationMode::gaussian:
            return false;
    }
    return false;
}

double gk(const std::function<double(double)>& f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, 1e-13);
}

// int_{lo}^{hi} (c |p - m|)^q alpha p^{-alpha-1} dp on [lo, hi] with 1 <= lo.
double pareto_power_integral(double alpha, double m, double c, double q, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    auto f = [&](double p) { return std::pow(c * std::abs(p - m), q) * alpha * std::pow(p, -alpha - 1.0); };
    if (std::isinf(hi)) {
        // Tail over [lo, inf) with lo > m: u = m/p turns it into an incomplete beta integral.
        if (m <= 0.0) return std::pow(c, q) * alpha * std::pow(lo, q - alpha) / (alpha - q);
        const double u0 = m / lo;
        return std::pow(c, q) * alpha * std::pow(m, q - alpha) * boost::math::beta(alpha - q, q + 1.0, u0);
    }
    if (lo < m && m < hi) return gk(f, lo, m) + gk(f, m, hi);
    return gk(f, lo, hi);
}

}  // namespace

double truncate_h(double x, double a) {
    check_a(a);
    if (std::abs(x) <= a) return x;
    return x > 0 ? a : -a;
}

double truncated_mean(const InnovationLaw& law, double s, double a) {
    law.validate();
    check_a(a);
    double m = 0.0;
    if (!pareto_shape(law, m) || law.mode == InnovationMode::symmetric) return 0.0;
    const double sp = s * law.scale;
    if (!(sp > 0.0)) return 0.0;
    const double al = law.alpha;
    const double l = std::max(1.0, m - a / sp);
    const double u = m + a / sp;
    if (!(u > l)) return 0.0;
    const double i1 = al == 1.0 ? al * std::log(u / l)
                                : al / (1.0 - al) * (std::pow(u, 1.0 - al) - std::pow(l, 1.0 - al));
    return sp * (i1 - m * (std::pow(l, -al) - std::pow(u, -al)));
}

double truncated_h_mean(const InnovationLaw& law, double s, double a) {
    law.validate();
    check_a(a);
    double m = 0.0;
    if (!pareto_shape(law, m) || law.mode == InnovationMode::symmetric) return 0.0;
    const double sp = s * law.scale;
    if (!(sp > 0.0)) return 0.0;
    const double al = law.alpha;
    const double u = m + a / sp;
    const double lower = m - a / sp;
    const double p_up = u > 1.0 ? std::pow(u, -al) : 1.0;
    const double p_down = lower > 1.0 ? 1.0 - std::pow(lower, -al) : 0.0;
    return truncated_mean(law, s, a) + a * p_up - a * p_down;
}

double truncated_power_moment(const InnovationLaw& law, double b, double p, bool large) {
    law.validate();
    detail::require(std::isfinite(p) && p > 0.0, "PARAM_EXPONENT", "moment exponent must be positive");
    const double c = std::abs(b) * law.scale;
    if (c == 0.0) return 0.0;
    const double r = 1.0 / c;
    const double al = law.alpha;
    double m = 0.0;
    if (!pareto_shape(law, m)) {
        // theta = scale Z: E|cZ|^p on {|Z| > r} or {|Z| <= r}.
        const double k = std::pow(c, p) * std::pow(2.0, p / 2.0) / std::sqrt(M_PI);
        const double a = (p + 1.0) / 2.0, x = r * r / 2.0;
        return k * (large ? boost::math::tgamma(a, x) : boost::math::tgamma_lower(a, x));
    }
    if (large) {
        detail::require(p < al, "PARAM_EXPONENT", "large-jump moment needs exponent below alpha");
        double v = pareto_power_integral(al, m, c, p, std::max(1.0, m + r), std::numeric_limits<double>::infinity());
        if (m - r > 1.0) v += pareto_power_integral(al, m, c, p, 1.0, m - r);
        return v;
    }
    const double lo = std::max(1.0, m - r);
    return pareto_power_integral(al, m, c, p, lo, m + r);
}

TruncatedSplit split_martingale(const SimulationBundle& bundle, double a) {
    check_a(a);
    if (bundle.config.correlated())
        throw UnsupportedDecomposition("DECOMP_CORRELATED",
                                       "truncated martingale split needs an uncorrelated process");
    const std::size_t N = bundle.events();
    const double s = bundle.scaling();
    const double comp = truncated_mean(bundle.config.innovation, s * bundle.config.coefficients[0], a);

    std::vector<double> t(bundle.counting.times().begin(), bundle.counting.times().end());
    std::vector<double> mv(N + 1, 0.0), av(N + 1, 0.0);
    double bound = 1.0;
    for (std::size_t k = 1; k <= N; ++k) {
        const double z = s * bundle.zeta(static_cast<std::int64_t>(k));
        const bool small = std::abs(z) <= a;
        mv[k] = mv[k - 1] + (small ? z : 0.0) - comp;
        av[k] = av[k - 1] + (small ? 0.0 : z) + comp;
        bound += std::abs(z) + std::abs(comp);
        const double err = std::abs(mv[k] + av[k] - bundle.x.values()[k]);
        if (err > 1e-12 * bound) throw DataError("DECOMP_IDENTITY", "M + A does not reproduce X");
    }
    TruncatedSplit out{StepPath(t, std::move(mv), bundle.horizon), StepPath(t, std::move(av), bundle.horizon), a,
                       comp};
    return out;
}

BnEstimate estimate_bn(const InnovationLaw& law, std::int64_t n, double beta, double a, std::size_t reps,
                       SeedSpec seed) {
    law.validate();
    check_a(a);
    detail::require(n >= 1, "PARAM_N", "n must be positive");
    detail::require(beta > 0.0 && beta <= 1.0, "PARAM_BETA_RANGE", "beta must lie in (0, 1]");
    detail::require(reps >= 1000, "PARAM_REPS", "estimate_bn needs at least 1000 replications");
    const double nb = std::pow(static_cast<double>(n), beta);
    const double s = std::pow(static_cast<double>(n), -beta / law.alpha);
    const auto theta = sample_innovation(law, seed, reps);
    std::vector<double> vals(reps);
    for (std::size_t i = 0; i < reps; ++i) vals[i] = nb * truncate_h(s * theta[i], a);
    BnEstimate out;
    out.mc = mean_ci(vals);
    out.closed_form = nb * truncated_h_mean(law, s, a);
    out.reps = reps;
    return out;
}

UVSplit split_uv(const SimulationBundle& bundle) {
    const auto& cfg = bundle.config;
    const auto& c = cfg.coefficients;
    const int J = cfg.order();
    const int P = cfg.past();
    const std::size_t N = bundle.events();
    if (bundle.innovations.size() < static_cast<std::size_t>(P) + 1 + N)
        throw DataError("RECORD_SHORT", "innovation record does not cover the events");
    const double s = bundle.scaling();
    const double psi = cfg.psi();

    std::vector<double> tail(static_cast<std::size_t>(J) + 2, 0.0);  // tail[m] = sum_{j >= m} c_j
    for (int m = J; m >= 0; --m) tail[m] = tail[m + 1] + c[m];

    std::vector<double> t(bundle.counting.times().begin(), bundle.counting.times().end());
    std::vector<double> u1(N + 1, 0.0), u2(N + 1, 0.0), u(N + 1, 0.0), v(N + 1, 0.0);
    double run = 0.0, abs_run = 0.0;
    for (std::size_t k = 1; k <= N; ++k) {
        const auto kk = static_cast<std::int64_t>(k);
        run += bundle.theta(kk);
        abs_run += std::abs(bundle.theta(kk));
        u1[k] = s * run;
        double w = 0.0;
        double bound = abs_run;
        for (int q = 0; q <= P && q < J; ++q) {
            const int jhi = static_cast<int>(std::min<std::int64_t>(kk + q, J));
            double cs = 0.0;
            for (int j = q + 1; j <= jhi; ++j) cs += c[j];
            w += cs * bundle.theta(-q);
            bound += cs * std::abs(bundle.theta(-q));
        }
        u2[k] = s / psi * w;
        double vv = 0.0;
        for (int m = 1; m <= std::min<std::int64_t>(kk, J); ++m) {
            vv += tail[m] * bundle.theta(kk - m + 1);
            bound += tail[m] * std::abs(bundle.theta(kk - m + 1));
        }
        v[k] = -s / psi * vv;
        u[k] = u1[k] + u2[k];
        const double err = std::abs(u[k] + v[k] - bundle.x.values()[k] / psi);
        if (err > 1e-12 * (1.0 + s * bound * (1.0 + psi)))
            throw DataError("DECOMP_IDENTITY", "U + V does not reproduce X / psi");
    }
    const double T = bundle.horizon;
    return UVSplit{StepPath(t, std::move(u), T), StepPath(t, std::move(v), T), StepPath(t, std::move(u1), T),
                   StepPath(t, std::move(u2), T), psi};
}

TcReport check_tc(const std::vector<double>& c, double alpha, double rho) {
    detail::require(!c.empty() && c[0] > 0.0, "PARAM_COEFFS", "c_0 must be positive");
    for (double x : c) detail::require(std::isfinite(x) && x >= 0.0, "PARAM_COEFFS", "coefficients must be >= 0");
    detail::require(alpha > 0.0 && alpha <= 2.0, "PARAM_ALPHA_RANGE", "alpha must lie in (0, 2]");
    detail::require(rho > 0.0 && rho <= 1.0, "PARAM_RHO", "rho must lie in (0, 1]");
    TcReport r;
    r.rho = alpha == 1.0 ? rho : 1.0;
    double acc = 0.0;
    r.tail_sums.assign(c.size() > 1 ? c.size() - 1 : 0, 0.0);
    for (std::size_t i = c.size(); i-- > 1;) {
        acc += c[i];
        r.tail_sums[i - 1] = acc;
    }
    for (double ts : r.tail_sums) {
        r.tail_double_sum += ts;
        r.rho_power_sum += std::pow(ts, r.rho);
    }
    r.holds = std::isfinite(r.tail_double_sum);
    return r;
}

GdSample gd_sample(const TruncatedSplit& split, double t, const std::vector<double>& cs) {
    const auto& M = split.m;
    detail::require(t >= 0.0 && t <= M.horizon(), "RANGE_T", "t outside [0, T]");
    GdSample g;
    g.tv_a = total_variation(split.a, t);
    const auto tm = M.times();
    const auto vm = M.values();
    for (std::size_t k = 1; k < tm.size(); ++k) g.max_jump_m = std::max(g.max_jump_m, std::abs(vm[k] - vm[k - 1]));
    g.stopped_jump.reserve(cs.size());
    for (double c : cs) {
        detail::require(c > 0.0, "PARAM_LEVEL", "stopping level c must be positive");
        // tau_c: first breakpoint with |M| >= c; the stopped time is min(t, tau_c).
        std::size_t stop = M.cell(t);
        bool at_break = tm[stop] == t;
        for (std::size_t k = 1; k < tm.size() && tm[k] <= t; ++k) {
            if (std::abs(vm[k]) >= c) {
                stop = k;
                at_break = true;
                break;
            }
        }
        g.stopped_jump.push_back(at_break && stop > 0 ? std::abs(vm[stop] - vm[stop - 1]) : 0.0);
    }
    return g;
}

namespace {

std::string tag_n(std::int64_t n) { return "n=" + std::to_string(n); }

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

DiagnosticReport gd_statistics(const std::vector<GdEnsemble>& ensembles, const std::vector<double>& Rs,
                               const std::vector<double>& cs) {
    if (ensembles.empty()) throw DataError("DATA_EMPTY", "no ensembles");
    DiagnosticReport rep;
    rep.scenario = "gd";
    std::vector<std::vector<Interval>> tails(ensembles.size());
    for (std::size_t e = 0; e < ensembles.size(); ++e) {
        const auto& ens = ensembles[e];
        if (ens.samples.empty()) throw DataError("DATA_EMPTY", "empty ensemble for " + tag_n(ens.n));
        const std::size_t S = ens.samples.size();
        for (double R : Rs) {
            std::size_t cnt = 0;
            for (const auto& g : ens.samples) cnt += g.tv_a > R;
            const auto iv = tail_estimate(cnt, S);
            tails[e].push_back(iv);
            rep.add_interval("tail_tv_a " + tag_n(ens.n) + " R=" + fmt(R), iv, S);
        }
        for (std::size_t ci = 0; ci < cs.size(); ++ci) {
            std::vector<double> x(S);
            for (std::size_t i = 0; i < S; ++i) {
                if (ens.samples[i].stopped_jump.size() != cs.size())
                    throw ShapeError("GD_SHAPE", "sample does not match the c grid");
                x[i] = ens.samples[i].stopped_jump[ci];
            }
            rep.add_interval("stopped_jump " + tag_n(ens.n) + " c=" + fmt(cs[ci]), mean_ci(x), S);
        }
        double mj = 0.0;
        for (const auto& g : ens.samples) mj = std::max(mj, g.max_jump_m);
        rep.add_point("max_jump_m " + tag_n(ens.n), mj, S);
    }
    if (ensembles.size() >= 2) {
        const std::size_t last = ensembles.size() - 1;
        const std::size_t mid = ensembles.size() == 2 ? 0 : ensembles.size() / 2;
        for (std::size_t r = 0; r < Rs.size(); ++r) {
            const auto& a = tails[last][r];
            const auto& b = tails[mid][r];
            const double width = std::max(a.high - a.low, b.high - b.low);
            const bool flat = std::abs(a.estimate - b.estimate) <= 2.0 * width;
            rep.add_point("flattening R=" + fmt(Rs[r]), flat ? 1.0 : 0.0);
        }
    }
    return rep;
}

DiagnosticReport gd_statistics(const std::vector<std::pair<std::int64_t, std::vector<TruncatedSplit>>>& ensembles,
                               double t, const std::vector<double>& Rs, const std::vector<double>& cs) {
    std::vector<GdEnsemble> e;
    for (const auto& [n, splits] : ensembles) {
        GdEnsemble g{n, {}};
        for (const auto& sp : splits) g.samples.push_back(gd_sample(sp, t, cs));
        e.push_back(std::move(g));
    }
    return gd_statistics(e, Rs, cs);
}

double gdca_statistic(const StepPath& v, double n, double gamma, double lambda, double T) {
    detail::require(gamma > 0.0, "PARAM_GAMMA", "gamma must be positive");
    detail::require(n >= 1.0, "PARAM_N", "n must be >= 1");
    detail::require(T > 0.0 && T <= v.horizon(), "RANGE_T", "T outside the path horizon");
    const double h = T * std::pow(n, -lambda);
    std::vector<double> pts;
    for (std::int64_t k = 0;; ++k) {
        const double s = static_cast<double>(k) * h;
        if (s > T) break;
        pts.push_back(s);
    }
    pts.push_back(T);
    const auto tv = v.times();
    const auto vv = v.values();
    for (std::size_t k = 1; k < tv.size(); ++k)
        if (tv[k] <= T && vv[k] != vv[k - 1]) pts.push_back(tv[k]);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double sum = 0.0;
    std::size_t cell = 0;
    for (double s : pts) {
        while (cell + 1 < tv.size() && tv[cell + 1] <= s) ++cell;
        sum += std::abs(vv[cell]);
    }
    return std::pow(n, -gamma) * sum;
}

double gdca_statistic(const UVSplit& split, double gamma, const SimulationBundle& bundle) {
    return gdca_statistic(split.v, static_cast<double>(bundle.config.n), gamma, bundle.time_exponent,
                          bundle.horizon);
}

VniFamily build_vni_family(const SimulationBundle& bundle) {
    const auto& cfg = bundle.config;
    const int J = cfg.order();
    const std::size_t N = bundle.events();
    if (bundle.innovations.size() < static_cast<std::size_t>(cfg.past()) + 1 + N)
        throw DataError("RECORD_SHORT", "innovation record does not cover the events");
    VniFamily f;
    f.law = cfg.innovation;
    f.n = cfg.n;
    f.time_exponent = bundle.time_exponent;
    f.counter = bundle.counting;
    f.sigma.assign(bundle.counting.times().begin() + 1, bundle.counting.times().end());
    const double s = bundle.scaling() / cfg.psi();
    double tail = 0.0;
    f.coef.assign(static_cast<std::size_t>(J), 0.0);
    for (int i = J; i >= 1; --i) {
        tail += cfg.coefficients[i];
        f.coef[i - 1] = s * tail;
    }
    f.values.assign(static_cast<std::size_t>(J), std::vector<double>(N, 0.0));
    for (int i = 1; i <= J; ++i)
        for (std::size_t k = static_cast<std::size_t>(i); k <= N; ++k)
            f.values[i - 1][k - 1] = -f.coef[i - 1] * bundle.theta(static_cast<std::int64_t>(k) - i + 1);
    return f;
}

double default_gdci_gamma(double alpha) { return alpha > 1.0 ? std::min(0.2, (alpha - 1.0) / 2.0) : 0.2; }

namespace {

void check_gdci_law(const InnovationLaw& law) {
    if (law.mode == InnovationMode::raw)
        throw PreconditionError("GDCI_LAW", "GD mod CI needs centered or symmetric innovations");
    if (law.alpha < 1.0) throw PreconditionError("GDCI_ALPHA", "GD mod CI needs alpha >= 1");
    if (law.alpha == 1.0 && law.mode != InnovationMode::symmetric)
        throw PreconditionError("GDCI_ALPHA", "alpha = 1 needs symmetric innovations");
}

std::int64_t gdci_terms(double K, std::int64_t n, double beta) {
    detail::require(K > 0.0, "PARAM_K", "K must be positive");
    return static_cast<std::int64_t>(std::floor(K * std::pow(static_cast<double>(n), beta)));
}

}  // namespace

GdciSums gdci_moment_sums(const VniFamily& family, double K, double gamma, std::size_t reps, SeedSpec seed,
                          double q) {
    const auto& law = family.law;
    law.validate();
    check_gdci_law(law);
    detail::require(gamma > 0.0 && gamma < law.alpha, "PARAM_GAMMA", "gamma must lie in (0, alpha)");
    GdciSums out;
    out.lambda = law.alpha - gamma;
    out.mu = law.alpha + gamma;
    out.modified = law.alpha == 1.0;
    const std::int64_t terms = gdci_terms(K, family.n, family.time_exponent);
    const auto J = static_cast<std::int64_t>(family.coef.size());
    for (std::int64_t i = 1; i <= J; ++i) {
        const double cnt = static_cast<double>(std::max<std::int64_t>(0, terms - i + 1));
        const double b = family.coef[static_cast<std::size_t>(i - 1)];
        if (cnt == 0.0 || b == 0.0) continue;
        out.small += std::pow(cnt * truncated_power_moment(law, b, out.mu, false), 1.0 / out.mu);
        if (!out.modified) out.large += std::pow(cnt * truncated_power_moment(law, b, out.lambda, true), 1.0 / out.lambda);
    }
    if (out.modified && J > 0 && terms > 0) {
        detail::require(reps >= 1, "PARAM_REPS", "need at least one replication");
        detail::require(q > 0.0 && q < 1.0, "PARAM_QUANTILE", "quantile level must lie in (0, 1)");
        CounterRng g(seed, Lane::aux);
        std::vector<double> theta(static_cast<std::size_t>(terms));
        std::vector<double> sums(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            for (auto& th : theta) th = draw_innovation(g, law);
            double acc = 0.0;
            for (std::int64_t k = 1; k <= terms; ++k)
                for (std::int64_t i = 1; i <= std::min(k, J); ++i) {
                    const double x = std::abs(family.coef[static_cast<std::size_t>(i - 1)] *
                                              theta[static_cast<std::size_t>(k - i)]);
                    if (x > 1.0) acc += x;
                }
            sums[r] = acc;
        }
        out.large = quantile(std::move(sums), q);
    }
    return out;
}

GdciSums gdci_moment_sums_mc(const std::vector<VniFamily>& families, double K, double gamma) {
    if (families.empty()) throw DataError("DATA_EMPTY", "no families");
    const auto& law = families.front().law;
    check_gdci_law(law);
    detail::require(gamma > 0.0 && gamma < law.alpha, "PARAM_GAMMA", "gamma must lie in (0, alpha)");
    GdciSums out;
    out.lambda = law.alpha - gamma;
    out.mu = law.alpha + gamma;
    const auto& f0 = families.front();
    const std::int64_t terms = gdci_terms(K, f0.n, f0.time_exponent);
    const std::size_t J = f0.coef.size();
    for (std::size_t i = 1; i <= J; ++i) {
        double sl = 0.0, ss = 0.0;
        std::size_t cnt_obs = 0;
        for (const auto& f : families) {
            if (f.coef.size() != J || f.n != f0.n) throw ShapeError("GDCI_SHAPE", "families differ in shape");
            const auto& row = f.values[i - 1];
            const std::size_t kmax = std::min<std::size_t>(row.size(), static_cast<std::size_t>(terms));
            for (std::size_t k = i; k <= kmax; ++k) {
                const double x = std::abs(row[k - 1]);
                if (x > 1.0) sl += std::pow(x, out.lambda);
                else ss += std::pow(x, out.mu);
                ++cnt_obs;
            }
        }
        if (cnt_obs == 0) continue;
        const double cnt = static_cast<double>(std::max<std::int64_t>(0, terms - static_cast<std::int64_t>(i) + 1));
        out.large += std::pow(cnt * sl / static_cast<double>(cnt_obs), 1.0 / out.lambda);
        out.small += std::pow(cnt * ss / static_cast<double>(cnt_obs), 1.0 / out.mu);
    }
    return out;
}

}  // namespace ctrwlab
