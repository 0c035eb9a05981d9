#include "ctrwlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ctrwlab/error.hpp"

namespace ctrwlab {

Coef3 coef3(const Expr& e) {
    return [e](double t, double yt, double y) {
        Vars v;
        v.t = t;
        v.ytilde = yt;
        v.y = y;
        return e(v);
    };
}

Coef2 coef2(const Expr& e) {
    return [e](double t, double xd) {
        Vars v;
        v.t = t;
        v.xdel = xd;
        return e(v);
    };
}

Kernel kernel(const Expr& e) {
    return [e](double t, double s, double x) {
        Vars v;
        v.t = t;
        v.s = s;
        v.y = x;
        return e(v);
    };
}

void GrowthCertificate::validate() const {
    detail::require(K > 0.0 && C > 0.0, "PARAM_GROWTH", "growth constants K, C must be positive");
    detail::require(p > 0.0 && p < 1.0, "PARAM_GROWTH", "growth exponent p must lie in (0, 1)");
    detail::require(R > 0.0, "PARAM_GROWTH", "growth radius R must be positive");
}

bool GrowthCertificate::admits(double value, double ytilde, double y) const {
    if (std::abs(ytilde) > R) return true;
    return std::abs(value) <= K * std::pow(std::abs(y), p) + C;
}

namespace {

std::string fmt_point(const char* what, double t, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s at t=%g, %g, %g", what, t, a, b);
    return buf;
}

double call(const Coef3& f, double t, double a, double b) { return f ? f(t, a, b) : 0.0; }
double call(const Coef2& f, double t, double a) { return f ? f(t, a) : 0.0; }

}  // namespace

std::vector<std::string> SdeSpec::check_growth(double T) const {
    std::vector<std::string> w;
    if (!cert) return w;
    cert->validate();
    const std::pair<const char*, const Coef3*> coefs[] = {{"b", &b}, {"mu", &mu}, {"sigma", &sigma}};
    for (const auto& [name, f] : coefs) {
        if (!*f) continue;
        bool bad = false;
        for (int i = 0; i <= 4 && !bad; ++i)
            for (int j = -2; j <= 2 && !bad; ++j)
                for (double y : {0.0, 0.5, -0.5, 1.0, -1.0, 10.0, -10.0, 100.0, -100.0, 1e4, -1e4}) {
                    const double t = T * i / 4.0, yt = cert->R * j / 2.0;
                    if (!cert->admits((*f)(t, yt, y), yt, y)) {
                        w.push_back("GROWTH_CERTIFICATE " + fmt_point(name, t, yt, y));
                        bad = true;
                        break;
                    }
                }
    }
    return w;
}

void SddeSpec::validate() const {
    detail::require(std::isfinite(r) && r > 0.0, "PARAM_DELAY", "delay r must be positive");
    detail::require(std::abs(eta.horizon() - r) <= 1e-12 * r, "PARAM_ETA", "initial segment must span [-r, 0]");
    detail::require(std::isfinite(c) && c > 0.0, "PARAM_COEFFS", "coefficient sum c must be positive");
}

double SddeSpec::eta_at(double u) const { return eta(std::clamp(u + r, 0.0, eta.horizon())); }

double SddeSpec::eta_left(double u) const { return eta.left_limit(std::clamp(u + r, 0.0, eta.horizon())); }

std::vector<std::string> SddeSpec::check_bounded(double T, double bound) const {
    std::vector<std::string> w;
    const std::pair<const char*, const Coef2*> coefs[] = {{"b", &b}, {"sigma", &sigma}};
    for (const auto& [name, f] : coefs) {
        if (!*f) continue;
        bool bad = false;
        for (int i = 0; i <= 4 && !bad; ++i)
            for (double x : {0.0, 0.5, -0.5, 1.0, -1.0, 10.0, -10.0, 1e3, -1e3, 1e6, -1e6}) {
                const double t = T * i / 4.0;
                if (!(std::abs((*f)(t, x)) <= bound)) {
                    w.push_back("BOUNDEDNESS " + fmt_point(name, t, x, 0.0));
                    bad = true;
                    break;
                }
            }
    }
    return w;
}

SddeSpec make_sdde(Coef2 b, Coef2 sigma, double r, double eta_const, double c) {
    SddeSpec s;
    s.b = std::move(b);
    s.sigma = std::move(sigma);
    s.r = r;
    s.eta = StepPath::constant(eta_const, r);
    s.c = c;
    s.validate();
    return s;
}

namespace {

std::vector<double> mesh_knots(double T, double mesh, const std::vector<double>& extra) {
    detail::require(std::isfinite(mesh) && mesh > 0.0, "PARAM_MESH", "mesh must be positive");
    std::vector<double> k;
    for (std::int64_t j = 0;; ++j) {
        const double t = static_cast<double>(j) * mesh;
        if (t >= T) break;
        k.push_back(t);
    }
    k.push_back(T);
    for (double t : extra)
        if (t >= 0.0 && t <= T) k.push_back(t);
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

}  // namespace

SolverResult solve_sn(const SdeSpec& spec, const StepPath& d, const StepPath& z, double mesh) {
    const double T = z.horizon();
    if (d.horizon() != T) throw ShapeError("DRIVER_MISMATCH", "drivers have different horizons");
    const auto dt_ = d.times(), zt = z.times();
    for (double t : zt)
        if (t > 0.0 && !std::binary_search(dt_.begin(), dt_.end(), t))
            throw ShapeError("DRIVER_MISMATCH", "Z^n jumps where D^n does not");
    std::vector<double> extra(dt_.begin(), dt_.end());
    const auto knots = mesh_knots(T, mesh, extra);

    SolverResult res;
    res.warnings = spec.check_growth(T);
    bool warned = false;
    auto guard = [&](const char* name, double v, double yt, double y, double t) {
        if (warned || !spec.cert || spec.cert->admits(v, yt, y)) return;
        res.warnings.push_back("GROWTH_VIOLATION " + fmt_point(name, t, yt, y));
        warned = true;
    };

    // Y = X - x0 keeps the pure-jump reductions free of offset rounding.
    double y = 0.0;
    std::vector<double> out(knots.size());
    for (std::size_t a = 0; a < knots.size(); ++a) {
        const double t = knots[a];
        if (t > 0.0) {
            const double dD = d(t) - d.left_limit(t);
            const double dZ = z(t) - z.left_limit(t);
            if (dD != 0.0 || dZ != 0.0) {
                const double yt = d.left_limit(t), x = spec.x0 + y;
                const double m = call(spec.mu, t, yt, x), s = call(spec.sigma, t, yt, x);
                guard("mu", m, yt, x, t);
                guard("sigma", s, yt, x, t);
                y += m * dD + s * dZ;
            }
        }
        out[a] = spec.x0 + y;
        if (a + 1 < knots.size() && spec.b) {
            const double yt = d(t), x = spec.x0 + y;
            const double bv = spec.b(0.5 * (t + knots[a + 1]), yt, x);
            guard("b", bv, yt, x, t);
            y += bv * (knots[a + 1] - t);
        }
    }
    res.x = StepPath(knots, std::move(out), T);
    return res;
}

SolverResult solve_sn(const SdeSpec& spec, const SimulationBundle& driver, double mesh) {
    if (!driver.config.waiting) throw ParamError("PARAM_WAITING", "(S_n) needs a CTRW driver");
    const double beta = driver.config.waiting->beta;
    const double scale = std::pow(static_cast<double>(driver.config.n), -beta);
    std::vector<double> dv(driver.counting.values().begin(), driver.counting.values().end());
    for (auto& v : dv) v *= scale;
    const StepPath d(std::vector<double>(driver.counting.times().begin(), driver.counting.times().end()),
                     std::move(dv), driver.horizon);
    return solve_sn(spec, d, driver.x, mesh);
}

GridPath solve_s_limit(const SdeSpec& spec, const GridPath& d_inv, const GridPath& z_tc) {
    d_inv.validate();
    z_tc.validate();
    if (d_inv.values.size() != z_tc.values.size() || std::abs(d_inv.step - z_tc.step) > 1e-12 * z_tc.step)
        throw ShapeError("GRID_MISMATCH", "D^{-1} and Z_{D^{-1}} grids differ");
    const double h = z_tc.step;
    const std::size_t K = z_tc.values.size();
    GridPath out{h, std::vector<double>(K), z_tc.horizon, Interpolation::step};
    double y = 0.0;
    out.values[0] = spec.x0;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const double t = z_tc.node_time(k), yt = d_inv.values[k], x = spec.x0 + y;
        y += call(spec.b, t + 0.5 * h, yt, x) * h + call(spec.mu, t, yt, x) * (d_inv.values[k + 1] - d_inv.values[k]) +
             call(spec.sigma, t, yt, x) * (z_tc.values[k + 1] - z_tc.values[k]);
        out.values[k + 1] = spec.x0 + y;
    }
    return out;
}

namespace {

// The solution so far, stored as its values at the processed knots.
struct History {
    const SddeSpec& spec;
    std::vector<double> t, x;

    double at(double u) const {
        if (u < 0.0) return spec.eta_at(u);
        auto it = std::upper_bound(t.begin(), t.end(), u);
        return x[static_cast<std::size_t>(it - t.begin()) - 1];
    }
    double left(double u) const {
        if (u <= 0.0) return spec.eta_left(u);
        auto it = std::lower_bound(t.begin(), t.end(), u);
        return x[static_cast<std::size_t>(it - t.begin()) - 1];
    }
    // int_{tt-r}^{tt} Phi(tt, s, X_s) ds by the trapezoid rule on the stored
    // breakpoints; X is taken from the left at each node, `cur` is X_{tt-}.
    double window(double tt, double cur) const {
        const double lo = tt - spec.r;
        std::vector<double> nodes{lo};
        if (lo < 0.0) {
            for (double s : spec.eta.times())
                if (s - spec.r > lo) nodes.push_back(s - spec.r);
            nodes.push_back(0.0);
        }
        for (double s : t)
            if (s > lo && s < tt) nodes.push_back(s);
        nodes.push_back(tt);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double a = nodes[i], b = nodes[i + 1];
            const double xa = at(a);
            const double xb = i + 2 == nodes.size() ? cur : left(b);
            acc += (b - a) * (spec.phi(tt, a, xa) + spec.phi(tt, b, xb)) / 2.0;
        }
        return acc;
    }
};

SolverResult sddn_impl(const SddeSpec& spec, const StepPath& z, double mesh, bool extended) {
    spec.validate();
    const double T = z.horizon();
    std::vector<double> base(z.times().begin(), z.times().end());
    for (double s : spec.eta.times()) base.push_back(s);  // eta breakpoint u + r
    auto knots = mesh_knots(T, mesh, base);
    // close under t -> t + r so the delayed argument is constant between knots
    std::vector<double> all = knots;
    for (double t : knots)
        for (double u = t + spec.r; u <= T; u += spec.r) all.push_back(u);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    History hist{spec, {}, {}};
    hist.t.reserve(all.size());
    hist.x.reserve(all.size());
    const double x0 = spec.eta_at(0.0);
    double y = 0.0;
    for (std::size_t a = 0; a < all.size(); ++a) {
        const double t = all[a];
        if (t > 0.0) {
            const double dZ = z(t) - z.left_limit(t);
            if (dZ != 0.0) {
                double s = call(spec.sigma, t, hist.left(t - spec.r));
                if (extended && spec.phi) s += hist.window(t, x0 + y);
                y += s / spec.c * dZ;
            }
        }
        hist.t.push_back(t);
        hist.x.push_back(x0 + y);
        if (a + 1 < all.size() && spec.b)
            y += spec.b(0.5 * (t + all[a + 1]), hist.at(t - spec.r)) * (all[a + 1] - t);
    }
    SolverResult res;
    res.x = StepPath(std::move(hist.t), std::move(hist.x), T);
    return res;
}

}  // namespace

SolverResult solve_sddn(const SddeSpec& spec, const StepPath& z, double mesh) {
    return sddn_impl(spec, z, mesh, false);
}

SolverResult solve_ext_sddn(const SddeSpec& spec, const StepPath& z, double mesh) {
    if (!spec.phi) throw ParamError("PARAM_KERNEL", "extended SDDE needs a kernel");
    detail::require(spec.phi_bound >= 0.0 && spec.phi_lipschitz >= 0.0, "PARAM_KERNEL",
                    "kernel bound and Lipschitz constant must be >= 0");
    return sddn_impl(spec, z, mesh, true);
}

GridPath solve_sdd_limit(const SddeSpec& spec, const GridPath& z) {
    spec.validate();
    z.validate();
    const double h = z.step;
    const double ratio = spec.r / h;
    const auto m = static_cast<std::size_t>(std::llround(ratio));
    detail::require(m >= 1 && std::abs(ratio - static_cast<double>(m)) <= 1e-9 * ratio, "PARAM_DELAY_GRID",
                    "grid step must divide the delay r");
    const std::size_t K = z.values.size();
    GridPath out{h, std::vector<double>(K), z.horizon, Interpolation::step};
    const double x0 = spec.eta_at(0.0);
    out.values[0] = x0;
    double y = 0.0;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const double t = z.node_time(k);
        const double xd = k >= m ? out.values[k - m] : spec.eta_at(t - spec.r);
        double s = call(spec.sigma, t, xd);
        if (spec.phi) {
            // trapezoid over the grid window [t - r, t]
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double a = t - spec.r + static_cast<double>(i) * h;
                const auto xa = [&](std::size_t j, double u) {
                    return k + j >= m ? out.values[k + j - m] : spec.eta_at(u);
                };
                acc += h * (spec.phi(t, a, xa(i, a)) + spec.phi(t, a + h, xa(i + 1, a + h))) / 2.0;
            }
            s += acc;
        }
        y += call(spec.b, t + 0.5 * h, xd) * h + s * (z.values[k + 1] - z.values[k]);
        out.values[k + 1] = x0 + y;
    }
    return out;
}

}  // namespace ctrwlab
