#pragma once
// Brute-force reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ctrwlab/cadlag.hpp"
#include "ctrwlab/rng.hpp"

namespace oracle {

using ctrwlab::StepPath;

constexpr double kEta = 1e-9;

// Every breakpoint, a point just before it, and t itself; suprema over real
// times are attained (in the limit) on this set.
inline std::vector<double> candidates(const std::vector<double>& times, double t) {
    std::vector<double> c;
    for (double s : times) {
        if (s > t) continue;
        c.push_back(s);
        if (s > kEta) c.push_back(s - kEta);
    }
    c.push_back(t);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

inline std::vector<double> times_of(const StepPath& p) { return {p.times().begin(), p.times().end()}; }

inline double total_variation(const StepPath& p, double t) {
    const auto c = candidates(times_of(p), t);
    double s = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) s += std::abs(p(c[k]) - p(c[k - 1]));
    return s;
}

inline double seg_dist(double x, double a, double b) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
}

inline double m1_modulus(const StepPath& p, double delta, double t) {
    const auto c = candidates(times_of(p), t);
    double best = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t k = i + 2; k < c.size() && c[k] - c[i] <= delta; ++k)
            for (std::size_t j = i + 1; j < k; ++j) best = std::max(best, seg_dist(p(c[j]), p(c[i]), p(c[k])));
    return best;
}

// Exhaustive DP over ordered point pairs with |increment| >= eps.
inline std::size_t max_eps_increments(const StepPath& p, double eps, double t) {
    const auto c = candidates(times_of(p), t);
    std::vector<std::size_t> f(c.size(), 0);
    for (std::size_t e = 1; e < c.size(); ++e) {
        f[e] = f[e - 1];
        for (std::size_t s = 0; s < e; ++s)
            if (std::abs(p(c[e]) - p(c[s])) >= eps) f[e] = std::max(f[e], f[s] + 1);
    }
    return f.back();
}

inline double avci(const StepPath& x, const StepPath& y, double delta, double t) {
    auto all = times_of(x);
    for (double s : y.times()) all.push_back(s);
    const auto c = candidates(all, t);
    double best = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t k = i + 2; k < c.size() && c[k] - c[i] <= delta; ++k)
            for (std::size_t j = i + 1; j < k; ++j)
                best = std::max(best, std::min(std::abs(x(c[i]) - x(c[j])), std::abs(y(c[j]) - y(c[k]))));
    return best;
}

// Random step path on [0, T] with at most max_breaks breakpoints and values
// on a half-integer lattice (exact arithmetic, frequent ties).
inline StepPath random_path(std::mt19937_64& rng, int max_breaks, double T = 1.0) {
    std::uniform_int_distribution<int> nb(1, max_breaks), val(-6, 6);
    std::uniform_real_distribution<double> u(0.0, T);
    const int k = nb(rng);
    std::vector<double> t{0.0};
    while (static_cast<int>(t.size()) < k) {
        const double s = u(rng);
        if (s > 1e-6 && std::find(t.begin(), t.end(), s) == t.end()) t.push_back(s);
    }
    std::sort(t.begin(), t.end());
    std::vector<double> v(t.size());
    for (auto& x : v) x = 0.5 * val(rng);
    return StepPath(t, v, T);
}

}  // namespace oracle

#include "ctrwlab/metrics.hpp"

namespace oracle {

// J1 by brute force over warps that move the jumps of x to positions on a grid
// of step h (plus the jump times of both paths). Upper bound within h of the
// exact value; x must have at most two jumps.
inline double j1_bruteforce(const StepPath& x0, const StepPath& y, double h) {
    const StepPath x = x0.compressed();
    const double T = x.horizon();
    std::vector<double> pos;
    for (double s = h; s <= T + 1e-12; s += h) pos.push_back(std::min(s, T));
    for (double s : y.times())
        if (s > 0) pos.push_back(s);
    for (double s : x.times())
        if (s > 0) pos.push_back(s);
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    const auto t = x.times();
    const auto v = x.values();
    const std::size_t p = x.size() - 1;
    auto cost = [&](const std::vector<double>& u) {
        double c = 0.0;
        for (std::size_t i = 0; i < p; ++i) c = std::max(c, std::abs(u[i] - t[i + 1]));
        std::vector<double> tt{0.0};
        tt.insert(tt.end(), u.begin(), u.end());
        StepPath w(tt, {v.begin(), v.end()}, T);
        return std::max(c, ctrwlab::d_uniform(w, y).value);
    };
    double best = 1e300;
    if (p == 0) return cost({});
    for (std::size_t a = 0; a < pos.size(); ++a) {
        if (p == 1) {
            best = std::min(best, cost({pos[a]}));
            continue;
        }
        for (std::size_t b = a + 1; b < pos.size(); ++b) best = std::min(best, cost({pos[a], pos[b]}));
    }
    return best;
}

}  // namespace oracle
