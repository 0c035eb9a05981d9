#include "ctrwlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "ctrwlab/error.hpp"

namespace ctrwlab {

namespace {

void same_horizon(const StepPath& x, const StepPath& y) {
    if (x.horizon() != y.horizon()) throw ShapeError("PATH_HORIZON_MISMATCH", "paths must share a horizon");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

enum Move : unsigned char { kNone, kRight, kUp, kDiag };

// Alignment of the jumps of x (times t, values v) with those of y (s, w).
struct J1Problem {
    std::vector<double> t, v, s, w;
    double T;
    std::size_t p() const { return t.size() - 1; }
    std::size_t q() const { return s.size() - 1; }

    // Earliest-time dynamic programme; returns true if (p, q) is reachable.
    bool feasible(double eps, std::vector<unsigned char>* parent) const {
        const std::size_t P = p(), Q = q();
        if (std::abs(v[0] - w[0]) > eps) return false;
        std::vector<double> E((P + 1) * (Q + 1), kInf);
        if (parent) parent->assign(E.size(), kNone);
        auto at = [Q](std::size_t i, std::size_t j) { return i * (Q + 1) + j; };
        E[at(0, 0)] = 0.0;
        for (std::size_t i = 0; i <= P; ++i) {
            for (std::size_t j = 0; j <= Q; ++j) {
                const double tau = E[at(i, j)];
                if (tau == kInf) continue;
                const double next_s = j < Q ? s[j + 1] : T;
                if (i < P && std::abs(v[i + 1] - w[j]) <= eps) {
                    const double u = std::max(tau, t[i + 1] - eps);
                    if (u <= std::min(t[i + 1] + eps, next_s) && u < E[at(i + 1, j)]) {
                        E[at(i + 1, j)] = u;
                        if (parent) (*parent)[at(i + 1, j)] = kRight;
                    }
                }
                if (j < Q && s[j + 1] >= tau && std::abs(v[i] - w[j + 1]) <= eps) {
                    if (s[j + 1] < E[at(i, j + 1)]) {
                        E[at(i, j + 1)] = s[j + 1];
                        if (parent) (*parent)[at(i, j + 1)] = kUp;
                    }
                }
                if (i < P && j < Q && s[j + 1] >= tau && std::abs(s[j + 1] - t[i + 1]) <= eps &&
                    std::abs(v[i + 1] - w[j + 1]) <= eps) {
                    if (s[j + 1] < E[at(i + 1, j + 1)]) {
                        E[at(i + 1, j + 1)] = s[j + 1];
                        if (parent) (*parent)[at(i + 1, j + 1)] = kDiag;
                    }
                }
            }
        }
        return E[at(P, Q)] < kInf;
    }

    std::string witness(double eps) const {
        std::vector<unsigned char> parent;
        feasible(eps, &parent);
        const std::size_t Q = q();
        std::vector<std::string> parts;
        std::size_t i = p(), j = Q;
        while (i > 0 || j > 0) {
            const unsigned char m = parent[i * (Q + 1) + j];
            if (m == kDiag) {
                parts.push_back("x@" + fmt(t[i]) + "->y@" + fmt(s[j]));
                --i;
                --j;
            } else if (m == kRight) {
                parts.push_back("x@" + fmt(t[i]) + "->unmatched");
                --i;
            } else if (m == kUp) {
                parts.push_back("y@" + fmt(s[j]) + "<-unmatched");
                --j;
            } else {
                break;
            }
        }
        std::reverse(parts.begin(), parts.end());
        std::string out = "jump matching:";
        for (const auto& s_ : parts) out += " " + s_;
        if (parts.empty()) out += " none";
        return out;
    }
};

}  // namespace

MetricResult d_uniform(const StepPath& x, const StepPath& y) {
    same_horizon(x, y);
    double best = 0.0, at = 0.0;
    for (double t : merged_times(x, y)) {
        const double d = std::abs(x(t) - y(t));
        if (d > best) {
            best = d;
            at = t;
        }
    }
    return {best, "sup attained at t=" + fmt(at), true, 0.0};
}

MetricResult d_j1(const StepPath& x, const StepPath& y) {
    same_horizon(x, y);
    const StepPath xc = x.compressed(), yc = y.compressed();
    J1Problem pr;
    pr.t.assign(xc.times().begin(), xc.times().end());
    pr.v.assign(xc.values().begin(), xc.values().end());
    pr.s.assign(yc.times().begin(), yc.times().end());
    pr.w.assign(yc.values().begin(), yc.values().end());
    pr.T = x.horizon();
    if ((pr.p() + 2) * (pr.q() + 2) > (std::size_t{1} << 22))
        throw ParamError("J1_TOO_LARGE", "exact J1 limited to about 4e6 jump pairs");

    std::vector<double> tx(pr.t), sy(pr.s);
    tx.push_back(pr.T);
    sy.push_back(pr.T);
    std::vector<double> cand{0.0, pr.T};
    for (double a : pr.v)
        for (double b : pr.w) cand.push_back(std::abs(a - b));
    for (double a : tx)
        for (double b : sy) cand.push_back(std::abs(a - b));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::size_t lo = 0, hi = cand.size() - 1;
    while (!pr.feasible(cand[hi], nullptr)) {
        // Cannot happen for finite paths; guard against a logic error.
        throw DataError("J1_INTERNAL", "largest candidate infeasible");
    }
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (pr.feasible(cand[mid], nullptr))
            hi = mid;
        else
            lo = mid + 1;
    }
    const double eps = cand[lo];
    return {eps, pr.witness(eps), true, 0.0};
}

namespace {

struct Pt {
    double t, v;
};

// Completed graph of a compressed step path, each non-degenerate segment cut
// into res-1 pieces. Returns the mesh (largest piece in sup norm).
double completed_graph(const StepPath& p, int res, std::vector<Pt>& out) {
    const StepPath c = p.compressed();
    const auto t = c.times();
    const auto v = c.values();
    out.clear();
    out.push_back({0.0, v[0]});
    double mesh = 0.0;
    auto segment = [&](Pt a, Pt b) {
        const double len = std::max(std::abs(b.t - a.t), std::abs(b.v - a.v));
        if (len == 0.0) return;
        mesh = std::max(mesh, len / (res - 1));
        for (int k = 1; k < res; ++k) {
            const double f = static_cast<double>(k) / (res - 1);
            out.push_back({a.t + f * (b.t - a.t), a.v + f * (b.v - a.v)});
        }
        out.back() = b;
    };
    for (std::size_t k = 1; k < t.size(); ++k) {
        segment({t[k - 1], v[k - 1]}, {t[k], v[k - 1]});
        segment({t[k], v[k - 1]}, {t[k], v[k]});
    }
    segment({t.back(), v.back()}, {c.horizon(), v.back()});
    return mesh;
}

}  // namespace

MetricResult d_m1(const StepPath& x, const StepPath& y, int resolution) {
    same_horizon(x, y);
    if (resolution < 2) throw ParamError("PARAM_RESOLUTION", "resolution must be at least 2");
    std::vector<Pt> a, b;
    const double mesh = std::max(completed_graph(x, resolution, a), completed_graph(y, resolution, b));
    auto dist = [](const Pt& p, const Pt& q) { return std::max(std::abs(p.t - q.t), std::abs(p.v - q.v)); };
    std::vector<double> prev(b.size()), cur(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d = dist(a[i], b[j]);
            double m;
            if (i == 0 && j == 0)
                m = d;
            else if (i == 0)
                m = cur[j - 1];
            else if (j == 0)
                m = prev[0];
            else
                m = std::min({prev[j], prev[j - 1], cur[j - 1]});
            cur[j] = std::max(d, m);
        }
        std::swap(prev, cur);
    }
    const double value = prev.back();
    return {value,
            "discrete Frechet matching of completed graphs (" + std::to_string(a.size()) + "x" +
                std::to_string(b.size()) + " vertices)",
            false, mesh};
}

}  // namespace ctrwlab
