#include "ctrwlab/cadlag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ctrwlab/error.hpp"

namespace ctrwlab {

StepPath::StepPath(std::vector<double> times, std::vector<double> values, double horizon)
    : times_(std::move(times)), values_(std::move(values)), horizon_(horizon) {
    if (times_.empty() || times_.size() != values_.size())
        throw ShapeError("PATH_SHAPE", "step path needs one value per breakpoint and at least one breakpoint");
    if (!(std::isfinite(horizon_) && horizon_ > 0.0)) throw ParamError("PATH_HORIZON", "horizon must be positive");
    if (times_.front() != 0.0) throw DataError("PATH_TIMES", "first breakpoint must be 0");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1])) throw DataError("PATH_TIMES", "breakpoints must be strictly increasing");
    if (times_.back() > horizon_) throw DataError("PATH_TIMES", "breakpoint beyond horizon");
    for (double v : values_)
        if (!std::isfinite(v)) throw DataError("PATH_VALUES", "non-finite path value");
}

StepPath StepPath::constant(double value, double horizon) { return StepPath({0.0}, {value}, horizon); }

std::size_t StepPath::cell(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 0;
    return static_cast<std::size_t>(it - times_.begin()) - 1;
}

double StepPath::operator()(double t) const { return values_[cell(t)]; }

double StepPath::left_limit(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return values_.front();
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

StepPath StepPath::compressed() const {
    std::vector<double> t{times_.front()}, v{values_.front()};
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (values_[k] == v.back()) continue;
        t.push_back(times_[k]);
        v.push_back(values_[k]);
    }
    return StepPath(std::move(t), std::move(v), horizon_);
}

StepPath StepPath::scaled(double factor) const {
    std::vector<double> v(values_);
    for (auto& x : v) x *= factor;
    return StepPath(times_, std::move(v), horizon_);
}

void GridPath::validate() const {
    if (!(step > 0.0) || values.empty()) throw ShapeError("GRID_SHAPE", "grid path needs a positive step and values");
    if (!(horizon >= 0.0)) throw ParamError("PATH_HORIZON", "grid horizon must be non-negative");
}

double GridPath::value_at(double t) const {
    if (t <= 0.0) return values.front();
    const double x = t / step;
    // Snap to a node when t is a node time up to rounding.
    const double r = std::round(x);
    const double fk = std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? r : std::floor(x);
    if (fk >= static_cast<double>(values.size() - 1)) return values.back();
    const auto k = static_cast<std::size_t>(fk);
    if (interp == Interpolation::step) return values[k];
    const double w = x - fk;
    return values[k] + w * (values[k + 1] - values[k]);
}

StepPath GridPath::to_step() const {
    validate();
    std::vector<double> t, v;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double tk = node_time(k);
        if (tk > horizon * (1.0 + 1e-12)) break;
        t.push_back(std::min(tk, horizon));
        v.push_back(values[k]);
    }
    return StepPath(std::move(t), std::move(v), horizon > 0.0 ? horizon : step);
}

namespace {

void check_t(const StepPath& p, double t) {
    if (!(t >= 0.0 && t <= p.horizon())) throw RangeError("RANGE_T", "t outside [0, T]");
}

// Number of breakpoints <= t.
std::size_t count_upto(std::span<const double> times, double t) {
    return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

}  // namespace

double total_variation(const StepPath& path, double t) {
    check_t(path, t);
    const auto v = path.values();
    const std::size_t K = count_upto(path.times(), t);
    double tv = 0.0;
    for (std::size_t k = 1; k < K; ++k) tv += std::abs(v[k] - v[k - 1]);
    return tv;
}

JumpStats jump_stats(const StepPath& path, double t, double a) {
    check_t(path, t);
    if (!(a > 0.0)) throw ParamError("PARAM_TRUNCATION", "a must be positive");
    const auto v = path.values();
    const std::size_t K = count_upto(path.times(), t);
    JumpStats s;
    s.sup_abs = std::abs(v[0]);
    for (std::size_t k = 1; k < K; ++k) {
        const double j = std::abs(v[k] - v[k - 1]);
        s.max_jump = std::max(s.max_jump, j);
        if (j > a) ++s.count_above;
        s.sup_abs = std::max(s.sup_abs, std::abs(v[k]));
    }
    return s;
}

// Cells a < b < c with tau_c - tau_{a+1} < delta are exactly the cell triples
// that contain times t1 < s < t2 with t2 - t1 <= delta.
double m1_modulus(const StepPath& path, double delta, double t) {
    check_t(path, t);
    if (!(delta > 0.0)) throw ParamError("PARAM_DELTA", "delta must be positive");
    const auto tau = path.times();
    const auto v = path.values();
    const std::size_t K = count_upto(tau, t);
    double best = 0.0;
    for (std::size_t a = 0; a + 2 < K; ++a) {
        double hi = v[a + 1], lo = v[a + 1];
        for (std::size_t c = a + 2; c < K && tau[c] - tau[a + 1] < delta; ++c) {
            const double top = std::max(v[a], v[c]);
            const double bot = std::min(v[a], v[c]);
            best = std::max({best, hi - top, bot - lo});
            hi = std::max(hi, v[c]);
            lo = std::min(lo, v[c]);
        }
    }
    return best;
}

std::size_t max_eps_increments(const StepPath& path, double eps, double t) {
    check_t(path, t);
    if (!(eps > 0.0)) throw ParamError("PARAM_EPS", "eps must be positive");
    const auto v = path.values();
    const std::size_t K = count_upto(path.times(), t);
    std::size_t count = 0;
    double lo = v[0], hi = v[0];
    for (std::size_t k = 1; k < K; ++k) {
        if (v[k] - lo >= eps || hi - v[k] >= eps) {
            ++count;
            lo = hi = v[k];
        } else {
            lo = std::min(lo, v[k]);
            hi = std::max(hi, v[k]);
        }
    }
    return count;
}

std::vector<double> merged_times(const StepPath& x, const StepPath& y) {
    std::vector<double> u;
    u.reserve(x.size() + y.size());
    std::merge(x.times().begin(), x.times().end(), y.times().begin(), y.times().end(), std::back_inserter(u));
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

double avci_functional(const StepPath& x, const StepPath& y, double delta, double t) {
    if (x.horizon() != y.horizon()) throw ShapeError("PATH_HORIZON_MISMATCH", "paths must share a horizon");
    check_t(x, t);
    if (!(delta > 0.0)) throw ParamError("PARAM_DELTA", "delta must be positive");
    const auto all = merged_times(x, y);
    const std::size_t K = count_upto(all, t);
    std::vector<double> xv(K), yv(K);
    for (std::size_t k = 0; k < K; ++k) {
        xv[k] = x(all[k]);
        yv[k] = y(all[k]);
    }
    double best = 0.0;
    std::vector<double> gmax;
    for (std::size_t b = 1; b + 1 < K; ++b) {
        // Largest admissible c shrinks as a moves left, so prefix maxima of
        // |y_b - y_c| over c in (b, cmax] serve every a.
        const double reach = all[b] + delta;  // a = b - 1 gives the widest window
        gmax.clear();
        double g = 0.0;
        for (std::size_t c = b + 1; c < K && all[c] < reach; ++c) {
            g = std::max(g, std::abs(yv[b] - yv[c]));
            gmax.push_back(g);
        }
        if (gmax.empty()) continue;
        std::size_t cnt = gmax.size();
        for (std::size_t a = b; a-- > 0;) {
            const double lim = all[a + 1] + delta;
            while (cnt > 0 && !(all[b + cnt] < lim)) --cnt;
            if (cnt == 0) break;
            best = std::max(best, std::min(std::abs(xv[a] - xv[b]), gmax[cnt - 1]));
        }
    }
    return best;
}

void write_csv(const StepPath& path, std::ostream& os) {
    os << "t,value\n";
    char buf[64];
    for (std::size_t k = 0; k < path.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", path.times()[k], path.values()[k]);
        os << buf;
    }
}

StepPath read_csv(std::istream& is, std::optional<double> horizon) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("CSV_EMPTY", "empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,value") throw DataError("CSV_HEADER", "expected header 't,value'");
    std::vector<double> t, v;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError("CSV_ROW", "malformed CSV row: " + line);
        try {
            std::size_t p1 = 0, p2 = 0;
            const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
            const double tt = std::stod(a, &p1);
            const double vv = std::stod(b, &p2);
            if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing");
            if (!t.empty() && !(tt > t.back())) throw DataError("CSV_NONMONOTONE", "time column not strictly increasing");
            t.push_back(tt);
            v.push_back(vv);
        } catch (const std::logic_error&) {
            throw DataError("CSV_ROW", "malformed CSV row: " + line);
        }
    }
    if (t.empty()) throw DataError("CSV_EMPTY", "CSV has no rows");
    double T = horizon.value_or(t.back());
    if (T <= 0.0) T = 1.0;
    return StepPath(std::move(t), std::move(v), T);
}

}  // namespace ctrwlab
