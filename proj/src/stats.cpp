#include "ctrwlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <boost/math/distributions/normal.hpp>

#include "ctrwlab/error.hpp"

namespace ctrwlab {

SampleSet::SampleSet(std::vector<double> v, std::string l, std::uint64_t s)
    : values(std::move(v)), label(std::move(l)), seed(s) {}

void SampleSet::validate() const {
    if (values.empty()) throw DataError("DATA_EMPTY", "sample set '" + label + "' is empty");
    for (double v : values)
        if (!std::isfinite(v)) throw DataError("DATA_NONFINITE", "sample set '" + label + "' has non-finite values");
}

namespace {

// Kolmogorov limiting survival function.
double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(const SampleSet& a, const SampleSet& b) {
    a.validate();
    b.validate();
    if (a.values.size() < 2 || b.values.size() < 2) throw DataError("DATA_SIZE", "KS needs at least two samples each");
    std::vector<double> x(a.values), y(b.values);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(i / n - j / m));
    }
    const double ne = n * m / (n + m);
    const double s = std::sqrt(ne);
    KsResult r;
    r.statistic = d;
    r.p_value = kolmogorov_q((s + 0.12 + 0.11 / s) * d);
    r.approximate = ne < 50.0;
    return r;
}

double wasserstein1(const SampleSet& a, const SampleSet& b) {
    a.validate();
    b.validate();
    std::vector<double> x(a.values), y(b.values);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x.size() == y.size()) {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += std::abs(x[k] - y[k]);
        return s / static_cast<double>(x.size());
    }
    // Integral of |F^-1 - G^-1| over the merged quantile breakpoints.
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double u = 0.0, s = 0.0;
    while (i < x.size() && j < y.size()) {
        const double ui = (i + 1) / n, uj = (j + 1) / m;
        const double next = std::min(ui, uj);
        s += (next - u) * std::abs(x[i] - y[j]);
        u = next;
        if (ui <= next) ++i;
        if (uj <= next) ++j;
    }
    return s;
}

double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Interval tail_estimate(std::size_t count, std::size_t total, double level) {
    if (total == 0) throw DataError("DATA_EMPTY", "tail estimate with zero trials");
    if (count > total) throw ParamError("PARAM_COUNT", "count exceeds total");
    if (!(level > 0.0 && level < 1.0)) throw ParamError("PARAM_LEVEL", "level must lie in (0,1)");
    const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(count) / n;
    const double denom = 1.0 + z * z / n;
    const double centre = (p + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    return {p, std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

double standard_error(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

Interval mean_ci(const std::vector<double>& x, double level) {
    if (x.empty()) throw DataError("DATA_EMPTY", "mean of empty sample");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    const double h = normal_quantile(1.0 - (1.0 - level) / 2.0) * standard_error(x);
    return {mean, mean - h, mean + h};
}

double quantile(std::vector<double> x, double q) {
    if (x.empty()) throw DataError("DATA_EMPTY", "quantile of empty sample");
    std::sort(x.begin(), x.end());
    const double h = q * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - std::floor(h)) * (x[hi] - x[lo]);
}

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

void DiagnosticReport::add(Estimate e) {
    if (!(e.ci_low <= e.value && e.value <= e.ci_high))
        throw DataError("REPORT_CI", "estimate '" + e.name + "' lies outside its interval");
    if (e.n_samples < 1) throw DataError("REPORT_SAMPLES", "estimate '" + e.name + "' has no samples");
    estimates.push_back(std::move(e));
}

void DiagnosticReport::add_point(const std::string& name, double value, std::size_t n) {
    add({name, value, value, value, n});
}

void DiagnosticReport::add_interval(const std::string& name, const Interval& iv, std::size_t n) {
    add({name, iv.estimate, std::min(iv.low, iv.estimate), std::max(iv.high, iv.estimate), n});
}

bool DiagnosticReport::has(const std::string& name) const {
    return std::any_of(estimates.begin(), estimates.end(), [&](const Estimate& e) { return e.name == name; });
}

const Estimate& DiagnosticReport::get(const std::string& name) const {
    for (const auto& e : estimates)
        if (e.name == name) return e;
    throw DataError("REPORT_MISSING", "no estimate named '" + name + "'");
}

namespace {

nlohmann::json rounded(const nlohmann::json& j) {
    if (j.is_number_float()) return round12(j.get<double>());
    if (j.is_object()) {
        nlohmann::json o = nlohmann::json::object();
        for (auto it = j.begin(); it != j.end(); ++it) o[it.key()] = rounded(it.value());
        return o;
    }
    if (j.is_array()) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& x : j) a.push_back(rounded(x));
        return a;
    }
    return j;
}

}  // namespace

nlohmann::json DiagnosticReport::to_json(bool with_timestamp) const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["params"] = rounded(params);
    j["seed"] = seed;
    j["estimates"] = nlohmann::json::array();
    for (const auto& e : estimates) {
        j["estimates"].push_back({{"name", e.name},
                                  {"value", round12(e.value)},
                                  {"ci_low", round12(e.ci_low)},
                                  {"ci_high", round12(e.ci_high)},
                                  {"n_samples", e.n_samples}});
    }
    if (with_timestamp && timestamp) j["timestamp"] = *timestamp;
    return j;
}

std::string DiagnosticReport::canonical() const { return to_json(false).dump(2) + "\n"; }

DiagnosticReport DiagnosticReport::from_json(const nlohmann::json& j) {
    DiagnosticReport r;
    try {
        r.scenario = j.at("scenario").get<std::string>();
        r.params = j.at("params");
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& e : j.at("estimates"))
            r.estimates.push_back({e.at("name").get<std::string>(), e.at("value").get<double>(),
                                   e.at("ci_low").get<double>(), e.at("ci_high").get<double>(),
                                   e.at("n_samples").get<std::size_t>()});
        if (j.contains("timestamp")) r.timestamp = j.at("timestamp").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
        throw DataError("REPORT_PARSE", ex.what());
    }
    return r;
}

void emit_report(const DiagnosticReport& report, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("IO_WRITE", "cannot open '" + path + "' for writing");
    os << report.to_json(true).dump(2) << "\n";
    os.flush();
    if (!os) throw IoError("IO_WRITE", "write to '" + path + "' failed");
}

}  // namespace ctrwlab
