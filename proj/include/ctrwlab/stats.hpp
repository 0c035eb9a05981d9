#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ctrwlab {

struct SampleSet {
    std::vector<double> values;
    std::string label;
    std::uint64_t seed = 0;

    SampleSet() = default;
    SampleSet(std::vector<double> v, std::string l = {}, std::uint64_t s = 0);
    void validate() const;
};

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool approximate = false;  // asymptotic p-value with effective size below 50
};

KsResult ks_two_sample(const SampleSet& a, const SampleSet& b);
double wasserstein1(const SampleSet& a, const SampleSet& b);

struct Interval {
    double estimate = 0.0;
    double low = 0.0;
    double high = 0.0;
};

Interval tail_estimate(std::size_t count, std::size_t total, double level = 0.95);
// Sample mean with a normal-approximation interval.
Interval mean_ci(const std::vector<double>& x, double level = 0.95);
double standard_error(const std::vector<double>& x);
// Linear-interpolation quantile (type 7).
double quantile(std::vector<double> x, double q);
double normal_quantile(double p);

struct Estimate {
    std::string name;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_samples = 1;
};

struct DiagnosticReport {
    std::string scenario;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::vector<Estimate> estimates;
    std::optional<std::string> timestamp;

    void add(Estimate e);
    void add_point(const std::string& name, double value, std::size_t n = 1);
    void add_interval(const std::string& name, const Interval& iv, std::size_t n);
    const Estimate& get(const std::string& name) const;
    bool has(const std::string& name) const;

    // Canonical JSON: sorted keys, floats rounded to 12 significant digits.
    nlohmann::json to_json(bool with_timestamp = false) const;
    std::string canonical() const;
    static DiagnosticReport from_json(const nlohmann::json& j);
};

double round12(double v);
void emit_report(const DiagnosticReport& report, const std::string& path);

}  // namespace ctrwlab
