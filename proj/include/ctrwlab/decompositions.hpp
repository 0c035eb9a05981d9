#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctrwlab/cadlag.hpp"
#include "ctrwlab/processes.hpp"
#include "ctrwlab/stats.hpp"

namespace ctrwlab {

// h(x) = x 1{|x| <= a} + sgn(x) a 1{|x| > a}
double truncate_h(double x, double a);

// E[s theta 1{|s theta| <= a}] and E[h(s theta)] for the innovation law.
double truncated_mean(const InnovationLaw& law, double s, double a);
double truncated_h_mean(const InnovationLaw& law, double s, double a);

// E[|b theta|^p 1{|b theta| > 1}] (large = true) or E[|b theta|^p 1{|b theta| <= 1}].
double truncated_power_moment(const InnovationLaw& law, double b, double p, bool large);

struct TruncatedSplit {
    StepPath m;
    StepPath a;
    double truncation = 1.0;
    double compensator = 0.0;
};

TruncatedSplit split_martingale(const SimulationBundle& bundle, double a);

struct BnEstimate {
    Interval mc;
    double closed_form = 0.0;
    std::size_t reps = 0;
};

// n^beta E[h(zeta^n_1)] with zeta^n_1 = n^{-beta/alpha} theta_1.
BnEstimate estimate_bn(const InnovationLaw& law, std::int64_t n, double beta, double a, std::size_t reps,
                       SeedSpec seed);

struct UVSplit {
    StepPath u;
    StepPath v;
    StepPath u1;
    StepPath u2;
    double psi = 1.0;
};

UVSplit split_uv(const SimulationBundle& bundle);

struct TcReport {
    bool holds = true;
    std::vector<double> tail_sums;  // sum_{j >= i} c_j, i = 1..J
    double tail_double_sum = 0.0;
    double rho = 1.0;
    double rho_power_sum = 0.0;  // sum_i (tail_i)^rho
};

TcReport check_tc(const std::vector<double>& c, double alpha, double rho = 0.5);

// Per-realisation sufficient statistics for the GD diagnostics.
struct GdSample {
    double tv_a = 0.0;
    std::vector<double> stopped_jump;  // |Delta M at t ^ tau_c| per c
    double max_jump_m = 0.0;
};

GdSample gd_sample(const TruncatedSplit& split, double t, const std::vector<double>& cs);

struct GdEnsemble {
    std::int64_t n = 0;
    std::vector<GdSample> samples;
};

DiagnosticReport gd_statistics(const std::vector<GdEnsemble>& ensembles, const std::vector<double>& Rs,
                               const std::vector<double>& cs);
DiagnosticReport gd_statistics(const std::vector<std::pair<std::int64_t, std::vector<TruncatedSplit>>>& ensembles,
                               double t, const std::vector<double>& Rs, const std::vector<double>& cs);

// n^{-gamma} sum_{s in pi} |V_s| with pi = {k T n^{-lambda}} u {T} u jump times of V.
double gdca_statistic(const StepPath& v, double n, double gamma, double lambda, double T);
double gdca_statistic(const UVSplit& split, double gamma, const SimulationBundle& bundle);

struct VniFamily {
    std::vector<double> sigma;               // sigma_k, k = 1..N
    std::vector<std::vector<double>> values;  // values[i-1][k-1] = V^{n,i} at sigma_k
    std::vector<double> coef;                // -values / theta: psi^{-1} n^{-beta/alpha} sum_{l >= i} c_l
    StepPath counter;                        // Lambda = N
    InnovationLaw law;
    std::int64_t n = 1;
    double time_exponent = 1.0;
};

VniFamily build_vni_family(const SimulationBundle& bundle);

struct GdciSums {
    double large = 0.0;
    double small = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    bool modified = false;  // alpha = 1: `large` is a quantile of sum_k sum_i |V^{n,i,>}|
};

double default_gdci_gamma(double alpha);

// Exact expectations for the moment sums; for alpha = 1 (symmetric) the
// large-jump part is the q-quantile of the direct-control sum, simulated.
GdciSums gdci_moment_sums(const VniFamily& family, double K, double gamma, std::size_t reps = 2000,
                          SeedSpec seed = {}, double q = 0.9);

// Monte Carlo counterpart from an ensemble of realised families.
GdciSums gdci_moment_sums_mc(const std::vector<VniFamily>& families, double K, double gamma);

}  // namespace ctrwlab
