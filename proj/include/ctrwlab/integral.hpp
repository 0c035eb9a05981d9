#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ctrwlab/cadlag.hpp"
#include "ctrwlab/processes.hpp"
#include "ctrwlab/stats.hpp"

namespace ctrwlab {

enum class IntegrandKind { deterministic, lipschitz, adversarial, pure_jump, pathwise };

struct Integrand {
    IntegrandKind kind = IntegrandKind::deterministic;
    // deterministic: f(t). lipschitz, pathwise: g(x).
    std::function<double(double)> f;
    // lipschitz: |g| <= bound, slope of H at most lip_c * n^gamma
    double bound = 1.0;
    double lip_c = 10.0;
    double gamma = 0.0;
    // adversarial: amplitude n^{-decay}
    double decay = 0.0;
    // Test injection: the adversarial integrand reads theta this many indices ahead.
    int lookahead = 0;
    std::optional<StepPath> path;

    static Integrand constant(double c);
    static Integrand deterministic(std::function<double(double)> f);
    static Integrand lipschitz(std::function<double(double)> g, double bound, double c, double gamma);
    static Integrand adversarial(double decay = 0.0);
    static Integrand pure_jump(StepPath p);
    static Integrand pathwise(std::function<double(double)> g);
};

// H realised along one integrator path: on [knots[i], knots[i+1]) H is linear from
// start[i] to end[i] (end[i] is the left limit at the next knot). Step integrands
// have start == end.
struct RealisedIntegrand {
    std::vector<double> knots;
    std::vector<double> start;
    std::vector<double> end;
    double horizon = 1.0;

    double value(double t) const;
    // H_{t-}; H_{0-} := H_0
    double left(double t) const;
    bool is_step() const;
};

// Cells used to sample deterministic integrands.
inline constexpr int kDeterministicCells = 4096;

RealisedIntegrand realise(const Integrand& h, const StepPath& x, const SimulationBundle* bundle = nullptr);

// t -> sum_{jump times s <= t} H_{s-} dX_s, on the breakpoints of x.
StepPath ito_integral(const RealisedIntegrand& h, const StepPath& x);
StepPath ito_integral(const Integrand& h, const StepPath& x);
StepPath ito_integral(const Integrand& h, const SimulationBundle& bundle);

// Left-point sum sum_k h_k (x_{k+1} - x_k) on a shared grid.
GridPath grid_integral(const GridPath& h, const GridPath& x);
// H sampled on the grid of x: f(t_k), g(x_{t_k}), or the step path at t_k.
GridPath grid_integral(const Integrand& h, const GridPath& x);

// Step integrand on the union of the eps-stopping partition and {jT/m}; each
// partition point restarts the eps-window, so |H - H^{m,eps}| <= eps.
StepPath discretize_integrand(const RealisedIntegrand& h, double eps, int m);

// |int (H_{s-} - H^{m,eps}_{s-}) dX_s|^*_T  ^ 1
double upsilon_sample(const RealisedIntegrand& h, const StepPath& hd, const StepPath& x);

DiagnosticReport upsilon_estimate(const std::vector<SimulationBundle>& ensemble, const Integrand& h,
                                  const std::vector<double>& eps, int m);

struct AdversarialOptions {
    std::vector<std::int64_t> n_list{100, 1000, 10000};
    std::size_t reps = 1000;
    std::uint64_t seed = 0;
    double horizon = 1.0;
    double decay = 0.0;
    int threads = 1;
};

// sup_t |int H dX^n| for the sign-of-last-innovation integrand, per n, with an
// uncorrelated companion run c = (c_0).
DiagnosticReport adversarial_experiment(const ProcessConfig& config, const AdversarialOptions& opt);

// Distribution-free CI for the median from order statistics.
Interval median_ci(std::vector<double> x, double level = 0.95);
// Least-squares slope of log y on log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ctrwlab
