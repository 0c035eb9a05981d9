#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctrwlab/cadlag.hpp"
#include "ctrwlab/rng.hpp"

namespace ctrwlab {

enum class Coupling { uncoupled, magnitude_coupled };

struct ProcessConfig {
    InnovationLaw innovation;
    std::optional<WaitingLaw> waiting;  // none: moving average with unit waits
    std::vector<double> coefficients{1.0};
    std::optional<int> past_horizon;  // defaults to coefficients.size() - 1
    std::int64_t n = 100;
    Coupling coupling = Coupling::uncoupled;

    void validate() const;
    double psi() const;
    int order() const { return static_cast<int>(coefficients.size()) - 1; }
    int past() const { return past_horizon.value_or(order()); }
    bool correlated() const;
};

struct SimulationBundle {
    StepPath x;
    StepPath counting;
    // theta_{-P}, ..., theta_0, theta_1, ..., theta_N with P = config.past().
    std::vector<double> innovations;
    // J_1, ..., J_N of the included events (empty for moving averages).
    std::vector<double> waits;
    ProcessConfig config;
    SeedSpec seed;
    double horizon = 1.0;
    double time_exponent = 1.0;  // beta for CTRWs, 1 for moving averages

    std::size_t events() const { return counting.size() - 1; }
    double theta(std::int64_t k) const;
    // n^{-beta/alpha}
    double scaling() const;
    // Jump time of event k >= 1.
    double event_time(std::size_t k) const { return counting.times()[k]; }
    // zeta_k = sum_{j=0}^{min(J, k+P)} c_j theta_{k-j}
    double zeta(std::int64_t k) const;
};

// Builders from injected records. All generators go through these so that a
// bundle is always reproducible from (records, config).
SimulationBundle build_moving_average(const ProcessConfig& config, double T, std::vector<double> thetas);
SimulationBundle build_ctrw(const ProcessConfig& config, double T, std::vector<double> thetas,
                            std::vector<double> waits, std::optional<double> time_exponent = std::nullopt);

SimulationBundle gen_moving_average(const ProcessConfig& config, double T, SeedSpec seed);
SimulationBundle gen_ctrw(const ProcessConfig& config, double T, SeedSpec seed);
// Dispatches on the presence of a waiting law.
SimulationBundle gen_process(const ProcessConfig& config, double T, SeedSpec seed);

struct CountingPaths {
    StepPath n_path;  // N_{nt}
    StepPath d_path;  // D^n_t = n^{-beta} N_{nt}
    std::vector<double> waits;
};

CountingPaths build_counting(const std::vector<double>& waits, std::int64_t n, double beta, double T);
CountingPaths gen_counting(const WaitingLaw& law, std::int64_t n, double T, SeedSpec seed);

// beta-stable subordinator with E exp(-s D_1) = exp(-kappa s^beta).
struct SubordinatorSpec {
    double beta = 0.8;
    double kappa = 1.0;

    void validate() const;
    StableParams unit_law() const;
    static SubordinatorSpec from_waiting(const WaitingLaw& law);
};

struct SubordinatorPaths {
    GridPath d;      // s-grid, step interpolation, extended until D > T
    GridPath d_inv;  // t-grid
};

// inf{s >= 0 : D_s > t} on the grid t_j = j * t_step, t_j <= T. Exact for
// both interpolation modes of D.
GridPath generalized_inverse(const GridPath& d, double T, double t_step);

SubordinatorPaths gen_subordinator_inverse(const SubordinatorSpec& sub, double T, double step, SeedSpec seed);

struct TimeChangedPaths {
    GridPath d_inv;
    GridPath z;  // on the s-grid
    GridPath x;  // Z_{D^{-1}_t} on the t-grid
};

// Z_{D^{-1}_t} on the t-grid of d_inv; z is read at the time-changed instants.
GridPath compose_time_change(const GridPath& z, const GridPath& d_inv);
// Levy path with Z_1 ~ z_unit sampled on [0, s_max].
GridPath gen_levy(const StableParams& z_unit, double s_max, double step, SeedSpec seed);
TimeChangedPaths gen_time_changed_levy(const StableParams& z_unit, const SubordinatorSpec& sub, double T,
                                       double step, SeedSpec seed);

}  // namespace ctrwlab
