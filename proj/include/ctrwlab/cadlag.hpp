#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace ctrwlab {

// Right-continuous step path on [0, T]: value at t is values[k] for the
// largest breakpoint times[k] <= t.
class StepPath {
public:
    StepPath() = default;
    StepPath(std::vector<double> times, std::vector<double> values, double horizon);

    static StepPath constant(double value, double horizon);

    double operator()(double t) const;
    double left_limit(double t) const;
    // Index of the cell containing t (largest k with times[k] <= t).
    std::size_t cell(double t) const;

    std::span<const double> times() const { return times_; }
    std::span<const double> values() const { return values_; }
    double horizon() const { return horizon_; }
    std::size_t size() const { return times_.size(); }

    // Drops breakpoints whose value equals the previous one.
    StepPath compressed() const;
    StepPath scaled(double factor) const;

    bool operator==(const StepPath& o) const = default;

private:
    std::vector<double> times_;
    std::vector<double> values_;
    double horizon_ = 0.0;
};

enum class Interpolation { step, linear };

struct GridPath {
    double step = 1.0;
    std::vector<double> values;  // values[k] at time k * step
    double horizon = 0.0;
    Interpolation interp = Interpolation::step;

    void validate() const;
    double value_at(double t) const;
    double node_time(std::size_t k) const { return static_cast<double>(k) * step; }
    // The path as a StepPath on the grid nodes up to the horizon.
    StepPath to_step() const;
};

struct JumpStats {
    double max_jump = 0.0;
    std::size_t count_above = 0;
    double sup_abs = 0.0;
};

double total_variation(const StepPath& path, double t);
JumpStats jump_stats(const StepPath& path, double t, double a);
double m1_modulus(const StepPath& path, double delta, double t);
std::size_t max_eps_increments(const StepPath& path, double eps, double t);
double avci_functional(const StepPath& x, const StepPath& y, double delta, double t);

// Union of breakpoints of both paths, sorted and deduplicated.
std::vector<double> merged_times(const StepPath& x, const StepPath& y);

void write_csv(const StepPath& path, std::ostream& os);
// Horizon defaults to the last time in the file.
StepPath read_csv(std::istream& is, std::optional<double> horizon = std::nullopt);

}  // namespace ctrwlab
