#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace ctrwlab {

struct SeedSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Substream tags. Each generator draws from its own lane so that, e.g., the
// waiting times of a CTRW do not depend on how many innovations were drawn.
enum class Lane : std::uint32_t {
    generic = 0,
    innovations = 1,
    waits = 2,
    subordinator = 3,
    levy = 4,
    aux = 5,
};

// Philox4x32-10 counter-based generator. Key = master seed, counter =
// (block, lane, stream). Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint32_t;

    explicit CounterRng(SeedSpec s, Lane lane = Lane::generic);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();
    // Uniform on the open interval (0, 1) with 53 random bits.
    double uniform_open();
    // Exp(1).
    double exponential();
    double normal();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int idx_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// S1 parametrisation (Samorodnitsky-Taqqu): ch.f. exp(-scale^a |u|^a (1 - i skew sgn(u) tan(pi a/2)) + i shift u).
struct StableParams {
    double alpha = 2.0;
    double skew = 0.0;
    double scale = 1.0;
    double shift = 0.0;

    void validate() const;
};

enum class InnovationMode { symmetric, centered, raw, gaussian };

// Pareto-tailed innovations: P(|theta / scale| > x) = x^-alpha for x >= 1.
struct InnovationLaw {
    double alpha = 1.5;
    InnovationMode mode = InnovationMode::symmetric;
    double scale = 1.0;

    void validate() const;
    // Mean of the raw Pareto magnitude, alpha/(alpha-1); used by centered mode.
    double pareto_mean() const;
    // Stable law of lim n^{-1/alpha} (theta_1 + ... + theta_n).
    StableParams limit_params() const;
};

struct WaitingLaw {
    double beta = 0.8;
    double scale = 1.0;

    void validate() const;
    // kappa in E exp(-s D_1) = exp(-kappa s^beta) for the subordinator limit.
    double laplace_coefficient() const;
};

// Draw helpers, used by the generators to sample inside a single stream.
double draw_stable(CounterRng& g, const StableParams& p);
double draw_innovation(CounterRng& g, const InnovationLaw& law);
double draw_waiting(CounterRng& g, const WaitingLaw& law);

std::vector<double> sample_stable(const StableParams& p, SeedSpec seed, std::size_t count);
std::vector<double> sample_innovation(const InnovationLaw& law, SeedSpec seed, std::size_t count);
std::vector<double> sample_waiting(const WaitingLaw& law, SeedSpec seed, std::size_t count);

const char* to_string(InnovationMode m);
InnovationMode innovation_mode_from_string(const std::string& s);

}  // namespace ctrwlab
