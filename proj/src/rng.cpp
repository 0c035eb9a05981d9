#include "ctrwlab/rng.hpp"

#include <cmath>
#include <numbers>

#include "ctrwlab/error.hpp"

namespace ctrwlab {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    for (int r = 0; r < 10; ++r) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kW0;
        k[1] += kW1;
    }
    return c;
}

constexpr double kPi = std::numbers::pi;

}  // namespace

CounterRng::CounterRng(SeedSpec s, Lane lane)
    : key_{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32)},
      ctr_{0u, static_cast<std::uint32_t>(lane), static_cast<std::uint32_t>(s.stream),
           static_cast<std::uint32_t>(s.stream >> 32)} {}

void CounterRng::refill() {
    buf_ = philox(ctr_, key_);
    ++ctr_[0];
    if (ctr_[0] == 0) throw DataError("RNG_EXHAUSTED", "counter block exhausted for this stream");
    idx_ = 0;
}

CounterRng::result_type CounterRng::operator()() {
    if (idx_ == 4) refill();
    return buf_[idx_++];
}

double CounterRng::uniform_open() {
    const std::uint64_t a = (*this)() >> 5;  // 27 bits
    const std::uint64_t b = (*this)() >> 6;  // 26 bits
    return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
}

double CounterRng::exponential() { return -std::log(uniform_open()); }

double CounterRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; both outputs used.
    const double u = uniform_open();
    const double v = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * kPi * v);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * v);
}

void StableParams::validate() const {
    detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 2.0, "PARAM_ALPHA_RANGE",
                    "stable alpha must lie in (0,2]");
    detail::require(std::isfinite(skew) && std::abs(skew) <= 1.0, "PARAM_SKEW_RANGE",
                    "stable skew must lie in [-1,1]");
    detail::require(std::isfinite(scale) && scale > 0.0, "PARAM_SCALE", "stable scale must be positive");
    detail::require(std::isfinite(shift), "PARAM_SHIFT", "stable shift must be finite");
}

void InnovationLaw::validate() const {
    detail::require(std::isfinite(scale) && scale > 0.0, "PARAM_SCALE", "innovation scale must be positive");
    if (mode == InnovationMode::gaussian) {
        detail::require(alpha == 2.0, "PARAM_ALPHA_RANGE", "gaussian innovations require alpha = 2");
        return;
    }
    detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha < 2.0, "PARAM_ALPHA_RANGE",
                    "Pareto innovations require alpha in (0,2); use mode gaussian for alpha = 2");
    if (mode == InnovationMode::centered)
        detail::require(alpha > 1.0, "PARAM_ALPHA_RANGE", "centered innovations need alpha > 1 (finite mean)");
}

double InnovationLaw::pareto_mean() const { return alpha > 1.0 ? alpha / (alpha - 1.0) : INFINITY; }

StableParams InnovationLaw::limit_params() const {
    validate();
    if (mode == InnovationMode::gaussian) return {2.0, 0.0, scale / std::sqrt(2.0), 0.0};
    if (mode == InnovationMode::raw && alpha >= 1.0)
        throw PreconditionError("PARAM_MODE", "raw innovations have no centred stable limit for alpha >= 1");
    // Tail weight 1 in total: sigma^alpha = Gamma(1-alpha) cos(pi alpha/2), pi/2 at alpha = 1.
    const double sa = alpha == 1.0 ? kPi / 2.0 : std::tgamma(1.0 - alpha) * std::cos(kPi * alpha / 2.0);
    const double skew = mode == InnovationMode::symmetric ? 0.0 : 1.0;
    return {alpha, skew, scale * std::pow(sa, 1.0 / alpha), 0.0};
}

void WaitingLaw::validate() const {
    detail::require(std::isfinite(beta) && beta > 0.0 && beta < 1.0, "PARAM_BETA_RANGE",
                    "waiting-time beta must lie in (0,1)");
    detail::require(std::isfinite(scale) && scale > 0.0, "PARAM_SCALE", "waiting scale must be positive");
}

double WaitingLaw::laplace_coefficient() const { return std::tgamma(1.0 - beta) * std::pow(scale, beta); }

double draw_stable(CounterRng& g, const StableParams& p) {
    // Chambers-Mallows-Stuck: V uniform on (-pi/2, pi/2), W ~ Exp(1).
    const double v = kPi * (g.uniform_open() - 0.5);
    const double w = g.exponential();
    const double a = p.alpha;
    const double b = p.skew;
    if (a == 1.0) {
        const double hb = kPi / 2.0 + b * v;
        const double x = (2.0 / kPi) * (hb * std::tan(v) - b * std::log((kPi / 2.0) * w * std::cos(v) / hb));
        return p.scale * x + (2.0 / kPi) * b * p.scale * std::log(p.scale) + p.shift;
    }
    const double t = b * std::tan(kPi * a / 2.0);
    const double B = std::atan(t) / a;
    const double S = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
    const double x = S * std::sin(a * (v + B)) / std::pow(std::cos(v), 1.0 / a) *
                     std::pow(std::cos(v - a * (v + B)) / w, (1.0 - a) / a);
    return p.scale * x + p.shift;
}

double draw_innovation(CounterRng& g, const InnovationLaw& law) {
    switch (law.mode) {
        case InnovationMode::gaussian:
            return law.scale * g.normal();
        case InnovationMode::symmetric: {
            const bool neg = (g() & 1u) != 0;
            const double p = std::pow(g.uniform_open(), -1.0 / law.alpha);
            return law.scale * (neg ? -p : p);
        }
        case InnovationMode::centered:
            return law.scale * (std::pow(g.uniform_open(), -1.0 / law.alpha) - law.pareto_mean());
        case InnovationMode::raw:
            return law.scale * std::pow(g.uniform_open(), -1.0 / law.alpha);
    }
    return 0.0;
}

double draw_waiting(CounterRng& g, const WaitingLaw& law) {
    return law.scale * std::pow(g.uniform_open(), -1.0 / law.beta);
}

std::vector<double> sample_stable(const StableParams& p, SeedSpec seed, std::size_t count) {
    p.validate();
    detail::require(count >= 1, "PARAM_COUNT", "count must be positive");
    CounterRng g(seed, Lane::generic);
    std::vector<double> out(count);
    for (auto& x : out) x = draw_stable(g, p);
    return out;
}

std::vector<double> sample_innovation(const InnovationLaw& law, SeedSpec seed, std::size_t count) {
    law.validate();
    detail::require(count >= 1, "PARAM_COUNT", "count must be positive");
    CounterRng g(seed, Lane::innovations);
    std::vector<double> out(count);
    for (auto& x : out) x = draw_innovation(g, law);
    return out;
}

std::vector<double> sample_waiting(const WaitingLaw& law, SeedSpec seed, std::size_t count) {
    law.validate();
    detail::require(count >= 1, "PARAM_COUNT", "count must be positive");
    CounterRng g(seed, Lane::waits);
    std::vector<double> out(count);
    for (auto& x : out) x = draw_waiting(g, law);
    return out;
}

const char* to_string(InnovationMode m) {
    switch (m) {
        case InnovationMode::symmetric: return "symmetric";
        case InnovationMode::centered: return "centered";
        case InnovationMode::raw: return "raw";
        case InnovationMode::gaussian: return "gaussian";
    }
    return "?";
}

InnovationMode innovation_mode_from_string(const std::string& s) {
    if (s == "symmetric") return InnovationMode::symmetric;
    if (s == "centered") return InnovationMode::centered;
    if (s == "raw") return InnovationMode::raw;
    if (s == "gaussian") return InnovationMode::gaussian;
    throw ParamError("PARAM_MODE", "unknown innovation mode '" + s + "'");
}

}  // namespace ctrwlab
