#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "ctrwlab/cadlag.hpp"
#include "ctrwlab/error.hpp"
#include "ctrwlab/processes.hpp"
#include "ctrwlab/stats.hpp"
#include "doctest.h"

using namespace ctrwlab;

namespace {

ProcessConfig ma(double alpha, InnovationMode mode, std::vector<double> c, std::int64_t n) {
    ProcessConfig cfg;
    cfg.innovation = {alpha, mode, 1.0};
    cfg.coefficients = std::move(c);
    cfg.n = n;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    auto c = ma(1.5, InnovationMode::symmetric, {0.0, 1.0}, 10);
    CHECK_THROWS_AS(c.validate(), ParamError);
    c = ma(1.5, InnovationMode::symmetric, {1.0, -0.5}, 10);
    CHECK_THROWS_AS(c.validate(), ParamError);
    c = ma(1.5, InnovationMode::symmetric, {1.0, 0.5}, 10);
    c.coupling = Coupling::magnitude_coupled;
    c.waiting = WaitingLaw{0.8, 1.0};
    CHECK_THROWS_AS(c.validate(), ParamError);
    c = ma(2.5, InnovationMode::symmetric, {1.0}, 10);
    CHECK_THROWS_AS(c.validate(), ParamError);
    CHECK(ma(1.5, InnovationMode::symmetric, {1.0, 0.5, 0.25}, 1).psi() == 1.75);
}

TEST_CASE("moving average from injected innovations") {
    auto cfg = ma(1.0, InnovationMode::symmetric, {1.0, 0.5}, 1);
    // theta_{-1}, theta_0, theta_1, theta_2
    const auto b = build_moving_average(cfg, 2.0, {0.0, -1.0, 3.0, 1.0});
    REQUIRE(b.x.size() == 3);
    CHECK(b.x.times()[1] == 1.0);
    CHECK(b.x.times()[2] == 2.0);
    CHECK(b.x.values()[1] == 2.5);
    CHECK(b.x.values()[2] == 5.0);
    CHECK(b.zeta(1) == 2.5);
    CHECK(b.zeta(2) == 2.5);
    const auto z = build_moving_average(ma(1.5, InnovationMode::symmetric, {1.0, 0.5}, 10), 1.0,
                                        std::vector<double>(20, 0.0));
    CHECK(total_variation(z.x, 1.0) == 0.0);
    CHECK_THROWS_AS(build_moving_average(cfg, 2.0, {0.0, 1.0}), DataError);
}

TEST_CASE("moving average reproduces from its records") {
    auto cfg = ma(1.5, InnovationMode::centered, {1.0, 0.5, 0.25}, 100);
    const auto b = gen_moving_average(cfg, 1.0, {3, 4});
    CHECK(b.x.size() == 101);
    CHECK(b.innovations.size() == 3 + 100);
    const auto r = build_moving_average(cfg, 1.0, b.innovations);
    CHECK(r.x == b.x);
    CHECK(gen_moving_average(cfg, 1.0, {3, 4}).x == b.x);
    CHECK(!(gen_moving_average(cfg, 1.0, {3, 5}).x == b.x));
}

TEST_CASE("Gaussian moving average obeys the CLT") {
    auto cfg = ma(2.0, InnovationMode::gaussian, {1.0}, 10000);
    std::vector<double> x;
    for (std::uint64_t r = 0; r < 10000; ++r) x.push_back(gen_moving_average(cfg, 1.0, {8, r}).x(1.0));
    std::sort(x.begin(), x.end());
    // One-sample KS against the limit N(0, 1) (S2 with scale 1/sqrt 2).
    boost::math::normal_distribution<double> nd(0.0, 1.0);
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = boost::math::cdf(nd, x[i]);
        d = std::max({d, std::abs(F - double(i) / x.size()), std::abs(F - double(i + 1) / x.size())});
    }
    CHECK(d <= 0.02);
}

TEST_CASE("CTRW counting and jump times") {
    auto cfg = ma(1.5, InnovationMode::symmetric, {1.0}, 1);
    cfg.waiting = WaitingLaw{0.8, 1.0};
    const auto b = build_ctrw(cfg, 2.0, {0.0, 1.0, 2.0, 3.0, 4.0}, {0.5, 1.2, 0.3, 5.0});
    CHECK(b.events() == 3);
    CHECK(b.counting(2.0) == 3.0);
    CHECK(b.x(0.49) == 0.0);
    CHECK(b.event_time(2) == doctest::Approx(1.7));
    const auto c = build_counting({0.5, 1.2, 0.3, 5.0}, 1, 0.8, 2.0);
    CHECK(c.n_path(2.0) == 3.0);
    CHECK(c.d_path(0.0) == 0.0);
}

TEST_CASE("counting process with unit waits") {
    const auto c = build_counting(std::vector<double>(10, 1.0), 4, 0.7, 1.0);
    for (double t : {0.0, 0.1, 0.25, 0.3, 0.5, 0.74, 0.75, 0.99, 1.0}) CHECK(c.n_path(t) == std::floor(4 * t));
    const auto g = gen_counting({0.7, 1.0}, 1000, 1.0, {1, 2});
    CHECK(g.d_path(0.0) == 0.0);
    CHECK(g.d_path.values().back() == doctest::Approx(g.n_path.values().back() * std::pow(1000.0, -0.7)));
}

TEST_CASE("CTRW generator: records, determinism, coupling") {
    auto cfg = ma(1.5, InnovationMode::symmetric, {1.0, 0.5}, 1000);
    cfg.waiting = WaitingLaw{0.8, 1.0};
    const auto b = gen_ctrw(cfg, 1.0, {5, 6});
    const auto r = build_ctrw(cfg, 1.0, b.innovations, b.waits);
    CHECK(r.x == b.x);
    CHECK(r.counting == b.counting);
    CHECK(b.innovations.size() == b.events() + 2);
    CHECK(b.x(0.0) == 0.0);

    auto cc = ma(1.5, InnovationMode::symmetric, {1.0}, 1000);
    cc.waiting = WaitingLaw{0.8, 1.0};
    cc.coupling = Coupling::magnitude_coupled;
    const auto k = gen_ctrw(cc, 1.0, {5, 6});
    for (std::size_t i = 1; i <= k.events(); ++i)
        CHECK(k.waits[i - 1] == doctest::Approx(std::max(1.0, std::pow(std::abs(k.theta(i)), 1.5 / 0.8))));
    CHECK(build_ctrw(cc, 1.0, k.innovations, k.waits).x == k.x);
}

TEST_CASE("CTRW with unit waits and beta = 1 equals the moving average") {
    auto cfg = ma(1.5, InnovationMode::centered, {1.0, 0.5, 0.2}, 500);
    const auto m = gen_moving_average(cfg, 1.0, {9, 9});
    const auto c = build_ctrw(cfg, 1.0, m.innovations, std::vector<double>(600, 1.0), 1.0);
    CHECK(c.x == m.x);
    CHECK(c.counting == m.counting);
}

TEST_CASE("subordinator inverse on injected paths") {
    GridPath d{0.2, {0.0, 0.0, 1.5}, 0.4, Interpolation::step};
    const auto inv = generalized_inverse(d, 1.0, 0.25);
    CHECK(inv.values[0] == doctest::Approx(0.4));
    CHECK(inv.values.back() == doctest::Approx(0.4));
    GridPath stair{0.1, {0.0, 0.05, 0.3, 0.31, 0.7, 0.9, 1.2, 1.4}, 0.7, Interpolation::step};
    const auto si = generalized_inverse(stair, 1.0, 0.01);
    for (std::size_t k = 0; k < stair.values.size(); ++k) {
        if (stair.values[k] > 1.0) continue;
        CHECK(si.value_at(stair.values[k]) >= stair.node_time(k));
    }
    GridPath id{0.01, {}, 2.0, Interpolation::linear};
    for (int k = 0; k <= 200; ++k) id.values.push_back(k * 0.01);
    const auto ii = generalized_inverse(id, 1.0, 0.01);
    for (std::size_t j = 0; j < ii.values.size(); ++j) CHECK(ii.values[j] == doctest::Approx(j * 0.01));
    CHECK_THROWS_AS(generalized_inverse(GridPath{0.1, {0.0, 0.5}, 0.1, Interpolation::step}, 1.0, 0.1), DataError);
}

TEST_CASE("subordinator generator") {
    const auto sp = gen_subordinator_inverse({0.6, 1.0}, 1.0, 1.0 / 1024, {2, 0});
    CHECK(sp.d.values.back() > 1.0);
    for (std::size_t k = 1; k < sp.d.values.size(); ++k) CHECK(sp.d.values[k] >= sp.d.values[k - 1]);
    for (std::size_t k = 1; k < sp.d_inv.values.size(); ++k) CHECK(sp.d_inv.values[k] >= sp.d_inv.values[k - 1]);
    CHECK_THROWS_AS(gen_subordinator_inverse({1.2, 1.0}, 1.0, 0.01, {1, 0}), ParamError);
}

TEST_CASE("mean of the inverse subordinator at t = 1") {
    // Closed form E D^{-1}_1 = 1 / Gamma(1 + beta) for kappa = 1, checked
    // against the exact single-time representation (1 / D_1)^beta.
    const double beta = 0.6;
    const SubordinatorSpec sub{beta, 1.0};
    const int reps = 4000;
    std::vector<double> grid, direct;
    const auto d1 = sample_stable(sub.unit_law(), {77, 0}, reps);
    for (int r = 0; r < reps; ++r) {
        grid.push_back(gen_subordinator_inverse(sub, 1.0, 1.0 / 1024, {78, std::uint64_t(r)}).d_inv.values.back());
        direct.push_back(std::pow(1.0 / d1[r], beta));
    }
    const double closed = 1.0 / std::tgamma(1.0 + beta);
    const auto mg = mean_ci(grid), md = mean_ci(direct);
    CHECK(std::abs(md.estimate - closed) < 3 * standard_error(direct));
    CHECK(std::abs(mg.estimate - closed) < 3 * standard_error(grid) + 1.0 / 1024);
}

TEST_CASE("time-changed Levy path") {
    GridPath z{0.01, {}, 2.0, Interpolation::step};
    for (int k = 0; k <= 200; ++k) z.values.push_back(std::sin(0.37 * k));
    GridPath id{0.01, {}, 2.0, Interpolation::linear};
    for (int k = 0; k <= 200; ++k) id.values.push_back(k * 0.01);
    const auto x = compose_time_change(z, generalized_inverse(id, 1.0, 0.01));
    for (std::size_t j = 0; j < x.values.size(); ++j) CHECK(x.values[j] == z.values[j]);
    const auto tc = gen_time_changed_levy({1.5, 0.0, 1.0, 0.0}, {0.8, 1.0}, 1.0, 1.0 / 512, {4, 4});
    CHECK(tc.x.values[0] == 0.0);
    const auto sp = gen_subordinator_inverse({0.8, 1.0}, 1.0, 1.0 / 512, {4, 4});
    CHECK(sp.d_inv.values == tc.d_inv.values);
}

TEST_CASE("Gaussian time change matches two-stage conditional simulation") {
    const SubordinatorSpec sub{0.7, 1.0};
    const StableParams z1{2.0, 0.0, 1.0, 0.0};
    const int reps = 4000;
    std::vector<double> a, b;
    const auto d1 = sample_stable(sub.unit_law(), {90, 0}, reps);
    CounterRng g({90, 1});
    for (int r = 0; r < reps; ++r) {
        a.push_back(gen_time_changed_levy(z1, sub, 1.0, 1.0 / 1024, {91, std::uint64_t(r)}).x.values.back());
        const double e = std::pow(1.0 / d1[r], sub.beta);
        b.push_back(std::sqrt(2.0 * e) * g.normal());
    }
    CHECK(ks_two_sample(SampleSet(a), SampleSet(b)).statistic <= 0.03);
}

TEST_CASE("M1-not-J1 signature of correlated moving averages") {
    auto median_w = [](std::vector<double> c, std::int64_t n) {
        auto cfg = ma(1.5, InnovationMode::symmetric, std::move(c), n);
        std::vector<double> w;
        for (std::uint64_t r = 0; r < 200; ++r) {
            const auto b = gen_moving_average(cfg, 1.0, {33, r});
            w.push_back(avci_functional(b.x, b.x, 2.0 / n, 1.0));
        }
        return quantile(w, 0.5);
    };
    const double c100 = median_w({1.0, 1.0}, 100), c3 = median_w({1.0, 1.0}, 3000);
    const double u100 = median_w({1.0, 0.0}, 100), u3 = median_w({1.0, 0.0}, 3000);
    CHECK(c3 > 0.5 * c100);
    CHECK(c3 > 0.3);
    CHECK(u3 < 0.5 * u100);
}
