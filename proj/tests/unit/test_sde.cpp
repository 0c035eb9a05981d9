#include <cmath>

#include "ctrwlab/error.hpp"
#include "ctrwlab/sde.hpp"
#include "ctrwlab/stats.hpp"
#include "doctest.h"

using namespace ctrwlab;

namespace {

constexpr double kRel = 1e-12;

ProcessConfig ctrw_cfg(std::int64_t n) {
    ProcessConfig cfg;
    cfg.innovation = {1.5, InnovationMode::symmetric, 1.0};
    cfg.waiting = WaitingLaw{0.8, 1.0};
    cfg.n = n;
    return cfg;
}

ProcessConfig ma_cfg(std::int64_t n) {
    ProcessConfig cfg;
    cfg.innovation = {1.5, InnovationMode::centered, 1.0};
    cfg.coefficients = {1.0, 0.5};
    cfg.n = n;
    return cfg;
}

StepPath d_of(const SimulationBundle& b) {
    return build_counting(b.waits, b.config.n, b.config.waiting->beta, b.horizon).d_path;
}

bool close(double a, double b) { return std::abs(a - b) <= kRel * (1.0 + std::abs(a) + std::abs(b)); }

// Compare on the union of both breakpoint sets and the points between them.
template <class F>
void check_path(const StepPath& x, F expected, double upto) {
    for (double t : x.times()) {
        if (t > upto) break;
        CAPTURE(t);
        CHECK(close(x(t), expected(t)));
    }
}

SdeSpec full_sde() {
    SdeSpec s;
    s.b = coef3(Expr::parse("0.5*tanh(y)"));
    s.mu = coef3(Expr::parse("0.2"));
    s.sigma = coef3(Expr::parse("1/(1+y^2)"));
    s.cert = GrowthCertificate{1.0, 1.0, 0.5, 10.0};
    return s;
}

GridPath coarsen(const GridPath& g) {
    GridPath c{2.0 * g.step, {}, g.horizon, g.interp};
    for (std::size_t k = 0; k < g.values.size(); k += 2) c.values.push_back(g.values[k]);
    return c;
}

// x'(t) = x(t - r), x = 1 on [-r, 0]
double steps_oracle(double t, double r) {
    double acc = 0.0, fact = 1.0;
    const int kmax = static_cast<int>(std::floor(t / r)) + 1;
    for (int j = 0; j <= kmax; ++j) {
        if (j > 0) fact *= j;
        const double u = t - (j - 1) * r;
        if (u <= 0.0 && j > 0) break;
        acc += std::pow(u, j) / fact;
    }
    return acc;
}

}  // namespace

TEST_CASE("method-of-steps oracle sanity") {
    CHECK(steps_oracle(0.3, 0.5) == doctest::Approx(1.3));
    CHECK(steps_oracle(0.75, 0.5) == doctest::Approx(1.75 + 0.125 * 0.25));
}

TEST_CASE("(S_n) pure-jump reductions are exact") {
    const auto bundle = gen_ctrw(ctrw_cfg(200), 1.0, {11, 0});
    const StepPath d = d_of(bundle);
    REQUIRE(bundle.events() > 3);
    SdeSpec s;
    s.x0 = 0.7;
    s.sigma = [](double, double, double) { return 1.0; };
    const auto a = solve_sn(s, bundle, default_mesh(1.0));
    check_path(a.x, [&](double t) { return 0.7 + bundle.x(t); }, 1.0);
    check_path(bundle.x, [&](double t) { return a.x(t) - 0.7; }, 1.0);

    SdeSpec m;
    m.x0 = -1.0;
    m.mu = [](double, double, double) { return 1.0; };
    const auto b = solve_sn(m, d, bundle.x, default_mesh(1.0));
    check_path(b.x, [&](double t) { return -1.0 + d(t); }, 1.0);
    check_path(d, [&](double t) { return b.x(t) + 1.0; }, 1.0);
}

TEST_CASE("(S_n) drift-only ODE") {
    const auto bundle = gen_ctrw(ctrw_cfg(100), 2.0, {12, 0});
    SdeSpec s;
    s.x0 = 1.0;
    s.b = [](double, double, double) { return 1.0; };
    const double mesh = default_mesh(2.0);
    const auto r = solve_sn(s, bundle, mesh);
    for (int i = 0; i <= 1000; ++i) {
        const double t = 2.0 * i / 1000.0;
        CHECK(std::abs(r.x(t) - (1.0 + t)) <= mesh + 1e-12);
    }
    // b(t) = t: midpoint-in-time drift is exact for linear time dependence
    SdeSpec q;
    q.b = [](double t, double, double) { return t; };
    const auto r2 = solve_sn(q, bundle, mesh);
    CHECK(r2.x(2.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("(S_n) errors, warnings, determinism") {
    const auto bundle = gen_ctrw(ctrw_cfg(100), 1.0, {13, 0});
    SdeSpec s = full_sde();
    CHECK_THROWS_AS(solve_sn(s, bundle, 0.0), ParamError);
    CHECK_THROWS_AS(solve_sn(s, bundle, -1.0), ParamError);
    const StepPath other({0.0, 0.123456}, {0.0, 1.0}, 1.0);
    try {
        (void)solve_sn(s, d_of(bundle), other, 0.01);
        FAIL("accepted");
    } catch (const ShapeError& e) {
        CHECK(e.tag() == "DRIVER_MISMATCH");
    }
    const auto a = solve_sn(s, bundle, 1e-3);
    const auto b = solve_sn(s, bundle, 1e-3);
    CHECK(a.x == b.x);
    CHECK(a.warnings.empty());

    SdeSpec lin = full_sde();
    lin.sigma = [](double, double, double y) { return y; };
    lin.x0 = 50.0;
    const auto w = solve_sn(lin, bundle, 1e-3);
    CHECK_FALSE(w.warnings.empty());
    CHECK(w.warnings.front().rfind("GROWTH", 0) == 0);
}

TEST_CASE("(S) limit scheme") {
    SdeSpec s;
    s.x0 = 0.5;
    s.b = [](double t, double, double) { return t; };
    const double h = 1.0 / 1024.0;
    GridPath zero{h, std::vector<double>(1025, 0.0), 1.0, Interpolation::step};
    const auto x = solve_s_limit(s, zero, zero);
    for (std::size_t k = 0; k < x.values.size(); ++k) {
        const double t = x.node_time(k);
        CHECK(std::abs(x.values[k] - (0.5 + t * t / 2.0)) <= h * h * 1.0 + 1e-12);
    }

    const auto tc = gen_time_changed_levy(StableParams{1.5, 0.0, 1.0, 0.0}, SubordinatorSpec{0.8, 1.0}, 1.0, h,
                                          {14, 0});
    SdeSpec m;
    m.x0 = 2.0;
    m.mu = [](double, double, double) { return 1.0; };
    const auto y = solve_s_limit(m, tc.d_inv, tc.x);
    for (std::size_t k = 0; k < y.values.size(); ++k) CHECK(close(y.values[k], 2.0 + tc.d_inv.values[k]));

    GridPath short_grid = tc.x;
    short_grid.values.pop_back();
    short_grid.horizon -= h;
    CHECK_THROWS_AS(solve_s_limit(m, tc.d_inv, short_grid), ShapeError);
}

TEST_CASE("(S) terminal law is stable under mesh halving") {
    const SdeSpec s = full_sde();
    std::vector<double> fine, coarse;
    const double h = 1.0 / 512.0;
    for (std::uint64_t rep = 0; rep < 2000; ++rep) {
        const auto tc = gen_time_changed_levy(StableParams{1.5, 0.0, 1.0, 0.0}, SubordinatorSpec{0.8, 1.0}, 1.0, h,
                                              {15, rep});
        fine.push_back(solve_s_limit(s, tc.d_inv, tc.x).values.back());
        coarse.push_back(solve_s_limit(s, coarsen(tc.d_inv), coarsen(tc.x)).values.back());
    }
    CHECK(wasserstein1(SampleSet(fine), SampleSet(coarse)) <= 0.02);
}

TEST_CASE("(SD_n) reductions") {
    const auto bundle = gen_moving_average(ma_cfg(200), 2.0, {16, 0});
    const double c = 1.5, r = 0.5;
    {
        auto spec = make_sdde(nullptr, [](double, double x) { return x; }, r, 1.0, c);
        const auto x = solve_sddn(spec, bundle.x, default_mesh(2.0)).x;
        check_path(x, [&](double t) { return 1.0 + bundle.x(t) / c; }, r);
    }
    {
        auto spec = make_sdde([](double, double x) { return x; }, nullptr, r, 1.0, c);
        const auto x = solve_sddn(spec, bundle.x, default_mesh(2.0)).x;
        check_path(x, [&](double t) { return 1.0 + t; }, r);
        const double mesh = default_mesh(2.0);
        for (int i = 0; i <= 400; ++i) {
            const double t = 2.0 * i / 400.0;
            CHECK(std::abs(x(t) - steps_oracle(t, r)) <= mesh * std::exp(2.0));
        }
    }
    {
        auto spec = make_sdde(nullptr, [](double, double) { return 1.0; }, r, 0.25, c);
        const auto x = solve_sddn(spec, bundle.x, default_mesh(2.0)).x;
        check_path(x, [&](double t) { return 0.25 + bundle.x(t) / c; }, 2.0);
        check_path(bundle.x, [&](double t) { return (x(t) - 0.25) * c; }, 2.0);
    }
    CHECK_THROWS_AS(make_sdde(nullptr, nullptr, 0.0, 1.0), ParamError);
    CHECK_THROWS_AS(make_sdde(nullptr, nullptr, -1.0, 1.0), ParamError);
    auto bad = make_sdde(nullptr, nullptr, r, 1.0);
    bad.r = 0.0;
    CHECK_THROWS_AS(solve_sddn(bad, bundle.x, 0.01), ParamError);
}

TEST_CASE("(SD_n) delay causality") {
    const auto bundle = gen_moving_average(ma_cfg(300), 1.0, {17, 0});
    const double r = 0.5, eps = 0.2;
    auto spec = make_sdde(nullptr, [](double, double x) { return std::cos(x); }, r, 0.3, 1.5);
    spec.b = [](double, double x) { return std::sin(x); };
    auto mod = spec;
    // change eta on (-r + eps, 0) only
    mod.eta = StepPath({0.0, eps + 0.01, r - 0.01}, {0.3, -4.0, 0.3}, r);
    const auto a = solve_sddn(spec, bundle.x, default_mesh(1.0)).x;
    const auto b = solve_sddn(mod, bundle.x, default_mesh(1.0)).x;
    for (int i = 0; i <= 1000; ++i) {
        const double t = eps * i / 1000.0;
        CHECK(close(a(t), b(t)));
    }
    CHECK(std::abs(a(1.0) - b(1.0)) > 1e-6);
    CHECK(a == solve_sddn(spec, bundle.x, default_mesh(1.0)).x);
}

TEST_CASE("extended SDDE") {
    const auto bundle = gen_moving_average(ma_cfg(200), 1.0, {18, 0});
    const double c = 1.5, r = 0.5;
    auto spec = make_sdde([](double, double x) { return std::sin(x); }, [](double, double x) { return std::cos(x); },
                          r, 0.0, c);
    CHECK_THROWS_AS(solve_ext_sddn(spec, bundle.x, 0.01), ParamError);
    spec.phi = [](double, double, double) { return 0.0; };
    CHECK(solve_ext_sddn(spec, bundle.x, 0.01).x == solve_sddn(spec, bundle.x, 0.01).x);

    auto one = make_sdde(nullptr, nullptr, r, 0.0, c);
    one.phi = [](double, double, double) { return 1.0; };
    const auto x = solve_ext_sddn(one, bundle.x, 0.01).x;
    check_path(x, [&](double t) { return r * bundle.x(t) / c; }, 1.0);

    auto ident = make_sdde(nullptr, nullptr, r, 1.0, c);
    ident.phi = [](double, double, double x) { return x; };
    const auto y = solve_ext_sddn(ident, bundle.x, 0.01).x;
    const double t1 = bundle.event_time(1);
    REQUIRE(t1 <= r);
    CHECK(close(y(t1) - 1.0, r * (bundle.x(t1) - bundle.x.left_limit(t1)) / c));
}

TEST_CASE("(SD) limit scheme") {
    const double r = 0.5;
    for (int m : {16, 64, 256}) {
        const double h = r / m;
        GridPath zero{h, std::vector<double>(static_cast<std::size_t>(2.0 / h) + 1, 0.0), 2.0, Interpolation::step};
        auto spec = make_sdde([](double, double x) { return x; }, nullptr, r, 1.0);
        const auto x = solve_sdd_limit(spec, zero);
        double err = 0.0;
        for (std::size_t k = 0; k < x.values.size(); ++k)
            err = std::max(err, std::abs(x.values[k] - steps_oracle(x.node_time(k), r)));
        CAPTURE(m);
        CHECK(err <= h * std::exp(2.0));
    }
    const auto z = gen_levy(StableParams{1.5, 0.0, 1.0, 0.0}, 1.0, 1.0 / 1024.0, {19, 0});
    auto unit = make_sdde(nullptr, [](double, double) { return 1.0; }, r, 0.4, 1.5);
    const auto x = solve_sdd_limit(unit, z);
    for (std::size_t k = 0; k < x.values.size(); ++k) CHECK(close(x.values[k], 0.4 + z.values[k]));

    auto odd = make_sdde(nullptr, nullptr, 0.3, 0.0);
    try {
        (void)solve_sdd_limit(odd, z);
        FAIL("accepted");
    } catch (const ParamError& e) {
        CHECK(e.tag() == "PARAM_DELAY_GRID");
    }
}

TEST_CASE("(SD) terminal law is stable under mesh halving") {
    auto spec = make_sdde([](double, double x) { return std::sin(x); }, [](double, double x) { return std::cos(x); },
                          0.5, 0.0);
    std::vector<double> fine, coarse;
    for (std::uint64_t rep = 0; rep < 2000; ++rep) {
        const auto z = gen_levy(StableParams{1.5, 0.0, 1.0, 0.0}, 1.0, 1.0 / 512.0, {20, rep});
        fine.push_back(solve_sdd_limit(spec, z).values.back());
        coarse.push_back(solve_sdd_limit(spec, coarsen(z)).values.back());
    }
    CHECK(wasserstein1(SampleSet(fine), SampleSet(coarse)) <= 0.02);
}

TEST_CASE("certificate spot checks") {
    SdeSpec s = full_sde();
    CHECK(s.check_growth(1.0).empty());
    s.b = [](double, double, double y) { return y; };
    const auto w = s.check_growth(1.0);
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("b at") != std::string::npos);
    s.cert->p = 1.0;
    CHECK_THROWS_AS(s.check_growth(1.0), ParamError);

    auto d = make_sdde([](double, double x) { return std::sin(x); }, [](double, double x) { return std::cos(x); },
                       0.5, 0.0);
    CHECK(d.check_bounded(1.0, 1.0).empty());
    d.sigma = [](double, double x) { return x; };
    CHECK(d.check_bounded(1.0, 1.0).size() == 1);
}
