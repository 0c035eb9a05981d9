#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctrwlab/cadlag.hpp"
#include "ctrwlab/expr.hpp"
#include "ctrwlab/processes.hpp"

namespace ctrwlab {

// b(t, ytilde, y); ytilde is the time-change coordinate (D^n or D^{-1}).
using Coef3 = std::function<double(double t, double ytilde, double y)>;
// b(t, x_delayed)
using Coef2 = std::function<double(double t, double xdel)>;
// Phi(t, s, x)
using Kernel = std::function<double(double t, double s, double x)>;

Coef3 coef3(const Expr& e);  // variables t, ytilde, y
Coef2 coef2(const Expr& e);  // variables t, xdel
Kernel kernel(const Expr& e);  // variables t, s, y

// sup_{t <= T, |ytilde| <= R} |coef| <= K |y|^p + C
struct GrowthCertificate {
    double K = 1.0;
    double C = 1.0;
    double p = 0.5;
    double R = 10.0;

    void validate() const;
    bool admits(double value, double ytilde, double y) const;
};

struct SdeSpec {
    Coef3 b, mu, sigma;  // empty means identically 0
    double x0 = 0.0;
    std::optional<GrowthCertificate> cert;

    // Spot check of the certificate on a sample grid; one warning per coefficient.
    std::vector<std::string> check_growth(double T) const;
};

struct SddeSpec {
    Coef2 b, sigma;
    double r = 1.0;
    // eta(u) for u in [-r, 0], stored shifted: eta(u) = eta_path(u + r).
    StepPath eta = StepPath::constant(0.0, 1.0);
    // Sum of the moving-average coefficients of the driver.
    double c = 1.0;
    // Extended form: sigma + int_{t-r}^t Phi(t, s, X_s) ds.
    Kernel phi;
    double phi_bound = 0.0;
    double phi_lipschitz = 0.0;

    void validate() const;
    double eta_at(double u) const;
    double eta_left(double u) const;
    // sup |b| v |sigma| spot check over a sample grid with the given bound.
    std::vector<std::string> check_bounded(double T, double bound) const;
};

SddeSpec make_sdde(Coef2 b, Coef2 sigma, double r, double eta_const, double c = 1.0);

struct SolverResult {
    StepPath x;
    std::vector<std::string> warnings;
};

inline double default_mesh(double T) { return T / 4096.0; }

// (S_n): event-driven. D^n = n^{-beta} N_{n.} and Z^n jump at the same times.
SolverResult solve_sn(const SdeSpec& spec, const StepPath& d, const StepPath& z, double mesh);
SolverResult solve_sn(const SdeSpec& spec, const SimulationBundle& driver, double mesh);

// (S): left-point Euler on the common grid of D^{-1} and Z_{D^{-1}}.
GridPath solve_s_limit(const SdeSpec& spec, const GridPath& d_inv, const GridPath& z_tc);

// (SD_n) and its extended form (used when spec.phi is set).
SolverResult solve_sddn(const SddeSpec& spec, const StepPath& z, double mesh);
SolverResult solve_ext_sddn(const SddeSpec& spec, const StepPath& z, double mesh);

// (SD) with limit driver Z; the grid step must divide r.
GridPath solve_sdd_limit(const SddeSpec& spec, const GridPath& z);

}  // namespace ctrwlab
