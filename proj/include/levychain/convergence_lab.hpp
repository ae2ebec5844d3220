#pragma once

#include "levychain/density_engine.hpp"
#include "levychain/fixtures.hpp"

#include <limits>
#include <string>
#include <vector>

namespace levychain {

struct SweepPoint {
    double h = 0.0;
    double sup_error = 0.0;
    std::vector<double> y;       // lattice abscissae in the window
    std::vector<double> exact;   // p_t(0, y)
    std::vector<double> approx;  // (1/h) P^h_t(0, y)
    double zeta = 0.0;           // zeta(h/2)
    double kappa = 0.0;          // kappa(h/2)
    double elapsed = 0.0;        // seconds (not written to CSV)
};

struct OrderFit {
    double median = std::numeric_limits<double>::quiet_NaN();  // median of successive log ratios
    double slope = std::numeric_limits<double>::quiet_NaN();   // least-squares slope of log e on log h
    double r2 = std::numeric_limits<double>::quiet_NaN();
};

/// Orders from errors e_k at steps h_k: log(e_k/e_{k+1}) / log(h_k/h_{k+1}).
/// Needs at least three points; any zero error gives +inf.
OrderFit fit_order(const std::vector<double>& h, const std::vector<double>& errors);

struct SweepReport {
    std::string fixture;
    double t = 1.0;
    std::vector<SweepPoint> points;
    OrderFit fit;
    double expected = 0.0;  // fitted order of the rate envelope on the same steps
    double slack = 0.25;
    bool pass = false;
};

struct SweepOptions {
    double tol = 1e-10;      // exact density tolerance
    double grid_tol = 1e-11; // torus doubling tolerance
    bool parallel = true;
};

/// max over lattice y with |y| <= window of |p_t(0,y) - (1/h) P^h_t(0,y)| (d = 1);
/// the chain values come from the periodic FFT route.
double sup_error(const LevyModel& model, const LatticeSpec& spec, SchemeKind scheme, double t, double window,
                 const SweepOptions& opt = {}, SweepPoint* detail = nullptr);

/// Sup-error sweep over the fixture's steps, with the order gate applied.
SweepReport run_sweep(const Fixture& f, const SweepOptions& opt = {});

struct PsiRow {
    double h = 0.0;
    double p = 0.0;
    Complex psi;
    Complex psi_h;
    double abs_error = 0.0;
};

/// |Psi^h - Psi| on a p grid for every h (Psi and Psi^h side by side).
std::vector<PsiRow> char_exponent_sweep(const LevyModel& model, const std::vector<double>& h_list, SchemeKind scheme,
                                        const std::vector<double>& p_grid, double tail_cut = 1e-10);

/// |E f(X_t) - E f(X^h_t)| for each h, the chain side summed on a wide torus window.
std::vector<double> expectation_errors(const Fixture& f, const Payoff& payoff, double payoff_window,
                                       double tol = 1e-9);

}  // namespace levychain
