#pragma once

#include "levychain/discretization.hpp"
#include "levychain/families.hpp"

#include <string>
#include <vector>

namespace levychain {

/// Convergence class of sup |p - (1/h^d) P^h| for a fixture.
enum class ExpectedOrder { Quadratic, Linear, KappaRate, ZetaRate };

std::string to_string(ExpectedOrder o);
ExpectedOrder expected_order_from_string(const std::string& s);

struct Fixture {
    std::string name;
    LevyModel model;
    SchemeKind scheme = SchemeKind::Scheme1;
    ExpectedOrder order = ExpectedOrder::Linear;
    std::vector<double> h_list;  // strictly decreasing
    double t = 1.0;
    double window = 3.0;      // |y| <= window for sup errors
    double tail_cut = 1e-10;  // weight enumeration cut
};

/// Rate envelope for the fixture at step h: h^2, h, h kappa(h/2) or
/// max(h, zeta(h/2) + chi(h/2)).
double rate_envelope(const Fixture& f, double h);

/// Number of atoms kept from the infinite atomic series.
constexpr int kAtomTerms = 40;

Fixture gaussian_fixture();
/// sigma^2 = mu = 1, no jumps, V = 0, scheme 1.
Fixture gaussian_drift_fixture();
/// sigma^2 = 1, lambda = (delta_{1/2} + delta_{-1/2}) / 2.
Fixture cp_two_atoms_fixture();
/// sigma^2 = 1, lambda = (delta_{3/2} + delta_{-3/2}) / 2 + sum_k (delta_{3^-k} + delta_{-3^-k}) / 2.
Fixture finite_variation_atomic_fixture();
/// sigma^2 = 1, atoms at +-x_n = +-(3/2) 3^-n with weight 1/x_n.
Fixture infinite_variation_atomic_fixture();
/// sigma^2 = 0, atoms at +-x_n with weight 1/(2 sqrt(x_n)); Orey with eps = 1/2.
Fixture orey_half_fixture();
Fixture alpha_stable_fixture(double alpha);
Fixture vg_fixture();
Fixture cgmy_fixture();

/// Every named fixture (stable at alpha = 1/2, 4/3, 5/3).
std::vector<Fixture> fixtures();
/// Looks up "gaussian", "alpha_stable:1.333", ... Throws ModelError when unknown.
Fixture fixture_by_name(const std::string& name);

std::vector<double> dyadic_steps(int kmin, int kmax);
std::vector<double> triadic_steps(int nmin, int nmax);

}  // namespace levychain
