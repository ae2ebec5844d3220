#pragma once

#include "levychain/discretization.hpp"
#include "levychain/generator.hpp"

#include <functional>
#include <string>
#include <vector>

namespace levychain {

enum class Route { FourierExact, FourierDiscrete, Expm };
std::string to_string(Route r);

/// Lattice-indexed density or normalised mass values (mass / h^d).
struct DensityTable {
    int dim = 1;
    double t = 0.0;
    double h = 0.0;
    double M = 0.0;
    Route route = Route::FourierDiscrete;
    double deficit = 0.0;   // probability lost to killing (expm route)
    double quad_tol = 0.0;  // achieved tolerance estimate
    std::vector<Index> points;
    std::vector<double> values;

    double coordinate(size_t i, int j) const { return points[i][j] * h; }
    /// Value at lattice index k; throws std::out_of_range if absent.
    double at(std::span<const int32_t> k) const;
    /// h^d * sum of values.
    double total_mass() const;
};

/// p_t(x, y) by Fourier inversion of exp(t Psi). Falls back to the model's
/// closed-form reference density when no coercivity bound exists; otherwise
/// throws NoDensityGuarantee.
double exact_density(const LevyModel& model, double t, std::span<const double> x, std::span<const double> y,
                     double tol = 1e-10);
/// p_t(0, z) for many z at once (d = 1); exp(t Psi) is evaluated once per node.
std::vector<double> exact_density_batch(const LevyModel& model, double t, const std::vector<double>& z,
                                        double tol = 1e-10, double* achieved = nullptr);

/// (1/h^d) P^h_t(x, y) for lattice indices x, y by adaptive quadrature of the
/// spectral integral over [-pi/h, pi/h]^d.
double discrete_density_fourier(const DiscreteExponent& psih, double t, std::span<const int32_t> x,
                                std::span<const int32_t> y, double tol = 1e-10);

struct GridOptions {
    double tol = 1e-9;          // accept when values change by less than tol on doubling
    int32_t window = 0;         // half-width of the returned table, in cells
    int max_log2_points = 22;   // total torus points cap (2^cap)
    int min_log2_points = 10;
};

/// (1/h^d) P^h_t(0, k) for |k|_inf <= window via FFT on a periodic torus. The
/// torus is doubled until the window values settle.
DensityTable discrete_density_grid(const DiscreteExponent& psih, double t, const GridOptions& opt);

/// Row of exp(t Q) for the truncated generator started at `start`, computed as
/// exp(t Q^T) 1_start. Values are mass / h^d; deficit = 1 - total mass.
DensityTable chain_distribution(const TruncatedGenerator& gen, double t, std::span<const int32_t> start,
                                double tol = 1e-10);
/// Propagates an existing mass vector (values * h^d) by time s.
DensityTable propagate(const TruncatedGenerator& gen, const DensityTable& from, double s, double tol = 1e-10);

using Payoff = std::function<double(std::span<const double>)>;

/// Integral of f(y) p_t(0, y) dy (d = 1); the window grows until the boundary
/// density is below tol times the peak.
double expectation_exact(const LevyModel& model, double t, const Payoff& f, double tol = 1e-8);
/// Sum of f(y) P(X_t = y) over the table; killed paths pay nothing.
double expectation_discrete(const DensityTable& table, const Payoff& f);

}  // namespace levychain
