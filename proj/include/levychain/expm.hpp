#pragma once

#include "levychain/generator.hpp"

#include <span>
#include <vector>

namespace levychain {

struct ExpmStats {
    int steps = 0;
    int matvecs = 0;
    double truncation_bound = 0.0;  // Poisson tail mass dropped, summed over steps
};

/// exp(t Q) v (or exp(t Q^T) v) by uniformisation: with q >= max exit rate and
/// P = I + Q/q, the series sum_k Pois(k; q tau) P^k v is summed over steps with
/// q tau <= 30 until the Poisson tail falls below tol/steps. Only mat-vecs are
/// used, and P >= 0 entrywise, so nonnegative inputs give nonnegative outputs.
std::vector<double> expm_action(const RateOperator& Q, std::span<const double> v, double t, double tol = 1e-10,
                                bool transpose = false, ExpmStats* stats = nullptr);

}  // namespace levychain
