#pragma once

#include "levychain/levy_model.hpp"

namespace levychain {

/// Symmetric stable density c |x|^{-1-alpha}, alpha in (0, 2).
LevyMeasure stable_measure(double alpha, double c = 1.0);
/// Pure-jump symmetric stable model (scheme 2 setting: V = 1, Orey with eps = alpha).
LevyModel stable_model(double alpha, double c = 1.0);

/// Variance gamma density e^{-|x|/s} / |x|.
LevyMeasure vg_measure(double scale = 1.0);
/// Pure-jump VG model with V = 1 and its closed-form transition density.
LevyModel vg_model(double scale = 1.0);
/// Density of s (G1 - G2), G1, G2 iid Gamma(t, 1).
double vg_density(double t, double x, double scale = 1.0);

struct CgmyParams {
    double c = 0.5;
    double lambda_plus = 3.5;
    double lambda_minus = 2.0;
    double alpha = 0.5;
};

/// Tempered stable density c e^{-lambda_+ x} x^{-1-alpha} (x > 0) and
/// c e^{-lambda_- |x|} |x|^{-1-alpha} (x < 0), alpha in (0, 2) \ {1}.
LevyMeasure cgmy_measure(const CgmyParams& p);
/// Pure-jump CGMY model with V = 1 and drift mu.
LevyModel cgmy_model(const CgmyParams& p, double mu);
/// Closed-form jump part of the log moment generating function under cut-off V
/// (finite for -lambda_- < u < lambda_+).
double cgmy_jump_log_mgf(const CgmyParams& p, double u, int cutoff_V);

/// Upper incomplete gamma function for any real s (x > 0), by recurrence for s <= 0.
double upper_gamma(double s, double x);

}  // namespace levychain
