#pragma once

#include "levychain/density_engine.hpp"
#include "levychain/families.hpp"

namespace levychain {

/// Drift mu making E[e^{X_t}] = 1, i.e. mu + sigma2/2 + jump cumulant at 1 = 0.
/// Found by bracketed root finding on log_mgf(model, 1). Throws ModelError
/// "exponential moment absent" when lambda_+ <= 1.
double martingale_drift(const CgmyParams& p);

/// Truncation half-width M(h) = max(log(1/h) / 2, 1).
double pricing_truncation(double h);

struct PutQuote {
    double price = 0.0;
    double deficit = 0.0;
    double h = 0.0;
    double M = 0.0;
    size_t states = 0;
};

/// e^{-rT} E[(K - S0 e^{rT + X_T})^+] for the lattice chain (scheme 2, V = 1,
/// M = M(h)); killed paths pay nothing.
PutQuote price_european_put(const CgmyParams& p, double S0, double r, double T, double K, double h,
                            double tol = 1e-10);
/// Same payoff for several strikes, sharing one chain distribution.
std::vector<PutQuote> price_european_puts(const CgmyParams& p, double S0, double r, double T,
                                          const std::vector<double>& strikes, double h, double tol = 1e-10);

}  // namespace levychain
