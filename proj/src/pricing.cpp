#include "levychain/pricing.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>

namespace levychain {

double martingale_drift(const CgmyParams& p) {
    if (!(p.lambda_plus > 1.0)) throw ModelError("exponential moment absent: lambda_+ must exceed 1");
    // log_mgf(1) is affine in mu with unit slope, so a bracket around the
    // negated jump cumulant always contains the root.
    LevyModel m = cgmy_model(p, 0.0);
    const double jump = log_mgf(m, 1.0);
    auto f = [&](double mu) {
        m.mu[0] = mu;
        return log_mgf(m, 1.0);
    };
    boost::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    auto [lo, hi] = boost::math::tools::toms748_solve(f, -jump - 1.0, -jump + 1.0, tol, iters);
    return 0.5 * (lo + hi);
}

double pricing_truncation(double h) { return std::max(0.5 * std::log(1.0 / h), 1.0); }

std::vector<PutQuote> price_european_puts(const CgmyParams& p, double S0, double r, double T,
                                          const std::vector<double>& strikes, double h, double tol) {
    const LevyModel model = cgmy_model(p, martingale_drift(p));
    LatticeSpec spec;
    spec.h = h;
    spec.M = pricing_truncation(h);
    validate_spec(spec, model);
    TruncatedGenerator gen(model, spec, SchemeKind::Scheme2);
    const Index origin{};
    DensityTable tab = chain_distribution(gen, T, std::span<const int32_t>(origin.data(), 1), tol);
    std::vector<PutQuote> out;
    for (double K : strikes) {
        double e = expectation_discrete(tab, [&](std::span<const double> x) {
            return std::max(K - S0 * std::exp(r * T + x[0]), 0.0);
        });
        out.push_back({std::exp(-r * T) * e, tab.deficit, h, gen.M(), gen.size()});
    }
    return out;
}

PutQuote price_european_put(const CgmyParams& p, double S0, double r, double T, double K, double h, double tol) {
    return price_european_puts(p, S0, r, T, {K}, h, tol)[0];
}

}  // namespace levychain
