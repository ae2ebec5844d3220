#include "levychain/expm.hpp"

#include "levychain/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace levychain {

std::vector<double> expm_action(const RateOperator& Q, std::span<const double> v, double t, double tol,
                                bool transpose, ExpmStats* stats) {
    if (!(t >= 0.0)) throw std::invalid_argument("expm_action: t must be >= 0");
    if (v.size() != Q.size()) throw std::invalid_argument("expm_action: vector size does not match operator");
    std::vector<double> x(v.begin(), v.end());
    const double q = Q.max_exit_rate();
    if (t == 0.0 || q == 0.0) return x;
    const double qt = q * t;
    if (!std::isfinite(qt) || qt > 1e9) {
        std::ostringstream msg;
        msg << "expm_action: q t = " << qt << " is too large; rescale time or coarsen h";
        throw NumericalError(msg.str(), qt);
    }
    const int steps = static_cast<int>(std::ceil(qt / 30.0));
    const double lam = qt / steps;
    const double step_tol = tol / steps;
    const size_t n = x.size();
    std::vector<double> w(n), qw(n), acc(n);
    ExpmStats st;
    st.steps = steps;
    for (int s = 0; s < steps; ++s) {
        w = x;
        double weight = std::exp(-lam);
        double cum = weight;
        for (size_t i = 0; i < n; ++i) acc[i] = weight * w[i];
        for (int k = 1; 1.0 - cum > step_tol; ++k) {
            Q.apply(w, qw, transpose);
            ++st.matvecs;
            for (size_t i = 0; i < n; ++i) w[i] += qw[i] / q;
            weight *= lam / k;
            cum += weight;
            for (size_t i = 0; i < n; ++i) acc[i] += weight * w[i];
            if (k > 10000) throw NumericalError("expm_action: Poisson series did not terminate", 1.0 - cum);
        }
        st.truncation_bound += std::max(0.0, 1.0 - cum);
        x.swap(acc);
    }
    if (stats) *stats = st;
    return x;
}

}  // namespace levychain
