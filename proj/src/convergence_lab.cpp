#include "levychain/convergence_lab.hpp"

#include "levychain/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

namespace levychain {

OrderFit fit_order(const std::vector<double>& h, const std::vector<double>& e) {
    if (h.size() != e.size()) throw std::invalid_argument("fit_order: size mismatch");
    if (h.size() < 3) throw std::invalid_argument("fit_order: need at least three sweep points");
    OrderFit fit;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (std::any_of(e.begin(), e.end(), [](double v) { return v == 0.0; })) {
        fit.median = fit.slope = inf;
        fit.r2 = 1.0;
        return fit;
    }
    std::vector<double> ratios;
    for (size_t k = 0; k + 1 < e.size(); ++k) ratios.push_back(std::log(e[k] / e[k + 1]) / std::log(h[k] / h[k + 1]));
    std::sort(ratios.begin(), ratios.end());
    size_t n = ratios.size();
    fit.median = n % 2 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double m = static_cast<double>(h.size());
    for (size_t k = 0; k < h.size(); ++k) {
        double x = std::log(h[k]), y = std::log(e[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    double cxx = sxx - sx * sx / m, cxy = sxy - sx * sy / m, cyy = syy - sy * sy / m;
    fit.slope = cxy / cxx;
    fit.r2 = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
    return fit;
}

double sup_error(const LevyModel& model, const LatticeSpec& spec, SchemeKind scheme, double t, double window,
                 const SweepOptions& opt, SweepPoint* detail) {
    if (model.dim != 1) throw std::logic_error("sup_error is one-dimensional");
    validate_spec(spec, model);
    auto start = std::chrono::steady_clock::now();
    DiscreteExponent psih(model, build_weights(model, spec), scheme);
    GridOptions g;
    g.tol = opt.grid_tol;
    g.window = static_cast<int32_t>(std::floor(window / spec.h + 1e-9));
    DensityTable tab = discrete_density_grid(psih, t, g);
    std::vector<double> y(tab.values.size());
    for (size_t i = 0; i < y.size(); ++i) y[i] = tab.coordinate(i, 0);
    auto exact = exact_density_batch(model, t, y, opt.tol);
    double sup = 0.0;
    for (size_t i = 0; i < y.size(); ++i) sup = std::max(sup, std::abs(exact[i] - tab.values[i]));
    if (detail) {
        SmallJumpFunctionals fn(model);
        detail->h = spec.h;
        detail->sup_error = sup;
        detail->y = y;
        detail->exact = exact;
        detail->approx = tab.values;
        detail->zeta = fn.zeta(0.5 * spec.h);
        detail->kappa = fn.kappa(0.5 * spec.h);
        detail->elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return sup;
}

SweepReport run_sweep(const Fixture& f, const SweepOptions& opt) {
    for (size_t i = 1; i < f.h_list.size(); ++i)
        if (!(f.h_list[i] < f.h_list[i - 1])) throw ModelError("sweep steps must be strictly decreasing");
    SweepReport rep;
    rep.fixture = f.name;
    rep.t = f.t;
    rep.points.resize(f.h_list.size());
    std::vector<std::exception_ptr> errors(f.h_list.size());
    auto one = [&](size_t i) {
        try {
            LatticeSpec spec;
            spec.h = f.h_list[i];
            spec.dim = f.model.dim;
            spec.M = std::max(f.window, spec.h);
            spec.tail_cut = f.tail_cut;
            sup_error(f.model, spec, f.scheme, f.t, f.window, opt, &rep.points[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (opt.parallel && num_threads() > 1) {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < f.h_list.size(); ++i) pool.emplace_back(one, i);
        for (auto& th : pool) th.join();
    } else {
        for (size_t i = 0; i < f.h_list.size(); ++i) one(i);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<double> errs, env;
    for (size_t i = 0; i < f.h_list.size(); ++i) {
        errs.push_back(rep.points[i].sup_error);
        env.push_back(rate_envelope(f, f.h_list[i]));
    }
    if (f.h_list.size() >= 3) {
        rep.fit = fit_order(f.h_list, errs);
        rep.expected = fit_order(f.h_list, env).median;
        rep.pass = rep.fit.median >= rep.expected - rep.slack;
    }
    return rep;
}

std::vector<PsiRow> char_exponent_sweep(const LevyModel& model, const std::vector<double>& h_list, SchemeKind scheme,
                                        const std::vector<double>& p_grid, double tail_cut) {
    std::vector<PsiRow> rows;
    for (double h : h_list) {
        LatticeSpec spec;
        spec.h = h;
        spec.dim = model.dim;
        spec.M = std::max(1.0, h);
        spec.tail_cut = tail_cut;
        validate_spec(spec, model);
        DiscreteExponent psih(model, build_weights(model, spec), scheme);
        for (double p : p_grid) {
            PsiRow r;
            r.h = h;
            r.p = p;
            r.psi = psi(model, p);
            r.psi_h = psih(p);
            r.abs_error = std::abs(r.psi_h - r.psi);
            rows.push_back(r);
        }
    }
    return rows;
}

std::vector<double> expectation_errors(const Fixture& f, const Payoff& payoff, double payoff_window, double tol) {
    const double exact = expectation_exact(f.model, f.t, payoff, tol);
    std::vector<double> out;
    for (double h : f.h_list) {
        LatticeSpec spec;
        spec.h = h;
        spec.dim = f.model.dim;
        spec.M = std::max(payoff_window, h);
        spec.tail_cut = f.tail_cut;
        validate_spec(spec, f.model);
        DiscreteExponent psih(f.model, build_weights(f.model, spec), f.scheme);
        GridOptions g;
        g.tol = tol;
        g.window = static_cast<int32_t>(std::floor(payoff_window / h + 1e-9));
        DensityTable tab = discrete_density_grid(psih, f.t, g);
        out.push_back(std::abs(expectation_discrete(tab, payoff) - exact));
    }
    return out;
}

}  // namespace levychain
