// Acceptance checks. Usage: acceptance [N ...]; no arguments runs all nine.
// Prints one PASS/FAIL line per criterion and exits 1 if any selected one fails.

#include "levychain/convergence_lab.hpp"
#include "levychain/density_engine.hpp"
#include "levychain/fixtures.hpp"
#include "levychain/generator.hpp"
#include "levychain/pricing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace levychain;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string join(const std::vector<double>& v, const char* f = "%.4g") {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(f, v[i]);
    return "(" + s + ")";
}

LatticeSpec spec(double h, double M, double tail_cut = 1e-10, int dim = 1) {
    LatticeSpec s;
    s.h = h;
    s.M = M;
    s.tail_cut = tail_cut;
    s.dim = dim;
    return s;
}

DensityTable chain_from_origin(const TruncatedGenerator& g, double t) {
    Index o{};
    return chain_distribution(g, t, std::span<const int32_t>(o.data(), g.dim()));
}

SweepReport gaussian_sweep() {
    static SweepReport rep = [] {
        Fixture f = gaussian_fixture();
        f.h_list = dyadic_steps(1, 6);
        f.window = 3.0;
        return run_sweep(f);
    }();
    return rep;
}

Outcome gaussian_order() {
    auto rep = gaussian_sweep();
    std::vector<double> e;
    for (const auto& p : rep.points) e.push_back(p.sup_error);
    return {rep.fit.median >= 1.75, "order " + fmt("%.3f", rep.fit.median) + " >= 1.75, errors " + join(e)};
}

Outcome gaussian_sharpness() {
    auto rep = gaussian_sweep();
    std::vector<double> q;
    bool ok = true;
    for (size_t i = rep.points.size() - 3; i < rep.points.size(); ++i) {
        const auto& p = rep.points[i];
        auto it = std::find_if(p.y.begin(), p.y.end(), [](double y) { return std::abs(y) < 1e-12; });
        size_t j = static_cast<size_t>(it - p.y.begin());
        double d = std::abs(p.exact[j] - p.approx[j]) / (p.h * p.h);
        q.push_back(d);
        ok = ok && d >= 0.02;
    }
    return {ok, "D(0,0)/h^2 on the three smallest h " + join(q) + " >= 0.02"};
}

Outcome stable_rates() {
    // Orders on h = 1, 1/2, 1/4, 1/8; the alpha = 5/3 ratio band on h = 2^-2 .. 2^-7.
    bool ok = true;
    std::string detail;
    for (double alpha : {0.5, 4.0 / 3.0, 5.0 / 3.0}) {
        Fixture f = alpha_stable_fixture(alpha);
        f.h_list = dyadic_steps(0, 3);
        auto rep = run_sweep(f);
        double target = std::min(2.0 - alpha, 1.0);
        bool in = std::abs(rep.fit.median - target) <= 0.2;
        ok = ok && in;
        detail += "alpha=" + fmt("%.3g", alpha) + " order " + fmt("%.3f", rep.fit.median) + " (target " +
                  fmt("%.3f", target) + ")" + (in ? "" : " OUT") + "; ";
    }
    Fixture f = alpha_stable_fixture(5.0 / 3.0);
    f.h_list = dyadic_steps(2, 7);
    auto rep = run_sweep(f);
    std::vector<double> ratios;
    for (size_t i = 1; i < rep.points.size(); ++i) {
        double r = rep.points[i].sup_error / rep.points[i - 1].sup_error;
        ratios.push_back(r);
        ok = ok && r >= 0.72 && r <= 0.88;
    }
    detail += "alpha=5/3 ratios " + join(ratios, "%.3f") + " in [0.72, 0.88]";
    return {ok, detail};
}

Outcome vg_closed_form() {
    Fixture f = vg_fixture();
    std::vector<double> hs = dyadic_steps(0, 3), errs;
    for (double h : hs) {
        TruncatedGenerator g(f.model, spec(h, 5.0, f.tail_cut), f.scheme);
        auto d = chain_from_origin(g, 1.0);
        double worst = 0.0;
        for (size_t i = 0; i < d.points.size(); ++i) {
            double y = d.coordinate(i, 0);
            if (y < -1e-12 || y > 1.0 + 1e-12) continue;
            worst = std::max(worst, std::abs(d.values[i] - std::exp(-std::abs(y)) / 2.0));
        }
        errs.push_back(worst);
    }
    double order = fit_order(hs, errs).median;
    bool sup_ok = errs.back() <= 0.02, order_ok = order >= 0.75;
    return {sup_ok && order_ok, "max error on [0,1] " + join(errs) + "; h=1/8 value " + fmt("%.4f", errs.back()) +
                                    (sup_ok ? " <= 0.02" : " > 0.02 FAILS") + "; order " + fmt("%.3f", order) +
                                    (order_ok ? " >= 0.75" : " < 0.75 FAILS")};
}

Outcome deficits() {
    Fixture f = gaussian_drift_fixture();
    const std::vector<double> paper{5.9e-4, 1.5e-4, 5.8e-5, 4.4e-5};
    std::vector<double> got;
    bool ok = true;
    for (int n = 0; n <= 3; ++n) {
        TruncatedGenerator g(f.model, spec(std::ldexp(1.0, -n), 5.0), f.scheme);
        double d = chain_from_origin(g, 1.0).deficit;
        got.push_back(d);
        ok = ok && std::abs(d - paper[n]) <= 0.2 * paper[n];
    }
    return {ok, "deficits " + join(got) + " vs " + join(paper) + " within 20%"};
}

Outcome cgmy_table() {
    CgmyParams p;
    const std::vector<double> strikes{80, 100, 120}, ref{1.7444, 6.3711, 21.1855}, row6{-0.0184, 0.0347, -0.0384};
    auto q6 = price_european_puts(p, 100.0, 0.04, 0.25, strikes, std::ldexp(1.0, -6));
    auto q9 = price_european_puts(p, 100.0, 0.04, 0.25, strikes, std::ldexp(1.0, -9));
    std::vector<double> e6, e9;
    bool ok = true;
    for (size_t i = 0; i < 3; ++i) {
        e6.push_back(q6[i].price - ref[i]);
        e9.push_back(q9[i].price - ref[i]);
        ok = ok && std::abs(e6[i] - row6[i]) <= 0.02 && std::abs(e9[i]) <= 0.006;
    }
    return {ok, "n=6 errors " + join(e6) + " vs " + join(row6) + " (+-0.02); n=9 errors " + join(e9) + " (<= 0.006)"};
}

Outcome route_equivalence() {
    bool ok = true;
    double worst_slack = INFINITY;
    int checked = 0;
    std::string failures;
    for (const Fixture& f : fixtures()) {
        for (size_t hi : {size_t(0), f.h_list.size() / 2}) {
            LatticeSpec s = spec(f.h_list[hi], 5.0, f.tail_cut);
            auto w = build_weights(f.model, s);
            TruncatedGenerator gen(f.model, w, f.scheme, s.M);
            auto chain = chain_from_origin(gen, f.t);
            DiscreteExponent psih(f.model, w, f.scheme);
            GridOptions g;
            g.window = gen.half_width();
            auto torus = discrete_density_grid(psih, f.t, g);
            // interior: the inner half of the box
            double worst = 0.0;
            for (size_t i = 0; i < torus.values.size(); ++i) {
                if (2 * std::abs(torus.points[i][0]) > gen.half_width()) continue;
                worst = std::max(worst, std::abs(torus.values[i] - chain.values[i]));
            }
            int32_t zero = 0;
            double quad = discrete_density_fourier(psih, f.t, std::span<const int32_t>(&zero, 1),
                                                   std::span<const int32_t>(&zero, 1));
            worst = std::max(worst, std::abs(quad - chain.at(std::span<const int32_t>(&zero, 1))));
            double bound = chain.deficit + 1e-8;
            worst_slack = std::min(worst_slack, bound - worst);
            ++checked;
            if (worst > bound) {
                ok = false;
                failures += " " + f.name + "@" + fmt("%.4g", s.h);
            }
        }
    }
    return {ok, std::to_string(checked) + " (fixture, h) pairs, min slack " + fmt("%.3g", worst_slack) +
                    (failures.empty() ? "" : "; violations:" + failures)};
}

Outcome invariants() {
    long checks = 0, violations = 0;
    std::ostringstream where;
    auto expect = [&](bool cond, const std::string& what) {
        ++checks;
        if (!cond) {
            if (violations < 5) where << " " << what;
            ++violations;
        }
    };
    const double four_over_pi2 = 4.0 / (std::numbers::pi * std::numbers::pi);

    for (const Fixture& f : fixtures()) {
        SmallJumpFunctionals fn(f.model);
        double hs = h_star(f.model, f.scheme);
        for (double h : f.h_list) {
            if (!(h < hs)) continue;
            LatticeSpec s = spec(h, 5.0, f.tail_cut);
            auto w = build_weights(f.model, s);
            TruncatedGenerator gen(f.model, w, f.scheme, s.M);
            double rate = gen.max_exit_rate();
            for (const auto& e : gen.stencil()) expect(e.rate >= 0.0, f.name + " off-diagonal");
            for (size_t i = 0; i < gen.size(); ++i) {
                double r = gen.row_sum(i);
                expect(r <= 1e-12 * rate, f.name + " row sum > 0");
                if (gen.is_interior(i)) expect(std::abs(r) <= 1e-12 * rate, f.name + " interior row sum");
            }

            DiscreteExponent psih(f.model, w, f.scheme);
            expect(std::abs(psih(0.0)) == 0.0, f.name + " psi_h(0)");
            const double pmax = std::numbers::pi / h;
            for (int i = -400; i <= 400; ++i) {
                double p = pmax * i / 400.0;
                Complex v = psih(p);
                expect(v.real() <= 1e-12 * std::max(1.0, rate), f.name + " Re psi_h > 0");
                if (fn.sigma2_min() > 0.0)
                    expect(-v.real() >= 0.5 * four_over_pi2 * fn.sigma2_min() * p * p * (1.0 - 1e-12),
                           f.name + " discrete coercivity");
            }
        }
    }

    // Envelopes of the exponent error parts on an (h, p) grid.
    LevyModel cp;
    cp.name = "cp_offgrid";
    cp.sigma2 = {1.0};
    cp.mu = {0.3};
    cp.cutoff_V = 0;
    cp.measure = LevyMeasure::atomic(1, {{{0.37}, 0.8}, {{-1.21}, 0.4}, {{2.9}, 0.25}});
    const double cp_mass = 1.45;
    Fixture two = cp_two_atoms_fixture();
    for (int k = 1; k <= 8; ++k) {
        double h = std::ldexp(1.0, -k);
        for (int i = -60; i <= 60; ++i) {
            double p = 0.25 * i;
            double ap = std::abs(p);
            double fh = f_h(h, p);
            expect(fh >= -1e-12 && fh <= std::pow(p, 4) * h * h / 24.0 * (1.0 + 1e-9) + 1e-12, "f_h envelope");
            Complex g1 = g_h_centred(h, p);
            double ig = (Complex(0.0, 1.0) * g1).real() * (p < 0 ? -1.0 : 1.0);
            expect(ig >= -1e-12 && ig <= h * h * ap * ap * ap / 6.0 * (1.0 + 1e-9) + 1e-12, "g_h scheme 1 envelope");
            for (double res : {1.0, -1.0})
                expect(std::abs(g_h_one_sided(h, p, res)) <= h * p * p / 2.0 * (1.0 + 1e-9) + 1e-12,
                       "g_h scheme 2 envelope");
            for (auto [m, mass] : {std::pair<const LevyModel*, double>{&cp, cp_mass}, {&two.model, 1.0}}) {
                if (!(h < h_star(*m, SchemeKind::Scheme1))) continue;
                DiscreteExponent psih(*m, build_weights(*m, spec(h, 5.0)), SchemeKind::Scheme1);
                auto parts = psi_error_decomposition(*m, psih, p);
                expect(std::abs(parts.l) <= mass * ap * h / 2.0 * (1.0 + 1e-9) + 1e-12, "l_h envelope");
            }
        }
    }
    // Off-diagonals stay nonnegative right below h_star and turn negative above it.
    Fixture gd = gaussian_drift_fixture();
    double hs = h_star(gd.model, gd.scheme);
    TruncatedGenerator below(gd.model, spec(0.999 * hs, 5.0), gd.scheme);
    for (const auto& e : below.stencil()) expect(e.rate >= 0.0, "off-diagonal below h_star");
    bool refused = false;
    try {
        TruncatedGenerator above(gd.model, spec(1.01 * hs, 5.0), gd.scheme);
    } catch (const std::exception&) {
        refused = true;
    }
    expect(refused, "generator above h_star accepted");

    return {violations == 0, std::to_string(checks) + " checks, " + std::to_string(violations) + " violations" +
                                 where.str()};
}

Outcome multivariate_smoke() {
    LevyModel m;
    m.name = "bm2";
    m.dim = 2;
    m.sigma2 = {1.0, 1.0};
    m.mu = {0.0, 0.0};
    m.measure = LevyMeasure::zero(2);
    m.cutoff_V = 0;
    const double target = 1.0 / (2.0 * std::numbers::pi);
    std::vector<double> hs = dyadic_steps(1, 5), vals, errs, scaled;
    for (double h : hs) {
        auto w = build_weights(m, spec(h, 4.0, 1e-10, 2));
        DiscreteExponent psih(m, w, SchemeKind::Multivariate);
        GridOptions g;
        g.window = 0;
        double v = discrete_density_grid(psih, 1.0, g).values[0];
        vals.push_back(v);
        errs.push_back(std::abs(v - target));
        scaled.push_back(errs.back() / (h * h));
    }
    double order = fit_order(hs, errs).median;
    double spread = *std::max_element(scaled.begin(), scaled.end()) / *std::min_element(scaled.begin(), scaled.end());
    bool ok = order >= 1.75 && spread <= 1.5;
    return {ok, "(1/h^2) P(0,0) " + join(vals, "%.5f") + " -> " + fmt("%.5f", target) + "; error/h^2 " +
                    join(scaled, "%.4f") + "; order " + fmt("%.3f", order) + " >= 1.75"};
}

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "Gaussian order 2", 30, gaussian_order},
        {2, "Gaussian sharpness floor", 30, gaussian_sharpness},
        {3, "alpha-stable rates", 300, stable_rates},
        {4, "VG closed form", 120, vg_closed_form},
        {5, "deficit reproduction", 120, deficits},
        {6, "CGMY put table", 600, cgmy_table},
        {7, "route equivalence", 300, route_equivalence},
        {8, "invariant suite", 60, invariants},
        {9, "multivariate smoke", 300, multivariate_smoke},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!pick.empty() && !pick.count(c.id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs <= c.budget_s;
        bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("criterion %d %s: %s | %s | %.1fs (budget %.0fs%s)\n", c.id, c.title, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
