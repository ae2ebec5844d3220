#include "doctest.h"
#include "models.hpp"

#include "levychain/discretization.hpp"
#include "levychain/fixtures.hpp"
#include "levychain/generator.hpp"

#include <boost/math/special_functions/expint.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace levychain;
using namespace testing_models;

namespace {

double stencil_rate(const TruncatedGenerator& g, int32_t k) {
    double r = 0.0;
    for (const auto& e : g.stencil())
        if (e.k[0] == k) r += e.rate;
    return r;
}

double jump_weight(const CellWeights& w, int32_t k) {
    for (const auto& j : w.jumps)
        if (j.k[0] == k) return j.rate;
    return 0.0;
}

LatticeSpec spec_for(double h, double M = 5.0, double tail_cut = 1e-10) {
    LatticeSpec s;
    s.h = h;
    s.M = M;
    s.tail_cut = tail_cut;
    return s;
}

}  // namespace

TEST_CASE("cell conventions") {
    auto at = LevyMeasure::atomic(1, {{{0.5}, 0.5}, {{-0.5}, 0.5}});
    CHECK(cell_measure(at, 0, 1.0) == doctest::Approx(1.0));
    CHECK(cell_measure(at, 1, 0.5) == doctest::Approx(0.5));
    CHECK(cell_measure(at, -1, 0.5) == doctest::Approx(0.5));
    CHECK(cell_measure(at, 0, 0.5) == 0.0);
    auto zero = LevyMeasure::zero(1);
    for (int k = -3; k <= 3; ++k) CHECK(cell_measure(zero, k, 0.25) == 0.0);

    CHECK(cell_index(0.25, 0.5) == 0);
    CHECK(cell_index(0.26, 0.5) == 1);
    CHECK(cell_index(-0.25, 0.5) == 0);
    CHECK(cell_index(0.75, 0.5) == 1);
}

TEST_CASE("VG cell weight matches the exponential integral") {
    auto m = vg_model();
    auto w = build_weights(m, spec_for(0.5));
    using boost::math::expint;
    double oracle = -expint(-0.25) + expint(-0.75);  // E1(1/4) - E1(3/4)
    CHECK(jump_weight(w, 1) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(jump_weight(w, -1) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(w.mu_h[0] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("weights are nonnegative, symmetric and capture the finite mass") {
    for (const auto& f : fixtures()) {
        auto w = build_weights(f.model, spec_for(f.h_list.front(), 5.0, f.tail_cut));
        for (const auto& j : w.jumps) CHECK(j.rate >= 0.0);
        SmallJumpFunctionals fn(f.model);
        if (std::isfinite(fn.total_mass())) {
            INFO(f.name);
            CHECK(w.captured() <= w.outside_mass * (1.0 + 1e-12) + 1e-15);
            CHECK(w.outside_mass - w.captured() <= f.tail_cut * w.outside_mass + 1e-12);
        }
    }
    auto w = build_weights(stable_model(4.0 / 3.0), spec_for(0.25, 5.0, 1e-6));
    CHECK(w.mu_h[0] == 0.0);
    for (const auto& j : w.jumps) CHECK(jump_weight(w, -j.k[0]) == doctest::Approx(j.rate).epsilon(1e-12));

    auto z = build_weights(brownian(1.0, 0.0), spec_for(0.5));
    CHECK(z.jumps.empty());
    CHECK(z.c0[0] == 0.0);
    CHECK(z.mu_h[0] == 0.0);
}

TEST_CASE("h_star") {
    CHECK(h_star(brownian(1.0, 2.0), SchemeKind::Scheme1) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(h_star(brownian(1.0, 1.0), SchemeKind::Scheme1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::isinf(h_star(two_atoms(), SchemeKind::Scheme1)));
    CHECK(std::isinf(h_star(brownian(1.0, 2.0), SchemeKind::Scheme2)));
    CHECK(std::isinf(h_star(vg_model(), SchemeKind::Scheme2)));
    CHECK_THROWS_AS(h_star(brownian(0.0, 1.0), SchemeKind::Scheme1), ModelError);
}

TEST_CASE("psi_h examples") {
    auto m = brownian(1.0, 0.0);
    // sigma^2 (cos(hp) - 1) / h^2 at h = 1/2, p = pi
    CHECK(psi_h(m, spec_for(0.5), SchemeKind::Scheme1, std::numbers::pi).real() == doctest::Approx(-4.0));
    CHECK(std::abs(psi_h(m, spec_for(0.5), SchemeKind::Scheme1, 0.0)) == 0.0);
    auto st = stable_model(0.5);
    for (double p : {0.4, 1.3, 3.0}) CHECK(std::abs(psi_h(st, spec_for(0.25, 5.0, 1e-3), SchemeKind::Scheme2, p).imag()) < 1e-12);
}

TEST_CASE("generator stencils") {
    TruncatedGenerator g(brownian(1.0, 0.0), spec_for(0.5), SchemeKind::Scheme1);
    CHECK(stencil_rate(g, 1) == doctest::Approx(2.0));
    CHECK(stencil_rate(g, -1) == doctest::Approx(2.0));
    CHECK(g.diagonal() == doctest::Approx(-4.0));

    TruncatedGenerator ga(two_atoms(), spec_for(0.5), SchemeKind::Scheme1);
    CHECK(stencil_rate(ga, 1) == doctest::Approx(2.5));
    CHECK(stencil_rate(ga, -1) == doctest::Approx(2.5));
    CHECK(ga.diagonal() == doctest::Approx(-5.0));

    // row-major box, killed at the edge
    CHECK(g.size() == 21);
    int32_t k = 10;
    CHECK(g.index_of(std::span<const int32_t>(&k, 1)) == 20);
    CHECK(g.row_sum(0) < 0.0);
    CHECK(g.row_sum(10) == doctest::Approx(0.0));

    std::ostringstream os;
    g.export_coo(os);
    CHECK(os.str().find("# h=") != std::string::npos);
}

TEST_CASE("multivariate with d = 1 reduces to scheme 1 or 2") {
    for (const auto& f : fixtures()) {
        double h = f.h_list.back();
        LatticeSpec s = spec_for(h, 2.0, f.tail_cut);
        SmallJumpFunctionals fn(f.model);
        SchemeKind reduced = fn.sigma2_min() > 0.0 ? SchemeKind::Scheme1 : SchemeKind::Scheme2;
        if (reduced == SchemeKind::Scheme1 && !(h < h_star(f.model, reduced))) continue;
        TruncatedGenerator a(f.model, s, SchemeKind::Multivariate);
        TruncatedGenerator b(f.model, s, reduced);
        INFO(f.name);
        REQUIRE(a.stencil().size() == b.stencil().size());
        for (size_t i = 0; i < a.stencil().size(); ++i) {
            CHECK(a.stencil()[i].k == b.stencil()[i].k);
            CHECK(a.stencil()[i].rate == b.stencil()[i].rate);
        }
        CHECK(a.diagonal() == b.diagonal());
    }
}

TEST_CASE("psi error decomposition sums to psi_h - psi") {
    for (const auto& f : fixtures()) {
        double h = f.h_list[1];
        auto w = build_weights(f.model, spec_for(h, 5.0, f.tail_cut));
        DiscreteExponent ph(f.model, w, f.scheme);
        for (double p : {0.5, 1.0, 2.0, 4.0}) {
            auto parts = psi_error_decomposition(f.model, ph, p);
            Complex lhs = ph(p) - psi(f.model, p);
            Complex rhs = parts.sigma2_f + parts.mu_g + parts.l;
            INFO(f.name << " p=" << p);
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(psi(f.model, p))) + 2.0 * w.remainder);
        }
    }
    auto m = brownian(1.0, 1.0);
    auto w = build_weights(m, spec_for(0.25));
    DiscreteExponent ph(m, w, SchemeKind::Scheme1);
    CHECK(std::abs(psi_error_decomposition(m, ph, 1.7).l) < 1e-15);
}

TEST_CASE("exponent approaches psi along dyadic h") {
    for (auto f : {gaussian_fixture(), cp_two_atoms_fixture(), vg_fixture()}) {
        for (double p : {0.5, 1.0, 2.0, 4.0}) {
            double prev = INFINITY;
            for (int k = 1; k <= 6; ++k) {
                double h = std::ldexp(1.0, -k);
                double e = std::abs(psi_h(f.model, spec_for(h, 5.0, f.tail_cut), f.scheme, p) - psi(f.model, p));
                INFO(f.name << " p=" << p << " h=" << h);
                CHECK(e <= prev * (1.0 + 1e-9) + 1e-13);
                prev = e;
            }
        }
    }
}
