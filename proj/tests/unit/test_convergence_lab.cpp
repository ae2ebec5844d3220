#include "doctest.h"
#include "models.hpp"

#include "levychain/convergence_lab.hpp"

#include <cmath>

using namespace levychain;

TEST_CASE("fit_order examples") {
    auto a = fit_order({1.0, 0.5, 0.25}, {1.0, 0.25, 1.0 / 16.0});
    CHECK(a.median == doctest::Approx(2.0));
    CHECK(a.slope == doctest::Approx(2.0));
    CHECK(a.r2 == doctest::Approx(1.0));
    auto b = fit_order({1.0, 0.5, 0.25}, {1.0, 0.5, 0.25});
    CHECK(b.median == doctest::Approx(1.0));
    auto z = fit_order({1.0, 0.5, 0.25}, {1.0, 0.0, 0.0});
    CHECK(std::isinf(z.median));
    CHECK_THROWS(fit_order({1.0, 0.5}, {1.0, 0.5}));
}

TEST_CASE("rate envelopes") {
    auto g = gaussian_fixture();
    CHECK(rate_envelope(g, 0.25) == doctest::Approx(1.0 / 16.0));
    auto v = vg_fixture();
    CHECK(rate_envelope(v, 0.25) == doctest::Approx(0.25));
    auto s = alpha_stable_fixture(4.0 / 3.0);
    SmallJumpFunctionals fn(s.model);
    CHECK(rate_envelope(s, 0.25) == doctest::Approx(0.25 * fn.kappa(0.125)));
}

TEST_CASE("fixture catalogue") {
    auto all = fixtures();
    CHECK(all.size() == 11);
    for (const auto& f : all) {
        INFO(f.name);
        CHECK_NOTHROW(validate_model(f.model));
        for (size_t i = 1; i < f.h_list.size(); ++i) CHECK(f.h_list[i] < f.h_list[i - 1]);
        CHECK(fixture_by_name(f.name).name == f.name);
    }
    CHECK(fixture_by_name("alpha_stable:1.5").model.orey_epsilon.value() == doctest::Approx(1.5));
    CHECK_THROWS_AS(fixture_by_name("nope"), ModelError);
    CHECK(triadic_steps(1, 3) == std::vector<double>{1.0 / 3.0, 1.0 / 9.0, 1.0 / 27.0});
}

TEST_CASE("Gaussian sup error small sweep") {
    auto f = gaussian_fixture();
    f.h_list = dyadic_steps(1, 4);
    auto rep = run_sweep(f);
    CHECK(rep.points.size() == 4);
    for (const auto& p : rep.points) CHECK(p.sup_error >= 0.0);
    CHECK(rep.fit.median > 1.75);
    CHECK(rep.pass);
}

TEST_CASE("a wrong expected order fails the gate") {
    auto f = vg_fixture();
    f.order = ExpectedOrder::Quadratic;
    auto rep = run_sweep(f);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("characteristic exponent sweep") {
    auto m = stable_model(0.5);
    std::vector<double> grid{0.0, 0.5, 1.5, 3.0};
    // hp stays below pi/2, away from the lattice Nyquist edge
    auto rows = char_exponent_sweep(m, {0.5, 0.25, 0.125, 0.0625}, SchemeKind::Scheme2, grid, 1e-3);
    REQUIRE(rows.size() == 16);
    CHECK(std::abs(rows[0].psi) == 0.0);
    CHECK(std::abs(rows[0].psi_h) == 0.0);
    for (size_t j = 1; j < grid.size(); ++j) {
        for (size_t i = 1; i < 4; ++i) {
            CHECK(rows[i * grid.size() + j].p == grid[j]);
            CHECK(rows[i * grid.size() + j].abs_error <= rows[(i - 1) * grid.size() + j].abs_error);
        }
    }
}

TEST_CASE("VG expectation rate for a truncated call-type payoff") {
    auto f = vg_fixture();
    auto payoff = [](std::span<const double> x) { return std::min(std::max(std::exp(x[0]) - 1.0, 0.0), 10.0); };
    auto errs = expectation_errors(f, payoff, 10.0);
    REQUIRE(errs.size() == f.h_list.size());
    auto fit = fit_order(f.h_list, errs);
    CHECK(fit.median >= 0.75);
}
