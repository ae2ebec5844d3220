#include "levychain/fixtures.hpp"

#include "levychain/pricing.hpp"

#include <cmath>
#include <sstream>

namespace levychain {

std::string to_string(ExpectedOrder o) {
    switch (o) {
        case ExpectedOrder::Quadratic: return "quadratic";
        case ExpectedOrder::Linear: return "linear";
        case ExpectedOrder::KappaRate: return "kappa_rate";
        case ExpectedOrder::ZetaRate: return "zeta_rate";
    }
    return "?";
}

ExpectedOrder expected_order_from_string(const std::string& s) {
    if (s == "quadratic" || s == "2") return ExpectedOrder::Quadratic;
    if (s == "linear" || s == "1") return ExpectedOrder::Linear;
    if (s == "kappa_rate") return ExpectedOrder::KappaRate;
    if (s == "zeta_rate") return ExpectedOrder::ZetaRate;
    throw ModelError("unknown expected order '" + s + "'");
}

double rate_envelope(const Fixture& f, double h) {
    SmallJumpFunctionals fn(f.model);
    switch (f.order) {
        case ExpectedOrder::Quadratic: return h * h;
        case ExpectedOrder::Linear: return h;
        case ExpectedOrder::KappaRate: {
            double k = fn.kappa(0.5 * h);
            return k > 0.0 ? h * k : h;
        }
        case ExpectedOrder::ZetaRate: return std::max(h, fn.zeta(0.5 * h) + fn.chi(0.5 * h));
    }
    return h;
}

std::vector<double> dyadic_steps(int kmin, int kmax) {
    std::vector<double> out;
    for (int k = kmin; k <= kmax; ++k) out.push_back(std::ldexp(1.0, -k));
    return out;
}

std::vector<double> triadic_steps(int nmin, int nmax) {
    std::vector<double> out;
    for (int n = nmin; n <= nmax; ++n) out.push_back(std::pow(3.0, -n));
    return out;
}

namespace {

LevyModel diffusion(const std::string& name, double sigma2, double mu, int V) {
    LevyModel m;
    m.name = name;
    m.dim = 1;
    m.sigma2 = {sigma2};
    m.mu = {mu};
    m.measure = LevyMeasure::zero(1);
    m.cutoff_V = V;
    return m;
}

void add_pair(std::vector<Atom>& atoms, double x, double w) {
    atoms.push_back({{x}, w});
    atoms.push_back({{-x}, w});
}

}  // namespace

Fixture gaussian_fixture() {
    Fixture f;
    f.name = "gaussian";
    f.model = diffusion("gaussian", 1.0, 0.0, 1);
    f.order = ExpectedOrder::Quadratic;
    f.h_list = dyadic_steps(1, 6);
    return f;
}

Fixture gaussian_drift_fixture() {
    Fixture f;
    f.name = "gaussian_drift";
    f.model = diffusion("gaussian_drift", 1.0, 1.0, 0);
    f.order = ExpectedOrder::Quadratic;
    f.h_list = dyadic_steps(1, 6);
    return f;
}

Fixture cp_two_atoms_fixture() {
    Fixture f;
    f.name = "cp_two_atoms";
    f.model = diffusion("cp_two_atoms", 1.0, 0.0, 0);
    std::vector<Atom> atoms;
    add_pair(atoms, 0.5, 0.5);
    f.model.measure = LevyMeasure::atomic(1, atoms);
    f.order = ExpectedOrder::Linear;
    f.h_list = triadic_steps(1, 5);
    return f;
}

Fixture finite_variation_atomic_fixture() {
    Fixture f;
    f.name = "finite_variation_atomic";
    f.model = diffusion("finite_variation_atomic", 1.0, 0.0, 1);
    std::vector<Atom> atoms;
    add_pair(atoms, 1.5, 0.5);
    for (int k = 1; k <= kAtomTerms; ++k) add_pair(atoms, std::pow(3.0, -k), 0.5);
    ClosedForms flags;
    flags.infinite_mass = true;
    f.model.measure = LevyMeasure::atomic(1, atoms, flags);
    f.order = ExpectedOrder::Linear;
    f.h_list = triadic_steps(1, 5);
    return f;
}

Fixture infinite_variation_atomic_fixture() {
    Fixture f;
    f.name = "infinite_variation_atomic";
    f.model = diffusion("infinite_variation_atomic", 1.0, 0.0, 1);
    std::vector<Atom> atoms;
    for (int n = 1; n <= kAtomTerms; ++n) {
        double x = 1.5 * std::pow(3.0, -n);
        add_pair(atoms, x, 1.0 / x);
    }
    ClosedForms flags;
    flags.infinite_mass = true;
    flags.infinite_variation = true;
    f.model.measure = LevyMeasure::atomic(1, atoms, flags);
    f.order = ExpectedOrder::KappaRate;
    f.h_list = triadic_steps(1, 5);
    return f;
}

Fixture orey_half_fixture() {
    Fixture f;
    f.name = "orey_half";
    f.model = diffusion("orey_half", 0.0, 0.0, 1);
    std::vector<Atom> atoms;
    for (int n = 1; n <= kAtomTerms; ++n) {
        double x = 1.5 * std::pow(3.0, -n);
        add_pair(atoms, x, 0.5 / std::sqrt(x));
    }
    ClosedForms flags;
    flags.infinite_mass = true;
    flags.infinite_variation = false;
    f.model.measure = LevyMeasure::atomic(1, atoms, flags);
    f.model.orey_epsilon = 0.5;
    f.scheme = SchemeKind::Scheme2;
    f.order = ExpectedOrder::Linear;
    f.h_list = triadic_steps(1, 5);
    return f;
}

Fixture alpha_stable_fixture(double alpha) {
    Fixture f;
    std::ostringstream name;
    name << "alpha_stable:" << alpha;
    f.name = name.str();
    f.model = stable_model(alpha);
    f.scheme = SchemeKind::Scheme2;
    f.order = ExpectedOrder::KappaRate;
    f.h_list = dyadic_steps(2, 7);
    // Heavy tails: the weight enumeration stops at a coarser relative cut.
    f.tail_cut = alpha < 1.0 ? 1e-3 : 1e-6;
    return f;
}

Fixture vg_fixture() {
    Fixture f;
    f.name = "vg";
    f.model = vg_model(1.0);
    f.scheme = SchemeKind::Scheme2;
    f.order = ExpectedOrder::Linear;
    f.h_list = dyadic_steps(0, 3);
    return f;
}

Fixture cgmy_fixture() {
    Fixture f;
    f.name = "cgmy";
    CgmyParams p;
    f.model = cgmy_model(p, martingale_drift(p));
    f.scheme = SchemeKind::Scheme2;
    f.order = ExpectedOrder::Linear;
    f.h_list = dyadic_steps(1, 6);
    f.t = 0.25;
    return f;
}

std::vector<Fixture> fixtures() {
    return {gaussian_fixture(),
            gaussian_drift_fixture(),
            cp_two_atoms_fixture(),
            finite_variation_atomic_fixture(),
            infinite_variation_atomic_fixture(),
            orey_half_fixture(),
            alpha_stable_fixture(0.5),
            alpha_stable_fixture(4.0 / 3.0),
            alpha_stable_fixture(5.0 / 3.0),
            vg_fixture(),
            cgmy_fixture()};
}

Fixture fixture_by_name(const std::string& name) {
    if (name.rfind("alpha_stable", 0) == 0) {
        auto colon = name.find(':');
        if (colon == std::string::npos) return alpha_stable_fixture(1.5);
        return alpha_stable_fixture(std::stod(name.substr(colon + 1)));
    }
    if (name == "gaussian") return gaussian_fixture();
    if (name == "gaussian_drift") return gaussian_drift_fixture();
    if (name == "cp_two_atoms") return cp_two_atoms_fixture();
    if (name == "finite_variation_atomic") return finite_variation_atomic_fixture();
    if (name == "infinite_variation_atomic") return infinite_variation_atomic_fixture();
    if (name == "orey_half") return orey_half_fixture();
    if (name == "vg") return vg_fixture();
    if (name == "cgmy") return cgmy_fixture();
    throw ModelError("unknown fixture '" + name + "'");
}

}  // namespace levychain
