#include "levychain/discretization.hpp"

#include "levychain/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace levychain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int32_t kMaxCellsPerSide = 1 << 21;

Box cube(int dim, double r) { return Box(static_cast<size_t>(dim), Interval::closed(-r, r)); }

Box intersect(const Box& a, const Box& b) {
    Box out(a.size());
    for (size_t j = 0; j < a.size(); ++j) out[j] = a[j].intersect(b[j]);
    return out;
}

// cos(x) - 1 without cancellation.
double cosm1(double x) {
    double s = std::sin(0.5 * x);
    return -2.0 * s * s;
}

// Calls fn(k) for every k in [-K, K]^d.
template <class Fn>
void for_each_index(int dim, int32_t K, Fn fn) {
    Index k{};
    for (int j = 0; j < dim; ++j) k[j] = -K;
    while (true) {
        fn(k);
        int j = dim - 1;
        while (j >= 0 && k[j] == K) k[j--] = -K;
        if (j < 0) return;
        ++k[j];
    }
}

bool is_zero_index(const Index& k, int dim) {
    for (int j = 0; j < dim; ++j)
        if (k[j] != 0) return false;
    return true;
}

// Lexicographically positive: first nonzero coordinate is positive.
bool is_positive_index(const Index& k, int dim) {
    for (int j = 0; j < dim; ++j)
        if (k[j] != 0) return k[j] > 0;
    return false;
}

struct LocalCoeffs {
    std::vector<double> c0;
    std::vector<double> mu_h;
};

LocalCoeffs local_coefficients(const LevyModel& model, double h) {
    const int d = model.dim;
    LocalCoeffs lc{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    const LevyMeasure& lam = model.measure;
    if (lam.is_zero()) return lc;
    const double V = model.cutoff_V;
    const Box cutbox = cube(d, V);
    Index zero{};
    const Box a0 = intersect(cell_box(std::span<const int32_t>(zero.data(), d), h), cutbox);
    for (int j = 0; j < d; ++j) lc.c0[j] = lam.coordinate_square(a0, j);
    if (V == 0.0) return lc;

    // Cells meeting [-V, V]^d; pairing k with -k keeps symmetric measures at exactly 0.
    const int32_t KV = static_cast<int32_t>(std::ceil(V / h + 0.5));
    for_each_index(d, KV, [&](const Index& k) {
        if (!is_positive_index(k, d)) return;
        Index neg{};
        for (int j = 0; j < d; ++j) neg[j] = -k[j];
        double mp = lam.mass(intersect(cell_box(std::span<const int32_t>(k.data(), d), h), cutbox));
        double mn = lam.mass(intersect(cell_box(std::span<const int32_t>(neg.data(), d), h), cutbox));
        double diff = mp - mn;
        if (diff == 0.0) return;
        for (int j = 0; j < d; ++j) lc.mu_h[j] += k[j] * h * diff;
    });
    return lc;
}

}  // namespace

std::string to_string(SchemeKind s) {
    switch (s) {
        case SchemeKind::Scheme1: return "scheme1";
        case SchemeKind::Scheme2: return "scheme2";
        case SchemeKind::Multivariate: return "multivariate";
    }
    return "?";
}

SchemeKind scheme_from_string(const std::string& s) {
    if (s == "scheme1" || s == "1") return SchemeKind::Scheme1;
    if (s == "scheme2" || s == "2") return SchemeKind::Scheme2;
    if (s == "multivariate") return SchemeKind::Multivariate;
    throw ModelError("unknown scheme '" + s + "' (expected scheme1, scheme2 or multivariate)");
}

void validate_spec(const LatticeSpec& spec, const LevyModel& model) {
    if (!(spec.h > 0.0) || !std::isfinite(spec.h)) throw ModelError("lattice step h must be positive");
    if (spec.dim != model.dim) throw ModelError("lattice dimension differs from model dimension");
    if (!(spec.M >= spec.h)) throw ModelError("truncation radius M must be >= h");
    if (!(spec.tail_cut > 0.0 && spec.tail_cut <= 1e-3)) throw ModelError("tail_cut must lie in (0, 1e-3]");
    if (model.cutoff_V == 1 && !(spec.h < 2.0)) throw ModelError("h must be < 2 when cutoff_V = 1");
}

double CellWeights::captured() const {
    double s = 0.0;
    for (const JumpWeight& j : jumps) s += j.rate;
    return s;
}

Interval cell_interval(int64_t k, double h) {
    double lo = (static_cast<double>(k) - 0.5) * h, hi = (static_cast<double>(k) + 0.5) * h;
    if (k == 0) return Interval::closed(lo, hi);
    if (k < 0) return {lo, hi, true, false};
    return {lo, hi, false, true};
}

Box cell_box(std::span<const int32_t> k, double h) {
    Box b;
    for (int32_t v : k) b.push_back(cell_interval(v, h));
    return b;
}

int64_t cell_index(double x, double h) {
    const int64_t k = std::llround(x / h);
    for (int64_t c : {k - 1, k, k + 1})
        if (cell_interval(c, h).contains(x)) return c;
    return k;
}

double cell_measure(const LevyMeasure& measure, std::span<const int32_t> k, double h) {
    return measure.mass(cell_box(k, h));
}

double cell_measure(const LevyMeasure& measure, int32_t k, double h) {
    return measure.mass(Box{cell_interval(k, h)});
}

CellWeights build_weights(const LevyModel& model, const LatticeSpec& spec) {
    validate_spec(spec, model);
    const int d = model.dim;
    const double h = spec.h;
    CellWeights w;
    w.h = h;
    w.dim = d;
    LocalCoeffs lc = local_coefficients(model, h);
    w.c0 = lc.c0;
    w.mu_h = lc.mu_h;

    const LevyMeasure dens = model.measure.density_part();
    std::map<Index, double> sparse;  // atoms, and the density part when d > 1
    double atoms_outside = 0.0;
    int32_t radius = 0;
    for (const Atom& a : model.measure.atoms()) {
        Index k{};
        for (int j = 0; j < d; ++j) k[j] = static_cast<int32_t>(cell_index(a.x[j], h));
        if (is_zero_index(k, d)) continue;
        sparse[k] += a.weight;
        atoms_outside += a.weight;
        for (int j = 0; j < d; ++j) radius = std::max(radius, std::abs(k[j]));
    }

    double outside_density = 0.0;
    std::vector<double> dense;  // d = 1: index k + K
    int32_t K = 0;
    if (dens.has_density() && d == 1) {
        auto tail = [&](int32_t n) {
            double r = (n + 0.5) * h;
            return dens.mass(Box{Interval{r, kInf, false, false}}) +
                   dens.mass(Box{Interval{-kInf, -r, false, false}});
        };
        outside_density = tail(0);
        const double target = spec.tail_cut * outside_density;
        int32_t hi = 1;
        while (tail(hi) > target) {
            if (hi >= kMaxCellsPerSide) {
                std::ostringstream msg;
                msg << "jump-weight enumeration reached " << kMaxCellsPerSide
                    << " cells per side without meeting tail_cut; raise tail_cut or supply closed-form tails";
                throw NumericalError(msg.str(), tail(hi) / outside_density);
            }
            hi = std::min(2 * hi, kMaxCellsPerSide);
        }
        int32_t lo = hi / 2;  // tail(lo) > target unless lo == 0
        while (hi - lo > 1) {
            int32_t mid = lo + (hi - lo) / 2;
            if (tail(mid) > target) lo = mid;
            else hi = mid;
        }
        K = hi;
        w.remainder = tail(K);
        dense.assign(2 * static_cast<size_t>(K) + 1, 0.0);
        for (int32_t k = 1; k <= K; ++k) {
            dense[K + k] = cell_measure(dens, k, h);
            dense[K - k] = cell_measure(dens, -k, h);
        }
        radius = std::max(radius, K);
    } else if (dens.has_density()) {
        const int32_t KR = static_cast<int32_t>(std::ceil(dens.support_radius() / h + 0.5));
        for_each_index(d, KR, [&](const Index& k) {
            if (is_zero_index(k, d)) return;
            double m = cell_measure(dens, std::span<const int32_t>(k.data(), d), h);
            if (m > 0.0) {
                sparse[k] += m;
                outside_density += m;
            }
        });
        radius = std::max(radius, KR);
    }
    w.outside_mass = outside_density + atoms_outside;
    w.radius = radius;

    if (d == 1 && !dense.empty()) {
        for (const auto& [k, m] : sparse) {
            if (std::abs(k[0]) <= K) {
                dense[K + k[0]] += m;
            }
        }
        for (const auto& [k, m] : sparse)
            if (std::abs(k[0]) > K) w.jumps.push_back({k, m});
        for (int32_t i = 0; i < static_cast<int32_t>(dense.size()); ++i) {
            if (i == K || !(dense[i] > 0.0)) continue;
            Index k{};
            k[0] = i - K;
            w.jumps.push_back({k, dense[i]});
        }
        std::sort(w.jumps.begin(), w.jumps.end(), [](const JumpWeight& a, const JumpWeight& b) { return a.k < b.k; });
    } else {
        for (const auto& [k, m] : sparse)
            if (m > 0.0) w.jumps.push_back({k, m});
    }
    return w;
}

std::vector<bool> two_sided_components(const LevyModel& model, SchemeKind scheme) {
    if (scheme != SchemeKind::Multivariate && model.dim != 1)
        throw ModelError("scheme1/scheme2 require dim = 1; use the multivariate scheme");
    std::vector<bool> out(model.dim);
    for (int j = 0; j < model.dim; ++j) {
        switch (scheme) {
            case SchemeKind::Scheme1: out[j] = true; break;
            case SchemeKind::Scheme2: out[j] = false; break;
            case SchemeKind::Multivariate: out[j] = model.sigma2[j] > 0.0; break;
        }
    }
    return out;
}

double h_star(const LevyModel& model, SchemeKind scheme) {
    const auto two = two_sided_components(model, scheme);
    if (std::none_of(two.begin(), two.end(), [](bool b) { return b; })) return kInf;
    const int d = model.dim;
    auto valid = [&](double h) {
        LocalCoeffs lc = local_coefficients(model, h);
        for (int j = 0; j < d; ++j) {
            if (!two[j]) continue;
            Index kp{}, kn{};
            kp[j] = 1;
            kn[j] = -1;
            double cp = cell_measure(model.measure, std::span<const int32_t>(kp.data(), d), h);
            double cn = cell_measure(model.measure, std::span<const int32_t>(kn.data(), d), h);
            double a = (model.sigma2[j] + lc.c0[j]) / (2.0 * h * h);
            double b = (model.mu[j] - lc.mu_h[j]) / (2.0 * h);
            double slack = 1e-14 * std::max(a, std::abs(b));
            if (a + b + cp < -slack || a - b + cn < -slack) return false;
        }
        return true;
    };
    constexpr int kFinest = 52;
    auto grid = [](int j) { return std::ldexp(std::pow(2.0, -(j % 4) / 4.0), 1 - j / 4); };
    if (!valid(grid(kFinest)))
        throw ModelError("generator has negative off-diagonal entries down to h = 2^-12; use scheme 2");
    double lo = grid(kFinest), hi = kInf;
    for (int j = kFinest - 1; j >= 0; --j) {
        if (!valid(grid(j))) {
            hi = grid(j);
            break;
        }
        lo = grid(j);
    }
    if (!std::isfinite(hi)) {
        for (double h = 4.0; h <= 1024.0; h *= 2.0) {
            if (!valid(h)) {
                hi = h;
                break;
            }
            lo = h;
        }
        if (!std::isfinite(hi)) return kInf;
    }
    while (hi - lo > 1e-6 * lo) {
        double mid = 0.5 * (lo + hi);
        if (valid(mid)) lo = mid;
        else hi = mid;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// Discrete exponent

DiscreteExponent::DiscreteExponent(const LevyModel& model, CellWeights weights, SchemeKind scheme)
    : dim_(model.dim), w_(std::move(weights)), sigma2_(model.sigma2) {
    two_sided_ = two_sided_components(model, scheme);
    residual_.resize(dim_);
    for (int j = 0; j < dim_; ++j) residual_[j] = model.mu[j] - w_.mu_h[j];
}

Complex DiscreteExponent::local_part(std::span<const double> p) const {
    const double h = w_.h;
    Complex out = 0.0;
    for (int j = 0; j < dim_; ++j) {
        const double hp = h * p[j];
        const double cm1 = cosm1(hp), sn = std::sin(hp);
        out += (sigma2_[j] + w_.c0[j]) * cm1 / (h * h);
        const double r = residual_[j];
        if (two_sided_[j]) {
            out += Complex(0.0, r * sn / h);
        } else if (r >= 0.0) {
            out += r * Complex(cm1, sn) / h;  // (e^{ihp} - 1)/h
        } else {
            out += r * Complex(-cm1, sn) / h;  // (1 - e^{-ihp})/h
        }
    }
    return out;
}

Complex DiscreteExponent::operator()(std::span<const double> p) const {
    bool zero = true;
    for (int j = 0; j < dim_; ++j) zero = zero && p[j] == 0.0;
    if (zero) return 0.0;
    Complex out = local_part(p);
    const double h = w_.h;
    double re = 0.0, im = 0.0;
    if (dim_ == 1) {
        // Runs of consecutive k advance e^{ikhp/2} by rotation; a direct
        // sin/cos every 32 steps bounds the drift.
        const double half = 0.5 * h * p[0];
        const double rc = std::cos(half), rs = std::sin(half);
        double c = 1.0, s = 0.0;
        int32_t prev = 0;
        int run = 0;
        bool have = false;
        for (const JumpWeight& jw : w_.jumps) {
            const int32_t k = jw.k[0];
            if (have && k == prev + 1 && run < 32) {
                double cn = c * rc - s * rs;
                s = s * rc + c * rs;
                c = cn;
                ++run;
            } else {
                c = std::cos(half * k);
                s = std::sin(half * k);
                run = 0;
            }
            have = true;
            prev = k;
            re -= 2.0 * jw.rate * s * s;
            im += 2.0 * jw.rate * s * c;
        }
        return out + Complex(re - w_.remainder, im);
    }
    for (const JumpWeight& jw : w_.jumps) {
        double ph = 0.0;
        for (int j = 0; j < dim_; ++j) ph += p[j] * jw.k[j];
        ph *= h;
        re += jw.rate * cosm1(ph);
        im += jw.rate * std::sin(ph);
    }
    // Mass beyond the enumeration radius escapes to infinity.
    return out + Complex(re - w_.remainder, im);
}

Complex psi_h(const LevyModel& model, const LatticeSpec& spec, SchemeKind scheme, double p) {
    DiscreteExponent e(model, build_weights(model, spec), scheme);
    return e(p);
}

double f_h(double h, double p) { return cosm1(h * p) / (h * h) + 0.5 * p * p; }

Complex g_h_centred(double h, double p) { return {0.0, std::sin(h * p) / h - p}; }

Complex g_h_one_sided(double h, double p, double residual) {
    const double hp = h * p;
    const double cm1 = cosm1(hp), sn = std::sin(hp);
    Complex d = residual > 0.0 ? Complex(cm1, sn) / h : Complex(-cm1, sn) / h;
    return d - Complex(0.0, p);
}

PsiErrorParts psi_error_decomposition(const LevyModel& model, const DiscreteExponent& psih, double p) {
    if (model.dim != 1) throw std::logic_error("psi_error_decomposition is one-dimensional");
    const CellWeights& w = psih.weights();
    const double h = w.h;
    const double s2 = model.sigma2[0], mu = model.mu[0];
    PsiErrorParts out;
    out.sigma2_f = s2 * f_h(h, p);
    const bool centred = psih.two_sided()[0];
    const double r = psih.drift_residual(0);
    const Complex g = centred ? g_h_centred(h, p) : g_h_one_sided(h, p, r);
    out.mu_g = mu * g;

    const double hp = h * p;
    Complex drift_op = centred ? Complex(0.0, std::sin(hp) / h) : g + Complex(0.0, p);
    Complex l = w.c0[0] * cosm1(hp) / (h * h) - w.mu_h[0] * drift_op;
    if (p != 0.0) {
        double re = 0.0, im = 0.0;
        for (const JumpWeight& jw : w.jumps) {
            double ph = p * jw.k[0] * h;
            re += jw.rate * cosm1(ph);
            im += jw.rate * std::sin(ph);
        }
        l += Complex(re - w.remainder, im);
    }
    const Complex jump = psi(model, p) - Complex(-0.5 * s2 * p * p, mu * p);
    out.l = l - jump;
    return out;
}

}  // namespace levychain
