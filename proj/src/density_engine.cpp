#include "levychain/density_engine.hpp"

#include "levychain/expm.hpp"
#include "levychain/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace levychain {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not thread safe.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// 31-point Kronrod rule with its embedded 15-point Gauss rule on [-1, 1].
// Node i (i = 0..15) is +-x[i]; Gauss nodes are the even i.
struct Gk31 {
    std::vector<double> x, kw, gw;
    Gk31() {
        using K = boost::math::quadrature::gauss_kronrod<double, 31>;
        using G = boost::math::quadrature::gauss<double, 15>;
        for (size_t i = 0; i < K::abscissa().size(); ++i) {
            x.push_back(K::abscissa()[i]);
            kw.push_back(K::weights()[i]);
            gw.push_back(i % 2 == 0 ? G::weights()[i / 2] : 0.0);
        }
    }
    static const Gk31& get() {
        static const Gk31 rule;
        return rule;
    }
};

// Accumulates (1/pi) * integral of Re(e^{-ipz} E(p)) dp over panels for many z
// at once, subdividing a panel while the Kronrod/Gauss gap exceeds its share of
// the tolerance.
class BatchInverter {
public:
    BatchInverter(const std::vector<double>& z, std::function<Complex(double)> E)
        : z_(z), E_(std::move(E)), sum_(z.size(), 0.0) {}

    void panel(double a, double b, double tol_abs, int depth = 0) {
        const Gk31& r = Gk31::get();
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        const size_t n = r.x.size();
        std::vector<double> p(2 * n);
        std::vector<Complex> e(2 * n);
        for (size_t i = 0; i < n; ++i) {
            p[2 * i] = mid + half * r.x[i];
            p[2 * i + 1] = mid - half * r.x[i];
        }
        for (size_t i = 0; i < 2 * n; ++i) e[i] = (i == 1) ? e[0] : E_(p[i]);
        std::vector<double> K(z_.size()), G(z_.size());
        double worst = 0.0;
        for (size_t m = 0; m < z_.size(); ++m) {
            double ks = 0.0, gs = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double v = value(p[2 * i], e[2 * i], z_[m]);
                if (i > 0) v += value(p[2 * i + 1], e[2 * i + 1], z_[m]);
                ks += r.kw[i] * v;
                gs += r.gw[i] * v;
            }
            K[m] = ks * half / kPi;
            G[m] = gs * half / kPi;
            worst = std::max(worst, std::abs(K[m] - G[m]));
        }
        if (worst > tol_abs && depth < 30) {
            panel(a, mid, 0.5 * tol_abs, depth + 1);
            panel(mid, b, 0.5 * tol_abs, depth + 1);
            return;
        }
        for (size_t m = 0; m < z_.size(); ++m) sum_[m] += K[m];
        error_ += worst;
    }

    const std::vector<double>& sums() const { return sum_; }
    double error() const { return error_; }

private:
    static double value(double p, Complex e, double z) {
        double c = std::cos(p * z), s = std::sin(p * z);
        return c * e.real() + s * e.imag();  // Re(e^{-ipz} E)
    }

    const std::vector<double>& z_;
    std::function<Complex(double)> E_;
    std::vector<double> sum_;
    double error_ = 0.0;
};

// Integrates (1/pi) Re(e^{-ipz} E(p)) over [0, R]: geometric panels toward 0
// (cusps of E at the origin), then panels about one wavelength wide.
std::vector<double> invert_half_line(const std::vector<double>& z, const std::function<Complex(double)>& E,
                                     double R, double tol, double* achieved) {
    double zmax = 0.0;
    for (double v : z) zmax = std::max(zmax, std::abs(v));
    double width = R / 16.0;
    if (zmax > 0.0) width = std::min(width, 2.0 * kPi / zmax);
    const int panels = static_cast<int>(std::ceil(R / width));
    width = R / panels;
    const double per_panel = tol / (panels + 40);
    BatchInverter inv(z, E);
    for (int j = 40; j >= 0; --j) inv.panel(std::ldexp(width, -j - 1), std::ldexp(width, -j), per_panel);
    for (int i = 1; i < panels; ++i) inv.panel(i * width, (i + 1) * width, per_panel);
    if (achieved) *achieved = inv.error() + std::ldexp(width, -41);
    return inv.sums();
}

// Radius beyond which the coercivity envelope exp(-C t p^eps) integrates to
// less than `tail`.
double truncation_radius(double P, double C, double eps, double t, double tail) {
    const double a = C * t;
    double R = std::max(P, 1.0);
    for (int it = 0; it < 400; ++it) {
        double u = std::pow(R, eps);
        bool ok = eps >= 1.0 || a * u >= 2.0 * (1.0 / eps - 1.0);
        double bound = std::exp(-a * u) * std::pow(R, 1.0 - eps) / (a * eps) * (eps < 1.0 ? 2.0 : 1.0);
        if (ok && bound < tail) return R;
        R *= 1.1;
    }
    throw NumericalError("exact_density: coercivity envelope decays too slowly", 1.0);
}

// The coercivity constant is a lower bound; the observed ratio
// -Re Psi(p) / p^eps on a geometric grid up to the guaranteed radius is
// usually far larger, so half of its minimum is used when it is bigger.
double exact_radius(const LevyModel& model, const Coercivity& c, double t, double tail) {
    const double R_safe = truncation_radius(c.P_exact, c.C_exact, c.epsilon, t, tail);
    double ratio = std::numeric_limits<double>::infinity();
    for (double p = std::max(c.P_exact, 1.0); p <= R_safe; p *= 1.05)
        ratio = std::min(ratio, -psi(model, p).real() / std::pow(p, c.epsilon));
    if (!(0.5 * ratio > c.C_exact)) return R_safe;
    return std::min(R_safe, truncation_radius(c.P_exact, 0.5 * ratio, c.epsilon, t, tail));
}

// Tensor Kronrod panels over [-R, R]^d of (2pi)^-d Re(e^{-i<p,z>} E(p)); the
// panel count doubles until the embedded Gauss rule agrees.
double invert_tensor(int d, const std::function<Complex(std::span<const double>)>& E, std::span<const double> z,
                     double R, double width, double tol, double* achieved) {
    const Gk31& r = Gk31::get();
    int panels = std::max(2, static_cast<int>(std::ceil(2.0 * R / width)));
    double last_err = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt, panels *= 2) {
        const double pw = 2.0 * R / panels;
        // 1-d node list with Kronrod and Gauss weights.
        std::vector<double> nodes, kw, gw;
        for (int i = 0; i < panels; ++i) {
            double mid = -R + (i + 0.5) * pw, half = 0.5 * pw;
            for (size_t k = 0; k < r.x.size(); ++k) {
                for (int sgn : {1, -1}) {
                    if (k == 0 && sgn < 0) continue;
                    nodes.push_back(mid + sgn * half * r.x[k]);
                    kw.push_back(r.kw[k] * half);
                    gw.push_back(r.gw[k] * half);
                }
            }
        }
        const size_t n = nodes.size();
        std::array<size_t, kMaxDim> idx{};
        std::array<double, kMaxDim> p{};
        double ks = 0.0, gs = 0.0;
        while (true) {
            double wk = 1.0, wg = 1.0, pz = 0.0;
            for (int j = 0; j < d; ++j) {
                p[j] = nodes[idx[j]];
                wk *= kw[idx[j]];
                wg *= gw[idx[j]];
                pz += p[j] * z[j];
            }
            Complex e = E(std::span<const double>(p.data(), static_cast<size_t>(d)));
            double v = std::cos(pz) * e.real() + std::sin(pz) * e.imag();
            ks += wk * v;
            gs += wg * v;
            int j = d - 1;
            while (j >= 0 && ++idx[j] == n) idx[j--] = 0;
            if (j < 0) break;
        }
        const double norm = std::pow(2.0 * kPi, -d);
        last_err = std::abs(ks - gs) * norm;
        if (last_err <= tol || attempt == 3) {
            if (achieved) *achieved = last_err;
            return ks * norm;
        }
    }
    return 0.0;
}

}  // namespace

std::string to_string(Route r) {
    switch (r) {
        case Route::FourierExact: return "fourier_exact";
        case Route::FourierDiscrete: return "fourier_discrete";
        case Route::Expm: return "expm";
    }
    return "?";
}

double DensityTable::at(std::span<const int32_t> k) const {
    for (size_t i = 0; i < points.size(); ++i) {
        bool eq = true;
        for (int j = 0; j < dim; ++j) eq = eq && points[i][j] == k[j];
        if (eq) return values[i];
    }
    throw std::out_of_range("DensityTable::at: lattice point not in table");
}

double DensityTable::total_mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * std::pow(h, dim);
}

std::vector<double> exact_density_batch(const LevyModel& model, double t, const std::vector<double>& z, double tol,
                                        double* achieved) {
    if (model.dim != 1) throw std::logic_error("exact_density_batch is one-dimensional");
    if (!(t > 0.0)) throw std::invalid_argument("exact_density: t must be > 0");
    Coercivity c;
    try {
        c = coercivity_constants(model);
    } catch (const NoDensityGuarantee&) {
        if (!model.reference_density) throw;
        std::vector<double> out;
        for (double v : z) out.push_back(model.reference_density(t, std::span<const double>(&v, 1)));
        if (achieved) *achieved = 0.0;
        return out;
    }
    const double R = exact_radius(model, c, t, 0.1 * kPi * tol);
    auto E = [&](double p) { return std::exp(t * psi(model, p)); };
    double err = 0.0;
    auto out = invert_half_line(z, E, R, 0.5 * tol, &err);
    if (achieved) *achieved = err + 0.1 * tol;
    for (double& v : out) v = std::max(v, 0.0);
    return out;
}

double exact_density(const LevyModel& model, double t, std::span<const double> x, std::span<const double> y,
                     double tol) {
    const int d = model.dim;
    std::vector<double> z(d);
    for (int j = 0; j < d; ++j) z[j] = y[j] - x[j];
    if (d == 1) return exact_density_batch(model, t, z, tol)[0];
    if (!(t > 0.0)) throw std::invalid_argument("exact_density: t must be > 0");
    Coercivity c;
    try {
        c = coercivity_constants(model);
    } catch (const NoDensityGuarantee&) {
        if (!model.reference_density) throw;
        return model.reference_density(t, z);
    }
    // In d dimensions the envelope is applied per coordinate of the box.
    const double R = truncation_radius(c.P_exact, c.C_exact, c.epsilon, t, 0.01 * tol);
    double zmax = 0.0;
    for (double v : z) zmax = std::max(zmax, std::abs(v));
    double width = zmax > 0.0 ? std::min(R / 4.0, 2.0 * kPi / zmax) : R / 4.0;
    auto E = [&](std::span<const double> p) { return std::exp(t * psi(model, p)); };
    double err = 0.0;
    return std::max(0.0, invert_tensor(d, E, z, R, width, tol, &err));
}

// Weight radius (cells) above which the d = 1 spectral integral is taken by
// the periodic trapezoid rule instead of adaptive panels.
constexpr int32_t kPanelRadiusLimit = 4096;

double discrete_density_fourier(const DiscreteExponent& psih, double t, std::span<const int32_t> x,
                                std::span<const int32_t> y, double tol) {
    const CellWeights& w = psih.weights();
    const int d = w.dim;
    const double h = w.h;
    if (!(t >= 0.0)) throw std::invalid_argument("discrete_density_fourier: t must be >= 0");
    std::vector<double> z(d);
    bool same = true;
    for (int j = 0; j < d; ++j) {
        z[j] = (y[j] - x[j]) * h;
        same = same && y[j] == x[j];
    }
    if (t == 0.0) return same ? std::pow(h, -d) : 0.0;
    const double R = kPi / h;
    if (d == 1) {
        if (w.radius > kPanelRadiusLimit) {
            // Long weight lists make exp(t Psi^h) rough on the scale 1/(radius h),
            // so panels stall; the periodic trapezoid rule (the torus) is exact
            // up to aliased far-lattice mass and is refined by doubling.
            GridOptions opt;
            opt.tol = tol;
            opt.window = std::abs(y[0] - x[0]);
            auto tab = discrete_density_grid(psih, t, opt);
            const int32_t k = y[0] - x[0];
            return tab.at(std::span<const int32_t>(&k, 1));
        }
        auto E = [&](double p) { return std::exp(t * psih(p)); };
        return invert_half_line(z, E, R, tol, nullptr)[0];
    }
    double zmax = 0.0;
    for (double v : z) zmax = std::max(zmax, std::abs(v));
    double width = zmax > 0.0 ? std::min(R / 2.0, 2.0 * kPi / zmax) : R / 2.0;
    auto E = [&](std::span<const double> p) { return std::exp(t * psih(p)); };
    double err = 0.0;
    return invert_tensor(d, E, z, R, width, tol, &err);
}

namespace {

// Normalised masses on the torus (Z / n Z)^d, returned for |k|_inf <= W.
std::vector<double> torus_values(const DiscreteExponent& psih, double t, int64_t n, int32_t W) {
    const CellWeights& w = psih.weights();
    const int d = w.dim;
    const double h = w.h;
    int64_t total_pts = 1;
    for (int j = 0; j < d; ++j) total_pts *= n;
    const int64_t last_half = n / 2 + 1;
    const int64_t spectral = total_pts / n * last_half;

    double* real_buf = fftw_alloc_real(static_cast<size_t>(total_pts));
    fftw_complex* spec_buf = fftw_alloc_complex(static_cast<size_t>(spectral));
    std::fill(real_buf, real_buf + total_pts, 0.0);
    double total = 0.0;
    for (const JumpWeight& jw : w.jumps) {
        int64_t idx = 0;
        for (int j = 0; j < d; ++j) idx = idx * n + (((jw.k[j] % n) + n) % n);
        real_buf[idx] += jw.rate;
        total += jw.rate;
    }
    std::vector<int> dims(d, static_cast<int>(n));
    fftw_plan fwd, bwd;
    {
        std::lock_guard lock(fftw_mutex());
        fwd = fftw_plan_dft_r2c(d, dims.data(), real_buf, spec_buf, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r(d, dims.data(), spec_buf, real_buf, FFTW_ESTIMATE);
    }
    fftw_execute(fwd);

    // Characteristic function at torus frequencies; the spectrum holds the
    // conjugate so that the c2r (e^{+}) transform yields the e^{-} inversion.
    std::array<int64_t, kMaxDim> j{};
    std::array<double, kMaxDim> p{};
    for (int64_t s = 0; s < spectral; ++s) {
        int64_t rem = s;
        for (int a = d - 1; a >= 0; --a) {
            int64_t len = a == d - 1 ? last_half : n;
            j[a] = rem % len;
            rem /= len;
        }
        bool origin = true;
        for (int a = 0; a < d; ++a) {
            int64_t js = j[a] <= n / 2 ? j[a] : j[a] - n;
            p[a] = 2.0 * kPi * static_cast<double>(js) / (static_cast<double>(n) * h);
            origin = origin && js == 0;
        }
        // Jump mass beyond the enumeration radius is killed at every
        // frequency, including 0, as in the truncated generator.
        Complex psi = -w.remainder;
        if (!origin) {
            Complex chat(spec_buf[s][0], -spec_buf[s][1]);
            psi += psih.local_part(std::span<const double>(p.data(), static_cast<size_t>(d))) + (chat - total);
        }
        const Complex e = std::exp(t * psi);
        spec_buf[s][0] = e.real();
        spec_buf[s][1] = -e.imag();
    }
    fftw_execute(bwd);

    const double scale = 1.0 / (static_cast<double>(total_pts) * std::pow(h, d));
    std::vector<double> out;
    Index k{};
    for (int a = 0; a < d; ++a) k[a] = -W;
    while (true) {
        int64_t idx = 0;
        for (int a = 0; a < d; ++a) idx = idx * n + (((k[a] % n) + n) % n);
        out.push_back(real_buf[idx] * scale);
        int a = d - 1;
        while (a >= 0 && k[a] == W) k[a--] = -W;
        if (a < 0) break;
        ++k[a];
    }
    {
        std::lock_guard lock(fftw_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(real_buf);
    fftw_free(spec_buf);
    return out;
}

}  // namespace

DensityTable discrete_density_grid(const DiscreteExponent& psih, double t, const GridOptions& opt) {
    const CellWeights& w = psih.weights();
    const int d = w.dim;
    const int32_t W = opt.window;
    if (W < 0) throw std::invalid_argument("discrete_density_grid: window must be >= 0");
    if (!(t > 0.0)) throw std::invalid_argument("discrete_density_grid: t must be > 0");
    int log2n = static_cast<int>(std::ceil(std::log2(4.0 * (2.0 * W + 1.0))));
    log2n = std::max(log2n, (opt.min_log2_points + d - 1) / d);
    double rate_scale = w.remainder;
    for (const JumpWeight& jw : w.jumps) rate_scale += jw.rate;
    std::vector<double> prev;
    double change = std::numeric_limits<double>::infinity();
    for (; d * log2n <= opt.max_log2_points; ++log2n) {
        auto vals = torus_values(psih, t, int64_t{1} << log2n, W);
        if (!prev.empty()) {
            change = 0.0;
            for (size_t i = 0; i < vals.size(); ++i) change = std::max(change, std::abs(vals[i] - prev[i]));
            // The jump spectrum is the difference of an FFT sum and the total
            // rate, so values carry a rounding floor proportional to t * total.
            double peak = 0.0;
            for (double v : vals) peak = std::max(peak, std::abs(v));
            const double floor = 4.0 * std::numeric_limits<double>::epsilon() * d * log2n * t * rate_scale * peak;
            if (change <= std::max(opt.tol, floor)) {
                DensityTable tab;
                tab.dim = d;
                tab.t = t;
                tab.h = w.h;
                tab.M = W * w.h;
                tab.route = Route::FourierDiscrete;
                tab.quad_tol = change;
                tab.values = std::move(vals);
                Index k{};
                for (int a = 0; a < d; ++a) k[a] = -W;
                for (size_t i = 0; i < tab.values.size(); ++i) {
                    tab.points.push_back(k);
                    int a = d - 1;
                    while (a >= 0 && k[a] == W) k[a--] = -W;
                    if (a >= 0) ++k[a];
                }
                return tab;
            }
        }
        prev = std::move(vals);
    }
    std::ostringstream msg;
    msg << "discrete_density_grid: torus values still change by " << change << " at 2^" << opt.max_log2_points
        << " points";
    throw NumericalError(msg.str(), change);
}

DensityTable chain_distribution(const TruncatedGenerator& gen, double t, std::span<const int32_t> start,
                                double tol) {
    if (!gen.contains(start)) throw std::invalid_argument("chain_distribution: start outside the truncated lattice");
    DensityTable from;
    from.dim = gen.dim();
    from.h = gen.h();
    from.M = gen.M();
    from.route = Route::Expm;
    const size_t n = gen.size();
    from.values.assign(n, 0.0);
    from.points.resize(n);
    for (size_t i = 0; i < n; ++i) from.points[i] = gen.point_of(i);
    from.values[gen.index_of(start)] = std::pow(gen.h(), -gen.dim());
    return propagate(gen, from, t, tol);
}

DensityTable propagate(const TruncatedGenerator& gen, const DensityTable& from, double s, double tol) {
    if (from.values.size() != gen.size()) throw std::invalid_argument("propagate: table does not match generator");
    const double cell = std::pow(gen.h(), gen.dim());
    std::vector<double> mass(from.values.size());
    for (size_t i = 0; i < mass.size(); ++i) mass[i] = from.values[i] * cell;
    ExpmStats stats;
    auto out = expm_action(gen, mass, s, tol, true, &stats);
    DensityTable tab = from;
    tab.t = from.t + s;
    tab.route = Route::Expm;
    double total = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
        total += out[i];
        tab.values[i] = out[i] / cell;
    }
    tab.deficit = 1.0 - total;
    tab.quad_tol = stats.truncation_bound;
    return tab;
}

double expectation_exact(const LevyModel& model, double t, const Payoff& f, double tol) {
    if (model.dim != 1) throw std::logic_error("expectation_exact is one-dimensional");
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    const auto& x = K::abscissa();
    const auto& wts = K::weights();
    for (double W = 8.0; W <= 1024.0; W *= 2.0) {
        const double width = 0.1;
        const int panels = static_cast<int>(std::ceil(2.0 * W / width));
        const double half = W / panels;
        std::vector<double> ys, ws;
        for (int i = 0; i < panels; ++i) {
            double mid = -W + (2 * i + 1) * half;
            for (size_t k = 0; k < x.size(); ++k) {
                for (int sgn : {1, -1}) {
                    if (k == 0 && sgn < 0) continue;
                    ys.push_back(mid + sgn * half * x[k]);
                    ws.push_back(wts[k] * half);
                }
            }
        }
        ys.push_back(-W);
        ys.push_back(W);
        auto dens = exact_density_batch(model, t, ys, 1e-3 * tol);
        double edge = std::max(dens[dens.size() - 1], dens[dens.size() - 2]);
        double peak = *std::max_element(dens.begin(), dens.end());
        if (edge > tol * peak) continue;
        double s = 0.0;
        for (size_t i = 0; i + 2 < ys.size(); ++i) s += ws[i] * dens[i] * f(std::span<const double>(&ys[i], 1));
        return s;
    }
    throw NumericalError("expectation_exact: density still above tolerance at |y| = 1024", 1.0);
}

double expectation_discrete(const DensityTable& table, const Payoff& f) {
    const double cell = std::pow(table.h, table.dim);
    double s = 0.0;
    std::array<double, kMaxDim> y{};
    for (size_t i = 0; i < table.values.size(); ++i) {
        if (table.values[i] == 0.0) continue;
        for (int j = 0; j < table.dim; ++j) y[j] = table.points[i][j] * table.h;
        s += f(std::span<const double>(y.data(), static_cast<size_t>(table.dim))) * table.values[i] * cell;
    }
    return s;
}

}  // namespace levychain
