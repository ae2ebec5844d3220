#include "levychain/generator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace levychain {

namespace {

std::atomic<unsigned> g_threads{0};

// Runs fn(lo, hi) over [0, n) in contiguous chunks. Every element is owned by
// exactly one chunk, so results do not depend on the thread count.
template <class Fn>
void parallel_chunks(size_t n, size_t work_per_item, Fn fn) {
    unsigned t = num_threads();
    if (t <= 1 || n * work_per_item < (1u << 18) || n < 2 * t) {
        fn(size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    size_t chunk = (n + t - 1) / t;
    for (unsigned i = 0; i < t; ++i) {
        size_t lo = i * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([=] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

void set_num_threads(unsigned n) { g_threads = n; }

unsigned num_threads() {
    unsigned n = g_threads;
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

// ---------------------------------------------------------------------------

DenseRateMatrix::DenseRateMatrix(size_t n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
    if (a_.size() != n * n) throw std::invalid_argument("DenseRateMatrix: need n*n entries");
}

void DenseRateMatrix::apply(std::span<const double> in, std::span<double> out, bool transpose) const {
    for (size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (size_t j = 0; j < n_; ++j) s += (transpose ? a_[j * n_ + i] : a_[i * n_ + j]) * in[j];
        out[i] = s;
    }
}

double DenseRateMatrix::max_exit_rate() const {
    double q = 0.0;
    for (size_t i = 0; i < n_; ++i) q = std::max(q, -a_[i * n_ + i]);
    return q;
}

// ---------------------------------------------------------------------------

TruncatedGenerator::TruncatedGenerator(const LevyModel& model, const LatticeSpec& spec, SchemeKind scheme)
    : TruncatedGenerator(model, build_weights(model, spec), scheme, spec.M) {}

TruncatedGenerator::TruncatedGenerator(const LevyModel& model, const CellWeights& w, SchemeKind scheme, double M)
    : dim_(model.dim), h_(w.h), M_(M), scheme_(scheme) {
    m_ = static_cast<int32_t>(std::floor(M / h_ + 1e-9));
    side_ = 2 * static_cast<size_t>(m_) + 1;
    size_ = 1;
    for (int j = 0; j < dim_; ++j) size_ *= side_;
    assemble(model, w);
}

void TruncatedGenerator::assemble(const LevyModel& model, const CellWeights& w) {
    const auto two = two_sided_components(model, scheme_);
    std::map<Index, double> rates;
    const double h = h_;
    for (int j = 0; j < dim_; ++j) {
        Index up{}, down{};
        up[j] = 1;
        down[j] = -1;
        const double a = (model.sigma2[j] + w.c0[j]) / (2.0 * h * h);
        const double r = model.mu[j] - w.mu_h[j];
        if (two[j]) {
            rates[up] += a + r / (2.0 * h);
            rates[down] += a - r / (2.0 * h);
        } else {
            rates[up] += a;
            rates[down] += a;
            if (r >= 0.0) rates[up] += r / h;
            else rates[down] += -r / h;
        }
    }
    for (const JumpWeight& jw : w.jumps) rates[jw.k] += jw.rate;

    double scale = 0.0;
    for (const auto& [k, v] : rates) scale = std::max(scale, std::abs(v));
    stencil_.clear();
    for (const auto& [k, v] : rates) {
        if (v < -1e-13 * scale) {
            std::ostringstream msg;
            msg << "negative off-diagonal rate " << v << " at offset (";
            for (int j = 0; j < dim_; ++j) msg << (j ? "," : "") << k[j];
            msg << ") for h = " << h << "; h exceeds h_star for this scheme";
            throw ModelError(msg.str());
        }
        if (v > 0.0) stencil_.push_back({k, v});
    }
    killing_ = w.remainder;
    total_rate_ = killing_;
    for (const StencilEntry& e : stencil_) total_rate_ += e.rate;

    offset_.clear();
    for (const StencilEntry& e : stencil_) {
        int64_t off = 0;
        for (int j = 0; j < dim_; ++j) off = off * static_cast<int64_t>(side_) + e.k[j];
        offset_.push_back(off);
    }
}

size_t TruncatedGenerator::index_of(std::span<const int32_t> k) const {
    size_t i = 0;
    for (int j = 0; j < dim_; ++j) i = i * side_ + static_cast<size_t>(k[j] + m_);
    return i;
}

Index TruncatedGenerator::point_of(size_t i) const {
    Index k{};
    for (int j = dim_ - 1; j >= 0; --j) {
        k[j] = static_cast<int32_t>(i % side_) - m_;
        i /= side_;
    }
    return k;
}

bool TruncatedGenerator::contains(std::span<const int32_t> k) const {
    for (int j = 0; j < dim_; ++j)
        if (std::abs(k[j]) > m_) return false;
    return true;
}

void TruncatedGenerator::apply(std::span<const double> in, std::span<double> out, bool transpose) const {
    const double diag = -total_rate_;
    const int64_t n = static_cast<int64_t>(size_);
    if (dim_ == 1) {
        // Gather form for both directions: out[i] += r * in[i + s k].
        const int64_t sgn = transpose ? -1 : 1;
        parallel_chunks(size_, stencil_.size() + 1, [&](size_t lo_u, size_t hi_u) {
            const int64_t lo = static_cast<int64_t>(lo_u), hi = static_cast<int64_t>(hi_u);
            for (int64_t i = lo; i < hi; ++i) out[i] = diag * in[i];
            for (size_t e = 0; e < stencil_.size(); ++e) {
                const int64_t k = sgn * stencil_[e].k[0];
                const double r = stencil_[e].rate;
                const int64_t a = std::max(lo, -k), b = std::min(hi, n - k);
                const double* src = in.data();
                double* dst = out.data();
                for (int64_t i = a; i < b; ++i) dst[i] += r * src[i + k];
            }
        });
        return;
    }
    const int64_t sgn = transpose ? -1 : 1;
    parallel_chunks(size_, stencil_.size() * static_cast<size_t>(dim_), [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
            Index p = point_of(i);
            double s = diag * in[i];
            for (size_t e = 0; e < stencil_.size(); ++e) {
                bool inside = true;
                for (int j = 0; j < dim_ && inside; ++j) {
                    int32_t t = p[j] + static_cast<int32_t>(sgn) * stencil_[e].k[j];
                    inside = t >= -m_ && t <= m_;
                }
                if (inside) s += stencil_[e].rate * in[static_cast<int64_t>(i) + sgn * offset_[e]];
            }
            out[i] = s;
        }
    });
}

double TruncatedGenerator::row_sum(size_t i) const {
    Index p = point_of(i);
    double sum = -total_rate_;
    for (const StencilEntry& e : stencil_) {
        Index t{};
        for (int j = 0; j < dim_; ++j) t[j] = p[j] + e.k[j];
        if (contains(std::span<const int32_t>(t.data(), dim_))) sum += e.rate;
    }
    return sum;
}

bool TruncatedGenerator::is_interior(size_t i) const {
    if (killing_ > 0.0) return false;
    Index p = point_of(i);
    for (const StencilEntry& e : stencil_) {
        for (int j = 0; j < dim_; ++j)
            if (std::abs(p[j] + e.k[j]) > m_) return false;
    }
    return true;
}

void TruncatedGenerator::export_coo(std::ostream& os) const {
    os.precision(17);
    os << "# h=" << h_ << "\n# M=" << M_ << "\n# d=" << dim_ << "\n# scheme=" << to_string(scheme_)
       << "\n# size=" << size_ << "\n# killing_rate=" << killing_ << "\n";
    // Run-length summary of per-row deficits (killing rates).
    size_t start = 0;
    double current = -row_sum(0);
    for (size_t i = 1; i <= size_; ++i) {
        double v = i < size_ ? -row_sum(i) : std::nan("");
        if (i == size_ || v != current) {
            os << "# deficit rows [" << start << "," << i - 1 << "] = " << current << "\n";
            start = i;
            current = v;
        }
    }
    os << "row col rate\n";
    for (size_t i = 0; i < size_; ++i) {
        Index p = point_of(i);
        std::vector<std::pair<size_t, double>> row{{i, -total_rate_}};
        for (const StencilEntry& e : stencil_) {
            Index t{};
            for (int j = 0; j < dim_; ++j) t[j] = p[j] + e.k[j];
            if (contains(std::span<const int32_t>(t.data(), dim_)))
                row.emplace_back(index_of(std::span<const int32_t>(t.data(), dim_)), e.rate);
        }
        std::sort(row.begin(), row.end());
        for (const auto& [j, v] : row) os << i << ' ' << j << ' ' << v << '\n';
    }
}

}  // namespace levychain
