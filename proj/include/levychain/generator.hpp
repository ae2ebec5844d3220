#pragma once

#include "levychain/discretization.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace levychain {

/// Sets the worker count used by mat-vecs and sweeps (0 = hardware default).
void set_num_threads(unsigned n);
unsigned num_threads();

/// A (sub-)Markov rate matrix that can act on vectors.
class RateOperator {
public:
    virtual ~RateOperator() = default;
    virtual size_t size() const = 0;
    /// out = Q in, or out = Q^T in when transpose is set.
    virtual void apply(std::span<const double> in, std::span<double> out, bool transpose) const = 0;
    /// Upper bound on -Q_ii over all rows.
    virtual double max_exit_rate() const = 0;
};

/// Small dense rate matrix, row-major.
class DenseRateMatrix : public RateOperator {
public:
    DenseRateMatrix(size_t n, std::vector<double> entries);
    size_t size() const override { return n_; }
    void apply(std::span<const double> in, std::span<double> out, bool transpose) const override;
    double max_exit_rate() const override;
    double at(size_t i, size_t j) const { return a_[i * n_ + j]; }

private:
    size_t n_;
    std::vector<double> a_;
};

struct StencilEntry {
    Index k{};
    double rate = 0.0;
};

/// Spatially homogeneous lattice generator restricted to the integer box
/// [-m, m]^d, m = floor(M/h). States are ordered row-major over the box (last
/// coordinate fastest). Transitions leaving the box, and the jump mass beyond
/// the weight enumeration radius, are killing.
class TruncatedGenerator : public RateOperator {
public:
    TruncatedGenerator(const LevyModel& model, const LatticeSpec& spec, SchemeKind scheme);
    TruncatedGenerator(const LevyModel& model, const CellWeights& weights, SchemeKind scheme, double M);

    size_t size() const override { return size_; }
    void apply(std::span<const double> in, std::span<double> out, bool transpose) const override;
    double max_exit_rate() const override { return total_rate_; }

    int dim() const { return dim_; }
    double h() const { return h_; }
    double M() const { return M_; }
    int32_t half_width() const { return m_; }
    SchemeKind scheme() const { return scheme_; }
    const std::vector<StencilEntry>& stencil() const { return stencil_; }
    double killing_rate() const { return killing_; }
    double diagonal() const { return -total_rate_; }

    size_t index_of(std::span<const int32_t> k) const;
    Index point_of(size_t i) const;
    bool contains(std::span<const int32_t> k) const;

    /// Sum of row i over the box, diagonal included (<= 0).
    double row_sum(size_t i) const;
    /// Whole stencil lands inside the box and nothing is lost to the far field.
    bool is_interior(size_t i) const;

    /// Coordinate-list export: header lines, then "row col rate" per entry.
    void export_coo(std::ostream& os) const;

private:
    void assemble(const LevyModel& model, const CellWeights& w);

    int dim_ = 1;
    double h_ = 0.0;
    double M_ = 0.0;
    SchemeKind scheme_ = SchemeKind::Scheme1;
    int32_t m_ = 0;
    size_t side_ = 1;
    size_t size_ = 1;
    std::vector<StencilEntry> stencil_;
    std::vector<int64_t> offset_;  // linear offset of each stencil entry
    double killing_ = 0.0;
    double total_rate_ = 0.0;
};

}  // namespace levychain
