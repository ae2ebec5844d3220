#pragma once

#include "levychain/convergence_lab.hpp"
#include "levychain/density_engine.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace levychain {

/// Provenance written at the top of every output file.
struct RunMeta {
    std::string command;
    std::string model;
    std::string scheme;
    uint64_t config_hash = 0;
    double tol = 0.0;
    double tail_cut = 0.0;
};

std::string hex64(uint64_t v);
void write_meta(std::ostream& os, const RunMeta& meta);

/// Metadata lines (#t=, #h=, #M=, #route=, #deficit=, #quad_tol=) then one row
/// per lattice point; `exact` adds a column when non-empty.
void write_density_csv(std::ostream& os, const DensityTable& table, const RunMeta& meta,
                       const std::vector<double>& exact = {});

/// Summary rows h, sup_error, zeta(h/2), kappa(h/2), plus fitted orders.
void write_sweep_csv(std::ostream& os, const SweepReport& rep, const RunMeta& meta);
/// Per-point rows h, y, exact, approx, abs_error.
void write_sweep_points_csv(std::ostream& os, const SweepReport& rep, const RunMeta& meta);

void write_psi_csv(std::ostream& os, const std::vector<PsiRow>& rows, const RunMeta& meta);

struct PriceRow {
    double h = 0.0;
    double M = 0.0;
    double deficit = 0.0;
    std::vector<double> prices;
};

/// One row per h; reference prices (if given) add error columns.
void write_price_csv(std::ostream& os, const std::vector<double>& strikes, const std::vector<PriceRow>& rows,
                     const std::vector<double>& reference, const RunMeta& meta);

/// gnuplot script plotting columns `ycol` against `xcol` of a CSV file.
std::string gnuplot_script(const std::string& csv_name, const std::string& title, int xcol, int ycol,
                           bool logscale = false);

}  // namespace levychain
