// levychain_cli: densities, exponent sweeps, convergence gates and put prices
// for lattice approximations of Levy processes.
//
// Exit codes: 0 pass, 1 gate failure, 2 usage or invalid input, 3 numerical failure.

#include "levychain/config.hpp"
#include "levychain/convergence_lab.hpp"
#include "levychain/density_engine.hpp"
#include "levychain/pricing.hpp"
#include "levychain/quadrature.hpp"
#include "levychain/reporting.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

namespace fs = std::filesystem;
using namespace levychain;

namespace {

enum Exit { kPass = 0, kGateFail = 1, kUsage = 2, kNumerical = 3 };

struct Options {
    std::string config;
    std::string out = ".";
    unsigned threads = 0;
    double tol = 0.0;
};

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    return os;
}

RunMeta meta_for(const std::string& cmd, const RunConfig& c) {
    return {cmd, c.model_label, to_string(c.scheme), c.hash, c.tol, c.tail_cut};
}

std::string tag(size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu", i);
    return buf;
}

LatticeSpec spec_for(const RunConfig& c, double h) {
    LatticeSpec s;
    s.h = h;
    s.dim = c.model.dim;
    s.M = std::max(c.M_for(h), h);
    s.tail_cut = c.tail_cut;
    return s;
}

int cmd_density(const RunConfig& c, const fs::path& out) {
    if (c.h_list.empty()) throw ConfigError("density: the h list is empty");
    // Refuse up front when no density is guaranteed.
    try {
        coercivity_constants(c.model);
    } catch (const NoDensityGuarantee&) {
        if (!c.model.reference_density) throw;
    }
    const RunMeta meta = meta_for("density", c);
    std::cout << "h,route,max_deviation,deficit\n";
    for (size_t i = 0; i < c.h_list.size(); ++i) {
        const double h = c.h_list[i];
        LatticeSpec spec = spec_for(c, h);
        validate_spec(spec, c.model);
        CellWeights w = build_weights(c.model, spec);
        std::vector<DensityTable> tables;
        if (c.route != "expm") {
            DiscreteExponent psih(c.model, w, c.scheme);
            GridOptions g;
            g.tol = std::min(1e-9, c.tol);
            g.window = static_cast<int32_t>(std::floor(std::min(c.window, spec.M) / h + 1e-9));
            tables.push_back(discrete_density_grid(psih, c.t, g));
        }
        if (c.route != "fourier_discrete") {
            TruncatedGenerator gen(c.model, w, c.scheme, spec.M);
            Index origin{};
            tables.push_back(
                chain_distribution(gen, c.t, std::span<const int32_t>(origin.data(), c.model.dim), c.tol));
        }
        for (DensityTable& tab : tables) {
            std::vector<double> exact;
            double dev = std::nan("");
            if (c.model.dim == 1) {
                std::vector<double> y(tab.values.size());
                for (size_t k = 0; k < y.size(); ++k) y[k] = tab.coordinate(k, 0);
                exact = exact_density_batch(c.model, c.t, y, c.tol);
                dev = 0.0;
                for (size_t k = 0; k < y.size(); ++k)
                    if (std::abs(y[k]) <= c.window + 1e-12) dev = std::max(dev, std::abs(exact[k] - tab.values[k]));
            }
            auto os = open_out(out / ("density_h" + tag(i) + "_" + to_string(tab.route) + ".csv"));
            write_density_csv(os, tab, meta, exact);
            std::printf("%.12g,%s,%.6e,%.6e\n", h, to_string(tab.route).c_str(), dev, tab.deficit);
        }
    }
    auto gp = open_out(out / "density.gp");
    gp << gnuplot_script("density_h00_" + std::string(c.route == "expm" ? "expm" : "fourier_discrete") + ".csv",
                         "lattice density", 1, 2);
    return kPass;
}

int cmd_psi(const RunConfig& c, const fs::path& out) {
    if (c.h_list.empty()) throw ConfigError("psi: the h list is empty");
    if (c.model.dim != 1) throw ConfigError("psi: exponent sweeps are one-dimensional");
    std::vector<double> grid = c.p_grid;
    if (grid.empty())
        for (int i = 0; i <= 64; ++i) grid.push_back(std::numbers::pi * i / 64.0);
    auto rows = char_exponent_sweep(c.model, c.h_list, c.scheme, grid, c.tail_cut);
    auto os = open_out(out / "psi.csv");
    write_psi_csv(os, rows, meta_for("psi", c));
    auto gp = open_out(out / "psi.gp");
    gp << gnuplot_script("psi.csv", "Re Psi^h", 2, 5);
    std::cout << "rows=" << rows.size() << "\n";
    return kPass;
}

int cmd_converge(const RunConfig& c, const fs::path& out) {
    if (c.h_list.size() < 3) throw ConfigError("converge: need at least three h values");
    if (!c.expected_order) throw ConfigError("converge: expected_order is required for this model");
    Fixture f = c.as_fixture();
    SweepOptions opt;
    opt.tol = c.tol;
    SweepReport rep = run_sweep(f, opt);
    rep.slack = c.slack;
    rep.pass = rep.fit.median >= rep.expected - rep.slack;
    const RunMeta meta = meta_for("converge", c);
    auto os = open_out(out / "sweep.csv");
    write_sweep_csv(os, rep, meta);
    auto ps = open_out(out / "sweep_points.csv");
    write_sweep_points_csv(ps, rep, meta);
    auto gp = open_out(out / "sweep.gp");
    gp << gnuplot_script("sweep.csv", "sup error", 1, 2, true);
    std::cout << "h,sup_error\n";
    for (const auto& p : rep.points) std::printf("%.12g,%.6e\n", p.h, p.sup_error);
    std::printf("order median=%.4f slope=%.4f r2=%.4f expected=%.4f slack=%.2f -> %s\n", rep.fit.median,
                rep.fit.slope, rep.fit.r2, rep.expected, rep.slack, rep.pass ? "PASS" : "FAIL");
    return rep.pass ? kPass : kGateFail;
}

int cmd_price(const RunConfig& c, const fs::path& out) {
    if (c.h_list.empty()) throw ConfigError("price: the h list is empty");
    std::vector<double> strikes = c.strikes;
    if (strikes.empty())
        for (double K = 80; K <= 120; K += 5) strikes.push_back(K);
    std::vector<PriceRow> rows;
    for (double h : c.h_list) {
        auto q = price_european_puts(c.cgmy, c.S0, c.rate, c.maturity, strikes, h, std::min(c.tol, 1e-10));
        PriceRow r;
        r.h = h;
        r.M = q.front().M;
        r.deficit = q.front().deficit;
        for (const auto& x : q) r.prices.push_back(x.price);
        rows.push_back(r);
    }
    auto os = open_out(out / "prices.csv");
    write_price_csv(os, strikes, rows, c.reference_prices, meta_for("price", c));
    write_price_csv(std::cout, strikes, rows, c.reference_prices, meta_for("price", c));
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice Markov chain approximation of Levy processes"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--out", o.out, "output directory");
    app.add_option("--threads", o.threads, "worker threads (0 = all cores)");
    app.add_option("--tol", o.tol, "override the configured tolerance")->check(CLI::PositiveNumber);
    auto* density = app.add_subcommand("density", "lattice densities and the exact density on the same points");
    auto* psi_cmd = app.add_subcommand("psi", "characteristic exponent sweep");
    auto* converge = app.add_subcommand("converge", "sup-error sweep with an order gate");
    auto* price = app.add_subcommand("price", "CGMY European put prices");
    app.fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        set_num_threads(o.threads);
        RunConfig c = load_config(o.config);
        if (o.tol > 0.0) c.tol = o.tol;
        fs::path out(o.out);
        fs::create_directories(out);
        if (density->parsed()) return cmd_density(c, out);
        if (psi_cmd->parsed()) return cmd_psi(c, out);
        if (converge->parsed()) return cmd_converge(c, out);
        if (price->parsed()) return cmd_price(c, out);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const NoDensityGuarantee& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}
