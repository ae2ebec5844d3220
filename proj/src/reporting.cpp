#include "levychain/reporting.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace levychain {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string hex64(uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_meta(std::ostream& os, const RunMeta& m) {
    os << "#command=" << m.command << "\n#model=" << m.model << "\n#scheme=" << m.scheme
       << "\n#config_hash=" << hex64(m.config_hash) << "\n#tol=" << num(m.tol) << "\n#tail_cut=" << num(m.tail_cut)
       << "\n";
}

void write_density_csv(std::ostream& os, const DensityTable& t, const RunMeta& meta, const std::vector<double>& exact) {
    write_meta(os, meta);
    os << "#t=" << num(t.t) << "\n#h=" << num(t.h) << "\n#M=" << num(t.M) << "\n#route=" << to_string(t.route)
       << "\n#deficit=" << num(t.deficit) << "\n#quad_tol=" << num(t.quad_tol) << "\n";
    for (int j = 0; j < t.dim; ++j) os << (t.dim == 1 ? "y" : "y" + std::to_string(j + 1)) << ",";
    os << "value" << (exact.empty() ? "" : ",exact") << "\n";
    for (size_t i = 0; i < t.values.size(); ++i) {
        for (int j = 0; j < t.dim; ++j) os << num(t.coordinate(i, j)) << ",";
        os << num(t.values[i]);
        if (!exact.empty()) os << "," << num(exact[i]);
        os << "\n";
    }
}

void write_sweep_csv(std::ostream& os, const SweepReport& rep, const RunMeta& meta) {
    write_meta(os, meta);
    os << "#fixture=" << rep.fixture << "\n#t=" << num(rep.t) << "\n#order_median=" << num(rep.fit.median)
       << "\n#order_slope=" << num(rep.fit.slope) << "\n#order_r2=" << num(rep.fit.r2)
       << "\n#expected_order=" << num(rep.expected) << "\n#slack=" << num(rep.slack)
       << "\n#pass=" << (rep.pass ? "true" : "false") << "\n";
    os << "h,sup_error,zeta_half_h,kappa_half_h\n";
    for (const SweepPoint& p : rep.points)
        os << num(p.h) << "," << num(p.sup_error) << "," << num(p.zeta) << "," << num(p.kappa) << "\n";
}

void write_sweep_points_csv(std::ostream& os, const SweepReport& rep, const RunMeta& meta) {
    write_meta(os, meta);
    os << "#fixture=" << rep.fixture << "\n#t=" << num(rep.t) << "\n";
    os << "h,y,exact,approx,abs_error\n";
    for (const SweepPoint& p : rep.points)
        for (size_t i = 0; i < p.y.size(); ++i)
            os << num(p.h) << "," << num(p.y[i]) << "," << num(p.exact[i]) << "," << num(p.approx[i]) << ","
               << num(std::abs(p.exact[i] - p.approx[i])) << "\n";
}

void write_psi_csv(std::ostream& os, const std::vector<PsiRow>& rows, const RunMeta& meta) {
    write_meta(os, meta);
    os << "h,p,re_psi,im_psi,re_psi_h,im_psi_h,abs_error\n";
    for (const PsiRow& r : rows)
        os << num(r.h) << "," << num(r.p) << "," << num(r.psi.real()) << "," << num(r.psi.imag()) << ","
           << num(r.psi_h.real()) << "," << num(r.psi_h.imag()) << "," << num(r.abs_error) << "\n";
}

void write_price_csv(std::ostream& os, const std::vector<double>& strikes, const std::vector<PriceRow>& rows,
                     const std::vector<double>& reference, const RunMeta& meta) {
    write_meta(os, meta);
    if (!reference.empty()) {
        os << "#reference=";
        for (size_t i = 0; i < reference.size(); ++i) os << (i ? " " : "") << num(reference[i]);
        os << "\n";
    }
    os << "h,M,deficit";
    for (double K : strikes) os << ",price_" << num(K);
    if (!reference.empty())
        for (double K : strikes) os << ",error_" << num(K);
    os << "\n";
    for (const PriceRow& r : rows) {
        os << num(r.h) << "," << num(r.M) << "," << num(r.deficit);
        for (double p : r.prices) os << "," << num(p);
        if (!reference.empty())
            for (size_t i = 0; i < r.prices.size(); ++i) os << "," << num(r.prices[i] - reference[i]);
        os << "\n";
    }
}

std::string gnuplot_script(const std::string& csv_name, const std::string& title, int xcol, int ycol,
                           bool logscale) {
    std::ostringstream s;
    s << "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n"
      << "set title '" << title << "'\n";
    if (logscale) s << "set logscale xy\n";
    s << "plot '" << csv_name << "' using " << xcol << ":" << ycol << " with linespoints\n";
    return s.str();
}

}  // namespace levychain
