#pragma once

#include "levychain/fixtures.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace levychain {

/// Malformed or inconsistent run configuration (maps to the usage exit code).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

constexpr int kConfigVersion = 1;

struct RunConfig {
    int version = kConfigVersion;
    std::string model_label;
    LevyModel model;
    SchemeKind scheme = SchemeKind::Scheme1;
    std::vector<double> h_list;
    double M = 5.0;
    bool M_log_rule = false;  // M(h) = max(log(1/h)/2, 1)
    double t = 1.0;
    double window = 3.0;
    double tol = 1e-10;
    double tail_cut = 1e-10;
    std::string route = "both";  // density: fourier_discrete | expm | both
    std::string payoff = "one";
    std::optional<ExpectedOrder> expected_order;
    double slack = 0.25;
    std::vector<double> p_grid;
    // pricing
    CgmyParams cgmy;
    double S0 = 100.0;
    double rate = 0.04;
    double maturity = 0.25;
    std::vector<double> strikes;
    std::vector<double> reference_prices;

    std::string canonical;  // normalised JSON text
    uint64_t hash = 0;      // FNV-1a of `canonical`

    double M_for(double h) const;
    Fixture as_fixture() const;
};

/// Parses JSON text. Throws ConfigError for format problems and ModelError for
/// model invariants.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

uint64_t fnv1a64(const std::string& s);

}  // namespace levychain
