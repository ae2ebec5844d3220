#include "doctest.h"

#include "levychain/config.hpp"
#include "levychain/expression.hpp"
#include "levychain/reporting.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace levychain;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("levychain_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(LEVYCHAIN_CLI) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("expression parser") {
    Expression e("2*x^2 - 3*x + 1", {"x"});
    double x = 2.0;
    CHECK(e(std::span<const double>(&x, 1)) == doctest::Approx(3.0));
    Expression f("exp(-abs(x))/abs(x) + max(x, 0) * step(x - 1)", {"x"});
    x = -0.5;
    CHECK(f(std::span<const double>(&x, 1)) == doctest::Approx(2.0 * std::exp(-0.5)));
    Expression g("-2^2 + sqrt(x1*x2) + min(x1, pi)", {"x1", "x2"});
    std::vector<double> v{4.0, 9.0};
    CHECK(g(v) == doctest::Approx(-4.0 + 6.0 + 3.14159265358979).epsilon(1e-12));
    Expression h("log(exp(x)) / (1 + 1)", {"x"});
    x = 5.0;
    CHECK(h(std::span<const double>(&x, 1)) == doctest::Approx(2.5));
    CHECK_THROWS_AS(Expression("2 * (x", {"x"}), std::invalid_argument);
    CHECK_THROWS_AS(Expression("y + 1", {"x"}), std::invalid_argument);
    CHECK_THROWS_AS(Expression("foo(1)", {"x"}), std::invalid_argument);
}

TEST_CASE("payoff shorthands") {
    // shorthands act on the state x itself
    double x = -0.25;
    CHECK(parse_payoff("put:1")(std::span<const double>(&x, 1)) == doctest::Approx(1.25));
    CHECK(parse_payoff("call:1")(std::span<const double>(&x, 1)) == 0.0);
    CHECK(parse_payoff("indicator:-1:0")(std::span<const double>(&x, 1)) == 1.0);
    CHECK(parse_payoff("one")(std::span<const double>(&x, 1)) == 1.0);
    CHECK(parse_payoff("x^2")(std::span<const double>(&x, 1)) == doctest::Approx(x * x));
}

TEST_CASE("config parsing") {
    auto c = parse_config(R"({"version": 1, "model": {"fixture": "gaussian_drift"}, "M": 5, "h": [1, 0.5, 0.25]})");
    CHECK(c.model_label == "gaussian_drift");
    CHECK(c.scheme == SchemeKind::Scheme1);
    CHECK(c.h_list.size() == 3);
    CHECK(c.M_for(0.25) == 5.0);
    CHECK(c.hash == fnv1a64(c.canonical));

    auto lr = parse_config(R"({"version": 1, "model": {"family": "cgmy", "mu": "martingale"}, "M": "log_rule",
                               "h": [0.5]})");
    CHECK(lr.M_for(std::ldexp(1.0, -9)) == doctest::Approx(0.5 * std::log(512.0)));
    CHECK(lr.model.mu[0] == doctest::Approx(-0.0784070360).epsilon(1e-8));

    auto custom = parse_config(R"j({"version": 1, "scheme": "scheme2", "h": [0.5, 0.25],
        "model": {"family": "levy", "sigma2": 0, "density": "exp(-abs(x))/abs(x)", "V": 1}})j");
    CHECK(custom.model.measure.has_density());
    double y = 0.5;
    CHECK(custom.model.measure.density(std::span<const double>(&y, 1)) == doctest::Approx(2.0 * std::exp(-0.5)));

    CHECK_THROWS_AS(parse_config(R"({"model": {"fixture": "gaussian"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version": 2, "model": {"fixture": "gaussian"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version": 1, "model": {"fixture": "gaussian"}, "h": [0.25, 0.5]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version": 1, "model": {"fixture": "gaussian"}, "tol": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version": 1, "model": {"fixture": "gaussian"}, "route": "x"})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version": 1, "model": {"family": "levy", "atoms": [{"x": 0, "w": 1}]}})"),
                    ModelError);
    CHECK_THROWS(parse_config("{not json"));
}

TEST_CASE("csv writers carry provenance") {
    RunMeta meta{"density", "gaussian", "scheme1", 0x1234abcdULL, 1e-10, 1e-10};
    DensityTable t;
    t.h = 0.5;
    t.t = 1.0;
    t.M = 5.0;
    t.points = {Index{-1}, Index{0}, Index{1}};
    t.values = {0.2, 0.4, 0.2};
    std::ostringstream os;
    write_density_csv(os, t, meta, {0.21, 0.39, 0.21});
    std::string s = os.str();
    for (const char* key : {"#t=", "#h=", "#M=", "#route=", "#deficit=", "#config_hash=", "#tol="})
        CHECK(s.find(key) != std::string::npos);
    CHECK(s.find(hex64(0x1234abcdULL)) != std::string::npos);
    CHECK(gnuplot_script("a.csv", "title", 1, 2, true).find("logscale") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    auto dir = scratch("exit");
    auto ok = write_file(dir, "ok.json",
                         R"({"version": 1, "model": {"fixture": "gaussian_drift"}, "M": 5, "h": [1, 0.5]})");
    auto empty_h = write_file(dir, "empty.json", R"({"version": 1, "model": {"fixture": "gaussian"}, "h": []})");
    auto no_density = write_file(
        dir, "nodens.json",
        R"({"version": 1, "model": {"family": "levy", "sigma2": 0, "mu": 1, "V": 0}, "scheme": "scheme2", "h": [0.5]})");
    auto bad_price = write_file(dir, "badprice.json", R"({"version": 1, "model": {"family": "cgmy", "lambda_plus": 0.8,
        "mu": "martingale"}, "h": [0.5], "pricing": {"strikes": [100]}})");
    auto wrong_order = write_file(dir, "wrong.json", R"({"version": 1, "model": {"fixture": "vg"},
        "expected_order": "quadratic"})");
    auto good_order = write_file(dir, "good.json", R"({"version": 1, "model": {"fixture": "gaussian"},
        "h": [0.5, 0.25, 0.125, 0.0625]})");
    std::string out = " --out " + (dir / "out").string();

    CHECK(run_cli("--config " + ok.string() + out + " density") == 0);
    CHECK(fs::exists(dir / "out" / "density_h00_expm.csv"));
    CHECK(run_cli("--config " + ok.string() + out + " psi") == 0);
    CHECK(run_cli("--config " + empty_h.string() + out + " density") == 2);
    CHECK(run_cli("--config " + no_density.string() + out + " density") == 2);
    CHECK(run_cli("--config " + bad_price.string() + out + " price") == 2);
    CHECK(run_cli("--config " + (dir / "missing.json").string() + out + " density") == 2);
    CHECK(run_cli("--config " + ok.string() + out + " frobnicate") == 2);
    CHECK(run_cli("--config " + wrong_order.string() + out + " converge") == 1);
    CHECK(run_cli("--config " + good_order.string() + out + " converge") == 0);
}

TEST_CASE("identical configs give byte-identical csv") {
    auto dir = scratch("det");
    auto cfg = write_file(dir, "c.json", R"({"version": 1, "model": {"fixture": "cp_two_atoms"}, "M": 4,
        "h": [0.3333333333333333, 0.1111111111111111], "p_grid": {"from": 0, "to": 3.14159, "points": 9}})");
    for (const char* run : {"a", "b"}) {
        std::string out = " --out " + (dir / run).string();
        REQUIRE(run_cli("--config " + cfg.string() + out + " density") == 0);
        REQUIRE(run_cli("--config " + cfg.string() + out + " psi") == 0);
    }
    int compared = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        if (e.path().extension() != ".csv") continue;
        CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
        ++compared;
    }
    CHECK(compared >= 3);
    CHECK(slurp(dir / "a" / "psi.csv").find("#config_hash=") != std::string::npos);
}
