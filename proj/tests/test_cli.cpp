// End-to-end tests for the ssdm command-line tool. Each case shells out to
// the real binary (path injected by the build as SSDM_CLI_PATH), captures
// stdout/stderr, and inspects the JSON artifacts it writes. Fixture files are
// created in the test's working directory.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <ssdm/rng.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

struct CliOutcome {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CliOutcome run_cli(const std::string& args) {
    const std::string cmd = std::string(SSDM_CLI_PATH) + " " + args +
                            " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    CliOutcome outcome;
    outcome.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    outcome.out = slurp("cli_stdout.txt");
    outcome.err = slurp("cli_stderr.txt");
    return outcome;
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

// 80 locations on the unit square with one covariate whose coefficient is the
// constant 2; the response carries no spatial lag, so the constant model
// should win the selection contest decisively.
const std::string& fixture_csv() {
    static const std::string path = [] {
        ssdm::Rng rng(2026, 0);
        std::ofstream out("cli_fixture.csv");
        out << "u,v,y,x1\n" << std::setprecision(17);
        for (int i = 0; i < 80; ++i) {
            const double u = rng.next_uniform();
            const double v = rng.next_uniform();
            const double x1 = rng.next_normal();
            const double eps = rng.next_normal();
            out << u << ',' << v << ',' << 2.0 * x1 + 0.1 * eps << ',' << x1
                << '\n';
        }
        return std::string("cli_fixture.csv");
    }();
    return path;
}

} // namespace

TEST_CASE("fit writes a parseable result file") {
    const CliOutcome run = run_cli("fit --data " + fixture_csv() +
                                   " --h 0.8 --out cli_fit.json");
    CAPTURE(run.err);
    REQUIRE(run.code == 0);

    const nlohmann::json fit = load_json("cli_fit.json");
    CHECK(fit.at("format") == "ssdm-fit");
    CHECK(fit.at("format_version") == 1);
    CHECK(fit.at("config").at("subcommand") == "fit");
    CHECK(fit.at("n") == 80);
    CHECK(fit.at("p") == 1);
    CHECK(fit.at("kernel") == "epanechnikov");
    const double alpha = fit.at("alpha_hat").get<double>();
    CHECK(std::isfinite(alpha));
    CHECK(alpha > -1.0);
    CHECK(alpha < 1.0);
    CHECK(fit.at("sigma2_hat").get<double>() > 0.0);
    CHECK(fit.at("beta_surface").size() == 80);
    CHECK(fit.at("residuals").size() == 80);
}

TEST_CASE("fit honours constant spec and standard errors") {
    const CliOutcome run =
        run_cli("fit --data " + fixture_csv() +
                " --h 0.8 --constant 1 --se normal --out cli_fit_const.json");
    CAPTURE(run.err);
    REQUIRE(run.code == 0);

    const nlohmann::json fit = load_json("cli_fit_const.json");
    CHECK(fit.at("constant_indices") == nlohmann::json::array({1}));
    CHECK(fit.at("se_mode") == "normal");
    const double beta1 = fit.at("beta_const").at("1").get<double>();
    CHECK(beta1 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(fit.at("se_alpha").get<double>() > 0.0);
    CHECK(fit.at("se_sigma2").get<double>() > 0.0);
}

TEST_CASE("select identifies the constant coefficient") {
    const CliOutcome backward =
        run_cli("select --data " + fixture_csv() +
                " --criterion bic --algorithm backward --h 0.8 "
                "--out cli_sel_backward.json");
    CAPTURE(backward.err);
    REQUIRE(backward.code == 0);

    const nlohmann::json sel = load_json("cli_sel_backward.json");
    CHECK(sel.at("format") == "ssdm-selection");
    CHECK(sel.at("criterion") == "bic");
    CHECK(sel.at("algorithm") == "backward");
    CHECK(sel.at("chosen") == "{1}");
    CHECK(sel.at("chosen_indices") == nlohmann::json::array({1}));
    CHECK(sel.at("sel_h").get<double>() > 0.0);
    CHECK(!sel.at("trace").empty());

    const CliOutcome ctar =
        run_cli("select --data " + fixture_csv() +
                " --criterion aic --algorithm ctar --h 0.8 "
                "--out cli_sel_ctar.json");
    CAPTURE(ctar.err);
    REQUIRE(ctar.code == 0);
    const nlohmann::json sel2 = load_json("cli_sel_ctar.json");
    CHECK(sel2.at("chosen") == "{1}");
    CHECK(sel2.at("ctar_ratios").size() == 1);
}

TEST_CASE("simulate runs a small study and reports it") {
    const CliOutcome run = run_cli(
        "simulate --table 1 --n 100 --reps 2 --seed 3 --h 0.5 --h1 0.75 "
        "--out cli_sim.json");
    CAPTURE(run.err);
    REQUIRE(run.code == 0);

    const nlohmann::json sim = load_json("cli_sim.json");
    CHECK(sim.at("format") == "ssdm-simulation");
    REQUIRE(sim.at("reports").size() == 1);
    const nlohmann::json& report = sim.at("reports").at(0);
    CHECK(report.at("table") == 1);
    CHECK(report.at("n") == 100);
    CHECK(report.at("reps") == 2);
    CHECK(report.at("failures") == 0);
    CHECK(report.at("mse_alpha").get<double>() > 0.0);
    CHECK(report.at("mise_beta").size() == 3);
}

TEST_CASE("diagnose reads a saved fit") {
    const CliOutcome fit = run_cli("fit --data " + fixture_csv() +
                                   " --h 0.8 --out cli_fit_diag.json");
    REQUIRE(fit.code == 0);

    const CliOutcome run =
        run_cli("diagnose --fit cli_fit_diag.json --data " + fixture_csv() +
                " --out cli_diag.json");
    CAPTURE(run.err);
    REQUIRE(run.code == 0);

    const nlohmann::json diag = load_json("cli_diag.json");
    CHECK(diag.at("format") == "ssdm-diagnostics");
    CHECK(diag.at("n") == 80);
    CHECK(!diag.at("acf").empty());
    CHECK(diag.at("acf").size() == diag.at("pacf").size());
    CHECK(diag.at("band").get<double>() ==
          doctest::Approx(1.96 / std::sqrt(80.0)));
}

TEST_CASE("usage problems exit with code 1") {
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("frobnicate").code == 1);
    CHECK(run_cli("fit --data cli_fixture.csv").code == 1);
    const CliOutcome unknown = run_cli(
        "fit --data cli_fixture.csv --h 0.8 --out x.json --no-such-flag");
    CHECK(unknown.code == 1);
}

TEST_CASE("--help succeeds and lists the subcommands") {
    const CliOutcome top = run_cli("--help");
    CHECK(top.code == 0);
    CHECK(top.out.find("fit") != std::string::npos);
    CHECK(top.out.find("select") != std::string::npos);
    CHECK(top.out.find("simulate") != std::string::npos);
    CHECK(top.out.find("diagnose") != std::string::npos);

    const CliOutcome fit_help = run_cli("fit --help");
    CHECK(fit_help.code == 0);
    CHECK(fit_help.out.find("--h1") != std::string::npos);
    CHECK(fit_help.out.find("--standardize") != std::string::npos);
}

TEST_CASE("data problems exit with code 2") {
    const CliOutcome missing =
        run_cli("fit --data cli_no_such_file.csv --h 0.5 --out cli_x.json");
    CHECK(missing.code == 2);
    CHECK(missing.err.find("data error") != std::string::npos);
    CHECK(missing.err.find("cli_no_such_file.csv") != std::string::npos);

    const CliOutcome badcol =
        run_cli("fit --data " + fixture_csv() +
                " --h 0.8 --standardize zz --out cli_x2.json");
    CHECK(badcol.code == 2);
    CHECK(badcol.err.find("zz") != std::string::npos);

    const CliOutcome badtable =
        run_cli("simulate --table 3 --n 50 --reps 1 --out cli_x3.json");
    CHECK(badtable.code == 2);
    CHECK(badtable.err.find("--table") != std::string::npos);
}

TEST_CASE("numerical problems exit with code 3") {
    const CliOutcome tiny = run_cli("fit --data " + fixture_csv() +
                                    " --h 0.01 --out cli_y.json");
    CHECK(tiny.code == 3);
    CHECK(tiny.err.find("increase h") != std::string::npos);
}
