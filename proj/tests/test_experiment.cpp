#include "gsp/experiment.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gsp;
namespace fs = std::filesystem;

namespace {

const fs::path configs = GSP_TEST_CONFIGS;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gsp_unit_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        rows.push_back(f);
    }
    return rows;
}

int config_error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return exit_code_for(e.kind());
    }
    return 0;
}

} // namespace

TEST_CASE("config schema") {
    CHECK(config_error_of("{not json") == 2);
    CHECK(config_error_of(R"({"space_dim": 3})") == 2);
    CHECK(config_error_of(R"({"potential": {"type": "power", "s": 4}, "mode": "bogus"})") == 2);
    CHECK(config_error_of(R"({"potential": {"type": "power", "s": 4}, "extra": 1})") == 2);
    CHECK(config_error_of(R"({"potential": {"type": "power", "s": 4}, "mode": "linear", "mu": {"offsets": [0]}})") == 2);
    CHECK(config_error_of(
              R"({"potential": {"type": "power", "s": 4}, "mode": "linear", "mu": {"sweep": {"from_offset": -1, "to_offset": 1, "steps": 0}}})") == 2);
    CHECK(config_error_of(R"({"potential": {"type": "power", "s": 4}, "mode": "semilinear", "mu": {"offsets": [0.1]}})") == 2);

    const ExperimentConfig ok = parse_config(
        R"({"potential": {"type": "power", "s": 4}, "mode": "linear", "mu": {"sweep": {"from_offset": -0.1, "to_offset": 0.1, "steps": 8}}})");
    CHECK(ok.offsets.size() == 8);
    CHECK(ok.offsets.front() == doctest::Approx(-0.1));
    CHECK(ok.offsets.back() == doctest::Approx(0.1));
    for (double o : ok.offsets) CHECK(o != 0.0);
}

TEST_CASE("eigen mode on the shifted oscillator line") {
    const fs::path out = scratch("eigen");
    RunOverrides ov;
    ov.output_dir = out;
    const RunOutcome r = run_experiment(load_config(configs / "eigen_oscillator.json"), ov);
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(out / "spectrum.json"));
    CHECK(j["Lambda"].get<double>() == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(j["lambda2"].get<double>() == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(j["lambda2_sector"].get<int>() == 1);
    CHECK_FALSE(j["class_p"]["pass"].get<bool>());
    CHECK_FALSE(fs::exists(out / "sweep.csv"));
}

TEST_CASE("linear sweep reproduces the scalar identity") {
    const fs::path out = scratch("linear");
    RunOverrides ov;
    ov.output_dir = out;
    const RunOutcome r = run_experiment(load_config(configs / "linear_sweep.json"), ov);
    CHECK(r.exit_code == 0);
    CHECK(r.rows == 8);
    const auto rows = read_csv(out / "sweep.csv");
    REQUIRE(rows.size() == 9);
    CHECK(rows[0][3] == "u1_component");
    double prev = -1e300;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double offset = std::stod(rows[k][1]);
        const double mu = std::stod(rows[k][0]);
        CHECK(mu > prev);
        prev = mu;
        CHECK(std::stod(rows[k][3]) == doctest::Approx(-1.0 / offset).epsilon(1e-8));
        CHECK(rows[k][14] == "1");
    }
}

TEST_CASE("system mode reports Lambda*") {
    const fs::path out = scratch("system");
    RunOverrides ov;
    ov.output_dir = out;
    const RunOutcome r = run_experiment(load_config(configs / "system.json"), ov);
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(out / "spectrum.json"));
    CHECK(j["Lambda_star"].get<double>() == doctest::Approx(j["Lambda"].get<double>() - 2.0).epsilon(1e-14));
    CHECK(j["xi1"].get<double>() == doctest::Approx(2.0));
    CHECK(j["Y"][1].get<double>() == doctest::Approx(2.0));
    int solutions = 0;
    for (const auto& e : fs::directory_iterator(out)) {
        if (e.path().filename().string().rfind("solution_", 0) == 0) {
            ++solutions;
            CHECK(read_csv(e.path()).front().size() == 4);
        }
    }
    CHECK(solutions == 2);
}

TEST_CASE("exit codes of crafted failures") {
    const fs::path out = scratch("fail");
    RunOverrides ov;
    ov.output_dir = out;
    auto code = [&](const char* name) {
        try {
            return run_experiment(load_config(configs / name), ov).exit_code;
        } catch (const Error& e) {
            return exit_code_for(e.kind());
        }
    };
    CHECK(code("fail_config.json") == 2);
    CHECK(code("fail_numerical.json") == 3);
    CHECK(code("fail_certificate.json") == 4);
    CHECK(code("does_not_exist.json") == 2);
}

TEST_CASE("report curves") {
    const fs::path dir = scratch("report");
    fs::create_directories(dir);
    const std::string header =
        "mu,offset,branch,u1_component,min_ratio,max_ratio,min_ratio_2,max_ratio_2,x_norm,lower_bound,upper_bound,"
        "gs_bound,xnorm_bound,in_window,certified,iterations,uniqueness_gap\n";
    {
        std::ofstream out(dir / "sweep.csv");
        out << header << "4.7,-0.1,MP,11,11.2,11.4,nan,nan,11.4,10,20,10,22,1,1,28,1e-10\n"
            << "4.85,0.05,AMP,-21,-21,-20.8,nan,nan,21,-40,-20,-20,42,1,1,30,1e-10\n";
    }
    write_report(dir / "sweep.csv", dir / "plots");
    const auto g = read_csv(dir / "plots" / "gsp_curve.csv");
    REQUIRE(g.size() == 3);
    CHECK(std::stod(g[1][4]) > 0.0);
    CHECK(std::stod(g[1][4]) < std::stod(g[1][2]));
    CHECK(std::stod(g[2][2]) < 0.0);
    const auto b = read_csv(dir / "plots" / "blowup_curve.csv");
    CHECK(b.size() == 3);

    {
        std::ofstream out(dir / "one.csv");
        out << header << "4.7,-0.1,MP,11,11.2,11.4,nan,nan,11.4,10,20,10,22,1,1,28,1e-10\n";
    }
    write_report(dir / "one.csv", dir / "one");
    CHECK(read_csv(dir / "one" / "gsp_curve.csv").size() == 2);

    {
        std::ofstream out(dir / "bad.csv");
        out << header << "4.7,-0.1,MP,oops\n";
    }
    try {
        write_report(dir / "bad.csv", dir / "bad");
        FAIL("expected MalformedInput");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MalformedInput);
    }
    CHECK_THROWS_AS(write_report(dir / "missing.csv", dir / "bad"), Error);
}

TEST_CASE("fnv1a") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
