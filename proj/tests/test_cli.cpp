#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "cli.hpp"

using namespace tqm::cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "tqm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string strip_timestamp(const std::string& s) {
    return std::regex_replace(s, std::regex("(\"timestamp\": \"|# timestamp: )[^\"\\n]*"), "$1");
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << content;
    return p.string();
}

// the wavelet round trip and loop oracle are the slow ones; keep them light here
std::vector<std::string> light(const std::string& e) {
    if (e == "wavelet-roundtrip") return {"--param", "function=3"};
    return {};
}

}  // namespace

TEST_CASE("every experiment is deterministic and matches its schema") {
    for (const auto& e : experiment_names()) {
        for (const char* fmt : {"json", "csv"}) {
            std::vector<std::string> args{e, "--format", fmt, "--seed", "11"};
            for (const auto& a : light(e)) args.push_back(a);
            const auto a = invoke(args), b = invoke(args);
            INFO(e << " " << fmt << ": " << a.err);
            REQUIRE(a.code == 0);
            CHECK(strip_timestamp(a.out) == strip_timestamp(b.out));
            CHECK(a.out.find("timestamp") != std::string::npos);
            if (std::string(fmt) == "json") {
                const auto doc = json::parse(a.out);
                CHECK(doc["metadata"]["experiment"] == e);
                CHECK(doc["metadata"]["version"] == artifact_version);
                CHECK(doc["metadata"]["parameters"].is_object());
                CHECK(check_schema(e, doc["results"]) == "");
            } else {
                CHECK(a.out.rfind("# experiment: " + e + "\n", 0) == 0);
                CHECK(a.out.find("# parameters: ") != std::string::npos);
            }
        }
    }
}

TEST_CASE("schema check catches missing and mistyped keys") {
    auto o = run_experiment("exchange", json::object(), 0);
    CHECK(check_schema("exchange", o.results) == "");
    o.results.erase("k_exchange");
    CHECK(check_schema("exchange", o.results) != "");
    o = run_experiment("exchange", json::object(), 0);
    o.results["x_X"] = "left";
    CHECK(check_schema("exchange", o.results) != "");
}

TEST_CASE("seed changes only the randomized checks") {
    const auto a = run_experiment("emit", json::object(), 1), b = run_experiment("emit", json::object(), 2);
    CHECK(a.results["sum_std"] == b.results["sum_std"]);
    CHECK(a.results["max_modulus_deviation"].get<double>() < 1e-12);
    CHECK(b.results["max_modulus_deviation"].get<double>() < 1e-12);
}

TEST_CASE("numbers carry 17 significant digits") {
    CHECK(dump_json(json(0.1), 0) == "0.10000000000000001");
    CHECK(dump_json(json(std::nan("")), 0) == "null");
    CHECK(dump_json(json{{"a", 1}, {"b", {1.5, 2}}}, 0) == "{\"a\":1,\"b\":[1.5,2]}");
}

TEST_CASE("maxent hydrogen defaults") {
    const auto r = invoke({"maxent"});
    REQUIRE(r.code == 0);
    const auto res = json::parse(r.out)["results"];
    CHECK(std::abs(res["delta_E_eV"].get<double>() - 3728.0) < 1.0);
    CHECK(std::abs(res["delta_t_as"].get<double>() - 0.1766) < 0.001);
}

TEST_CASE("slit-sweep CSV columns move in opposite directions") {
    const auto r = invoke({"slit-sweep", "--format", "csv", "--param", "W=[1,10,100,1000,10000]"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::array<double, 3>> rows;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            CHECK(line == "W,delta_tau_sqm,delta_tau_tqm");
            header = true;
            continue;
        }
        std::array<double, 3> v{};
        CHECK(std::sscanf(line.c_str(), "%lf,%lf,%lf", &v[0], &v[1], &v[2]) == 3);
        rows.push_back(v);
    }
    REQUIRE(rows.size() == 5);
    // as W decreases the SQM spread shrinks and the TQM spread grows
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][1] >= rows[i - 1][1]);
        CHECK(rows[i][2] <= rows[i - 1][2]);
    }
}

TEST_CASE("config file, flags and overrides") {
    const auto cfg = temp_file("tqm_cfg.json", R"({"experiment": "exchange", "mu": 0.6, "side": "right"})");
    const auto r = invoke({"--config", cfg, "--param", "tau_Y=10"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["metadata"]["parameters"]["mu"] == 0.6);
    CHECK(doc["metadata"]["parameters"]["tau_Y"] == 10);
    CHECK(doc["metadata"]["parameters"]["side"] == "right");

    const auto path = (std::filesystem::temp_directory_path() / "tqm_out.csv").string();
    CHECK(invoke({"toa", "--out", path, "--format", "csv"}).code == 0);
    std::ifstream f(path);
    std::string first;
    std::getline(f, first);
    CHECK(first == "# experiment: toa");
}

TEST_CASE("exit codes") {
    auto r = invoke({});
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);

    r = invoke({"maxent", "--config", temp_file("tqm_empty.json", "  \n")});
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);

    CHECK(invoke({"nonsense"}).code == 2);
    CHECK(invoke({"toa", "--param", "sigmax=3"}).code == 2);
    CHECK(invoke({"toa", "--param", "v=-1"}).code == 2);
    CHECK(invoke({"toa", "--format", "xml"}).code == 2);
    CHECK(invoke({"exchange", "--param", "tau_Y=2"}).code == 2);
    CHECK(invoke({"maxent", "--config", temp_file("tqm_bad.json", "{oops")}).code == 2);

    // resolution and paraxial guards
    CHECK(invoke({"evolve", "--param", "grid_points=16"}).code == 3);
    r = invoke({"toa", "--param", "sigma_x=10"});
    CHECK(r.code == 3);
    CHECK(json::parse(r.out)["results"]["warnings"].size() == 1);
}
