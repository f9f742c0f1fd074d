#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gausspath/cli.hpp"

using namespace gausspath;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("gausspath_test_" + name);
    fs::remove_all(d);
    return d;
}

int run_argv(std::vector<std::string> args) {
    std::vector<const char*> argv;
    argv.push_back("gausspath");
    for (auto& a : args) argv.push_back(a.c_str());
    return cli::cli_main(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST_CASE("path command writes the expected CSV") {
    auto dir = fresh_dir("path");
    cli::RunConfig cfg;
    cfg.command = cli::Command::path;
    cfg.c = 13;
    cfg.grid = 12;
    cfg.output_dir = dir.string();
    CHECK(cli::run(cfg) == 0);

    std::ifstream is(dir / "path_c13.csv");
    REQUIRE(is.good());
    auto sample = cli::read_path_csv(is);
    CHECK(sample.values.size() == 13);
    CHECK(std::abs(sample.values.back() - std::complex<double>(1.0, 0.0)) < 1e-9);
    CHECK(fs::exists(dir / "run_manifest.json"));
}

TEST_CASE("unknown flags exit with status 2") {
    CHECK(run_argv({"path", "--bogus", "7"}) == 2);
    CHECK(run_argv({"definitely-not-a-command"}) == 2);
}

TEST_CASE("config errors exit with status 2") {
    auto dir = fresh_dir("bad");
    cli::RunConfig cfg;
    cfg.command = cli::Command::path;
    cfg.c = 15;  // not in D
    cfg.output_dir = dir.string();
    CHECK(cli::run(cfg) == 2);
}

TEST_CASE("budget rejection exits with status 1") {
    auto dir = fresh_dir("budget");
    cli::RunConfig cfg;
    cfg.command = cli::Command::moments_cmd;
    cfg.t = {0.5};
    cfg.m_orders = {2};
    cfg.n_orders = {2};
    cfg.Q_list = {50};
    cfg.Hmax = 10000;
    cfg.output_dir = dir.string();
    CHECK(cli::run(cfg) == 1);
}

TEST_CASE("signature files reject omitted primes") {
    auto dir = fresh_dir("sig");
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "bad_sig.json");
        os << R"({"Z": 5, "eps": {"2": 1, "3": -1}})";
    }
    CHECK(run_argv({"probe", "--sig", (dir / "bad_sig.json").string(), "--a", "1", "--q", "23"}) == 2);
    {
        std::ofstream os(dir / "good_sig.json");
        os << R"({"Z": 5, "eps": {"2": 1, "3": 1, "5": -1}})";
    }
    auto sig = cli::load_signature_file((dir / "good_sig.json").string());
    CHECK(sig.at(5) == -1);
}

TEST_CASE("svg emission structure") {
    paths::PathSample two;
    two.resolution = 1;
    two.values = {{0.0, 0.0}, {1.0, 0.0}};
    auto dir = fresh_dir("svg");
    cli::emit_svg(two, dir / "two.svg");
    auto text = slurp(dir / "two.svg");
    CHECK(text.find("<polyline") != std::string::npos);
    // two points -> exactly one space inside points=
    auto pos = text.find("points=\"");
    auto end = text.find('"', pos + 8);
    std::string pts = text.substr(pos + 8, end - pos - 8);
    CHECK(std::count(pts.begin(), pts.end(), ' ') == 1);

    // grid sample: point count equals R+1, including a production-size path
    auto s = paths::path_grid(13, 64);
    cli::emit_svg(s, dir / "c13.svg");
    text = slurp(dir / "c13.svg");
    pos = text.find("points=\"");
    end = text.find('"', pos + 8);
    pts = text.substr(pos + 8, end - pos - 8);
    CHECK(std::count(pts.begin(), pts.end(), ' ') == 64);

    auto big = paths::path_grid(163841, 8192);
    cli::emit_svg(big, dir / "c163841.svg");
    text = slurp(dir / "c163841.svg");
    pos = text.find("points=\"");
    end = text.find('"', pos + 8);
    pts = text.substr(pos + 8, end - pos - 8);
    CHECK(std::count(pts.begin(), pts.end(), ' ') == 8192);

    paths::PathSample empty;
    CHECK_THROWS_AS(cli::emit_svg(empty, dir / "x.svg"), std::invalid_argument);
}

TEST_CASE("CSV round-trips at the printed precision") {
    auto s = paths::path_grid(17, 32);
    std::ostringstream os;
    cli::write_path_csv(s, os);
    std::istringstream is(os.str());
    auto back = cli::read_path_csv(is);
    REQUIRE(back.values.size() == s.values.size());
    for (size_t i = 0; i < s.values.size(); ++i) {
        CHECK(cli::fmt12(back.values[i].real()) == cli::fmt12(s.values[i].real()));
        CHECK(cli::fmt12(back.values[i].imag()) == cli::fmt12(s.values[i].imag()));
    }
}

TEST_CASE("atlas runs are byte-identical") {
    auto d1 = fresh_dir("atlas1");
    auto d2 = fresh_dir("atlas2");
    for (auto& d : {d1, d2}) {
        cli::RunConfig cfg;
        cfg.command = cli::Command::atlas_cmd;
        cfg.Z = 2;
        cfg.grid = 64;
        cfg.tolerance = 1e-4;
        cfg.output_dir = d.string();
        REQUIRE(cli::run(cfg) == 0);
    }
    int files = 0;
    for (auto& entry : fs::directory_iterator(d1)) {
        auto name = entry.path().filename();
        if (name == "run_manifest.json") continue;
        CHECK(slurp(entry.path()) == slurp(d2 / name));
        ++files;
    }
    CHECK(files == 5);  // 2 csv + 2 svg + atlas_index.json
}

TEST_CASE("sample command emits a path and deviation estimates emit JSON") {
    auto dir = fresh_dir("sample");
    cli::RunConfig cfg;
    cfg.command = cli::Command::sample;
    cfg.N = 2000;
    cfg.grid = 32;
    cfg.seed = 5;
    cfg.output_dir = dir.string();
    CHECK(cli::run(cfg) == 0);
    CHECK(fs::exists(dir / "sample_path.csv"));

    {
        std::ofstream os(dir / "sig.json");
        os << R"({"Z": 5, "eps": {"2": 1, "3": 1, "5": -1}})";
    }
    cli::RunConfig dev = cfg;
    dev.signature = cli::load_signature_file((dir / "sig.json").string());
    dev.delta = 1e6;
    dev.trials = 3;
    CHECK(cli::run(dev) == 0);
    auto j = nlohmann::json::parse(slurp(dir / "deviation.json"));
    CHECK(j.at("estimate").get<double>() == 0.0);
    CHECK(j.at("Z").get<int>() == 5);
    CHECK(j.contains("stderr"));
}

TEST_CASE("classify groups a small family") {
    auto dir = fresh_dir("classify");
    cli::RunConfig cfg;
    cfg.command = cli::Command::classify;
    cfg.Q_list = {40};
    cfg.Z = 3;
    cfg.grid = 64;
    cfg.tolerance = 1e-3;
    cfg.output_dir = dir.string();
    CHECK(cli::run(cfg) == 0);
    auto text = slurp(dir / "classify.csv");
    CHECK(text.rfind("signature,count,mean_sup_distance", 0) == 0);
    // D_40 = {41, 53, 57, 61, 65, 69, 73, 77} spread over signatures
    int lines = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    CHECK(lines >= 3);
}

TEST_CASE("probe command emits the quotient table") {
    auto dir = fresh_dir("probe");
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "sig.json");
        os << R"({"Z": 5, "eps": {"2": 1, "3": 1, "5": -1}})";
    }
    CHECK(run_argv({"probe", "--sig", (dir / "sig.json").string(), "--a", "1", "--q", "23", "--offsets", "1e-4",
                    "-1e-4", "--tol", "1e-6", "--out", (dir / "out").string()}) == 0);
    auto text = slurp(dir / "out" / "probe.csv");
    CHECK(text.rfind("offset,quotient_re,quotient_im", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
