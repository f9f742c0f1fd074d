#pragma once

// Command-line surface: subcommand dispatch, signature files, and CSV / SVG /
// JSON emission.  All floats are printed at 12 significant digits and every
// reduction is deterministic, so identical configs produce byte-identical
// artifacts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gausspath/arith.hpp"
#include "gausspath/atlas.hpp"
#include "gausspath/expsums.hpp"
#include "gausspath/moments.hpp"
#include "gausspath/paths.hpp"
#include "gausspath/random_model.hpp"

namespace gausspath::cli {

using arith::EpsilonSignature;
using paths::PathSample;
using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

enum class Command { path, atlas_cmd, cusp, probe, moments_cmd, sample, classify };

struct RunConfig {
    Command command = Command::path;
    std::optional<std::string> signature_file;
    std::optional<EpsilonSignature> signature;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    // per-command knobs
    std::int64_t c = 13;
    std::int64_t grid = 512;
    std::int64_t Z = 5;
    double tolerance = 1e-4;
    std::int64_t qmax = 100;
    std::int64_t a = 1;
    std::int64_t q = 23;
    std::vector<double> offsets;
    std::vector<double> t;
    std::vector<std::int64_t> m_orders;
    std::vector<std::int64_t> n_orders;
    std::vector<std::int64_t> Q_list;
    std::int64_t Hmax = 10000;
    std::int64_t N = 100000;
    std::int64_t trials = 0;
    double delta = 0.0;
    bool svg = false;
};

// ---------------------------------------------------------------------------
// formatting and emission
// ---------------------------------------------------------------------------

inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
}

inline void write_path_csv(const PathSample& s, std::ostream& os) {
    os << "t,re,im\n";
    for (std::int64_t i = 0; i <= s.resolution; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(s.resolution);
        const auto& v = s.values[static_cast<size_t>(i)];
        os << fmt12(t) << ',' << fmt12(v.real()) << ',' << fmt12(v.imag()) << '\n';
    }
}

inline PathSample read_path_csv(std::istream& is) {
    PathSample s;
    std::string line;
    if (!std::getline(is, line) || line.rfind("t,re,im", 0) != 0)
        throw std::invalid_argument("read_path_csv: missing header");
    std::vector<std::complex<double>> vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        double col[3] = {0, 0, 0};
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(ls, cell, ',')) throw std::invalid_argument("read_path_csv: short row");
            col[i] = std::stod(cell);
        }
        vals.emplace_back(col[1], col[2]);
    }
    if (vals.size() < 2) throw std::invalid_argument("read_path_csv: too few rows");
    s.resolution = static_cast<std::int64_t>(vals.size()) - 1;
    s.values = std::move(vals);
    return s;
}

// Single-polyline SVG, viewBox fitted to the data with a 5% margin, stroke
// width 0.5% of the view width.  SVG y grows downward, so im is negated.
inline void emit_svg(const PathSample& s, const fs::path& out) {
    if (s.values.empty()) throw std::invalid_argument("emit_svg: empty sample");
    fs::create_directories(out.parent_path().empty() ? fs::path(".") : out.parent_path());
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& v : s.values) {
        xmin = std::min(xmin, v.real());
        xmax = std::max(xmax, v.real());
        ymin = std::min(ymin, -v.imag());
        ymax = std::max(ymax, -v.imag());
    }
    double w = xmax - xmin, h = ymax - ymin;
    if (w <= 0) w = 1.0;
    if (h <= 0) h = 1.0;
    double mx = 0.05 * w, my = 0.05 * h;
    double vw = w + 2 * mx;

    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("emit_svg: cannot open " + out.string());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt12(xmin - mx) << ' ' << fmt12(ymin - my)
       << ' ' << fmt12(vw) << ' ' << fmt12(h + 2 * my) << "\">\n";
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"" << fmt12(0.005 * vw) << "\" points=\"";
    for (size_t i = 0; i < s.values.size(); ++i) {
        if (i) os << ' ';
        os << fmt12(s.values[i].real()) << ',' << fmt12(-s.values[i].imag());
    }
    os << "\"/>\n</svg>\n";
    if (!os) throw std::runtime_error("emit_svg: write failed for " + out.string());
}

// ---------------------------------------------------------------------------
// signature files: {"Z": 5, "eps": {"2": 1, "3": -1, "5": 0}}
// ---------------------------------------------------------------------------

inline EpsilonSignature signature_from_json(const json& j) {
    if (!j.contains("Z") || !j.contains("eps"))
        throw std::invalid_argument("signature file: expected fields Z and eps");
    EpsilonSignature sig;
    sig.Z = j.at("Z").get<std::int64_t>();
    for (auto& [key, val] : j.at("eps").items()) sig.eps[std::stoll(key)] = val.get<int>();
    // omitted primes <= Z are an error, not a default
    sig.validate();
    return sig;
}

inline EpsilonSignature load_signature_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open signature file: " + path);
    json j;
    is >> j;
    return signature_from_json(j);
}

inline json signature_to_json(const EpsilonSignature& sig) {
    json eps = json::object();
    for (auto& [p, e] : sig.eps) eps[std::to_string(p)] = e;
    return json{{"Z", sig.Z}, {"eps", eps}};
}

// ---------------------------------------------------------------------------
// command implementations
// ---------------------------------------------------------------------------

namespace detail {

inline json config_echo(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    switch (cfg.command) {
        case Command::path: j["command"] = "path"; j["c"] = cfg.c; j["grid"] = cfg.grid; break;
        case Command::atlas_cmd: j["command"] = "atlas"; j["Z"] = cfg.Z; j["grid"] = cfg.grid; j["tol"] = cfg.tolerance; break;
        case Command::cusp: j["command"] = "cusp"; j["qmax"] = cfg.qmax; j["a"] = cfg.a; break;
        case Command::probe: j["command"] = "probe"; j["a"] = cfg.a; j["q"] = cfg.q; break;
        case Command::moments_cmd: j["command"] = "moments"; j["Hmax"] = cfg.Hmax; break;
        case Command::sample: j["command"] = "sample"; j["N"] = cfg.N; j["grid"] = cfg.grid; break;
        case Command::classify: j["command"] = "classify"; j["Q"] = cfg.Q_list.empty() ? 0 : cfg.Q_list[0]; j["Z"] = cfg.Z; break;
    }
    if (cfg.signature) j["signature"] = signature_to_json(*cfg.signature);
    return j;
}

inline void write_manifest(const RunConfig& cfg, const json& extra = json::object()) {
    json j;
    j["version"] = kVersion;
    j["config"] = config_echo(cfg);
    for (auto& [k, v] : extra.items()) j[k] = v;
    std::ofstream os(fs::path(cfg.output_dir) / "run_manifest.json", std::ios::binary);
    os << j.dump(2) << '\n';
}

inline int run_path(const RunConfig& cfg) {
    PathSample s = paths::path_grid(cfg.c, cfg.grid);
    fs::create_directories(cfg.output_dir);
    std::string stem = "path_c" + std::to_string(cfg.c);
    {
        std::ofstream os(fs::path(cfg.output_dir) / (stem + ".csv"), std::ios::binary);
        write_path_csv(s, os);
    }
    if (cfg.svg) emit_svg(s, fs::path(cfg.output_dir) / (stem + ".svg"));
    write_manifest(cfg);
    return 0;
}

inline int run_atlas(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    auto sigs = atlas::enumerate_signatures(cfg.Z);
    json index = json::array();
    for (const auto& sig : sigs) {
        auto spec = atlas::make_shape_spec(sig, cfg.tolerance);
        PathSample s = atlas::gsharp_grid(spec, cfg.grid);
        std::string stem = sig.compact_name();
        {
            std::ofstream os(fs::path(cfg.output_dir) / (stem + ".csv"), std::ios::binary);
            write_path_csv(s, os);
        }
        emit_svg(s, fs::path(cfg.output_dir) / (stem + ".svg"));
        json entry;
        entry["signature"] = signature_to_json(sig);
        entry["name"] = stem;
        entry["B"] = spec.B;
        entry["tail_bound"] = spec.tail_bound;
        entry["csv"] = stem + ".csv";
        entry["svg"] = stem + ".svg";
        index.push_back(entry);
    }
    {
        json j;
        j["Z"] = cfg.Z;
        j["grid"] = cfg.grid;
        j["tolerance"] = cfg.tolerance;
        j["signatures"] = index;
        std::ofstream os(fs::path(cfg.output_dir) / "atlas_index.json", std::ios::binary);
        os << j.dump(2) << '\n';
    }
    write_manifest(cfg, json{{"shapes", sigs.size()}});
    return 0;
}

inline json cusp_report_to_json(const expsums::CuspReport& r) {
    json j;
    j["a"] = r.a;
    j["q"] = r.q;
    j["signature"] = signature_to_json(r.signature);
    j["s_star_re"] = r.s_star.real();
    j["s_star_im"] = r.s_star.imag();
    j["c_plus"] = r.c_plus;
    j["c_prime"] = r.c_prime;
    j["c_minus"] = r.c_minus;
    j["slope_plus"] = r.slope_plus;
    j["slope_minus"] = r.slope_minus;
    j["all_qrs"] = r.all_qrs;
    j["classification"] = expsums::to_string(r.classification);
    return j;
}

inline int run_cusp(const RunConfig& cfg) {
    if (!cfg.signature) throw std::invalid_argument("cusp: requires --sig");
    fs::create_directories(cfg.output_dir);
    auto points = expsums::find_cusp_points(*cfg.signature, cfg.qmax);
    json out = json::array();
    for (auto& [q, flag] : points) {
        auto rep = expsums::cusp_constants(cfg.a % q == 0 ? 1 : cfg.a, q, *cfg.signature);
        json j = cusp_report_to_json(rep);
        j["all_qrs"] = flag;
        out.push_back(j);
    }
    std::ofstream os(fs::path(cfg.output_dir) / "cusp_reports.json", std::ios::binary);
    os << out.dump(2) << '\n';
    write_manifest(cfg, json{{"points", points.size()}});
    return 0;
}

inline int run_probe(const RunConfig& cfg) {
    if (!cfg.signature) throw std::invalid_argument("probe: requires --sig");
    std::vector<double> offsets = cfg.offsets;
    if (offsets.empty())
        offsets = {1e-4, -1e-4, 1e-5, -1e-5, 1e-6, -1e-6, 1e-7, -1e-7, 1e-8, -1e-8};
    auto rows = expsums::local_slope_probe(*cfg.signature, cfg.a, cfg.q, offsets, cfg.tolerance);
    fs::create_directories(cfg.output_dir);
    std::ofstream os(fs::path(cfg.output_dir) / "probe.csv", std::ios::binary);
    os << "offset,quotient_re,quotient_im\n";
    for (auto& r : rows)
        os << fmt12(r.offset) << ',' << fmt12(r.quotient.real()) << ',' << fmt12(r.quotient.imag()) << '\n';
    write_manifest(cfg);
    return 0;
}

inline int run_moments(const RunConfig& cfg) {
    moments::MomentOrder order;
    order.t = cfg.t;
    for (auto v : cfg.m_orders) order.m.push_back(static_cast<int>(v));
    for (auto v : cfg.n_orders) order.n.push_back(static_cast<int>(v));
    if (cfg.Q_list.empty()) throw std::invalid_argument("moments: requires --Q");
    auto rep = moments::convergence_report(order, cfg.Q_list, cfg.Hmax, cfg.signature);
    fs::create_directories(cfg.output_dir);
    std::ofstream os(fs::path(cfg.output_dir) / "moments.csv", std::ios::binary);
    os << "Q,re_emp,im_emp,re_lim,im_lim,abs_diff\n";
    for (auto& r : rep.rows) {
        os << r.Q << ',' << fmt12(r.empirical.real()) << ',' << fmt12(r.empirical.imag()) << ','
           << fmt12(r.limit.real()) << ',' << fmt12(r.limit.imag()) << ',' << fmt12(r.abs_diff) << '\n';
    }
    write_manifest(cfg, json{{"fitted_slope", rep.fitted_slope}});
    return 0;
}

inline int run_sample(const RunConfig& cfg) {
    if (!cfg.signature && cfg.delta > 0)
        throw std::invalid_argument("sample: deviation estimate requires --sig");
    fs::create_directories(cfg.output_dir);
    if (cfg.delta > 0) {
        auto rep = random_model::estimate_deviation_prob(*cfg.signature, cfg.delta,
                                                         cfg.trials > 0 ? cfg.trials : 200, cfg.N, cfg.grid,
                                                         cfg.seed);
        json j;
        j["Z"] = rep.Z;
        j["delta"] = rep.delta;
        j["trials"] = rep.trials;
        j["N"] = rep.N;
        j["R"] = rep.R;
        j["seed"] = rep.seed;
        j["estimate"] = rep.estimate;
        j["stderr"] = rep.stderr_est;
        std::ofstream os(fs::path(cfg.output_dir) / "deviation.json", std::ios::binary);
        os << j.dump(2) << '\n';
    } else {
        auto sample = random_model::sample_multiplicative(cfg.N + 1, cfg.signature, cfg.seed);
        PathSample s = random_model::sample_limit_path(sample, cfg.N, cfg.grid);
        std::ofstream os(fs::path(cfg.output_dir) / "sample_path.csv", std::ios::binary);
        write_path_csv(s, os);
        if (cfg.svg) emit_svg(s, fs::path(cfg.output_dir) / "sample_path.svg");
    }
    write_manifest(cfg);
    return 0;
}

// Group D_Q by epsilon signature at level Z and report the mean sup-distance
// of each group to its matching shape G#.
inline int run_classify(const RunConfig& cfg) {
    if (cfg.Q_list.empty()) throw std::invalid_argument("classify: requires --Q");
    std::int64_t Q = cfg.Q_list[0];
    auto family = arith::enumerate_family(Q);
    fs::create_directories(cfg.output_dir);

    std::map<std::string, std::pair<std::vector<std::int64_t>, EpsilonSignature>> groups;
    for (std::int64_t c : family.members) {
        auto sig = paths::eps_signature(c, cfg.Z);
        auto& g = groups.try_emplace(sig.compact_name(), std::vector<std::int64_t>{}, sig).first->second;
        g.first.push_back(c);
    }

    std::ofstream os(fs::path(cfg.output_dir) / "classify.csv", std::ios::binary);
    os << "signature,count,mean_sup_distance\n";
    for (auto& [name, group] : groups) {
        auto spec = atlas::make_shape_spec(group.second, cfg.tolerance);
        PathSample sharp = atlas::gsharp_grid(spec, cfg.grid);
        std::vector<double> dists(group.first.size(), 0.0);
        par::parallel_for(static_cast<std::int64_t>(group.first.size()), [&](std::int64_t i) {
            PathSample p = paths::path_grid(group.first[static_cast<size_t>(i)], cfg.grid);
            dists[static_cast<size_t>(i)] = paths::sup_distance(p, sharp);
        });
        double mean = par::tree_reduce(std::move(dists), 0.0) / static_cast<double>(group.first.size());
        os << name << ',' << group.first.size() << ',' << fmt12(mean) << '\n';
    }
    write_manifest(cfg, json{{"groups", groups.size()}});
    return 0;
}

} // namespace detail

// Dispatch.  Exit status: 0 success, 1 numeric-budget rejection, 2 config
// errors.
inline int run(const RunConfig& cfg) {
    try {
        switch (cfg.command) {
            case Command::path: return detail::run_path(cfg);
            case Command::atlas_cmd: return detail::run_atlas(cfg);
            case Command::cusp: return detail::run_cusp(cfg);
            case Command::probe: return detail::run_probe(cfg);
            case Command::moments_cmd: return detail::run_moments(cfg);
            case Command::sample: return detail::run_sample(cfg);
            case Command::classify: return detail::run_classify(cfg);
        }
    } catch (const moments::budget_error& e) {
        std::fprintf(stderr, "budget: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}

inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"quadratic Gauss paths, limit shapes, exponential sums and moments"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string sig_file;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.output_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "RNG seed");
    };

    auto* path_cmd = app.add_subcommand("path", "Gauss path of one modulus, CSV grid");
    path_cmd->add_option("--c", cfg.c, "modulus in D (squarefree, 1 mod 4)")->required();
    path_cmd->add_option("--grid", cfg.grid, "grid resolution");
    path_cmd->add_flag("--svg", cfg.svg, "also emit SVG");
    add_common(path_cmd);

    auto* atlas_cmd = app.add_subcommand("atlas", "all shapes G# at level Z, CSV+SVG+manifest");
    atlas_cmd->add_option("--Z", cfg.Z, "prime cutoff")->required();
    atlas_cmd->add_option("--grid", cfg.grid, "grid resolution");
    atlas_cmd->add_option("--tol", cfg.tolerance, "certified tolerance");
    add_common(atlas_cmd);

    auto* cusp_cmd = app.add_subcommand("cusp", "scan for cusp points and report constants");
    cusp_cmd->add_option("--sig", sig_file, "signature JSON file")->required();
    cusp_cmd->add_option("--qmax", cfg.qmax, "scan bound");
    cusp_cmd->add_option("--a", cfg.a, "numerator for the reports");
    add_common(cusp_cmd);

    auto* probe_cmd = app.add_subcommand("probe", "normalized difference quotients at t0 = a/q");
    probe_cmd->add_option("--sig", sig_file, "signature JSON file")->required();
    probe_cmd->add_option("--a", cfg.a, "numerator")->required();
    probe_cmd->add_option("--q", cfg.q, "denominator")->required();
    probe_cmd->add_option("--offsets", cfg.offsets, "offsets t - t0");
    probe_cmd->add_option("--tol", cfg.tolerance, "shape tolerance");
    add_common(probe_cmd);

    auto* mom_cmd = app.add_subcommand("moments", "empirical vs limiting moments over Q");
    mom_cmd->add_option("--t", cfg.t, "t tuple")->required();
    mom_cmd->add_option("--m", cfg.m_orders, "conjugate orders")->required();
    mom_cmd->add_option("--n", cfg.n_orders, "plain orders")->required();
    mom_cmd->add_option("--Q", cfg.Q_list, "family sizes")->required();
    mom_cmd->add_option("--Hmax", cfg.Hmax, "tuple cutoff");
    mom_cmd->add_option("--sig", sig_file, "signature JSON file (conditioned)");
    add_common(mom_cmd);

    auto* sample_cmd = app.add_subcommand("sample", "sample G* or estimate deviation probabilities");
    sample_cmd->add_option("--sig", sig_file, "signature JSON file");
    sample_cmd->add_option("--N", cfg.N, "series truncation");
    sample_cmd->add_option("--grid", cfg.grid, "grid resolution");
    sample_cmd->add_option("--delta", cfg.delta, "deviation threshold (enables MC estimate)");
    sample_cmd->add_option("--trials", cfg.trials, "MC trials");
    sample_cmd->add_flag("--svg", cfg.svg, "also emit SVG");
    add_common(sample_cmd);

    auto* cls_cmd = app.add_subcommand("classify", "group D_Q by signature, distance to matching G#");
    cls_cmd->add_option("--Q", cfg.Q_list, "family size")->required();
    cls_cmd->add_option("--Z", cfg.Z, "signature level");
    cls_cmd->add_option("--grid", cfg.grid, "grid resolution");
    cls_cmd->add_option("--tol", cfg.tolerance, "shape tolerance");
    add_common(cls_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!sig_file.empty()) {
            cfg.signature_file = sig_file;
            cfg.signature = load_signature_file(sig_file);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    if (path_cmd->parsed()) cfg.command = Command::path;
    else if (atlas_cmd->parsed()) cfg.command = Command::atlas_cmd;
    else if (cusp_cmd->parsed()) cfg.command = Command::cusp;
    else if (probe_cmd->parsed()) cfg.command = Command::probe;
    else if (mom_cmd->parsed()) cfg.command = Command::moments_cmd;
    else if (sample_cmd->parsed()) cfg.command = Command::sample;
    else if (cls_cmd->parsed()) cfg.command = Command::classify;

    if (probe_cmd->parsed() && probe_cmd->count("--tol") == 0) cfg.tolerance = 1e-7;

    return run(cfg);
}

} // namespace gausspath::cli
