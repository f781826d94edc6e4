#pragma once

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "wg/mesh_io.hpp"
#include "wg/study.hpp"

namespace wg {

enum ExitCode : int { exit_ok = 0, exit_solver_failure = 1, exit_bad_arguments = 2 };

namespace cli_detail {

inline bool parse_int(const std::string& s, int& v)
{
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    return ec == std::errc() && p == end;
}

inline std::vector<int> parse_levels(const std::string& text)
{
    std::vector<int> levels;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        int v = 0;
        if (!parse_int(text.substr(start, comma - start), v) || v <= 0)
            throw InvalidArgument("--levels: expected comma-separated positive integers, got '" + text + "'");
        levels.push_back(v);
        start = comma + 1;
    }
    return levels;
}

inline SplitPolicy parse_split(const std::string& text)
{
    SplitPolicy p;
    if (text == "none")
        p.kind = SplitPolicy::Kind::none;
    else if (text == "original")
        p.kind = SplitPolicy::Kind::original;
    else if (text == "modified")
        p.kind = SplitPolicy::Kind::modified;
    else if (text.rfind("fixed:", 0) == 0) {
        p.kind = SplitPolicy::Kind::fixed;
        if (!parse_int(text.substr(6), p.fixed) || p.fixed < 1)
            throw InvalidArgument("--split-rule fixed:<k> needs an integer k >= 1");
    } else
        throw InvalidArgument("--split-rule: expected none|original|modified|fixed:<k>, got '" + text + "'");
    return p;
}

/// Parallel width: hardware threads, capped by WG_THREADS when set.
inline int thread_budget()
{
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("WG_THREADS"); env && *env) {
        int cap = 0;
        if (!parse_int(env, cap) || cap < 1)
            throw InvalidArgument(std::string("WG_THREADS must be a positive integer, got '") + env + "'");
        n = std::min(n, cap);
    }
    return n;
}

/// Mesh file for one level: the path itself for a single level, else "<stem>_n<N><ext>".
inline std::string mesh_path(const std::string& base, int n, bool single)
{
    if (single)
        return base;
    const std::filesystem::path p(base);
    std::filesystem::path out = p.parent_path() / (p.stem().string() + "_n" + std::to_string(n) + p.extension().string());
    return out.string();
}

inline std::vector<int> default_levels(Domain d)
{
    if (d == Domain::square)
        return {4, 8, 16, 32};
    return {16, 32, 64, 128};
}

} // namespace cli_detail

/// Entry point of the study tool. `args` excludes the program name.
/// Returns 0 on success, 1 on solver or runtime failure, 2 on bad arguments.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Weak Galerkin mixed FEM convergence study for -div grad p = g, u.n = 0 on curved domains.",
                 "wg_study"};
    std::string domain = "square";
    std::string scheme = "original";
    int degree = 1;
    std::string levels_text;
    std::string split_text = "none";
    double rho = 1.0;
    std::string out_path;
    std::string mesh_out;
    int quad_order = -1;
    bool record_time = false;
    bool no_validate = false;

    app.add_option("--domain", domain, "square | disk | ring")
        ->check(CLI::IsMember({"square", "disk", "ring"}))
        ->capture_default_str();
    app.add_option("--scheme", scheme, "original | modified")
        ->check(CLI::IsMember({"original", "modified"}))
        ->capture_default_str();
    app.add_option("--degree", degree, "j: velocity and trace degree j, pressure degree j-1")
        ->check(CLI::Range(1, 8))
        ->capture_default_str();
    app.add_option("--levels", levels_text,
                   "comma-separated mesh resolutions, strictly increasing "
                   "(cells per side on the square, boundary chords on disk/ring; "
                   "default 4,8,16,32 on the square, 16,32,64,128 otherwise)");
    app.add_option("--split-rule", split_text,
                   "boundary chord splitting: none | original | modified | fixed:<k> (ignored on the square)")
        ->capture_default_str();
    app.add_option("--rho", rho, "stabilization parameter (> 0)")->capture_default_str();
    app.add_option("--out", out_path, "CSV output file (default: stdout)");
    app.add_option("--mesh-out", mesh_out, "write each level's mesh; several levels get a _n<N> suffix");
    app.add_option("--quadrature-order", quad_order, "polynomial exactness of the cell and edge rules (default 2j+2)");
    app.add_flag("--record-time", record_time, "fill the seconds column (output is then not reproducible)");
    app.add_flag("--no-validate", no_validate, "skip the mesh regularity validator");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_bad_arguments;
    }

    StudyConfig cfg;
    try {
        cfg.domain = domain == "square" ? Domain::square : domain == "disk" ? Domain::disk : Domain::ring;
        cfg.scheme = scheme == "original" ? Scheme::original : Scheme::modified;
        cfg.degree = degree;
        cfg.levels = levels_text.empty() ? cli_detail::default_levels(cfg.domain) : cli_detail::parse_levels(levels_text);
        cfg.split = cli_detail::parse_split(split_text);
        if (!(rho > 0.0) || !std::isfinite(rho))
            throw InvalidArgument("--rho must be a positive finite number");
        if (quad_order != -1 && quad_order < 2 * degree)
            throw InvalidArgument("--quadrature-order must be at least 2j to integrate the mass matrix");
        cfg.rho = rho;
        cfg.quadrature_order = quad_order;
        cfg.record_time = record_time;
        cfg.validate_meshes = !no_validate;
        cfg.threads = cli_detail::thread_budget();
        if (cfg.levels.size() < 2)
            err << "warning: a single level gives no convergence slope\n";
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_bad_arguments;
    }

    ConvergenceTable table;
    try {
        if (!mesh_out.empty()) {
            const bool single = cfg.levels.size() == 1;
            for (int n : cfg.levels)
                write_mesh(cli_detail::mesh_path(mesh_out, n, single),
                           build_study_mesh(cfg.domain, n, cfg.split, cfg.degree));
        }
        if (cfg.levels.size() == 1) {
            // One level: no slope to fit, report NaN slopes.
            table.config = cfg;
            table.rows.push_back(run_study_level(cfg, registry_lookup(to_string(cfg.domain)), cfg.levels[0]));
        } else {
            table = run_convergence_study(cfg);
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return exit_bad_arguments;
    } catch (const ConfigurationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_bad_arguments;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return exit_solver_failure;
    }

    for (const StudyRow& r : table.rows)
        if (!r.mesh_ok)
            err << "warning: mesh n=" << r.n << " violates a regularity check\n";

    if (out_path.empty()) {
        write_csv(out, table);
    } else {
        std::ofstream f(out_path);
        if (!f) {
            err << "error: cannot open " << out_path << '\n';
            return exit_bad_arguments;
        }
        write_csv(f, table);
        if (!f) {
            err << "failure: write failed for " << out_path << '\n';
            return exit_solver_failure;
        }
    }
    return exit_ok;
}

} // namespace wg
