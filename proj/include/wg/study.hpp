#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "wg/assembly.hpp"
#include "wg/error_analysis.hpp"
#include "wg/exact_solutions.hpp"
#include "wg/mesh_generators.hpp"
#include "wg/mesh_quality.hpp"
#include "wg/solver.hpp"

namespace wg {

enum class Domain { square, disk, ring };

inline std::string to_string(Domain d)
{
    switch (d) {
    case Domain::square: return "square";
    case Domain::disk: return "disk";
    case Domain::ring: return "ring";
    }
    return "?";
}

inline std::string to_string(Scheme s) { return s == Scheme::original ? "original" : "modified"; }

/// How many short edges replace each curved boundary side.
struct SplitPolicy {
    enum class Kind { none, original, modified, fixed };
    Kind kind = Kind::none;
    int fixed = 1;

    [[nodiscard]] int count(double h, int degree) const
    {
        switch (kind) {
        case Kind::none: return 1;
        case Kind::fixed: return fixed;
        case Kind::original: return boundary_split_count(h, degree, SplitRule::original);
        case Kind::modified: return boundary_split_count(h, degree, SplitRule::modified);
        }
        return 1;
    }

    [[nodiscard]] std::string describe() const
    {
        switch (kind) {
        case Kind::none: return "none";
        case Kind::fixed: return "fixed:" + std::to_string(fixed);
        case Kind::original: return "original";
        case Kind::modified: return "modified";
        }
        return "?";
    }
};

struct StudyConfig {
    Domain domain = Domain::square;
    Scheme scheme = Scheme::original;
    /// alpha = beta = j, sigma = j - 1.
    int degree = 1;
    /// Mesh resolution per level (cells per side, or chords per circle); increasing.
    std::vector<int> levels;
    SplitPolicy split;
    double rho = 1.0;
    int quadrature_order = -1;
    /// Maximum levels run concurrently.
    int threads = 1;
    /// Record wall-clock seconds; off keeps the output byte-reproducible.
    bool record_time = false;
    /// Run the A1-A5 validator on every mesh.
    bool validate_meshes = true;
};

struct StudyRow {
    int n = 0;
    int split = 1;
    double h = 0.0;
    double s = 0.0;
    int dofs = 0;
    double err_u_vh = 0.0;
    double err_u_vh1 = 0.0;
    double err_p = 0.0;
    double seconds = 0.0;
    double residual = 0.0;
    bool mesh_ok = true;
};

struct ConvergenceTable {
    StudyConfig config;
    std::vector<StudyRow> rows;
    double slope_u = std::numeric_limits<double>::quiet_NaN();
    double slope_u_vh1 = std::numeric_limits<double>::quiet_NaN();
    double slope_p = std::numeric_limits<double>::quiet_NaN();
    /// Slopes between consecutive rows, for diagnostics.
    std::vector<double> pair_slopes_u;
    std::vector<double> pair_slopes_p;
};

/// Mesh of a study level; the split count is chosen from h of the unsplit mesh.
inline PolygonalMesh build_study_mesh(Domain domain, int n, const SplitPolicy& split, int degree, int* split_used = nullptr)
{
    int k = 1;
    PolygonalMesh mesh;
    switch (domain) {
    case Domain::square:
        mesh = generate_square_tri(n);
        break;
    case Domain::disk:
        mesh = generate_disk_mesh(n, 1);
        k = split.count(mesh.h(), degree);
        if (k > 1)
            mesh = generate_disk_mesh(n, k);
        break;
    case Domain::ring:
        mesh = generate_ring_mesh(n, 1);
        k = split.count(mesh.h(), degree);
        if (k > 1)
            mesh = generate_ring_mesh(n, k);
        break;
    }
    if (split_used)
        *split_used = k;
    return mesh;
}

/// Builds, assembles, solves and measures one level.
inline StudyRow run_study_level(const StudyConfig& cfg, const ExactSolutionCase& exact, int n)
{
    const auto t0 = std::chrono::steady_clock::now();
    StudyRow row;
    row.n = n;
    const PolygonalMesh mesh = build_study_mesh(cfg.domain, n, cfg.split, cfg.degree, &row.split);
    row.h = mesh.h();
    row.s = mesh.s();
    if (cfg.validate_meshes)
        row.mesh_ok = validate_mesh(mesh).passed();

    const Degrees deg = Degrees::family(cfg.degree);
    AssemblyOptions opts;
    opts.rho = cfg.rho;
    opts.quadrature_order = cfg.quadrature_order;
    SaddleSystem sys = assemble_system(mesh, deg, cfg.scheme, opts);
    sys.rhs = assemble_rhs(mesh, *sys.layout, exact.g, true, cfg.quadrature_order < 0 ? 2 * cfg.degree + 4 : cfg.quadrature_order);
    const Solution sol = solve_saddle(sys);
    row.dofs = sys.size();
    row.residual = sol.relative_residual;

    const ProjectedExact proj = project_exact(mesh, sys.layout, exact.u, exact.p);
    const WgFunction err(sys.layout, proj.u.coeffs - sol.u.coeffs);
    row.err_u_vh = vh_norm(mesh, err, NormalMode::straight, cfg.rho);
    row.err_u_vh1 = vh_norm(mesh, err, NormalMode::curved, cfg.rho);
    row.err_p = l2_pressure_error(mesh, *sys.layout, proj.p, sol.p);
    if (cfg.record_time)
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

namespace detail {

inline double slope_of(const std::vector<StudyRow>& rows, double StudyRow::*col)
{
    std::vector<std::pair<double, double>> pts;
    for (const StudyRow& r : rows)
        pts.emplace_back(r.h, r.*col);
    return fit_rate(pts);
}

} // namespace detail

/// Runs every refinement level, then fits convergence slopes over all rows.
/// Errors from a level are rethrown with the level tagged.
inline ConvergenceTable run_convergence_study(const StudyConfig& cfg)
{
    if (cfg.levels.empty())
        throw InvalidArgument("run_convergence_study: no refinement levels");
    if (!std::is_sorted(cfg.levels.begin(), cfg.levels.end()) ||
        std::adjacent_find(cfg.levels.begin(), cfg.levels.end()) != cfg.levels.end())
        throw InvalidArgument("run_convergence_study: levels must be strictly increasing");
    if (cfg.degree < 1)
        throw InvalidArgument("run_convergence_study: degree must be >= 1");

    const ExactSolutionCase exact = registry_lookup(to_string(cfg.domain));
    ConvergenceTable table;
    table.config = cfg;
    table.rows.resize(cfg.levels.size());

    auto run_level = [&](std::size_t i) {
        try {
            return run_study_level(cfg, exact, cfg.levels[i]);
        } catch (const SingularSystem& e) {
            throw SingularSystem("level n=" + std::to_string(cfg.levels[i]) + ": " + e.what());
        } catch (const SolverFailure& e) {
            throw SolverFailure("level n=" + std::to_string(cfg.levels[i]) + ": " + e.what());
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("level n=" + std::to_string(cfg.levels[i]) + ": " + e.what());
        } catch (const ConfigurationError& e) {
            throw ConfigurationError("level n=" + std::to_string(cfg.levels[i]) + ": " + e.what());
        } catch (const Error& e) {
            throw Error("level n=" + std::to_string(cfg.levels[i]) + ": " + e.what());
        }
    };

    const std::size_t width = static_cast<std::size_t>(std::max(1, cfg.threads));
    for (std::size_t start = 0; start < cfg.levels.size(); start += width) {
        const std::size_t stop = std::min(cfg.levels.size(), start + width);
        if (width == 1) {
            table.rows[start] = run_level(start);
            continue;
        }
        std::vector<std::future<StudyRow>> jobs;
        for (std::size_t i = start; i < stop; ++i)
            jobs.push_back(std::async(std::launch::async, run_level, i));
        for (std::size_t i = start; i < stop; ++i)
            table.rows[i] = jobs[i - start].get();
    }

    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const StudyRow& a = table.rows[i - 1];
        const StudyRow& b = table.rows[i];
        table.pair_slopes_u.push_back(std::log(b.err_u_vh / a.err_u_vh) / std::log(b.h / a.h));
        table.pair_slopes_p.push_back(std::log(b.err_p / a.err_p) / std::log(b.h / a.h));
    }
    if (table.rows.size() >= 2) {
        table.slope_u = detail::slope_of(table.rows, &StudyRow::err_u_vh);
        table.slope_u_vh1 = detail::slope_of(table.rows, &StudyRow::err_u_vh1);
        table.slope_p = detail::slope_of(table.rows, &StudyRow::err_p);
    }
    return table;
}

namespace detail {

inline std::string fmt12(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace detail

/// CSV: header, one row per level, then "# slope_u=<v> slope_p=<v>".
inline void write_csv(std::ostream& os, const ConvergenceTable& t)
{
    using detail::fmt12;
    os << "n,h,s,dofs,err_u_Vh,err_u_Vh1,err_p_L2,seconds\n";
    for (const StudyRow& r : t.rows)
        os << r.n << ',' << fmt12(r.h) << ',' << fmt12(r.s) << ',' << r.dofs << ',' << fmt12(r.err_u_vh) << ','
           << fmt12(r.err_u_vh1) << ',' << fmt12(r.err_p) << ',' << fmt12(r.seconds) << '\n';
    os << "# slope_u=" << fmt12(t.slope_u) << " slope_p=" << fmt12(t.slope_p) << '\n';
}

} // namespace wg
