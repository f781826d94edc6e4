#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wg/assembly.hpp"
#include "wg/dof_layout.hpp"
#include "wg/exact_solutions.hpp"
#include "wg/local_operators.hpp"
#include "wg/projection.hpp"

namespace wg {

/// Discrete interpolant of an exact pair: {Q0 u, Q~b u} in V_h and Q_h p.
struct ProjectedExact {
    WgFunction u;
    Eigen::VectorXd p;
};

/// Q0 u componentwise per cell, Q_b(u . n_e) on interior edges, zero on boundary
/// edges, and the L2 projection of p onto P_sigma per cell.
inline ProjectedExact project_exact(const PolygonalMesh& mesh, std::shared_ptr<const DofLayout> layout,
                                    const VectorField& u, const ScalarField& p, int order = -1)
{
    const Degrees& d = layout->degrees();
    if (order < 0)
        order = 2 * d.velocity + 4;
    Eigen::VectorXd flux = Eigen::VectorXd::Zero(layout->num_flux_dofs());
    Eigen::VectorXd pres = Eigen::VectorXd::Zero(layout->num_pressure_dofs());
    const int nv = poly_dim(d.velocity);

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalCell cell = LocalCell::from_mesh(mesh, c);
        const int v0 = layout->velocity_offset(c);
        flux.segment(v0, nv) = project_cell(cell, [&](const Point& x) { return u(x).x(); }, d.velocity, order);
        flux.segment(v0 + nv, nv) = project_cell(cell, [&](const Point& x) { return u(x).y(); }, d.velocity, order);
        pres.segment(layout->pressure_offset(c), layout->pressure_per_cell()) =
            project_cell(cell, p, d.pressure, order);
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const int t0 = layout->trace_offset(e);
        if (t0 < 0)
            continue;
        const MeshEdge& me = mesh.edges()[e];
        const Point n = me.normal;
        flux.segment(t0, layout->trace_per_edge()) =
            project_edge(mesh.vertices()[me.vertices[0]], mesh.vertices()[me.vertices[1]],
                         [&](const Point& x) { return u(x).dot(n); }, d.trace, order);
    }
    return {WgFunction(std::move(layout), std::move(flux)), std::move(pres)};
}

/// sqrt(||v0||^2 + rho sum_K h_K^{-1} ||(v0 - vb) . m||^2_{dK}) with m = n or n~.
inline double vh_norm(const PolygonalMesh& mesh, const WgFunction& w, NormalMode mode, double rho = 1.0,
                      int order = -1)
{
    const Degrees& d = w.layout->degrees();
    if (order < 0)
        order = 2 * std::max(d.velocity, d.trace) + 2;
    double sum = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalSpaces sp(LocalCell::from_mesh(mesh, c), d, order);
        const Eigen::VectorXd v = w.local(mesh, c);
        const int ni = sp.interior_size();
        sum += v.head(ni).dot(local_mass(sp) * v.head(ni));
        sum += v.dot(local_stabilization(sp, mode, rho) * v);
    }
    return std::sqrt(std::max(0.0, sum));
}

/// ||p1 - p2||_{L2(Omega_h)} for piecewise P_sigma coefficient vectors.
inline double l2_pressure_error(const PolygonalMesh& mesh, const DofLayout& layout, const Eigen::VectorXd& p1,
                                const Eigen::VectorXd& p2, int order = -1)
{
    if (p1.size() != layout.num_pressure_dofs() || p2.size() != layout.num_pressure_dofs())
        throw InvalidArgument("l2_pressure_error: size mismatch");
    const int sigma = layout.degrees().pressure;
    if (order < 0)
        order = 2 * sigma + 2;
    double sum = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalCell cell = LocalCell::from_mesh(mesh, c);
        const CellBasis b = cell.basis(sigma);
        const Eigen::MatrixXd m = cell_mass_matrix(b, cell.rule(order));
        const Eigen::VectorXd diff = (p1 - p2).segment(layout.pressure_offset(c), b.size());
        sum += diff.dot(m * diff);
    }
    return std::sqrt(std::max(0.0, sum));
}

/// Least-squares slope of log(err) against log(h).
inline double fit_rate(std::span<const std::pair<double, double>> samples)
{
    if (samples.size() < 2)
        throw InvalidArgument("fit_rate: need at least two samples");
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [h, err] : samples) {
        if (!(h > 0.0) || !(err > 0.0))
            throw InvalidArgument("fit_rate: entries must be positive");
        sx += std::log(h);
        sy += std::log(err);
    }
    const double n = static_cast<double>(samples.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& [h, err] : samples) {
        const double dx = std::log(h) - mx;
        sxy += dx * (std::log(err) - my);
        sxx += dx * dx;
    }
    if (!(sxx > 0.0))
        throw InvalidArgument("fit_rate: all h values coincide");
    return sxy / sxx;
}

} // namespace wg
