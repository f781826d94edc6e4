#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wg/basis.hpp"
#include "wg/errors.hpp"
#include "wg/mesh.hpp"

namespace wg {

/// Polynomial degrees: interior flux (alpha), edge trace (beta), pressure (sigma).
struct Degrees {
    int velocity = 1;
    int trace = 1;
    int pressure = 0;

    /// The P_j-P_j-P_{j-1} family.
    static Degrees family(int j) { return {j, j, j - 1}; }

    /// Enforces beta - 1 <= sigma <= beta = alpha, sigma >= 0.
    void validate() const
    {
        if (velocity != trace || pressure > trace || pressure < trace - 1 || pressure < 0)
            throw InvalidArgument("degrees must satisfy beta-1 <= sigma <= beta = alpha (got alpha=" +
                                  std::to_string(velocity) + ", beta=" + std::to_string(trace) +
                                  ", sigma=" + std::to_string(pressure) + ")");
    }
};

/// Global numbering: [cell flux interiors | interior-edge traces | cell pressures].
/// Boundary-edge traces are eliminated (zero in V_h).
class DofLayout {
public:
    DofLayout(const PolygonalMesh& mesh, Degrees degrees) : degrees_(degrees), num_cells_(mesh.num_cells())
    {
        degrees_.validate();
        velocity_per_cell_ = 2 * poly_dim(degrees_.velocity);
        trace_per_edge_ = degrees_.trace + 1;
        pressure_per_cell_ = poly_dim(degrees_.pressure);

        int next = num_cells_ * velocity_per_cell_;
        trace_offset_.assign(mesh.num_edges(), -1);
        for (int e = 0; e < mesh.num_edges(); ++e)
            if (!mesh.edges()[e].is_boundary()) {
                trace_offset_[e] = next;
                next += trace_per_edge_;
            }
        num_flux_ = next;
    }

    [[nodiscard]] const Degrees& degrees() const { return degrees_; }
    [[nodiscard]] int num_cells() const { return num_cells_; }
    [[nodiscard]] int num_edges() const { return static_cast<int>(trace_offset_.size()); }
    [[nodiscard]] int velocity_per_cell() const { return velocity_per_cell_; }
    [[nodiscard]] int trace_per_edge() const { return trace_per_edge_; }
    [[nodiscard]] int pressure_per_cell() const { return pressure_per_cell_; }

    [[nodiscard]] int velocity_offset(int cell) const { return cell * velocity_per_cell_; }
    /// First trace dof of an edge, or -1 for boundary edges.
    [[nodiscard]] int trace_offset(int edge) const { return trace_offset_.at(edge); }
    /// Offset inside the pressure block.
    [[nodiscard]] int pressure_offset(int cell) const { return cell * pressure_per_cell_; }

    [[nodiscard]] int num_flux_dofs() const { return num_flux_; }
    [[nodiscard]] int num_pressure_dofs() const { return num_cells_ * pressure_per_cell_; }
    [[nodiscard]] int num_dofs() const { return num_flux_dofs() + num_pressure_dofs(); }

    /// Global flux indices of a cell's local dofs
    /// [v0_x (dim P_alpha) | v0_y | trace of edge 0 | trace of edge 1 | ...], -1 where eliminated.
    [[nodiscard]] std::vector<int> local_flux_indices(const PolygonalMesh& mesh, int cell) const
    {
        std::vector<int> idx;
        const int v0 = velocity_offset(cell);
        for (int i = 0; i < velocity_per_cell_; ++i)
            idx.push_back(v0 + i);
        for (const CellEdgeRef& ref : mesh.cell_edges(cell)) {
            const int t0 = trace_offset_[ref.edge];
            for (int k = 0; k < trace_per_edge_; ++k)
                idx.push_back(t0 < 0 ? -1 : t0 + k);
        }
        return idx;
    }

private:
    Degrees degrees_;
    int num_cells_ = 0;
    int velocity_per_cell_ = 0;
    int trace_per_edge_ = 0;
    int pressure_per_cell_ = 0;
    int num_flux_ = 0;
    std::vector<int> trace_offset_;
};

/// A member of V_h: interior flux coefficients and interior-edge trace
/// coefficients (of v_b . n_e); boundary traces are implicitly zero.
struct WgFunction {
    std::shared_ptr<const DofLayout> layout;
    Eigen::VectorXd coeffs;

    WgFunction() = default;
    WgFunction(std::shared_ptr<const DofLayout> l, Eigen::VectorXd c) : layout(std::move(l)), coeffs(std::move(c))
    {
        if (!layout || coeffs.size() != layout->num_flux_dofs())
            throw InvalidArgument("WgFunction: coefficient vector does not match layout");
    }

    static WgFunction zero(std::shared_ptr<const DofLayout> l)
    {
        const int n = l->num_flux_dofs();
        return {std::move(l), Eigen::VectorXd::Zero(n)};
    }

    /// Local dof vector of a cell in the local_flux_indices ordering.
    [[nodiscard]] Eigen::VectorXd local(const PolygonalMesh& mesh, int cell) const
    {
        const std::vector<int> idx = layout->local_flux_indices(mesh, cell);
        Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i)
            v[static_cast<Eigen::Index>(i)] = idx[i] < 0 ? 0.0 : coeffs[idx[i]];
        return v;
    }
};

} // namespace wg
