#pragma once

#include <iomanip>
#include <memory>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wg/dof_layout.hpp"
#include "wg/local_operators.hpp"
#include "wg/mesh.hpp"
#include "wg/quadrature.hpp"

namespace wg {

enum class Scheme { original, modified };

struct AssemblyOptions {
    double rho = 1.0;
    /// Quadrature exactness; negative selects 2 max(alpha, beta) + 2.
    int quadrature_order = -1;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Assembled saddle-point operator
///
///   [ A   B^T ] [u]   [0]
///   [ B1  0   ] [p] = [f]
///
/// with B1 = B for the original scheme and B1 = B - C (boundary correction)
/// for the modified one. The pressure space carries no mean-zero constraint.
struct SaddleSystem {
    std::shared_ptr<const DofLayout> layout;
    Scheme scheme = Scheme::original;
    NormalMode normal_mode = NormalMode::straight;
    SparseMatrix A;
    SparseMatrix B;
    SparseMatrix B1;
    /// Full-length right-hand side; the flux block is zero.
    Eigen::VectorXd rhs;
    /// (p, 1)_{Omega_h} = pressure_mean . p.
    Eigen::VectorXd pressure_mean;
    double domain_area = 0.0;

    [[nodiscard]] int num_flux() const { return layout->num_flux_dofs(); }
    [[nodiscard]] int num_pressure() const { return layout->num_pressure_dofs(); }
    [[nodiscard]] int size() const { return layout->num_dofs(); }

    /// Full block matrix.
    [[nodiscard]] SparseMatrix matrix() const
    {
        const int nf = num_flux();
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(A.nonZeros() + B.nonZeros() + B1.nonZeros()));
        for (int k = 0; k < A.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(A, k); it; ++it)
                t.emplace_back(it.row(), it.col(), it.value());
        for (int k = 0; k < B.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(B, k); it; ++it)
                t.emplace_back(it.col(), nf + it.row(), it.value());
        for (int k = 0; k < B1.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(B1, k); it; ++it)
                t.emplace_back(nf + it.row(), it.col(), it.value());
        SparseMatrix m(size(), size());
        m.setFromTriplets(t.begin(), t.end());
        return m;
    }
};

namespace detail {

inline int resolve_order(const Degrees& d, int requested)
{
    return requested < 0 ? 2 * std::max(d.velocity, d.trace) + 2 : requested;
}

} // namespace detail

/// Assembles A (mass + stabilization), B from b_h(v, q) = -(div_w v, q), and
/// for the modified scheme B1 = B minus the boundary correction rows. The
/// right-hand side is left at zero; see assemble_rhs.
inline SaddleSystem assemble_system(const PolygonalMesh& mesh, Degrees degrees, Scheme scheme,
                                    const AssemblyOptions& opts = {})
{
    degrees.validate();
    if (!(opts.rho > 0.0))
        throw InvalidArgument("assemble_system: rho must be positive");
    SaddleSystem sys;
    sys.layout = std::make_shared<const DofLayout>(mesh, degrees);
    sys.scheme = scheme;
    sys.normal_mode = scheme == Scheme::original ? NormalMode::straight : NormalMode::curved;
    const DofLayout& L = *sys.layout;
    const int order = detail::resolve_order(degrees, opts.quadrature_order);

    if (sys.normal_mode == NormalMode::curved)
        for (int e : mesh.boundary_edges())
            if (mesh.edges()[e].curve < 0)
                throw ConfigurationError("modified scheme needs curve data on every boundary edge");

    std::vector<Eigen::Triplet<double>> ta;
    std::vector<Eigen::Triplet<double>> tb;
    std::vector<Eigen::Triplet<double>> tc;
    sys.pressure_mean = Eigen::VectorXd::Zero(L.num_pressure_dofs());

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalSpaces sp(LocalCell::from_mesh(mesh, c), degrees, order);
        const std::vector<int> idx = L.local_flux_indices(mesh, c);
        const int ni = sp.interior_size();

        Eigen::MatrixXd a = local_stabilization(sp, sys.normal_mode, opts.rho);
        a.topLeftCorner(ni, ni) += local_mass(sp);
        for (int i = 0; i < a.rows(); ++i) {
            if (idx[i] < 0)
                continue;
            for (int j = 0; j < a.cols(); ++j)
                if (idx[j] >= 0 && a(i, j) != 0.0)
                    ta.emplace_back(idx[i], idx[j], a(i, j));
        }

        const Eigen::MatrixXd b = local_pressure_coupling(sp);
        const int p0 = L.pressure_offset(c);
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j)
                if (idx[j] >= 0 && b(i, j) != 0.0)
                    tb.emplace_back(p0 + i, idx[j], b(i, j));

        if (scheme == Scheme::modified)
            for (int e = 0; e < sp.num_edges(); ++e) {
                if (!sp.cell().edges[e].boundary)
                    continue;
                const Eigen::MatrixXd corr = boundary_correction_entries(sp, e);
                for (int i = 0; i < corr.rows(); ++i)
                    for (int j = 0; j < corr.cols(); ++j)
                        if (corr(i, j) != 0.0)
                            tc.emplace_back(p0 + i, idx[j], -corr(i, j));
            }

        sys.pressure_mean.segment(p0, L.pressure_per_cell()) = local_pressure_mean(sp);
        sys.domain_area += mesh.cell_area(c);
    }

    sys.A.resize(L.num_flux_dofs(), L.num_flux_dofs());
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.B.resize(L.num_pressure_dofs(), L.num_flux_dofs());
    sys.B.setFromTriplets(tb.begin(), tb.end());
    if (scheme == Scheme::modified) {
        tc.insert(tc.begin(), tb.begin(), tb.end());
        sys.B1.resize(L.num_pressure_dofs(), L.num_flux_dofs());
        sys.B1.setFromTriplets(tc.begin(), tc.end());
    } else {
        sys.B1 = sys.B;
    }
    sys.rhs = Eigen::VectorXd::Zero(L.num_dofs());
    return sys;
}

/// Right-hand side with pressure rows -(g, q)_{Omega_h}. With `compat`, g is
/// replaced by its mean-free part on Omega_h.
inline Eigen::VectorXd assemble_rhs(const PolygonalMesh& mesh, const DofLayout& layout, const ScalarField& g,
                                    bool compat, int quadrature_order = -1)
{
    const Degrees& d = layout.degrees();
    const int order = detail::resolve_order(d, quadrature_order);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(layout.num_dofs());
    Eigen::VectorXd mean_q = Eigen::VectorXd::Zero(layout.num_pressure_dofs());
    double g_total = 0.0;
    double area = 0.0;
    const int nf = layout.num_flux_dofs();

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalCell cell = LocalCell::from_mesh(mesh, c);
        const CellBasis pb = cell.basis(d.pressure);
        const QuadratureRule rule = cell.rule(order);
        Eigen::VectorXd q(pb.size());
        const int p0 = layout.pressure_offset(c);
        for (std::size_t k = 0; k < rule.size(); ++k) {
            pb.eval(rule.points[k], q);
            const double gv = g(rule.points[k]);
            rhs.segment(nf + p0, pb.size()) -= rule.weights[k] * gv * q;
            mean_q.segment(p0, pb.size()) += rule.weights[k] * q;
            g_total += rule.weights[k] * gv;
        }
        area += cell.area;
    }
    if (compat)
        rhs.tail(layout.num_pressure_dofs()) += (g_total / area) * mean_q;
    return rhs;
}

/// Writes a sparse matrix as "row col value" lines (0-based), 17 significant digits.
inline void write_coo(std::ostream& os, const SparseMatrix& m)
{
    os << "% " << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    const auto old = os.precision(17);
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    os.precision(old);
}

} // namespace wg
