#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wg/basis.hpp"
#include "wg/cell.hpp"
#include "wg/dof_layout.hpp"
#include "wg/errors.hpp"
#include "wg/projection.hpp"
#include "wg/quadrature.hpp"

namespace wg {

/// Normal used by the stabilization: the straight edge normal n, or the curved
/// boundary normal pulled back to the chord (equal to n on interior edges).
enum class NormalMode { straight, curved };

/// Bases and quadrature of one cell, shared by every local operator.
///
/// Local flux dofs are ordered [v0_x | v0_y | trace of edge 0 | trace of edge 1 | ...]
/// where each trace block holds the coefficients of v_b . n_e.
class LocalSpaces {
public:
    LocalSpaces(LocalCell cell, Degrees degrees, int order = -1)
        : cell_(std::move(cell)), degrees_(degrees)
    {
        degrees_.validate();
        order_ = order < 0 ? 2 * std::max(degrees_.velocity, degrees_.trace) + 2 : order;
        velocity_ = cell_.basis(degrees_.velocity);
        divergence_ = cell_.basis(degrees_.trace);
        pressure_ = cell_.basis(degrees_.pressure);
        trace_ = EdgeBasis(degrees_.trace);
        rule_ = cell_.rule(order_);
        for (const LocalEdge& e : cell_.edges)
            edge_rules_.push_back(edge_rule(e.a, e.b, order_));
    }

    [[nodiscard]] const LocalCell& cell() const { return cell_; }
    [[nodiscard]] const Degrees& degrees() const { return degrees_; }
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] const CellBasis& velocity_basis() const { return velocity_; }
    [[nodiscard]] const CellBasis& divergence_basis() const { return divergence_; }
    [[nodiscard]] const CellBasis& pressure_basis() const { return pressure_; }
    [[nodiscard]] const EdgeBasis& trace_basis() const { return trace_; }
    [[nodiscard]] const QuadratureRule& rule() const { return rule_; }
    [[nodiscard]] const EdgeQuadrature& edge_rule_of(int local_edge) const { return edge_rules_.at(local_edge); }

    [[nodiscard]] int num_edges() const { return static_cast<int>(cell_.edges.size()); }
    [[nodiscard]] int interior_size() const { return 2 * velocity_.size(); }
    [[nodiscard]] int trace_offset(int local_edge) const { return interior_size() + local_edge * trace_.size(); }
    [[nodiscard]] int flux_size() const { return interior_size() + num_edges() * trace_.size(); }

private:
    LocalCell cell_;
    Degrees degrees_;
    int order_ = 0;
    CellBasis velocity_;
    CellBasis divergence_;
    CellBasis pressure_;
    EdgeBasis trace_;
    QuadratureRule rule_;
    std::vector<EdgeQuadrature> edge_rules_;
};

/// Block-diagonal L2 mass matrix of [P_alpha(K)]^2 (interior dofs only).
inline Eigen::MatrixXd local_mass(const LocalSpaces& sp)
{
    const Eigen::MatrixXd m = cell_mass_matrix(sp.velocity_basis(), sp.rule());
    const int n = sp.velocity_basis().size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    out.topLeftCorner(n, n) = m;
    out.bottomRightCorner(n, n) = m;
    return out;
}

/// Moments of the weak divergence against the P_beta(K) basis:
/// row i holds -(v0, grad q_i)_K + <v_b . n, q_i>_{dK} as a linear functional of the local flux dofs.
inline Eigen::MatrixXd local_divergence_moments(const LocalSpaces& sp)
{
    const CellBasis& vb = sp.velocity_basis();
    const CellBasis& qb = sp.divergence_basis();
    const int nv = vb.size();
    const int nq = qb.size();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nq, sp.flux_size());

    Eigen::VectorXd phi(nv);
    const QuadratureRule& rule = sp.rule();
    for (std::size_t k = 0; k < rule.size(); ++k) {
        vb.eval(rule.points[k], phi);
        const Eigen::MatrixX2d g = qb.grad(rule.points[k]);
        const double w = rule.weights[k];
        r.leftCols(nv).noalias() -= w * g.col(0) * phi.transpose();
        r.middleCols(nv, nv).noalias() -= w * g.col(1) * phi.transpose();
    }

    const EdgeBasis& tb = sp.trace_basis();
    Eigen::VectorXd psi(tb.size());
    Eigen::VectorXd q(nq);
    for (int e = 0; e < sp.num_edges(); ++e) {
        const LocalEdge& edge = sp.cell().edges[e];
        const EdgeQuadrature& er = sp.edge_rule_of(e);
        const int off = sp.trace_offset(e);
        for (std::size_t k = 0; k < er.points.size(); ++k) {
            tb.eval(er.params[k], psi);
            qb.eval(er.points[k], q);
            r.middleCols(off, tb.size()).noalias() += (edge.sign * er.weights[k]) * q * psi.transpose();
        }
    }
    return r;
}

/// Weak divergence operator D_K: local flux dofs -> coefficients of div_w v in P_beta(K).
inline Eigen::MatrixXd local_weak_divergence(const LocalSpaces& sp)
{
    const Eigen::MatrixXd m = cell_mass_matrix(sp.divergence_basis(), sp.rule());
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw MalformedCell("local_weak_divergence: singular mass matrix");
    return llt.solve(local_divergence_moments(sp));
}

/// Normal m used by the stabilization at one edge quadrature point.
inline Point stabilization_normal(const LocalEdge& edge, double t, NormalMode mode)
{
    if (mode == NormalMode::straight || !edge.boundary)
        return edge.outward();
    if (!edge.segment)
        throw ConfigurationError("curved stabilization: boundary edge without curve data");
    return edge.segment->at(t * edge.segment->length()).normal;
}

/// rho h_K^{-1} sum_e <(u0 - ub) . m, (v0 - vb) . m>_e over the local flux dofs.
inline Eigen::MatrixXd local_stabilization(const LocalSpaces& sp, NormalMode mode, double rho = 1.0)
{
    const CellBasis& vb = sp.velocity_basis();
    const EdgeBasis& tb = sp.trace_basis();
    const int nv = vb.size();
    const int nt = tb.size();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(sp.flux_size(), sp.flux_size());
    Eigen::VectorXd phi(nv);
    Eigen::VectorXd psi(nt);
    const double scale = rho / sp.cell().diameter;

    for (int e = 0; e < sp.num_edges(); ++e) {
        const LocalEdge& edge = sp.cell().edges[e];
        const EdgeQuadrature& er = sp.edge_rule_of(e);
        const int off = sp.trace_offset(e);
        // Only the interior block and this edge's trace block are coupled.
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * nv + nt, 2 * nv + nt);
        Eigen::VectorXd row(2 * nv + nt);
        for (std::size_t k = 0; k < er.points.size(); ++k) {
            const Point m = stabilization_normal(edge, er.params[k], mode);
            vb.eval(er.points[k], phi);
            tb.eval(er.params[k], psi);
            row.head(nv) = m.x() * phi;
            row.segment(nv, nv) = m.y() * phi;
            row.tail(nt) = -edge.normal.dot(m) * psi;
            block.selfadjointView<Eigen::Lower>().rankUpdate(row, er.weights[k]);
        }
        const Eigen::MatrixXd full = scale * Eigen::MatrixXd(block.selfadjointView<Eigen::Lower>());
        s.topLeftCorner(2 * nv, 2 * nv) += full.topLeftCorner(2 * nv, 2 * nv);
        s.block(0, off, 2 * nv, nt) += full.topRightCorner(2 * nv, nt);
        s.block(off, 0, nt, 2 * nv) += full.bottomLeftCorner(nt, 2 * nv);
        s.block(off, off, nt, nt) += full.bottomRightCorner(nt, nt);
    }
    return s;
}

/// Pressure-row block of b_h on one cell: B_K(i, j) = -(div_w phi_j, q_i)_K for q_i in P_sigma(K).
inline Eigen::MatrixXd local_pressure_coupling(const LocalSpaces& sp)
{
    // P_sigma is the leading block of the nested P_beta basis, so the defining
    // identity gives the moments directly.
    return -local_divergence_moments(sp).topRows(sp.pressure_basis().size());
}

/// Correction entries of a boundary edge: C(i, j) = int_e (phi_j . n - mean_e(phi_j . n)) q_i ds
/// for interior flux dofs phi_j and pressure basis q_i.
inline Eigen::MatrixXd boundary_correction_entries(const LocalSpaces& sp, int local_edge)
{
    const LocalEdge& edge = sp.cell().edges.at(local_edge);
    if (!edge.boundary)
        throw InvalidArgument("boundary_correction_entries: edge is not on the boundary");
    const CellBasis& vb = sp.velocity_basis();
    const CellBasis& pb = sp.pressure_basis();
    const int nv = vb.size();
    const int np = pb.size();
    const EdgeQuadrature& er = sp.edge_rule_of(local_edge);

    Eigen::MatrixXd phi_q = Eigen::MatrixXd::Zero(np, nv);
    Eigen::VectorXd phi_int = Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd q_int = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd phi(nv);
    Eigen::VectorXd q(np);
    for (std::size_t k = 0; k < er.points.size(); ++k) {
        vb.eval(er.points[k], phi);
        pb.eval(er.points[k], q);
        phi_q.noalias() += er.weights[k] * q * phi.transpose();
        phi_int += er.weights[k] * phi;
        q_int += er.weights[k] * q;
    }
    const Eigen::MatrixXd centered = phi_q - q_int * phi_int.transpose() / er.length;
    const Point n = edge.outward();
    Eigen::MatrixXd c(np, 2 * nv);
    c.leftCols(nv) = n.x() * centered;
    c.rightCols(nv) = n.y() * centered;
    return c;
}

/// Integrals of the pressure basis over the cell: (q_i, 1)_K.
inline Eigen::VectorXd local_pressure_mean(const LocalSpaces& sp)
{
    const CellBasis& pb = sp.pressure_basis();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(pb.size());
    Eigen::VectorXd q(pb.size());
    for (std::size_t k = 0; k < sp.rule().size(); ++k) {
        pb.eval(sp.rule().points[k], q);
        out += sp.rule().weights[k] * q;
    }
    return out;
}

} // namespace wg
