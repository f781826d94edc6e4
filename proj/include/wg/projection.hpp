#pragma once

#include <span>

#include <Eigen/Dense>

#include "wg/basis.hpp"
#include "wg/cell.hpp"
#include "wg/quadrature.hpp"

namespace wg {

/// Gram matrix of a cell basis under the given rule.
inline Eigen::MatrixXd cell_mass_matrix(const CellBasis& basis, const QuadratureRule& rule)
{
    const int n = basis.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd phi(n);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        basis.eval(rule.points[k], phi);
        m.selfadjointView<Eigen::Lower>().rankUpdate(phi, rule.weights[k]);
    }
    return m.selfadjointView<Eigen::Lower>();
}

inline Eigen::MatrixXd edge_mass_matrix(const EdgeBasis& basis, const EdgeQuadrature& rule)
{
    const int n = basis.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd psi(n);
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
        basis.eval(rule.params[k], psi);
        m.noalias() += rule.weights[k] * psi * psi.transpose();
    }
    return m;
}

namespace detail {

inline Eigen::VectorXd spd_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, const char* what)
{
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw MalformedCell(std::string(what) + ": mass matrix is not positive definite");
    return llt.solve(rhs);
}

} // namespace detail

/// L2(K) projection of f onto P_d(K), as coefficients in the scaled monomial basis.
inline Eigen::VectorXd project_cell(const LocalCell& cell, const ScalarField& f, int degree, int order = -1)
{
    if (order < 0)
        order = 2 * degree + 4;
    const CellBasis basis = cell.basis(degree);
    const QuadratureRule rule = cell.rule(order);
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(basis.size());
    Eigen::VectorXd phi(basis.size());
    for (std::size_t k = 0; k < rule.size(); ++k) {
        basis.eval(rule.points[k], phi);
        moments += rule.weights[k] * f(rule.points[k]) * phi;
    }
    return detail::spd_solve(cell_mass_matrix(basis, rule), moments, "project_cell");
}

inline Eigen::VectorXd project_cell(std::span<const Point> polygon, const ScalarField& f, int degree, int order = -1)
{
    return project_cell(LocalCell::from_polygon({polygon.begin(), polygon.end()}), f, degree, order);
}

/// L2(e) projection of f onto P_d(e) on the segment a -> b, in the (t - 1/2)^k basis.
inline Eigen::VectorXd project_edge(const Point& a, const Point& b, const ScalarField& f, int degree, int order = -1)
{
    if (order < 0)
        order = 2 * degree + 4;
    const EdgeBasis basis(degree);
    const EdgeQuadrature rule = edge_rule(a, b, order);
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(basis.size());
    Eigen::VectorXd psi(basis.size());
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
        basis.eval(rule.params[k], psi);
        moments += rule.weights[k] * f(rule.points[k]) * psi;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(edge_mass_matrix(basis, rule));
    if (llt.info() != Eigen::Success)
        throw MalformedEdge("project_edge: singular edge mass matrix");
    return llt.solve(moments);
}

/// Evaluates a cell polynomial given by its coefficients.
inline double eval_cell_poly(const CellBasis& basis, const Eigen::VectorXd& coeffs, const Point& x)
{
    return basis.eval(x).dot(coeffs);
}

} // namespace wg
