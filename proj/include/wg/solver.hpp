#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "wg/assembly.hpp"
#include "wg/dof_layout.hpp"
#include "wg/errors.hpp"

namespace wg {

/// How the constant-pressure kernel is removed.
enum class KernelHandling {
    /// Border the system with a multiplier enforcing (p, 1) = 0.
    lagrange,
    /// Fix the constant mode of cell 0, drop its test row, renormalize afterwards.
    pin,
};

struct SolverOptions {
    /// pin is the default: the dense border row of lagrange ruins the sparse fill.
    KernelHandling kernel = KernelHandling::pin;
    /// Project the right-hand side orthogonal to ker(M^T) before solving.
    /// Only meaningful for `pin`; the multiplier absorbs any incompatibility.
    bool compat = true;
    double residual_tolerance = 1e-9;
    int refinement_steps = 2;
};

struct Solution {
    WgFunction u;
    /// Mean-zero pressure coefficients.
    Eigen::VectorXd p;
    /// ||M x - b_c|| / ||b_c|| for the compatible right-hand side b_c actually solved.
    double relative_residual = 0.0;
    /// Multiplier value (lagrange) or the compatibility shift applied (pin).
    double kernel_shift = 0.0;
    int unknowns = 0;
};

namespace detail {

/// Subtracts the mean of p over Omega_h from every cell's constant mode.
inline void normalize_pressure(const SaddleSystem& sys, Eigen::VectorXd& p)
{
    const double mean = sys.pressure_mean.dot(p) / sys.domain_area;
    const int np = sys.layout->pressure_per_cell();
    for (int c = 0; c < sys.layout->num_cells(); ++c)
        p[c * np] -= mean;
}

/// Indicator of the constant-mode pressure coefficients: the coefficient
/// vector of q = 1, which spans the left kernel of the pressure rows.
inline Eigen::VectorXd constant_mode(const SaddleSystem& sys)
{
    const int np = sys.layout->pressure_per_cell();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(sys.num_pressure());
    for (int c = 0; c < sys.layout->num_cells(); ++c)
        y[c * np] = 1.0;
    return y;
}

inline Eigen::VectorXd factor_and_solve(const SparseMatrix& m, const Eigen::VectorXd& b, int refinement_steps)
{
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(m);
    lu.factorize(m);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("solve_saddle: factorization failed (" + lu.lastErrorMessage() +
                             "); the discrete inf-sup condition is likely violated");
    Eigen::VectorXd x = lu.solve(b);
    for (int k = 0; k < refinement_steps; ++k) {
        const Eigen::VectorXd r = b - m * x;
        x += lu.solve(r);
    }
    if (!x.allFinite())
        throw SingularSystem("solve_saddle: non-finite solution");
    return x;
}

} // namespace detail

/// Solves the saddle system modulo constant pressures and returns a mean-zero pressure.
inline Solution solve_saddle(const SaddleSystem& sys, const SolverOptions& opts = {})
{
    const int nf = sys.num_flux();
    const int np = sys.num_pressure();
    const int n = nf + np;
    const SparseMatrix m = sys.matrix();
    Eigen::VectorXd b = sys.rhs;
    Eigen::VectorXd x;
    Solution sol;

    if (opts.kernel == KernelHandling::lagrange) {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(m.nonZeros() + 2 * np));
        for (int k = 0; k < m.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m, k); it; ++it)
                t.emplace_back(it.row(), it.col(), it.value());
        // Scale the border to the pressure-row magnitude to keep pivots balanced.
        const double scale = 1.0 / sys.domain_area;
        for (int i = 0; i < np; ++i) {
            const double v = scale * sys.pressure_mean[i];
            if (v != 0.0) {
                t.emplace_back(n, nf + i, v);
                t.emplace_back(nf + i, n, v);
            }
        }
        SparseMatrix bordered(n + 1, n + 1);
        bordered.setFromTriplets(t.begin(), t.end());
        Eigen::VectorXd bb = Eigen::VectorXd::Zero(n + 1);
        bb.head(n) = b;
        const Eigen::VectorXd xb = detail::factor_and_solve(bordered, bb, opts.refinement_steps);
        x = xb.head(n);
        sol.kernel_shift = xb[n];
        b.tail(np) -= xb[n] * scale * sys.pressure_mean;
    } else {
        if (opts.compat) {
            const Eigen::VectorXd y = detail::constant_mode(sys);
            const double shift = y.dot(b.tail(np)) / y.dot(sys.pressure_mean);
            b.tail(np) -= shift * sys.pressure_mean;
            sol.kernel_shift = shift;
        }
        // Drop row and column of the constant mode of cell 0.
        const int pinned = nf;
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(m.nonZeros()));
        auto shrink = [pinned](int i) { return i < pinned ? i : i - 1; };
        for (int k = 0; k < m.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m, k); it; ++it)
                if (it.row() != pinned && it.col() != pinned)
                    t.emplace_back(shrink(static_cast<int>(it.row())), shrink(static_cast<int>(it.col())), it.value());
        SparseMatrix reduced(n - 1, n - 1);
        reduced.setFromTriplets(t.begin(), t.end());
        Eigen::VectorXd br(n - 1);
        br << b.head(pinned), b.tail(n - pinned - 1);
        const Eigen::VectorXd xr = detail::factor_and_solve(reduced, br, opts.refinement_steps);
        x = Eigen::VectorXd::Zero(n);
        x.head(pinned) = xr.head(pinned);
        x.tail(n - pinned - 1) = xr.tail(n - pinned - 1);
    }

    Eigen::VectorXd p = x.tail(np);
    detail::normalize_pressure(sys, p);
    x.tail(np) = p;

    const double bnorm = b.norm();
    const double rnorm = (m * x - b).norm();
    sol.relative_residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
    sol.unknowns = n;
    sol.u = WgFunction(sys.layout, x.head(nf));
    sol.p = std::move(p);

    if (!(sol.relative_residual <= opts.residual_tolerance)) {
        std::ostringstream msg;
        msg << "solve_saddle: relative residual " << sol.relative_residual << " exceeds "
            << opts.residual_tolerance << " (" << n << " unknowns)";
        throw SolverFailure(msg.str());
    }
    return sol;
}

} // namespace wg
