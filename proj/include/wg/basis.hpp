#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "wg/errors.hpp"
#include "wg/geometry.hpp"

namespace wg {

/// dim P_d in two variables.
constexpr int poly_dim(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

/// Scaled monomials ((x - xc)/h)^a ((y - yc)/h)^b, a + b <= degree, in
/// graded-lex order: 1, X, Y, X^2, XY, Y^2, ...
///
/// The ordering is nested, so the first poly_dim(d') functions span P_d' for
/// every d' <= degree.
class CellBasis {
public:
    CellBasis() = default;

    CellBasis(const Point& center, double scale, int degree) : center_(center), scale_(scale), degree_(degree)
    {
        if (degree < 0)
            throw InvalidArgument("CellBasis: negative degree");
        if (!(scale > 0.0))
            throw MalformedCell("CellBasis: nonpositive scale");
        for (int k = 0; k <= degree; ++k)
            for (int b = 0; b <= k; ++b)
                exponents_.push_back({k - b, b});
    }

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] int size() const { return static_cast<int>(exponents_.size()); }
    [[nodiscard]] const Point& center() const { return center_; }
    [[nodiscard]] double scale() const { return scale_; }
    [[nodiscard]] const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }

    /// Values of all basis functions at x.
    [[nodiscard]] Eigen::VectorXd eval(const Point& x) const
    {
        Eigen::VectorXd v(size());
        eval(x, v);
        return v;
    }

    void eval(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const
    {
        const Point s = (x - center_) / scale_;
        std::array<double, 32> px{};
        std::array<double, 32> py{};
        powers(s, px, py);
        for (int i = 0; i < size(); ++i)
            out[i] = px[exponents_[i][0]] * py[exponents_[i][1]];
    }

    /// Gradients of all basis functions at x; row i is grad phi_i.
    [[nodiscard]] Eigen::MatrixX2d grad(const Point& x) const
    {
        Eigen::MatrixX2d g(size(), 2);
        const Point s = (x - center_) / scale_;
        std::array<double, 32> px{};
        std::array<double, 32> py{};
        powers(s, px, py);
        for (int i = 0; i < size(); ++i) {
            const int a = exponents_[i][0];
            const int b = exponents_[i][1];
            g(i, 0) = a > 0 ? a * px[a - 1] * py[b] / scale_ : 0.0;
            g(i, 1) = b > 0 ? b * px[a] * py[b - 1] / scale_ : 0.0;
        }
        return g;
    }

private:
    void powers(const Point& s, std::array<double, 32>& px, std::array<double, 32>& py) const
    {
        if (degree_ >= 32)
            throw InvalidArgument("CellBasis: degree too large");
        px[0] = 1.0;
        py[0] = 1.0;
        for (int k = 1; k <= degree_; ++k) {
            px[k] = px[k - 1] * s.x();
            py[k] = py[k - 1] * s.y();
        }
    }

    Point center_ = Point::Zero();
    double scale_ = 1.0;
    int degree_ = 0;
    std::vector<std::array<int, 2>> exponents_;
};

/// Shifted monomials (t - 1/2)^k, k <= degree, in the arc-length fraction t.
class EdgeBasis {
public:
    EdgeBasis() = default;
    explicit EdgeBasis(int degree) : degree_(degree)
    {
        if (degree < 0)
            throw InvalidArgument("EdgeBasis: negative degree");
    }

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] int size() const { return degree_ + 1; }

    [[nodiscard]] Eigen::VectorXd eval(double t) const
    {
        Eigen::VectorXd v(size());
        eval(t, v);
        return v;
    }

    void eval(double t, Eigen::Ref<Eigen::VectorXd> out) const
    {
        const double s = t - 0.5;
        double p = 1.0;
        for (int k = 0; k <= degree_; ++k) {
            out[k] = p;
            p *= s;
        }
    }

private:
    int degree_ = 0;
};

} // namespace wg
