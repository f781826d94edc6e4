#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "wg/errors.hpp"
#include "wg/geometry.hpp"
#include "wg/quadrature.hpp"

namespace wg {

using VectorField = std::function<Eigen::Vector2d(const Point&)>;

/// Manufactured solution of u + grad p = 0, div u = g with u . n~ = 0 on the boundary.
struct ExactSolutionCase {
    std::string id;
    VectorField u;
    ScalarField p;
    ScalarField g;
    /// Analytic boundary of the domain, as used for the mesh generators.
    std::vector<Curve> boundary;
    std::string notes;
};

namespace exact {

inline ExactSolutionCase square()
{
    using std::numbers::pi;
    ExactSolutionCase c;
    c.id = "square";
    c.u = [](const Point& x) {
        return Eigen::Vector2d(pi * std::sin(pi * x.x()) * std::cos(pi * x.y()),
                               pi * std::cos(pi * x.x()) * std::sin(pi * x.y()));
    };
    c.p = [](const Point& x) { return std::cos(pi * x.x()) * std::cos(pi * x.y()); };
    c.g = [](const Point& x) { return 2.0 * pi * pi * std::cos(pi * x.x()) * std::cos(pi * x.y()); };
    c.boundary = {Curve::line(Point(0.5, 0.0), Point(0.0, -1.0)), Curve::line(Point(1.0, 0.5), Point(1.0, 0.0)),
                  Curve::line(Point(0.5, 1.0), Point(0.0, 1.0)), Curve::line(Point(0.0, 0.5), Point(-1.0, 0.0))};
    c.notes = "unit square, smooth trigonometric solution";
    return c;
}

inline ExactSolutionCase disk()
{
    ExactSolutionCase c;
    c.id = "disk";
    c.u = [](const Point& x) {
        return Eigen::Vector2d(3.0 * x.x() * x.x() + x.y() * x.y() - 3.0, 2.0 * x.x() * x.y());
    };
    c.p = [](const Point& x) { return 3.0 * x.x() - x.x() * x.squaredNorm(); };
    c.g = [](const Point& x) { return 8.0 * x.x(); };
    c.boundary = {Curve::circle(Point::Zero(), 1.0, true)};
    c.notes = "unit disk, polynomial solution";
    return c;
}

/// Ring solution in polar form, kept for validating the Cartesian closed form.
struct RingPolar {
    static Eigen::Vector2d u(double r, double th)
    {
        const double s = std::sin(th);
        return {-r * std::sin(2.0 * th) * (8.0 * r - 9.0) / 2.0,
                9.0 * r + 9.0 * r * s * s - 8.0 * r * r * s * s - 4.0 * r * r - 6.0};
    }
    static double p(double r, double th) { return (4.0 * r * r * r + 6.0 * r - 9.0 * r * r) * std::sin(th); }
};

inline ExactSolutionCase ring()
{
    ExactSolutionCase c;
    c.id = "ring";
    c.u = [](const Point& x) {
        const double r = x.norm();
        const double y2 = x.y() * x.y();
        return Eigen::Vector2d(-x.x() * x.y() * (8.0 * r - 9.0) / r,
                               9.0 * r + 9.0 * y2 / r - 8.0 * y2 - 4.0 * r * r - 6.0);
    };
    c.p = [](const Point& x) {
        const double r = x.norm();
        return x.y() * (4.0 * r * r - 9.0 * r + 6.0);
    };
    c.g = [](const Point& x) {
        const double r = x.norm();
        return x.y() * (27.0 - 32.0 * r) / r;
    };
    c.boundary = {Curve::circle(Point::Zero(), 1.0, true), Curve::circle(Point::Zero(), 0.5, false)};
    c.notes = "annulus 1/2 < r < 1 (non-convex), solution converted from polar form";
    return c;
}

} // namespace exact

/// Exact solution registered for a domain id: "square", "disk" or "ring".
inline ExactSolutionCase registry_lookup(std::string_view id)
{
    if (id == "square")
        return exact::square();
    if (id == "disk")
        return exact::disk();
    if (id == "ring")
        return exact::ring();
    throw InvalidArgument("unknown exact solution case: " + std::string(id));
}

} // namespace wg
