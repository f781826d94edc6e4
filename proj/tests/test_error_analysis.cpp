#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "wg/assembly.hpp"
#include "wg/error_analysis.hpp"
#include "wg/exact_solutions.hpp"
#include "wg/mesh_generators.hpp"
#include "wg/study.hpp"

using namespace wg;

namespace {

PolygonalMesh single_unit_square()
{
    return PolygonalMesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
}

/// Fourth-order central difference of f along `dir`.
template <class F>
auto central(const F& f, const Point& x, const Point& dir, double h = 1e-3)
{
    return (8.0 * (f(x + h * dir) - f(x - h * dir)) - (f(x + 2 * h * dir) - f(x - 2 * h * dir))) / (12.0 * h);
}

std::vector<Point> sample_points(const std::string& id)
{
    std::vector<Point> pts;
    for (int k = 0; k < 12; ++k) {
        const double t = 0.37 + 2.0 * std::numbers::pi * k / 12.0;
        if (id == "square")
            pts.emplace_back(0.5 + 0.4 * std::cos(t), 0.5 + 0.3 * std::sin(t));
        else if (id == "disk")
            pts.emplace_back(0.8 * std::cos(t) * (k % 3) / 2.0, 0.8 * std::sin(t) * (k % 3) / 2.0 + 0.05);
        else
            pts.emplace_back((0.55 + 0.04 * k) * std::cos(t), (0.55 + 0.04 * k) * std::sin(t));
    }
    return pts;
}

} // namespace

TEST(VhNorm, ZeroAndSingleCellExample)
{
    const PolygonalMesh mesh = single_unit_square();
    auto layout = std::make_shared<const DofLayout>(mesh, Degrees::family(1));
    EXPECT_EQ(vh_norm(mesh, WgFunction::zero(layout), NormalMode::straight), 0.0);
    // v0 = (1, 0) and zero boundary traces: ||v0||^2 = 1 plus (1/sqrt 2)(1 + 1).
    const ProjectedExact one = project_exact(mesh, layout, [](const Point&) { return Eigen::Vector2d(1, 0); },
                                             [](const Point&) { return 0.0; });
    EXPECT_NEAR(vh_norm(mesh, one.u, NormalMode::straight), std::sqrt(1.0 + std::sqrt(2.0)), 1e-14);
    EXPECT_NEAR(vh_norm(mesh, one.u, NormalMode::straight, 4.0), std::sqrt(1.0 + 4.0 * std::sqrt(2.0)), 1e-13);
}

TEST(VhNorm, CurvedAndStraightModes)
{
    std::mt19937 rng(5);
    std::normal_distribution<double> z;
    // Flat boundary: identical.
    const PolygonalMesh square = generate_square_tri(4);
    auto ls = std::make_shared<const DofLayout>(square, Degrees::family(2));
    Eigen::VectorXd c(ls->num_flux_dofs());
    for (Eigen::Index i = 0; i < c.size(); ++i)
        c[i] = z(rng);
    const WgFunction ws(ls, c);
    EXPECT_NEAR(vh_norm(square, ws, NormalMode::straight), vh_norm(square, ws, NormalMode::curved), 1e-12);

    // Curved boundary: different but equivalent norms.
    for (int n : {8, 16, 32}) {
        const PolygonalMesh disk = generate_disk_mesh(n);
        auto ld = std::make_shared<const DofLayout>(disk, Degrees::family(1));
        Eigen::VectorXd d(ld->num_flux_dofs());
        for (Eigen::Index i = 0; i < d.size(); ++i)
            d[i] = z(rng);
        const WgFunction wd(ld, d);
        const double ratio = vh_norm(disk, wd, NormalMode::curved) / vh_norm(disk, wd, NormalMode::straight);
        EXPECT_GE(ratio, 0.5);
        EXPECT_LE(ratio, 2.0);
        EXPECT_NE(ratio, 1.0);
    }
}

TEST(PressureError, HomogeneousAndExactForPolynomials)
{
    const PolygonalMesh mesh = generate_disk_mesh(10);
    const DofLayout layout(mesh, Degrees::family(4));
    std::mt19937 rng(11);
    std::normal_distribution<double> z;
    Eigen::VectorXd a(layout.num_pressure_dofs());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a[i] = z(rng);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(a.size());
    const double na = l2_pressure_error(mesh, layout, a, zero);
    EXPECT_GT(na, 0.0);
    EXPECT_NEAR(l2_pressure_error(mesh, layout, 3.0 * a, zero), 3.0 * na, 1e-12 * na);
    EXPECT_NEAR(l2_pressure_error(mesh, layout, zero, a), na, 1e-14 * na);
    EXPECT_EQ(l2_pressure_error(mesh, layout, a, a), 0.0);
    EXPECT_THROW((void)l2_pressure_error(mesh, layout, a.head(3), a), InvalidArgument);

    // The disk pressure is cubic, so with sigma = 3 its projection is exact.
    const ExactSolutionCase ex = exact::disk();
    auto lp = std::make_shared<const DofLayout>(mesh, Degrees::family(4));
    const ProjectedExact proj = project_exact(mesh, lp, ex.u, ex.p);
    double want = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c)
        want += integrate_cell(mesh.cell_points(c), [&](const Point& x) { return ex.p(x) * ex.p(x); }, 6);
    EXPECT_NEAR(l2_pressure_error(mesh, layout, proj.p, zero), std::sqrt(want), 1e-12);
}

TEST(FitRate, Examples)
{
    const std::vector<std::pair<double, double>> linear{{0.5, 1.0}, {0.25, 0.5}, {0.125, 0.25}};
    EXPECT_NEAR(fit_rate(linear), 1.0, 1e-14);
    const std::vector<std::pair<double, double>> quad{{1.0, 3.0}, {0.1, 0.03}};
    EXPECT_NEAR(fit_rate(quad), 2.0, 1e-14);
    const std::vector<std::pair<double, double>> half{{0.01, 0.1}, {0.04, 0.2}, {0.16, 0.4}, {0.64, 0.8}};
    EXPECT_NEAR(fit_rate(half), 0.5, 1e-14);
    // Least squares: noise symmetric in log space averages out.
    const std::vector<std::pair<double, double>> noisy{{1.0, 1.0 * 1.1}, {0.5, 0.25 / 1.1}, {0.25, 0.0625 * 1.1}, {0.125, 0.015625 / 1.1}};
    EXPECT_NEAR(fit_rate(noisy), 2.0, 0.1);

    EXPECT_THROW((void)fit_rate(std::vector<std::pair<double, double>>{{0.5, 1.0}}), InvalidArgument);
    EXPECT_THROW((void)fit_rate(std::vector<std::pair<double, double>>{{0.5, 1.0}, {0.5, 2.0}}), InvalidArgument);
    EXPECT_THROW((void)fit_rate(std::vector<std::pair<double, double>>{{0.5, 0.0}, {0.25, 1.0}}), InvalidArgument);
    EXPECT_THROW((void)fit_rate(std::vector<std::pair<double, double>>{{-0.5, 1.0}, {0.25, 1.0}}), InvalidArgument);
}

TEST(ProjectExact, ReproducesPolynomialFieldsAndCommutes)
{
    // u in [P_1]^2 lies in V_h's interior space exactly; traces are exact on interior edges.
    const PolygonalMesh disk = generate_disk_mesh(8);
    auto layout = std::make_shared<const DofLayout>(disk, Degrees::family(1));
    const VectorField lin = [](const Point& x) { return Eigen::Vector2d(1.0 + 2.0 * x.x() - x.y(), 0.5 * x.y()); };
    const ProjectedExact pl = project_exact(disk, layout, lin, [](const Point& x) { return x.x(); });
    for (int c = 0; c < disk.num_cells(); ++c) {
        const LocalCell cell = LocalCell::from_mesh(disk, c);
        const CellBasis b = cell.basis(1);
        const Eigen::VectorXd v = pl.u.local(disk, c);
        const Point x = cell.centroid + Point(0.01, -0.02);
        EXPECT_NEAR(b.eval(x).dot(v.head(3)), lin(x).x(), 1e-13);
        EXPECT_NEAR(b.eval(x).dot(v.segment(3, 3)), lin(x).y(), 1e-13);
    }

    // On the square the exact flux has zero normal trace, so B Q_h u = -(g, q).
    const PolygonalMesh square = generate_square_tri(4);
    const ExactSolutionCase ex = exact::square();
    for (int j : {1, 2}) {
        const SaddleSystem sys = assemble_system(square, Degrees::family(j), Scheme::original);
        const ProjectedExact proj = project_exact(square, sys.layout, ex.u, ex.p, 24);
        const Eigen::VectorXd rhs = assemble_rhs(square, *sys.layout, ex.g, false, 24);
        const Eigen::VectorXd bu = sys.B * proj.u.coeffs;
        EXPECT_LE((bu - rhs.tail(sys.num_pressure())).norm(), 1e-11 * bu.norm()) << j;
    }
}

TEST(Registry, LookupAndUnknownId)
{
    for (const char* id : {"square", "disk", "ring"}) {
        const ExactSolutionCase c = registry_lookup(id);
        EXPECT_EQ(c.id, id);
        EXPECT_TRUE(c.u && c.p && c.g);
        EXPECT_FALSE(c.boundary.empty());
    }
    EXPECT_THROW((void)registry_lookup("annulus"), InvalidArgument);
    EXPECT_THROW((void)registry_lookup(""), InvalidArgument);
}

TEST(Registry, PointValues)
{
    const ExactSolutionCase d = exact::disk();
    EXPECT_NEAR(d.u(Point(0, 0)).x(), -3.0, 1e-15);
    EXPECT_NEAR(d.u(Point(0, 0)).y(), 0.0, 1e-15);
    EXPECT_NEAR(d.p(Point(1, 0)), 2.0, 1e-15);
    EXPECT_NEAR(d.g(Point(0.5, 0)), 4.0, 1e-15);

    const ExactSolutionCase r = exact::ring();
    EXPECT_NEAR(r.u(Point(0.75, 0)).x(), 0.0, 1e-15);
    EXPECT_NEAR(r.u(Point(0.75, 0)).y(), -1.5, 1e-14);
    EXPECT_NEAR(r.p(Point(0, 0.75)), 1.125, 1e-15);

    const ExactSolutionCase s = exact::square();
    EXPECT_NEAR(s.p(Point(0, 0)), 1.0, 1e-15);
    EXPECT_NEAR(s.u(Point(0.5, 0)).x(), std::numbers::pi, 1e-14);
}

TEST(Registry, NormalFluxVanishesOnTheBoundary)
{
    for (const char* id : {"square", "disk", "ring"}) {
        const ExactSolutionCase c = registry_lookup(id);
        double worst = 0.0;
        for (const Curve& curve : c.boundary)
            for (int k = 0; k < 1000; ++k) {
                const double t = (k + 0.5) / 1000.0;
                Point x;
                if (curve.kind == Curve::Kind::circle) {
                    const double th = 2.0 * std::numbers::pi * t;
                    x = curve.center + curve.radius * Point(std::cos(th), std::sin(th));
                } else {
                    // Unit square sides: walk along the line through the side's midpoint.
                    const Point tangent(-curve.normal.y(), curve.normal.x());
                    x = curve.center + (t - 0.5) * tangent;
                }
                worst = std::max(worst, std::abs(c.u(x).dot(curve.outward_normal(x))));
            }
        EXPECT_LE(worst, 1e-10) << id;
    }
}

TEST(Registry, RingPolarMatchesCartesian)
{
    const ExactSolutionCase r = exact::ring();
    for (int i = 0; i < 20; ++i)
        for (int k = 0; k < 24; ++k) {
            const double rad = 0.5 + 0.5 * i / 19.0;
            const double th = 2.0 * std::numbers::pi * k / 24.0 + 0.1;
            const Point x(rad * std::cos(th), rad * std::sin(th));
            const Eigen::Vector2d up = exact::RingPolar::u(rad, th);
            EXPECT_NEAR((r.u(x) - up).norm(), 0.0, 1e-12);
            EXPECT_NEAR(r.p(x), exact::RingPolar::p(rad, th), 1e-12);
        }
}

TEST(Registry, FluxIsMinusPressureGradientAndDivergenceIsG)
{
    for (const char* id : {"square", "disk", "ring"}) {
        const ExactSolutionCase c = registry_lookup(id);
        for (const Point& x : sample_points(id)) {
            const double dpx = central(c.p, x, Point(1, 0));
            const double dpy = central(c.p, x, Point(0, 1));
            EXPECT_NEAR(c.u(x).x(), -dpx, 1e-8) << id;
            EXPECT_NEAR(c.u(x).y(), -dpy, 1e-8) << id;
            const double div = central([&](const Point& y) { return c.u(y).x(); }, x, Point(1, 0)) +
                               central([&](const Point& y) { return c.u(y).y(); }, x, Point(0, 1));
            EXPECT_NEAR(div, c.g(x), 1e-7 * (1.0 + std::abs(c.g(x)))) << id;
        }
    }
}

TEST(Study, CsvFormat)
{
    ConvergenceTable t;
    StudyRow r;
    r.n = 4;
    r.h = 0.5;
    r.s = 0.25;
    r.dofs = 100;
    r.err_u_vh = 0.1;
    r.err_u_vh1 = 0.2;
    r.err_p = 1.0 / 3.0;
    t.rows.push_back(r);
    t.slope_u = 1.5;
    t.slope_p = 2.0;
    std::ostringstream os;
    write_csv(os, t);
    EXPECT_EQ(os.str(), "n,h,s,dofs,err_u_Vh,err_u_Vh1,err_p_L2,seconds\n"
                        "4,0.5,0.25,100,0.1,0.2,0.333333333333,0\n"
                        "# slope_u=1.5 slope_p=2\n");
}

TEST(Study, SmallSquareStudyIsDeterministic)
{
    StudyConfig cfg;
    cfg.domain = Domain::square;
    cfg.degree = 1;
    cfg.levels = {2, 4, 8};
    const ConvergenceTable a = run_convergence_study(cfg);
    const ConvergenceTable b = run_convergence_study(cfg);
    std::ostringstream sa;
    std::ostringstream sb;
    write_csv(sa, a);
    write_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    ASSERT_EQ(a.rows.size(), 3u);
    EXPECT_TRUE(std::isfinite(a.slope_u));
    EXPECT_TRUE(std::isfinite(a.slope_p));
    EXPECT_EQ(a.pair_slopes_u.size(), 2u);
    for (const StudyRow& row : a.rows) {
        EXPECT_EQ(row.seconds, 0.0);
        EXPECT_LE(row.residual, 1e-9);
        EXPECT_TRUE(row.mesh_ok);
        EXPECT_GT(row.s, 0.0);
        EXPECT_LE(row.s, row.h);
    }
    EXPECT_GT(a.rows[0].err_p, a.rows[2].err_p);

    cfg.threads = 3;
    std::ostringstream sc;
    write_csv(sc, run_convergence_study(cfg));
    EXPECT_EQ(sa.str(), sc.str());
}

TEST(Study, RejectsBadConfiguration)
{
    StudyConfig cfg;
    cfg.levels = {};
    EXPECT_THROW((void)run_convergence_study(cfg), InvalidArgument);
    cfg.levels = {4, 2};
    EXPECT_THROW((void)run_convergence_study(cfg), InvalidArgument);
    cfg.levels = {2, 2};
    EXPECT_THROW((void)run_convergence_study(cfg), InvalidArgument);
    cfg.levels = {2, 4};
    cfg.degree = 0;
    EXPECT_THROW((void)run_convergence_study(cfg), InvalidArgument);
    cfg.degree = 1;
    cfg.domain = Domain::disk;
    cfg.levels = {1, 2};
    EXPECT_THROW((void)run_convergence_study(cfg), InvalidArgument);
}

TEST(Study, SplitPolicy)
{
    SplitPolicy none;
    EXPECT_EQ(none.count(0.01, 2), 1);
    EXPECT_EQ(none.describe(), "none");
    SplitPolicy fixed{SplitPolicy::Kind::fixed, 5};
    EXPECT_EQ(fixed.count(0.5, 1), 5);
    EXPECT_EQ(fixed.describe(), "fixed:5");
    SplitPolicy orig{SplitPolicy::Kind::original, 1};
    EXPECT_EQ(orig.count(0.1, 2), boundary_split_count(0.1, 2, SplitRule::original));
    int used = 0;
    const PolygonalMesh m = build_study_mesh(Domain::disk, 8, fixed, 1, &used);
    EXPECT_EQ(used, 5);
    EXPECT_EQ(static_cast<int>(m.boundary_edges().size()), 40);
    (void)build_study_mesh(Domain::square, 4, fixed, 1, &used);
    EXPECT_EQ(used, 1);
}
