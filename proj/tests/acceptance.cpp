// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers.
// Exits nonzero when any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "test_support.hpp"
#include "wg/wg.hpp"

using namespace wg;

namespace {

struct Tally {
    int passed = 0;
    int failed = 0;

    void report(int id, bool ok, const std::string& what)
    {
        std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
        std::fflush(stdout);
        (ok ? passed : failed) += 1;
    }
};

int threads()
{
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("WG_THREADS"))
        n = std::min(n, std::max(1, std::atoi(env)));
    return n;
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (double x : v)
        s += (s.empty() ? "" : ",") + fmt("%.3f", x);
    return s;
}

std::string join(const std::vector<int>& v)
{
    std::string s;
    for (int x : v)
        s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
}

/// Every study run, kept for the residual and mesh checks.
std::vector<ConvergenceTable> g_studies;

ConvergenceTable study(Domain d, Scheme s, int j, std::vector<int> levels, SplitPolicy split = {})
{
    StudyConfig cfg;
    cfg.domain = d;
    cfg.scheme = s;
    cfg.degree = j;
    cfg.levels = std::move(levels);
    cfg.split = split;
    cfg.threads = threads();
    ConvergenceTable t = run_convergence_study(cfg);
    std::printf("  study %s %s j=%d split=%s levels=%s\n", to_string(d).c_str(), to_string(s).c_str(), j,
                split.describe().c_str(), join(cfg.levels).c_str());
    for (const StudyRow& r : t.rows)
        std::printf("    n=%-4d k=%-3d h=%.4e dofs=%-8d err_u=%.4e err_u1=%.4e err_p=%.4e res=%.1e\n", r.n, r.split, r.h,
                    r.dofs, r.err_u_vh, r.err_u_vh1, r.err_p, r.residual);
    std::printf("    slope_u=%.3f slope_u1=%.3f slope_p=%.3f pairs_u=[%s] pairs_p=[%s]\n", t.slope_u, t.slope_u_vh1,
                t.slope_p, join(t.pair_slopes_u).c_str(), join(t.pair_slopes_p).c_str());
    std::fflush(stdout);
    g_studies.push_back(t);
    return t;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

std::string slope_text(const char* label, const ConvergenceTable& t, double target, double tol)
{
    return std::string(label) + " slope_u=" + fmt("%.3f", t.slope_u) + " (target " + fmt("%.2f", target) + " +- " +
           fmt("%.2f", tol) + ")";
}

const std::vector<int> kFine{64, 128, 256, 512};
const std::vector<int> kMid{32, 64, 128, 256};
const std::vector<int> kCoarse{16, 32, 64, 128};
const std::vector<int> kSquare{4, 8, 16, 32};

void criterion1(Tally& t)
{
    bool ok = true;
    std::string msg;
    for (int j : {1, 2}) {
        const ConvergenceTable s = study(Domain::square, Scheme::original, j, kSquare);
        const bool u = s.slope_u >= j + 0.8;
        const bool p = s.slope_p >= j + 0.8;
        ok = ok && u && p;
        msg += "j=" + std::to_string(j) + " slope_u=" + fmt("%.3f", s.slope_u) + (u ? "" : "(<") +
               (u ? "" : fmt("%.1f)", j + 0.8)) + " slope_p=" + fmt("%.3f", s.slope_p) + (p ? "" : "(<") +
               (p ? "" : fmt("%.1f)", j + 0.8)) + "; ";
    }
    t.report(1, ok, "square original, slopes >= j+0.8: " + msg);
}

void criterion2(Tally& t)
{
    const ConvergenceTable a = study(Domain::disk, Scheme::original, 1, kFine);
    const ConvergenceTable b = study(Domain::disk, Scheme::original, 2, kMid);
    t.report(2, within(a.slope_u, 0.5, 0.2) && within(b.slope_u, 0.5, 0.2),
             "disk original split=1: " + slope_text("j=1", a, 0.5, 0.2) + "; " + slope_text("j=2", b, 0.5, 0.2));
}

void criterion3(Tally& t)
{
    const ConvergenceTable a = study(Domain::disk, Scheme::modified, 1, kFine);
    t.report(3, within(a.slope_u, 1.0, 0.2), "disk modified split=1: " + slope_text("j=1", a, 1.0, 0.2));
}

void criterion4(Tally& t)
{
    const ConvergenceTable a = study(Domain::disk, Scheme::modified, 2, kMid);
    t.report(4, within(a.slope_u, 1.5, 0.25), "disk modified split=1: " + slope_text("j=2", a, 1.5, 0.25));
}

void criterion5(Tally& t)
{
    const ConvergenceTable a = study(Domain::disk, Scheme::original, 2, kCoarse, {SplitPolicy::Kind::original, 1});
    t.report(5, within(a.slope_u, 2.0, 0.25),
             "disk original split=ceil(h^(1/2-j)), k up to " + std::to_string(a.rows.back().split) + ": " +
                 slope_text("j=2", a, 2.0, 0.25));
}

void criterion6(Tally& t)
{
    const ConvergenceTable a = study(Domain::disk, Scheme::modified, 2, kCoarse, {SplitPolicy::Kind::modified, 1});
    t.report(6, within(a.slope_u, 2.0, 0.25),
             "disk modified split=ceil(h^((3-2j)/4)), k up to " + std::to_string(a.rows.back().split) + ": " +
                 slope_text("j=2", a, 2.0, 0.25));
}

void criterion7(Tally& t)
{
    const ConvergenceTable a = study(Domain::ring, Scheme::original, 1, kFine);
    const ConvergenceTable b = study(Domain::ring, Scheme::original, 2, kMid);
    const ConvergenceTable c = study(Domain::ring, Scheme::modified, 1, kFine);
    const bool ok = within(a.slope_u, 0.5, 0.2) && within(b.slope_u, 0.5, 0.2) && within(c.slope_u, 1.0, 0.2);
    t.report(7, ok,
             "ring: original " + slope_text("j=1", a, 0.5, 0.2) + "; original " + slope_text("j=2", b, 0.5, 0.2) +
                 "; modified " + slope_text("j=1", c, 1.0, 0.2));
}

// ---------------------------------------------------------------- properties

/// (a) commutativity on 50 random polynomial fields over random polygons.
double property_commutativity()
{
    std::mt19937 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int j = 1 + trial % 3;
        const auto poly = wg::testing::random_convex_polygon(rng);
        const int order = 2 * j + 8;
        const LocalSpaces sp(LocalCell::from_polygon(poly), Degrees::family(j), order);
        const auto v = wg::testing::random_poly_field(rng, j + 2);
        const int nv = sp.velocity_basis().size();
        const int nt = sp.trace_basis().size();
        Eigen::VectorXd x(sp.flux_size());
        x.head(nv) = project_cell(sp.cell(), [&](const Point& p) { return v(p).x(); }, j, order);
        x.segment(nv, nv) = project_cell(sp.cell(), [&](const Point& p) { return v(p).y(); }, j, order);
        for (int e = 0; e < sp.num_edges(); ++e) {
            const LocalEdge& edge = sp.cell().edges[e];
            x.segment(sp.trace_offset(e), nt) =
                project_edge(edge.a, edge.b, [&](const Point& p) { return v(p).dot(edge.normal); }, j, order);
        }
        const Eigen::VectorXd got = local_weak_divergence(sp) * x;
        const Eigen::VectorXd want = project_cell(sp.cell(), [&](const Point& p) { return v.divergence(p); }, j, order);
        // Compare as functions: the max over sample points of the cell.
        for (const Point& p : poly) {
            const Point q = 0.5 * (p + sp.cell().centroid);
            worst = std::max(worst, std::abs(sp.divergence_basis().eval(q).dot(got - want)));
        }
    }
    return worst;
}

/// (b) max |b_h(v, 1)| over random v with unit-variance coefficients, both schemes.
double property_constant_pressure()
{
    std::mt19937 rng(77);
    std::normal_distribution<double> z;
    double worst = 0.0;
    const PolygonalMesh mesh = generate_disk_mesh(16);
    for (Scheme s : {Scheme::original, Scheme::modified})
        for (int j : {1, 2}) {
            const SaddleSystem sys = assemble_system(mesh, Degrees::family(j), s);
            Eigen::VectorXd one = Eigen::VectorXd::Zero(sys.num_pressure());
            for (int c = 0; c < mesh.num_cells(); ++c)
                one[sys.layout->pressure_offset(c)] = 1.0;
            for (int trial = 0; trial < 10; ++trial) {
                Eigen::VectorXd v(sys.num_flux());
                for (Eigen::Index i = 0; i < v.size(); ++i)
                    v[i] = z(rng);
                worst = std::max({worst, std::abs(one.dot(sys.B * v)), std::abs(one.dot(sys.B1 * v))});
            }
        }
    return worst;
}

struct SpectrumCheck {
    int size = 0;
    double asymmetry = 0.0;
    double smallest = 0.0;
    double second = 0.0;
    double kernel_flux = 0.0;
    double kernel_spread = 0.0;
};

/// (c) dense SVD of the original-scheme matrix on a small disk mesh.
SpectrumCheck property_spectrum()
{
    const PolygonalMesh mesh = generate_disk_mesh(8);
    const SaddleSystem sys = assemble_system(mesh, Degrees::family(1), Scheme::original);
    const Eigen::MatrixXd m = Eigen::MatrixXd(sys.matrix());
    SpectrumCheck r;
    r.size = static_cast<int>(m.rows());
    r.asymmetry = (m - m.transpose()).norm() / m.norm();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues() / svd.singularValues()[0];
    const Eigen::Index n = sv.size();
    r.smallest = sv[n - 1];
    r.second = sv[n - 2];
    const Eigen::VectorXd k = svd.matrixV().col(n - 1);
    r.kernel_flux = k.head(sys.num_flux()).norm();
    const Eigen::VectorXd kp = k.tail(sys.num_pressure());
    r.kernel_spread = kp.maxCoeff() - kp.minCoeff();
    return r;
}

/// (d) relative gap between v^T A v and ||v||^2_{V_h} for random v, both schemes.
double property_energy()
{
    std::mt19937 rng(31);
    std::normal_distribution<double> z;
    double worst = 0.0;
    for (Domain d : {Domain::disk, Domain::ring}) {
        const PolygonalMesh mesh = build_study_mesh(d, 16, {}, 2);
        for (Scheme s : {Scheme::original, Scheme::modified}) {
            const SaddleSystem sys = assemble_system(mesh, Degrees::family(2), s, {1.7, -1});
            Eigen::VectorXd v(sys.num_flux());
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v[i] = z(rng);
            const double nrm = vh_norm(mesh, WgFunction(sys.layout, v), sys.normal_mode, 1.7);
            worst = std::max(worst, std::abs(v.dot(sys.A * v) - nrm * nrm) / (nrm * nrm));
        }
    }
    return worst;
}

/// (e) relative error of the polygon rule on monomials of degree <= 2 alpha + 2.
double property_quadrature()
{
    std::mt19937 rng(8);
    double worst = 0.0;
    for (int alpha = 1; alpha <= 3; ++alpha) {
        const int top = 2 * alpha + 2;
        for (int trial = 0; trial < 20; ++trial) {
            const auto poly = wg::testing::random_convex_polygon(rng);
            const QuadratureRule rule = polygon_rule(poly, top);
            for (int deg = 0; deg <= top; ++deg)
                for (int b = 0; b <= deg; ++b) {
                    const int a = deg - b;
                    const double exact = wg::testing::polygon_monomial(poly, polygon_centroid(poly), a, b);
                    double sum = 0.0;
                    double scale = 0.0;
                    for (std::size_t k = 0; k < rule.size(); ++k) {
                        const double m = std::pow(rule.points[k].x(), a) * std::pow(rule.points[k].y(), b);
                        sum += rule.weights[k] * m;
                        scale += rule.weights[k] * std::abs(m);
                    }
                    worst = std::max(worst, std::abs(sum - exact) / scale);
                }
        }
    }
    return worst;
}

/// (g) zero data gives an exactly zero solution.
double property_zero_data()
{
    double worst = 0.0;
    for (Scheme s : {Scheme::original, Scheme::modified}) {
        const SaddleSystem sys = assemble_system(generate_ring_mesh(16), Degrees::family(2), s);
        const Solution sol = solve_saddle(sys);
        worst = std::max({worst, sol.u.coeffs.lpNorm<Eigen::Infinity>(), sol.p.lpNorm<Eigen::Infinity>()});
    }
    return worst;
}

void criterion8(Tally& t)
{
    const double a = property_commutativity();
    const double b = property_constant_pressure();
    const SpectrumCheck c = property_spectrum();
    const double d = property_energy();
    const double e = property_quadrature();
    double f = 0.0;
    int levels = 0;
    for (const ConvergenceTable& s : g_studies)
        for (const StudyRow& r : s.rows) {
            f = std::max(f, r.residual);
            ++levels;
        }
    const double g = property_zero_data();

    const bool ok_a = a <= 1e-10;
    const bool ok_b = b <= 1e-12;
    const bool ok_c = c.size <= 2000 && c.asymmetry <= 1e-14 && c.smallest <= 1e-13 && c.second >= 1e-8 &&
                      c.kernel_flux <= 1e-10 && c.kernel_spread <= 1e-10;
    const bool ok_d = d <= 1e-13;
    const bool ok_e = e <= 1e-12;
    const bool ok_f = levels > 0 && f <= 1e-9;
    const bool ok_g = g == 0.0;
    std::printf("  (a) commutativity max error %.2e\n", a);
    std::printf("  (b) max |b_h(v,1)| %.2e\n", b);
    std::printf("  (c) %dx%d asymmetry %.1e, sigma_min/sigma_max %.1e, next %.1e, kernel flux %.1e, pressure spread %.1e\n",
                c.size, c.size, c.asymmetry, c.smallest, c.second, c.kernel_flux, c.kernel_spread);
    std::printf("  (d) energy identity rel. gap %.2e\n", d);
    std::printf("  (e) quadrature rel. error %.2e\n", e);
    std::printf("  (f) max residual %.2e over %d study levels\n", f, levels);
    std::printf("  (g) zero data max |coeff| %.1e\n", g);
    std::string failed;
    const std::pair<char, bool> parts[] = {{'a', ok_a}, {'b', ok_b}, {'c', ok_c}, {'d', ok_d},
                                           {'e', ok_e}, {'f', ok_f}, {'g', ok_g}};
    for (const auto& [name, good] : parts)
        if (!good)
            failed += name;
    t.report(8, failed.empty(), failed.empty() ? "property suite (a)-(g)" : "property suite, failing: " + failed);
}

// ------------------------------------------------------------------ geometry

void criterion9(Tally& t)
{
    // Distinct meshes of every study above.
    std::map<std::tuple<int, int, int>, PolygonalMesh> meshes;
    for (const ConvergenceTable& s : g_studies)
        for (const StudyRow& r : s.rows) {
            const auto key = std::make_tuple(static_cast<int>(s.config.domain), r.n, r.split);
            if (!meshes.count(key))
                meshes.emplace(key, build_study_mesh(s.config.domain, r.n, {SplitPolicy::Kind::fixed, r.split},
                                                     s.config.degree));
        }

    double sagitta_err = 0.0;
    double normal_ratio = 0.0;
    // Literal |n~ - n| / h_e per domain, for the record.
    std::map<int, double> literal;
    int failed_meshes = 0;
    MeshQualityReport worst_a6;
    worst_a6.min_a6_height_over_rho = std::numeric_limits<double>::infinity();
    for (const auto& [key, mesh] : meshes) {
        for (int e : mesh.boundary_edges()) {
            const auto seg = mesh.segment(e);
            if (!seg)
                continue;
            const double he = seg->length();
            const double R = seg->curve().radius;
            if (seg->curve().kind == Curve::Kind::circle) {
                const double predicted = R - std::sqrt(R * R - 0.25 * he * he);
                sagitta_err = std::max(sagitta_err, std::abs(seg->at(0.5 * he).gap - predicted));
            }
            // |n~ - n| <= h_e / R: for the unit circle this is the plain h_e bound.
            const double bound = he / std::min(1.0, R);
            for (int k = 0; k <= 16; ++k) {
                const CurvePoint cp = seg->at(he * k / 16.0);
                const double dev = (cp.normal - mesh.edges()[e].normal).norm();
                normal_ratio = std::max(normal_ratio, dev / bound);
                literal[std::get<0>(key)] = std::max(literal[std::get<0>(key)], dev / he);
            }
        }
        const MeshQualityReport rep = validate_mesh(mesh);
        if (!rep.passed())
            ++failed_meshes;
        worst_a6.min_a6_height_over_rho = std::min(worst_a6.min_a6_height_over_rho, rep.min_a6_height_over_rho);
        worst_a6.max_a6_height_over_hk = std::max(worst_a6.max_a6_height_over_hk, rep.max_a6_height_over_hk);
        worst_a6.max_a6_diameter = std::max(worst_a6.max_a6_diameter, rep.max_a6_diameter);
        worst_a6.max_a6_radius_ratio = std::max(worst_a6.max_a6_radius_ratio, rep.max_a6_radius_ratio);
    }
    int flagged_rows = 0;
    for (const ConvergenceTable& s : g_studies)
        for (const StudyRow& r : s.rows)
            flagged_rows += r.mesh_ok ? 0 : 1;

    std::printf("  %zu distinct study meshes\n", meshes.size());
    std::printf("  sagitta max |gamma - (R - sqrt(R^2 - (s/2)^2))| = %.2e\n", sagitta_err);
    std::printf("  max |n~ - n| / (h_e / min(1, R)) = %.3f\n", normal_ratio);
    for (const auto& [d, v] : literal)
        std::printf("  max |n~ - n| / h_e on %s meshes = %.5f\n", to_string(static_cast<Domain>(d)).c_str(), v);
    std::printf("  A6 height/rho_K >= %.3f, height/h_K <= %.3f, diam F(P(e)) <= %.3g, radius ratio <= %.3g\n",
                worst_a6.min_a6_height_over_rho, worst_a6.max_a6_height_over_hk, worst_a6.max_a6_diameter,
                worst_a6.max_a6_radius_ratio);
    std::printf("  validator failures: %d meshes, %d study rows\n", failed_meshes, flagged_rows);
    const bool ok = sagitta_err <= 1e-12 && normal_ratio <= 1.0 && failed_meshes == 0 && flagged_rows == 0;
    t.report(9, ok, "geometry: sagitta err " + fmt("%.1e", sagitta_err) + ", normal ratio " + fmt("%.3f", normal_ratio) +
                        ", validator failures " + std::to_string(failed_meshes));
}

} // namespace

int main()
{
    Tally t;
    try {
        criterion1(t);
        criterion2(t);
        criterion3(t);
        criterion4(t);
        criterion5(t);
        criterion6(t);
        criterion7(t);
        criterion8(t);
        criterion9(t);
    } catch (const std::exception& e) {
        std::printf("FAIL aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d passed, %d failed\n", t.passed, t.failed);
    return t.failed == 0 ? 0 : 1;
}
