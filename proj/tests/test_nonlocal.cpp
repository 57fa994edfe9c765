#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <fourfold/quadrature.hpp>
#include <fourfold/spectral.hpp>
#include <fourfold/stray_field.hpp>

using namespace fourfold;

namespace {

double rel_l2(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < got.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

std::vector<double> smooth_bump(const Grid1D& g, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double a[4], c[4], w[4];
    for (int k = 0; k < 4; ++k) {
        a[k] = d(rng);
        c[k] = 0.15 * g.window() * d(rng);
        w[k] = 2.0 + 2.0 * std::abs(d(rng));
    }
    std::vector<double> u(g.n);
    for (int i = 0; i < g.n; ++i) {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += a[k] * std::exp(-std::pow((g.x(i) - c[k]) / w[k], 2));
        u[i] = v;
    }
    return u;
}

// brute-force image sum oracle for the periodized 1/z^2 kernel
double kernel_image_sum(double z, double W, int kmax) {
    double s = 0.0;
    for (int k = -kmax; k <= kmax; ++k) s += 1.0 / ((z + k * W) * (z + k * W));
    return s + 2.0 / (kmax * W * W); // integral tail of the truncated sum
}

// O(n^2) double-sum oracle for the seminorm, straight from the definition
double seminorm_double_sum(const std::vector<double>& u, const Grid1D& g) {
    return h_half_seminorm_sq_quadrature(u, g);
}

} // namespace

TEST_CASE("periodized kernel equals the image sum of the free-space kernel") {
    const Grid1D g = Grid1D::symmetric(1024, 200.0);
    const std::vector<double> K = periodized_kernel_by_offset(g);
    for (int r : {1, 2, 7, 100, 511}) {
        const double oracle = kernel_image_sum(r * g.h, g.window(), 4000);
        CHECK(K[static_cast<size_t>(r)] == Catch::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("half-laplacian annihilates constants on both routes") {
    const Grid1D g = Grid1D::symmetric(256, 60.0);
    SpectralPlan1D plan(g);
    std::vector<double> u(g.n, 3.7);
    for (double v : plan.half_laplacian(u)) CHECK(std::abs(v) < 1e-13);
    for (double v : half_laplacian_quadrature(u, g)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("cosine modes are eigenfunctions with eigenvalue |k|") {
    const Grid1D g = Grid1D::symmetric(512, 80.0);
    SpectralPlan1D plan(g);
    for (int m : {1, 3, 17}) {
        const double k = 2.0 * pi * m / g.window();
        std::vector<double> u(g.n), want(g.n);
        for (int i = 0; i < g.n; ++i) {
            u[i] = std::cos(k * g.x(i));
            want[i] = k * u[i];
        }
        CHECK(rel_l2(plan.half_laplacian(u), want) < 1e-11);
        CHECK(rel_l2(half_laplacian_quadrature(u, g), want) < 1e-7);
    }
}

TEST_CASE("lorentzian closed form is reproduced by both routes") {
    const Grid1D g = Grid1D::symmetric(8192, 400.0);
    SpectralPlan1D plan(g);
    std::vector<double> u(g.n), want(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        u[i] = 1.0 / (1.0 + x * x);
        want[i] = (1.0 - x * x) / ((1.0 + x * x) * (1.0 + x * x));
    }
    const std::vector<double> hs = plan.half_laplacian(u);
    const std::vector<double> hq = half_laplacian_quadrature(u, g);
    double worst_s = 0.0, worst_q = 0.0;
    for (int i = 0; i < g.n; ++i) {
        if (std::abs(g.x(i)) > 0.25 * g.window()) continue;
        worst_s = std::max(worst_s, std::abs(hs[static_cast<size_t>(i)] - want[static_cast<size_t>(i)]));
        worst_q = std::max(worst_q, std::abs(hq[static_cast<size_t>(i)] - want[static_cast<size_t>(i)]));
    }
    CHECK(worst_s < 1e-4);
    CHECK(worst_q < 1e-4);
}

TEST_CASE("spectral and quadrature routes agree on a centered gaussian") {
    const Grid1D g = Grid1D::symmetric(4096, 200.0);
    SpectralPlan1D plan(g);
    std::vector<double> u(g.n);
    for (int i = 0; i < g.n; ++i) u[i] = std::exp(-std::pow(g.x(i) / 5.0, 2));
    CHECK(rel_l2(half_laplacian_quadrature(u, g), plan.half_laplacian(u)) < 1e-6);
}

TEST_CASE("linearity holds to machine precision on both routes") {
    const Grid1D g = Grid1D::symmetric(512, 100.0);
    SpectralPlan1D plan(g);
    const std::vector<double> u = smooth_bump(g, 1), v = smooth_bump(g, 2);
    const double a = 1.7, b = -0.6;
    std::vector<double> lin(g.n);
    for (int i = 0; i < g.n; ++i) lin[i] = a * u[static_cast<size_t>(i)] + b * v[static_cast<size_t>(i)];

    const std::vector<double> su = plan.half_laplacian(u), sv = plan.half_laplacian(v),
                              sl = plan.half_laplacian(lin);
    const std::vector<double> qu = half_laplacian_quadrature(u, g),
                              qv = half_laplacian_quadrature(v, g),
                              ql = half_laplacian_quadrature(lin, g);
    double scale = 0.0;
    for (int i = 0; i < g.n; ++i) scale = std::max(scale, std::abs(sl[static_cast<size_t>(i)]));
    for (int i = 0; i < g.n; ++i) {
        const size_t k = static_cast<size_t>(i);
        CHECK(std::abs(sl[k] - (a * su[k] + b * sv[k])) < 1e-13 * (1.0 + scale));
        CHECK(std::abs(ql[k] - (a * qu[k] + b * qv[k])) < 1e-13 * (1.0 + scale));
    }
}

TEST_CASE("both half-laplacian routes are self-adjoint") {
    const Grid1D g = Grid1D::symmetric(512, 100.0);
    SpectralPlan1D plan(g);
    const std::vector<double> u = smooth_bump(g, 3), v = smooth_bump(g, 4);
    const auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    const double s1 = dot(plan.half_laplacian(u), v), s2 = dot(u, plan.half_laplacian(v));
    CHECK(std::abs(s1 - s2) < 1e-10 * (std::abs(s1) + 1.0));
    const double q1 = dot(half_laplacian_quadrature(u, g), v),
                 q2 = dot(u, half_laplacian_quadrature(v, g));
    CHECK(std::abs(q1 - q2) < 1e-10 * (std::abs(q1) + 1.0));
}

TEST_CASE("seminorm: constants vanish, single modes match Parseval, bump matches double sum") {
    const Grid1D g = Grid1D::symmetric(1024, 120.0);
    SpectralPlan1D plan(g);

    CHECK(plan.seminorm_sq(std::vector<double>(g.n, 2.5)) < 1e-14);

    for (int m : {2, 9}) {
        const double k = 2.0 * pi * m / g.window();
        std::vector<double> u(g.n);
        for (int i = 0; i < g.n; ++i) u[i] = std::cos(k * g.x(i));
        CHECK(plan.seminorm_sq(u) == Catch::Approx(k * 0.5 * g.window()).epsilon(1e-10));
    }

    for (uint64_t seed : {5, 6, 7}) {
        const std::vector<double> u = smooth_bump(g, seed);
        const double sp = plan.seminorm_sq(u);
        const double qd = seminorm_double_sum(u, g);
        CHECK(sp >= 0.0);
        CHECK(std::abs(sp - qd) <= 1e-5 * std::max(sp, 1e-300));
    }
}

TEST_CASE("far-field mismatch is rejected instead of silently wrapping") {
    const Grid1D g = Grid1D::symmetric(256, 60.0);
    SpectralPlan1D plan(g);
    std::vector<double> u(g.n);
    for (int i = 0; i < g.n; ++i) u[i] = std::tanh(g.x(i));
    CHECK_THROWS_AS(plan.half_laplacian(u), PreconditionError);
    CHECK_THROWS_AS(plan.seminorm_sq(u), PreconditionError);
}

TEST_CASE("riesz kernel uses the exact cell average at the origin") {
    const Grid2D g(8, 8, 0.5);
    StrayFieldPlan2D plan(g);

    // oracle for the cell average of 1/|r|: in polar coordinates the integral
    // over the square is 8 * int_0^{pi/4} (h/2) sec(t) dt, done here by Simpson
    const int q = 4000;
    double integral = 0.0;
    for (int a = 0; a <= q; ++a) {
        const double t = (pi / 4.0) * a / q;
        const double w = (a == 0 || a == q) ? 1.0 : (a % 2 ? 4.0 : 2.0);
        integral += w / std::cos(t);
    }
    integral *= 8.0 * (0.5 * g.h) * (pi / 4.0) / (3.0 * q);
    const double avg = integral / (g.h * g.h);
    CHECK(avg == Catch::Approx(4.0 * std::log(1.0 + std::sqrt(2.0)) / g.h).epsilon(1e-10));

    PaddedCharge c;
    c.cx = g.nx + 2;
    c.cy = g.ny + 2;
    c.h = g.h;
    c.rho.assign(static_cast<size_t>(c.cx) * c.cy, 0.0);
    c.at(5, 5) = 1.0;
    std::vector<double> phi;
    plan.potential(c, phi);
    CHECK(phi[static_cast<size_t>(5) * c.cx + 5] ==
          Catch::Approx(g.h * g.h * 4.0 * std::log(1.0 + std::sqrt(2.0)) / g.h).epsilon(1e-12));
    CHECK(phi[static_cast<size_t>(5) * c.cx + 6] == Catch::Approx(g.h * g.h / g.h).epsilon(1e-12));
    CHECK(phi[static_cast<size_t>(7) * c.cx + 5] ==
          Catch::Approx(g.h * g.h / (2.0 * g.h)).epsilon(1e-12));
}

TEST_CASE("uniform magnetization charges only the rows next to horizontal edges") {
    const Grid2D g(24, 40, 0.25);
    VectorField2D m(g);
    for (auto& v : m.m1) v = 0.0;
    for (auto& v : m.m2) v = 1.0;
    const PaddedCharge c = charge_density_2d(m);

    CHECK(std::abs(c.total()) < 1e-12);
    double bottom = 0.0, top = 0.0, interior = 0.0;
    for (int j = 0; j < c.cy; ++j)
        for (int i = 0; i < c.cx; ++i) {
            if (j <= 1) bottom += c.at(i, j);
            else if (j >= c.cy - 2) top += c.at(i, j);
            else interior += std::abs(c.at(i, j));
        }
    CHECK(interior < 1e-12);
    CHECK(bottom < 0.0);
    CHECK(top > 0.0);
    CHECK(bottom == Catch::Approx(-top).epsilon(1e-12));
    CHECK(top == Catch::Approx(static_cast<double>(g.nx) / g.h).epsilon(1e-12));
}

TEST_CASE("half-split magnetization adds an interior charge line") {
    const Grid2D g(16, 32, 0.25);
    VectorField2D m(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const size_t k = static_cast<size_t>(j) * g.nx + i;
            m.m1[k] = 0.0;
            m.m2[k] = g.yc(j) < 0.5 * g.ly() ? -1.0 : 1.0;
        }
    const PaddedCharge c = charge_density_2d(m);
    CHECK(std::abs(c.total()) < 1e-12);
    double line = 0.0;
    for (int i = 1; i <= g.nx; ++i)
        for (int j = g.ny / 2 - 1; j <= g.ny / 2 + 2; ++j) line += std::abs(c.at(i, j));
    CHECK(line > 1.0);
}

TEST_CASE("random magnetization: total charge telescopes to zero, energy nonnegative") {
    const Grid2D g(20, 28, 0.3);
    StrayFieldPlan2D plan(g);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        VectorField2D m(g);
        for (auto& v : m.m1) v = d(rng);
        for (auto& v : m.m2) v = d(rng);
        CHECK(std::abs(charge_density_2d(m).total()) < 1e-12);
        CHECK(magnetostatic_energy_2d(m, plan, 2.0) >= 0.0);
    }
}

TEST_CASE("discretely divergence-free vortex ring produces no stray field") {
    const Grid2D g = Grid2D::from_sample(16.0, 16.0, 4.0);
    StrayFieldPlan2D plan(g);

    // stream function construction: m = (-D_y psi, D_x psi) with the same
    // centered differences the charge assembly uses, so rho is exactly zero
    std::vector<double> psi(static_cast<size_t>(g.nx) * g.ny, 0.0);
    const double cx = 0.5 * g.lx(), cy = 0.5 * g.ly();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double r = std::hypot(g.xc(i) - cx, g.yc(j) - cy);
            psi[static_cast<size_t>(j) * g.nx + i] = std::exp(-std::pow((r - 2.5) / 0.8, 2));
        }
    auto at = [&](int i, int j) -> double {
        if (i < 0 || i >= g.nx || j < 0 || j >= g.ny) return 0.0;
        return psi[static_cast<size_t>(j) * g.nx + i];
    };
    VectorField2D m(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const size_t k = static_cast<size_t>(j) * g.nx + i;
            m.m1[k] = -(at(i, j + 1) - at(i, j - 1)) / (2.0 * g.h);
            m.m2[k] = (at(i + 1, j) - at(i - 1, j)) / (2.0 * g.h);
        }

    const PaddedCharge c = charge_density_2d(m);
    double worst_rho = 0.0;
    for (double v : c.rho) worst_rho = std::max(worst_rho, std::abs(v));
    CHECK(worst_rho < 1e-12);

    const VectorField2D h = stray_field_2d(m, plan, 5.0);
    double worst = 0.0;
    for (size_t k = 0; k < h.m1.size(); ++k)
        worst = std::max({worst, std::abs(h.m1[k]), std::abs(h.m2[k])});
    CHECK(worst < 1e-6);
    CHECK(magnetostatic_energy_2d(m, plan, 5.0) < 1e-12);
}

TEST_CASE("field between a charge pair points from positive to negative") {
    const Grid2D g = Grid2D::from_sample(24.0, 8.0, 4.0);
    StrayFieldPlan2D plan(g);
    VectorField2D m(g);
    const double x1 = 7.0, x2 = 17.0, w = 1.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const size_t k = static_cast<size_t>(j) * g.nx + i;
            const double x = g.xc(i);
            const double env = std::exp(-std::pow((g.yc(j) - 0.5 * g.ly()) / 2.0, 2));
            m.m1[k] = env * 0.5 *
                      (std::tanh((x - x1) / w) - std::tanh((x - x2) / w));
            m.m2[k] = 0.0;
        }
    // rho = -dx m1: negative spot near x1, positive spot near x2
    const VectorField2D h = stray_field_2d(m, plan, 1.0);
    const int jmid = g.ny / 2;
    const int imid = static_cast<int>(std::lround(0.5 * (x1 + x2) / g.h - 0.5));
    CHECK(h.m1[static_cast<size_t>(jmid) * g.nx + imid] < 0.0);
}

TEST_CASE("kernel energy equals the m-dot-field pairing") {
    const Grid2D g(32, 48, 0.25);
    StrayFieldPlan2D plan(g);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    VectorField2D m(g);
    for (auto& v : m.m1) v = d(rng);
    for (auto& v : m.m2) v = d(rng);
    const VectorField2D h = stray_field_2d(m, plan, 3.0);
    const double e1 = magnetostatic_energy_2d(m, plan, 3.0);
    double e2 = 0.0;
    for (size_t k = 0; k < m.m1.size(); ++k) e2 += m.m1[k] * h.m1[k] + m.m2[k] * h.m2[k];
    e2 *= -0.5 * g.h * g.h;
    CHECK(e2 == Catch::Approx(e1).epsilon(1e-8));
}
