#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fourfold/diagnostics.hpp"
#include "fourfold/energy1d.hpp"
#include "fourfold/energy2d.hpp"
#include "fourfold/io.hpp"
#include "fourfold/lemma_checks.hpp"
#include "fourfold/quadrature.hpp"
#include "fourfold/relax.hpp"
#include "fourfold/spectral.hpp"
#include "fourfold/stray_field.hpp"

namespace fourfold {

struct PropertyResult {
    std::string name;
    double tolerance = 0.0;
    double observed = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<PropertyResult> results;
    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return !results.empty();
    }
};

// Smooth random profile running from alpha down to 0 with interior bumps;
// the outer two cells on each side sit exactly on the limits.
inline AngleField1D random_admissible_profile(const Grid1D& g, double alpha, uint64_t seed,
                                              double bump = 0.25) {
    AngleField1D f(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-bump, bump);
    std::uniform_real_distribution<double> width(1.0, 4.0);
    const double W = g.window();
    double a[5], ph[5];
    for (int k = 0; k < 5; ++k) {
        a[k] = amp(rng);
        ph[k] = amp(rng) * 10.0;
    }
    const double w0 = width(rng);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        double v = 0.5 * alpha * (1.0 - std::tanh(x / w0));
        const double envelope = std::exp(-std::pow(x / (0.1 * W), 2));
        for (int k = 0; k < 5; ++k) v += a[k] * envelope * std::sin((k + 1) * 2.0 * pi * x / W + ph[k]);
        f.theta[i] = v;
    }
    f.theta[0] = f.theta[1] = alpha;
    f.theta[g.n - 2] = f.theta[g.n - 1] = 0.0;
    return f;
}

inline AngleField1D random_nonnegative_profile(const Grid1D& g, uint64_t seed) {
    AngleField1D f(g);
    std::mt19937_64 rng(seed);
    // three bumps never sum past pi/4, where sin(rho + pi/4) stops being
    // monotone and the rearrangement transfer would no longer be termwise
    std::uniform_real_distribution<double> amp(0.05, 0.25);
    std::uniform_real_distribution<double> pos(-0.25 * g.window(), 0.25 * g.window());
    std::uniform_real_distribution<double> width(0.5, 4.0);
    const int nb = 3;
    double a[nb], c[nb], w[nb];
    for (int k = 0; k < nb; ++k) {
        a[k] = amp(rng);
        c[k] = pos(rng);
        w[k] = width(rng);
    }
    for (int i = 0; i < g.n; ++i) {
        double v = 0.0;
        for (int k = 0; k < nb; ++k) v += a[k] * std::exp(-std::pow((g.x(i) - c[k]) / w[k], 2));
        f.theta[i] = v;
    }
    return f;
}

namespace detail {

inline PropertyResult prop(const std::string& name, double tol, double observed) {
    return {name, tol, observed, observed <= tol};
}

inline double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

} // namespace detail

// Reduced-resolution property sweep used by the validate command.  With
// mutate_anisotropy_sign set, the 1D gradient consistency check runs against
// a residual whose anisotropy force has a deliberately flipped sign, which
// must make that property fail (fault-detection self test).
inline ValidationReport run_validation_suite(bool mutate_anisotropy_sign = false) {
    ValidationReport rep;
    const Grid1D g = Grid1D::symmetric(2048, 200.0);
    const double h = g.h;

    {
        const std::string text = "wall = 90\nnu = [1, 5, 50]\nwindow = 400\nn = 8192\n";
        const Config c1 = Config::parse_string(text);
        const Config c2 = Config::parse_string(c1.serialize());
        rep.results.push_back(detail::prop("config-round-trip-identity", 0.0,
                                           c1.items == c2.items ? 0.0 : 1.0));
    }
    {
        AngleField1D f = random_admissible_profile(g, 0.5 * pi, 11);
        const std::string bytes =
            encode_field_binary("theta1d", g.n, 1, g.h, g.x0, 0.0, f.theta);
        const DecodedField d = decode_field_binary(bytes);
        double worst = d.data == f.theta && d.h == g.h && d.x0 == g.x0 ? 0.0 : 1.0;
        rep.results.push_back(detail::prop("grid-binary-round-trip", 0.0, worst));
    }

    SpectralPlan1D plan(g);
    {
        const int m = 8;
        const double k = 2.0 * pi * m / g.window();
        std::vector<double> u(g.n), want(g.n);
        for (int i = 0; i < g.n; ++i) {
            u[i] = std::cos(k * g.x(i));
            want[i] = k * u[i];
        }
        std::vector<double> got = plan.half_laplacian(u);
        rep.results.push_back(
            detail::prop("halflap-cosine-eigenfunction", 1e-10, detail::rel_l2(got, want)));
    }
    {
        std::vector<double> u(g.n);
        for (int i = 0; i < g.n; ++i) u[i] = std::exp(-std::pow(g.x(i) / 6.0, 2));
        std::vector<double> a = plan.half_laplacian(u);
        std::vector<double> b = half_laplacian_quadrature(u, g);
        rep.results.push_back(
            detail::prop("halflap-spectral-vs-quadrature", 1e-6, detail::rel_l2(b, a)));

        const double s1 = plan.seminorm_sq(u);
        const double s2 = h_half_seminorm_sq_quadrature(u, g);
        rep.results.push_back(detail::prop("seminorm-parseval-vs-pair-sum", 1e-8,
                                           std::abs(s1 - s2) / std::max(s1, 1e-300)));
    }
    {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> u(g.n), v(g.n);
        for (int i = 0; i < g.n; ++i) {
            const double env = std::exp(-std::pow(g.x(i) / 15.0, 2));
            u[i] = env * dist(rng);
            v[i] = env * dist(rng);
        }
        const std::vector<double> hu = plan.half_laplacian(u);
        const std::vector<double> hv = plan.half_laplacian(v);
        double a = 0.0, b = 0.0, scale = 0.0;
        for (int i = 0; i < g.n; ++i) {
            a += hu[i] * v[i];
            b += u[i] * hv[i];
            scale += std::abs(hu[i] * v[i]);
        }
        rep.results.push_back(detail::prop("halflap-self-adjoint", 1e-10,
                                           std::abs(a - b) / std::max(scale, 1e-300)));
    }

    {
        const WallProblem p = WallProblem::ninety(1.0, g);
        AngleField1D f = random_admissible_profile(g, p.alpha_limit, 23);
        std::vector<double> r = el_residual_1d_core(f, p.nu, p.beta, plan);
        if (mutate_anisotropy_sign)
            for (size_t i = 0; i < r.size(); ++i) r[i] -= 0.5 * std::sin(4.0 * f.theta[i]);
        double scale = 0.0;
        for (int i = 2; i < g.n - 2; ++i) scale = std::max(scale, std::abs(h * r[i]));
        std::mt19937_64 rng(29);
        std::uniform_int_distribution<int> pick(2, g.n - 3);
        double worst = 0.0;
        const double eps = 1e-6;
        for (int t = 0; t < 8; ++t) {
            const int i = pick(rng);
            AngleField1D fp = f, fm = f;
            fp.theta[i] += eps;
            fm.theta[i] -= eps;
            const double fd = (energy_1d_core(fp, p.nu, p.beta, plan).total -
                               energy_1d_core(fm, p.nu, p.beta, plan).total) /
                              (2.0 * eps);
            worst = std::max(worst, std::abs(fd - h * r[i]));
        }
        rep.results.push_back(
            detail::prop("gradient-consistency-1d", 1e-5, worst / std::max(scale, 1e-12)));
    }

    {
        const Grid2D g2 = Grid2D::from_sample(8.0, 16.0, 8.0);
        StrayFieldPlan2D plan2(g2);
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        AngleField2D f(g2);
        for (auto& t : f.theta) t = dist(rng);
        const double nu = 5.0;
        const std::vector<double> force = effective_field_2d(f, nu, plan2);
        std::vector<double> dir(f.theta.size());
        for (auto& d : dir) d = dist(rng);
        const double eps = 1e-6;
        AngleField2D fp = f, fm = f;
        for (size_t i = 0; i < dir.size(); ++i) {
            fp.theta[i] += eps * dir[i];
            fm.theta[i] -= eps * dir[i];
        }
        const double fd =
            (energy_2d(fp, nu, plan2).total - energy_2d(fm, nu, plan2).total) / (2.0 * eps);
        double an = 0.0, scale = 0.0;
        for (size_t i = 0; i < dir.size(); ++i) {
            an -= g2.h * g2.h * force[i] * dir[i];
            scale += std::abs(g2.h * g2.h * force[i] * dir[i]);
        }
        rep.results.push_back(detail::prop("gradient-consistency-2d", 1e-5,
                                           std::abs(fd - an) / std::max(scale, 1e-12)));

        const VectorField2D m = magnetization_of(f);
        const VectorField2D hs = stray_field_2d(m, plan2, nu);
        const double e1 = magnetostatic_energy_2d(m, plan2, nu);
        double e2 = 0.0;
        for (size_t i = 0; i < m.m1.size(); ++i)
            e2 += m.m1[i] * hs.m1[i] + m.m2[i] * hs.m2[i];
        e2 *= -0.5 * g2.h * g2.h;
        rep.results.push_back(detail::prop("stray-energy-pairing", 1e-10,
                                           std::abs(e1 - e2) / std::max(std::abs(e1), 1e-300)));
    }

    {
        const WallProblem p = WallProblem::ninety(1.0, g);
        long fails = 0;
        for (uint64_t s = 0; s < 20; ++s) {
            AngleField1D f = random_admissible_profile(g, 0.5 * pi, 100 + s, 0.6);
            if (!check_fold_inequality(f, p).holds()) ++fails;
            if (!check_coercivity(f, p).holds()) ++fails;
        }
        rep.results.push_back(detail::prop("fold-and-coercivity-random", 0.0, double(fails)));
    }
    {
        const WallProblem p = WallProblem::ninety(1.0, g);
        long fails = 0;
        for (uint64_t s = 0; s < 20; ++s) {
            AngleField1D f = random_nonnegative_profile(g, 200 + s);
            if (!check_rearrangement_inequality(f, p).holds()) ++fails;
        }
        rep.results.push_back(detail::prop("rearrangement-random", 0.0, double(fails)));
    }

    {
        const Grid1D gz = Grid1D::symmetric(2048, 40.0);
        const WallProblem p = WallProblem::ninety(0.0, gz);
        InitRecipe init;
        init.kind = InitRecipe::Kind::tanh_wall;
        RelaxConfig cfg;
        cfg.residual_tol = 1e-10;
        const auto [f, rr] = relax_1d(p, initial_condition_1d(init, p), cfg);
        double sup = 0.0;
        for (int i = 0; i < gz.n; ++i)
            sup = std::max(sup, std::abs(f.theta[i] - std::atan(std::exp(-gz.x(i)))));
        rep.results.push_back(detail::prop("nu0-closed-form-sup", 1e-3, sup));
        SpectralPlan1D planz(gz);
        const double e = energy_1d_core(f, 0.0, p.beta, planz).total;
        rep.results.push_back(detail::prop("nu0-closed-form-energy", 1e-3, std::abs(e - 0.5)));
        rep.results.push_back(
            detail::prop("lyapunov-violations", 0.0, double(rr.lyapunov_violations)));
    }

    return rep;
}

inline std::string format_validation_table(const ValidationReport& rep) {
    std::string out = "property                          tolerance    observed     verdict\n";
    char buf[160];
    for (const auto& r : rep.results) {
        std::snprintf(buf, sizeof buf, "%-32s  %-11.3g  %-11.3g  %s\n", r.name.c_str(),
                      r.tolerance, r.observed, r.pass ? "pass" : "FAIL");
        out += buf;
    }
    out += rep.all_pass() ? "all properties pass\n" : "validation FAILED\n";
    return out;
}

} // namespace fourfold
