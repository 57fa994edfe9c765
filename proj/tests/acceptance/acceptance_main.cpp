#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <fourfold/fourfold.hpp>
#include <fourfold/validate.hpp>

using namespace fourfold;

namespace {

int failures = 0;
long lyapunov_total = 0;

AngleField2D random_smooth_2d(const Grid2D& g, uint64_t seed, double amp) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double a[3], cx[3], cy[3], w[3];
    for (int k = 0; k < 3; ++k) {
        a[k] = amp * d(rng);
        cx[k] = (0.5 + 0.4 * d(rng)) * g.lx();
        cy[k] = (0.5 + 0.4 * d(rng)) * g.ly();
        w[k] = 1.0 + std::abs(d(rng));
    }
    AngleField2D f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double v = 0.0;
            for (int k = 0; k < 3; ++k)
                v += a[k] * std::exp(-(std::pow(g.xc(i) - cx[k], 2) + std::pow(g.yc(j) - cy[k], 2)) /
                                     (w[k] * w[k]));
            f.theta[static_cast<size_t>(j) * g.nx + i] = v;
        }
    return f;
}

double now_sec() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void verdict(int idx, bool ok, const std::string& text) {
    std::printf("%s: criterion %d: %s\n", ok ? "PASS" : "FAIL", idx, text.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

AngleField1D relax_wall(double nu, bool ninety, int n, double W, RelaxReport* out_rep = nullptr) {
    const Grid1D g = Grid1D::symmetric(n, W);
    const WallProblem p = ninety ? WallProblem::ninety(nu, g) : WallProblem::one_eighty(nu, g);
    InitRecipe r;
    r.kind = InitRecipe::Kind::tanh_wall;
    RelaxConfig cfg;
    cfg.residual_tol = 1e-9;
    cfg.max_steps = 2000000;
    auto [f, rep] = relax_1d(p, initial_condition_1d(r, p), cfg);
    lyapunov_total += rep.lyapunov_violations;
    if (rep.termination != Termination::converged) ++failures;
    if (out_rep) *out_rep = rep;
    return f;
}

// 1. The nu=0 problem has the closed-form wall arctan(e^-x) with energy 1/2.
void criterion_1() {
    const double t0 = now_sec();
    const Grid1D g = Grid1D::symmetric(2048, 80.0);
    const WallProblem p = WallProblem::ninety(0.0, g);
    InitRecipe r;
    r.kind = InitRecipe::Kind::tanh_wall;
    RelaxConfig cfg;
    cfg.residual_tol = 1e-9;
    auto [f, rep] = relax_1d(p, initial_condition_1d(r, p), cfg);
    lyapunov_total += rep.lyapunov_violations;
    double sup = 0.0;
    for (int i = 0; i < g.n; ++i)
        sup = std::max(sup, std::abs(f.theta[i] - std::atan(std::exp(-g.x(i)))));
    SpectralPlan1D plan(g);
    const double E = energy_1d_core(f, 0.0, p.beta, plan).total;
    const double dt = now_sec() - t0;
    std::printf("  sup error %.3e, energy %.6f, %.1fs\n", sup, E, dt);
    verdict(1,
            rep.termination == Termination::converged && sup < 1e-3 &&
                std::abs(E - 0.5) < 1e-3 && dt < 10.0,
            "local wall matches arctan(e^-x) with energy 0.500");
}

// 2. The negated gradients used by the relaxer match central differences of
//    the energy on random smooth inputs.
void criterion_2() {
    const double t0 = now_sec();
    double worst_1d = 0.0;
    {
        const Grid1D g = Grid1D::symmetric(1024, 150.0);
        SpectralPlan1D plan(g);
        std::mt19937_64 rng(2026);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            const bool full = trial % 2 == 1;
            const double alpha = full ? pi : 0.5 * pi;
            const double beta = full ? 0.0 : -0.25 * pi;
            const double nu = trial % 3 == 0 ? 0.0 : (trial % 3 == 1 ? 1.0 : 5.0);
            const AngleField1D f = random_admissible_profile(g, alpha, 100 + trial);
            const std::vector<double> r = el_residual_1d_core(f, nu, beta, plan);
            std::vector<double> dth(static_cast<size_t>(g.n), 0.0);
            for (int i = 1; i + 1 < g.n; ++i) dth[static_cast<size_t>(i)] = d(rng);
            const double eps = 1e-6;
            AngleField1D fp = f, fm = f;
            for (int i = 0; i < g.n; ++i) {
                fp.theta[static_cast<size_t>(i)] += eps * dth[static_cast<size_t>(i)];
                fm.theta[static_cast<size_t>(i)] -= eps * dth[static_cast<size_t>(i)];
            }
            const double fd = (energy_1d_core(fp, nu, beta, plan).total -
                               energy_1d_core(fm, nu, beta, plan).total) /
                              (2.0 * eps);
            double pair = 0.0;
            for (int i = 0; i < g.n; ++i)
                pair += r[static_cast<size_t>(i)] * dth[static_cast<size_t>(i)];
            pair *= g.h;
            worst_1d = std::max(worst_1d, std::abs(pair - fd) / std::max(std::abs(fd), 1e-6));
        }
    }
    double worst_2d = 0.0;
    {
        const Grid2D g(20, 30, 0.25);
        StrayFieldPlan2D plan(g);
        std::mt19937_64 rng(4052);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            const double nu = trial % 2 ? 5.0 : 1.5;
            const AngleField2D f = random_smooth_2d(g, 500 + trial, 1.1);
            const std::vector<double> F = effective_field_2d(f, nu, plan);
            std::vector<double> dth(f.theta.size());
            for (double& v : dth) v = d(rng);
            const double eps = 1e-6;
            AngleField2D fp = f, fm = f;
            for (size_t k = 0; k < dth.size(); ++k) {
                fp.theta[k] += eps * dth[k];
                fm.theta[k] -= eps * dth[k];
            }
            const double fd =
                (energy_2d(fp, nu, plan).total - energy_2d(fm, nu, plan).total) / (2.0 * eps);
            double pair = 0.0;
            for (size_t k = 0; k < dth.size(); ++k) pair += F[k] * dth[k];
            pair *= -g.h * g.h;
            worst_2d = std::max(worst_2d, std::abs(pair - fd) / std::max(std::abs(fd), 1e-6));
        }
    }
    const double dt = now_sec() - t0;
    std::printf("  worst relative mismatch: 1d %.2e, 2d %.2e, %.1fs\n", worst_1d, worst_2d, dt);
    verdict(2, worst_1d < 1e-5 && worst_2d < 1e-5 && dt < 60.0,
            "energy gradients match central differences to 1e-5 relative");
}

// 3. The two half-laplacian routes agree, and both hit the lorentzian
//    closed form.
void criterion_3() {
    const double t0 = now_sec();
    double gauss_gap = 0.0, lorentz_gap = 0.0, closed_s = 0.0, closed_q = 0.0;
    {
        const Grid1D g = Grid1D::symmetric(4096, 200.0);
        SpectralPlan1D plan(g);
        std::vector<double> u(static_cast<size_t>(g.n));
        for (int i = 0; i < g.n; ++i)
            u[static_cast<size_t>(i)] = std::exp(-std::pow(g.x(i) / 5.0, 2));
        gauss_gap = detail::rel_l2(half_laplacian_quadrature(u, g), plan.half_laplacian(u));
    }
    {
        const Grid1D g = Grid1D::symmetric(8192, 400.0);
        SpectralPlan1D plan(g);
        std::vector<double> u(static_cast<size_t>(g.n)), want(static_cast<size_t>(g.n));
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            u[static_cast<size_t>(i)] = 1.0 / (1.0 + x * x);
            want[static_cast<size_t>(i)] = (1.0 - x * x) / ((1.0 + x * x) * (1.0 + x * x));
        }
        const std::vector<double> hs = plan.half_laplacian(u);
        const std::vector<double> hq = half_laplacian_quadrature(u, g);
        lorentz_gap = detail::rel_l2(hq, hs);
        for (int i = 0; i < g.n; ++i) {
            if (std::abs(g.x(i)) > 0.25 * g.window()) continue;
            const size_t k = static_cast<size_t>(i);
            closed_s = std::max(closed_s, std::abs(hs[k] - want[k]));
            closed_q = std::max(closed_q, std::abs(hq[k] - want[k]));
        }
    }
    const double dt = now_sec() - t0;
    std::printf("  route gap: gaussian %.2e, lorentzian %.2e; closed form: %.2e / %.2e, %.1fs\n",
                gauss_gap, lorentz_gap, closed_s, closed_q, dt);
    verdict(3,
            gauss_gap < 1e-6 && lorentz_gap < 1e-6 && closed_s < 1e-4 && closed_q < 1e-4 &&
                dt < 60.0,
            "spectral and quadrature half-laplacians agree and match the closed form");
}

// 4. Relaxed 90-degree walls are strictly monotone, symmetric, inside
//    (0, pi/2), and independent of the initial condition.
void criterion_4() {
    const double t0 = now_sec();
    bool ok = true;
    for (double nu : {1.0, 5.0, 50.0}) {
        const Grid1D g = Grid1D::symmetric(8192, 400.0);
        const WallProblem p = WallProblem::ninety(nu, g);
        RelaxConfig cfg;
        cfg.residual_tol = 1e-9;
        cfg.max_steps = 2000000;
        InitRecipe narrow, wide, split;
        narrow.kind = InitRecipe::Kind::tanh_wall;
        narrow.a = 1.0;
        wide.kind = InitRecipe::Kind::tanh_wall;
        wide.a = 10.0;
        split.kind = InitRecipe::Kind::half_split;
        const std::vector<AngleField1D> inits = {initial_condition_1d(narrow, p),
                                                 initial_condition_1d(wide, p),
                                                 initial_condition_1d(split, p)};
        const UniquenessReport u = uniqueness_probe(p, inits, cfg);
        for (const RelaxReport& r : u.runs) lyapunov_total += r.lyapunov_violations;
        const AngleField1D& f = u.profiles.front();
        const MonotonicityReport m = monotonicity_report(f, p.alpha_limit);
        const double sym = symmetry_residual(f, p.alpha_limit);
        bool open_range = true;
        // cells 0,1 and n-2,n-1 hold the pinned far-field values; scan the free cells
        for (int i = 2; i + 2 < g.n; ++i) {
            const double v = f.theta[static_cast<size_t>(i)];
            if (!(v > 0.0 && v < 0.5 * pi)) open_range = false;
        }
        const bool this_nu = u.all_converged && m.is_nonincreasing &&
                             m.max_violation < 1e-9 && m.strict_in_core && sym < 1e-4 &&
                             open_range && u.max_pairwise_distance < 1e-4;
        std::printf("  nu=%-4g violation %.2e strict %d symmetry %.2e range %d spread %.2e\n", nu,
                    m.max_violation, m.strict_in_core ? 1 : 0, sym, open_range ? 1 : 0,
                    u.max_pairwise_distance);
        ok = ok && this_nu;
    }
    const double dt = now_sec() - t0;
    std::printf("  %.1fs\n", dt);
    verdict(4, ok && dt < 300.0,
            "90-degree walls are monotone, symmetric, in range, unique across inits");
}

// 5. Relaxed 180-degree walls share those properties on (0, pi), and the
//    core splits apart as nu decreases.
void criterion_5() {
    const double t0 = now_sec();
    bool ok = true;
    double s_prev = 0.0;
    bool first = true;
    for (double nu : {1.0, 5.0, 50.0}) {
        RelaxReport rep;
        const AngleField1D f = relax_wall(nu, false, 8192, 400.0, &rep);
        const MonotonicityReport m = monotonicity_report(f, pi);
        const double sym = symmetry_residual(f, pi);
        bool open_range = true;
        for (int i = 2; i + 2 < f.n(); ++i) {
            const double v = f.theta[static_cast<size_t>(i)];
            if (!(v > 0.0 && v < pi)) open_range = false;
        }
        const double s = level_crossing_distance(f, 0.75 * pi, 0.25 * pi);
        std::printf("  nu=%-4g violation %.2e symmetry %.2e range %d splitting %.4f\n", nu,
                    m.max_violation, sym, open_range ? 1 : 0, s);
        ok = ok && m.is_nonincreasing && m.max_violation < 1e-9 && sym < 1e-4 && open_range;
        if (!first && !(s_prev > s)) ok = false;
        s_prev = s;
        first = false;
    }
    const double dt = now_sec() - t0;
    std::printf("  %.1fs\n", dt);
    verdict(5, ok && dt < 300.0,
            "180-degree walls are monotone, symmetric, in range, with decreasing splitting");
}

// 6. Both wall tails decay like 1/x^2 over an automatically selected window;
//    the large-nu profiles show the logarithmic crossover first.  The nu=50
//    window is wide because the crossover region extends past x ~ 100.
void criterion_6() {
    const double t0 = now_sec();
    bool ok = true;
    for (double nu : {1.0, 5.0, 50.0}) {
        const int n = nu > 10.0 ? 65536 : 16384;
        const double W = nu > 10.0 ? 3200.0 : 800.0;
        for (bool ninety : {true, false}) {
            const AngleField1D f = relax_wall(nu, ninety, n, W);
            bool this_ok = false;
            std::string note;
            try {
                const TailFitResult t = tail_fit(f);
                this_ok = t.slope >= -2.3 && t.slope <= -1.7;
                if (nu > 10.0 && !t.crossover_detected) this_ok = false;
                char buf[160];
                std::snprintf(buf, sizeof buf, "slope %.4f window [%.1f, %.1f] crossover %d",
                              t.slope, t.x_lo, t.x_hi, t.crossover_detected ? 1 : 0);
                note = buf;
            } catch (const PreconditionError& e) {
                note = std::string("no fit: ") + e.what();
            }
            std::printf("  nu=%-4g %s W=%-5g %s\n", nu, ninety ? "90 " : "180", W, note.c_str());
            ok = ok && this_ok;
        }
    }
    const double dt = now_sec() - t0;
    std::printf("  %.1fs\n", dt);
    verdict(6, ok, "tail slopes sit in [-2.3, -1.7] with the crossover flagged at nu=50");
}

// 7. The fold, coercivity, and rearrangement inequalities hold on randomized
//    profiles at the slacks declared alongside the checks.
void criterion_7() {
    const double t0 = now_sec();
    const Grid1D g = Grid1D::symmetric(2048, 200.0);
    int fold_bad = 0, coer_bad = 0, rear_bad = 0;
    for (int s = 0; s < 100; ++s) {
        const bool full = s % 2 == 1;
        const WallProblem p =
            full ? WallProblem::one_eighty(1.0 + 0.1 * (s % 7), g) : WallProblem::ninety(0.5 * s, g);
        const AngleField1D f = random_admissible_profile(g, p.alpha_limit, 9000 + s, 0.8);
        if (!check_fold_inequality(f, p).holds()) ++fold_bad;
    }
    for (int s = 0; s < 100; ++s) {
        const WallProblem p = WallProblem::ninety(0.3 * s, g);
        const AngleField1D f = random_admissible_profile(g, 0.5 * pi, 20000 + s, 0.7);
        if (!check_coercivity(f, p).holds()) ++coer_bad;
    }
    for (int s = 0; s < 100; ++s) {
        const WallProblem p = s % 2 ? WallProblem::one_eighty(2.0, g) : WallProblem::ninety(3.0, g);
        if (!check_rearrangement_inequality(random_nonnegative_profile(g, 31000 + s), p).holds())
            ++rear_bad;
    }
    const double dt = now_sec() - t0;
    std::printf("  failures: fold %d, coercivity %d, rearrangement %d, %.1fs\n", fold_bad,
                coer_bad, rear_bad, dt);
    verdict(7, fold_bad == 0 && coer_bad == 0 && rear_bad == 0 && dt < 120.0,
            "fold, coercivity, and rearrangement inequalities hold on 100 random profiles each");
}

struct FilmRun {
    StateReport state;
    RelaxReport rep;
    double seconds = 0.0;
};

FilmRun run_film(double nu, double lx, double ly, double res, const std::string& recipe,
                 double noise_amp, std::uint64_t noise_seed) {
    const double t0 = now_sec();
    const Grid2D g = Grid2D::from_sample(lx, ly, res);
    const FilmProblem p(nu, g, recipe);
    InitRecipe r = parse_init_recipe(recipe);
    r.noise_amp = noise_amp;
    r.noise_seed = noise_seed;
    RelaxConfig cfg;
    cfg.residual_tol = 1e-5;
    cfg.max_steps = 2000000;
    auto [f, rep] = relax_2d(p, initial_condition_2d(r, g), cfg);
    lyapunov_total += rep.lyapunov_violations;
    FilmRun out;
    out.state = classify_state_2d(f);
    out.rep = rep;
    out.seconds = now_sec() - t0;
    return out;
}

// 8. The four remanent-state runs reproduce the published state zoo at the
//    classification level.  The small samples run at 8 cells per unit: at 4
//    the discrete edge-charge cutoff is too weak to hold the edge domains in
//    place and both inits relax to a corner-tilted monodomain.
void criterion_8() {
    bool ok = true;

    const FilmRun c = run_film(5.0, 8.0, 16.0, 8.0,
                               "half_split_vertical(1.5707963267948966,-1.5707963267948966)", 0.0, 0);
    std::printf("  (8,16) nu=5 vertical split @8/unit -> %s, degree %d, %.0fs\n",
                to_string(c.state.label), c.state.degree, c.seconds);
    ok = ok && c.state.label == StateLabel::C && c.state.degree == 0 && c.seconds < 600.0 &&
         c.rep.termination == Termination::converged;

    const FilmRun s = run_film(5.0, 8.0, 16.0, 8.0, "monodomain(1.0471975511965976)", 0.0, 0);
    std::printf("  (8,16) nu=5 tilted monodomain @8/unit -> %s, degree %d, %.0fs\n",
                to_string(s.state.label), s.state.degree, s.seconds);
    ok = ok && s.state.label == StateLabel::S && s.state.degree == 0 && s.seconds < 600.0 &&
         s.rep.termination == Termination::converged;

    const FilmRun h5 = run_film(5.0, 32.0, 64.0, 4.0, "half_split(3.141592653589793,0)", 0.02,
                                20260814);
    std::printf("  (32,64) nu=5 half split @4/unit -> %s, degree %d, %zu vortices, %.0fs\n",
                to_string(h5.state.label), h5.state.degree, h5.state.vortices.size(), h5.seconds);
    int lower_corner = 0;
    bool clean5 = true;
    for (const BoundaryVortex& v : h5.state.vortices) {
        std::printf("    vortex (%.1f, %.1f) rotation %.2f pi\n", v.x, v.y, v.rotation / pi);
        const bool corner = v.y < 4.0 && std::min(v.x, 32.0 - v.x) < 4.0 &&
                            std::abs(v.quarter_turns) == 2;
        if (corner) ++lower_corner;
        else clean5 = false;
    }
    ok = ok && h5.state.label == StateLabel::HalfLandau && h5.state.degree == 0 &&
         lower_corner == 2 && clean5 && h5.seconds < 600.0 &&
         h5.rep.termination == Termination::converged;

    // The bound-pair expectation below is currently known to fail: from this
    // init the flow lands in the same corner-vortex state as nu=5 at 4 and 8
    // cells/unit, and a strip-seeded probe shows the bottom-center pair state
    // is a distinct stationary point sitting ~11-13 higher in energy under
    // this smeared edge-charge discretization, so the flow has no reason to
    // pick it.  Kept as written rather than weakened to match the solver.
    const FilmRun h10 = run_film(10.0, 32.0, 64.0, 4.0, "half_split(3.141592653589793,0)", 0.02,
                                 20260814);
    std::printf("  (32,64) nu=10 half split @4/unit -> %s, degree %d, %zu vortices, %.0fs\n",
                to_string(h10.state.label), h10.state.degree, h10.state.vortices.size(),
                h10.seconds);
    double center_rot = 0.0;
    bool clean10 = true;
    for (const BoundaryVortex& v : h10.state.vortices) {
        std::printf("    vortex (%.1f, %.1f) rotation %.2f pi\n", v.x, v.y, v.rotation / pi);
        const bool center = v.y < 4.0 && std::abs(v.x - 16.0) < 6.0;
        if (center) center_rot += v.rotation;
        else clean10 = false;
    }
    const bool pair = std::abs(std::abs(center_rot) - 2.0 * pi) < 0.5 * pi;
    ok = ok && h10.state.label == StateLabel::HalfLandau && h10.state.degree == 0 && pair &&
         clean10 && h10.seconds < 600.0 && h10.rep.termination == Termination::converged;

    verdict(8, ok, "remanent states classify as C, S, and the two half-Landau variants");
}

// 9. Every accepted relaxation step in every run above lowered the energy
//    within the monitoring slack.
void criterion_9() {
    std::printf("  lyapunov violations across all acceptance runs: %ld\n", lyapunov_total);
    verdict(9, lyapunov_total == 0, "gradient flow was monotone in energy throughout");
}

} // namespace

int main(int argc, char** argv) {
    int first = 1, last = 9;
    if (argc == 3) {
        first = std::atoi(argv[1]);
        last = std::atoi(argv[2]);
    }
    void (*steps[9])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                          criterion_6, criterion_7, criterion_8, criterion_9};
    for (int i = first; i <= last && i >= 1 && i <= 9; ++i) steps[i - 1]();
    if (failures == 0) std::printf("acceptance: all criteria passed\n");
    else std::printf("acceptance: %d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
