#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fourfold/energy1d.hpp"
#include "fourfold/energy2d.hpp"
#include "fourfold/problem.hpp"

namespace fourfold {

enum class Stepping { semi_implicit, explicit_euler };
enum class Termination { converged, max_steps, diverged };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::max_steps: return "max_steps";
        default: return "diverged";
    }
}

struct RelaxConfig {
    double dt = 0.0; // 0 = pick from grid and nu
    long max_steps = 400000;
    double residual_tol = 1e-8;
    double energy_tol = 1e-12; // per-step decrease floor (relative to 1+|E|)
    Stepping stepping = Stepping::semi_implicit;
    int checkpoint_every = 0;
    int trace_every = 16;
};

struct RelaxReport {
    long steps_taken = 0;
    double final_residual = 0.0;
    double final_energy = 0.0;
    std::vector<std::pair<long, double>> energy_trace;
    Termination termination = Termination::max_steps;
    double wall_clock_sec = 0.0;
    long backtracks = 0;
    int recentre_shift_cells = 0;   // net integer recentring applied in-flow
    double subcell_offset = 0.0;    // crossing position left over, |off| <= h/2
    double worst_energy_increase = 0.0; // max over accepted steps of E_new - E_old
    long lyapunov_violations = 0;       // accepted steps with increase > 1e-10 * (1+|E|)
};

// ---- initial conditions ----------------------------------------------------

struct InitRecipe {
    enum class Kind { monodomain, half_split, half_split_vertical, tanh_wall, two_wall };
    Kind kind = Kind::monodomain;
    double a = 0.0, b = 0.0;
    double noise_amp = 0.0;
    std::uint64_t noise_seed = 0;
};

inline void add_init_noise(std::vector<double>& theta, double amp, std::uint64_t seed) {
    if (amp == 0.0) return;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-amp, amp);
    for (double& t : theta) t += d(rng);
}

inline AngleField1D initial_condition_1d(const InitRecipe& r, const WallProblem& p) {
    AngleField1D f(p.grid);
    const double al = p.alpha_limit;
    switch (r.kind) {
        case InitRecipe::Kind::monodomain:
            for (double& t : f.theta) t = r.a;
            break;
        case InitRecipe::Kind::half_split:
            for (int i = 0; i < f.n(); ++i) f.theta[i] = p.grid.x(i) < 0 ? al : 0.0;
            break;
        case InitRecipe::Kind::tanh_wall: {
            const double w = r.a > 0 ? r.a : 3.0;
            for (int i = 0; i < f.n(); ++i) f.theta[i] = 0.5 * al * (1.0 - std::tanh(p.grid.x(i) / w));
            break;
        }
        case InitRecipe::Kind::two_wall: {
            const double sep = r.a, w = r.b > 0 ? r.b : 3.0;
            auto step = [&](double t) { return 0.25 * pi * (1.0 - std::tanh(t / w)); };
            for (int i = 0; i < f.n(); ++i) {
                const double x = p.grid.x(i);
                f.theta[i] = step(x + 0.5 * sep) + step(x - 0.5 * sep);
            }
            break;
        }
        default:
            throw ConfigError("initial_condition_1d: recipe not meaningful in 1D");
    }
    // the relaxer pins these anyway; make the ends exact so the field is admissible
    f.theta[0] = f.theta[1] = (r.kind == InitRecipe::Kind::monodomain) ? f.theta[0] : al;
    if (r.kind != InitRecipe::Kind::monodomain) {
        f.theta[f.n() - 1] = f.theta[f.n() - 2] = 0.0;
        add_init_noise(f.theta, r.noise_amp, r.noise_seed);
        f.theta[0] = f.theta[1] = al;
        f.theta[f.n() - 1] = f.theta[f.n() - 2] = 0.0;
    }
    return f;
}

inline AngleField2D initial_condition_2d(const InitRecipe& r, const Grid2D& g) {
    AngleField2D f(g);
    switch (r.kind) {
        case InitRecipe::Kind::monodomain:
            for (double& t : f.theta) t = r.a;
            break;
        case InitRecipe::Kind::half_split:
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) f.at(i, j) = (g.xc(i) < 0.5 * g.lx()) ? r.a : r.b;
            break;
        case InitRecipe::Kind::half_split_vertical:
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) f.at(i, j) = (g.yc(j) < 0.5 * g.ly()) ? r.a : r.b;
            break;
        case InitRecipe::Kind::tanh_wall: {
            const double w = r.a > 0 ? r.a : 3.0;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    f.at(i, j) = 0.5 * pi * (1.0 - std::tanh((g.xc(i) - 0.5 * g.lx()) / w));
            break;
        }
        case InitRecipe::Kind::two_wall: {
            const double sep = r.a, w = r.b > 0 ? r.b : 3.0;
            auto step = [&](double t) { return 0.25 * pi * (1.0 - std::tanh(t / w)); };
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double x = g.xc(i) - 0.5 * g.lx();
                    f.at(i, j) = step(x + 0.5 * sep) + step(x - 0.5 * sep);
                }
            break;
        }
    }
    add_init_noise(f.theta, r.noise_amp, r.noise_seed);
    return f;
}

// ---- 1D relaxation ---------------------------------------------------------

namespace detail {

// Tridiagonal solve of (1 + 2g) x_i - g (x_{i-1} + x_{i+1}) = rhs_i,
// i in [lo, hi], with fixed boundary values folded into rhs by the caller.
inline void thomas_constant(std::vector<double>& x, std::vector<double>& rhs, int lo, int hi, double g) {
    const double b = 1.0 + 2.0 * g;
    static thread_local std::vector<double> cp;
    cp.assign(static_cast<size_t>(hi - lo + 1), 0.0);
    double beta = b;
    x[lo] = rhs[lo] / beta;
    for (int i = lo + 1; i <= hi; ++i) {
        cp[i - lo] = -g / beta;
        beta = b - (-g) * cp[i - lo];
        x[i] = (rhs[i] + g * x[i - 1]) / beta;
    }
    for (int i = hi - 1; i >= lo; --i) x[i] -= cp[i - lo + 1] * x[i + 1];
}

inline double crossing_position(const AngleField1D& f, double level) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i + 1 < f.n(); ++i) {
        const double a = f.theta[i] - level, b = f.theta[i + 1] - level;
        if (a == 0.0) {
            const double x = f.grid.x(i);
            if (std::isnan(best) || std::abs(x) < std::abs(best)) best = x;
        } else if ((a > 0) != (b > 0)) {
            const double x = f.grid.x(i) + f.grid.h * a / (a - b);
            if (std::isnan(best) || std::abs(x) < std::abs(best)) best = x;
        }
    }
    return best;
}

// Shift the array by s cells (positive s moves the profile left), refilling
// vacated cells with the exact far-field constants.
inline void shift_cells(AngleField1D& f, int s, double left_value, double right_value) {
    if (s == 0) return;
    const int n = f.n();
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int j = i + s;
        out[i] = (j < 0) ? left_value : (j >= n ? right_value : f.theta[j]);
    }
    f.theta = std::move(out);
}

} // namespace detail

using Checkpoint1D = std::function<void(long step, const AngleField1D&, double energy)>;

inline std::pair<AngleField1D, RelaxReport> relax_1d(const WallProblem& p, const AngleField1D& init,
                                                     const RelaxConfig& cfg,
                                                     const Checkpoint1D& checkpoint = {}) {
    const auto t_start = std::chrono::steady_clock::now();
    p.require_admissible(init);
    check_finite(init.theta, "relax_1d init");

    const int n = p.grid.n;
    const double h = p.grid.h;
    AngleField1D f = init;
    auto pin = [&](AngleField1D& a) {
        a.theta[0] = a.theta[1] = p.alpha_limit;
        a.theta[n - 1] = a.theta[n - 2] = 0.0;
    };
    pin(f);

    SpectralPlan1D plan(p.grid);
    RelaxReport rep;

    const double dt_cap = (p.nu > 0.0)
                              ? std::min(1.5, 0.9 * 4.0 * h / (pi * p.nu))
                              : 1.5;
    double dt = cfg.dt > 0 ? cfg.dt : 0.25 * dt_cap;
    const double dt_floor = 1e-14;
    const double dt_max = (cfg.stepping == Stepping::explicit_euler)
                              ? std::min(dt_cap, 0.2 * h * h)
                              : dt_cap;
    dt = std::min(dt, dt_max);

    double energy = energy_1d_core(f, p.nu, p.beta, plan).total;
    std::vector<double> resid = el_residual_1d_core(f, p.nu, p.beta, plan);
    double rsup = residual_sup_1d(resid);
    double last_decrease = 0.0;
    rep.energy_trace.emplace_back(0, energy);

    const double level = 0.5 * p.alpha_limit;
    int recentre_rounds = 0;
    AngleField1D trial = f;
    std::vector<double> rhs(static_cast<size_t>(n), 0.0);

    long step = 0;
    for (; step < cfg.max_steps; ++step) {
        if (rsup <= cfg.residual_tol && last_decrease <= cfg.energy_tol * (1.0 + std::abs(energy))) {
            const double xc = detail::crossing_position(f, level);
            const int s = std::isnan(xc) ? 0 : static_cast<int>(std::lround(xc / h));
            if (s != 0 && recentre_rounds < 8) {
                detail::shift_cells(f, s, p.alpha_limit, 0.0);
                pin(f);
                rep.recentre_shift_cells += s;
                ++recentre_rounds;
                energy = energy_1d_core(f, p.nu, p.beta, plan).total;
                resid = el_residual_1d_core(f, p.nu, p.beta, plan);
                rsup = residual_sup_1d(resid);
                last_decrease = 1.0;
                continue;
            }
            rep.termination = Termination::converged;
            break;
        }

        bool accepted = false;
        while (dt >= dt_floor) {
            if (cfg.stepping == Stepping::semi_implicit) {
                // explicit forces except theta'': rhs_i = theta_i - dt*(ani + nonlocal)_i
                for (int i = 2; i <= n - 3; ++i) {
                    const double lap = (f.theta[i + 1] - 2.0 * f.theta[i] + f.theta[i - 1]) / (h * h);
                    rhs[i] = f.theta[i] - dt * (resid[i] + lap);
                }
                const double g = dt / (h * h);
                rhs[2] += g * p.alpha_limit;
                trial.theta = f.theta;
                detail::thomas_constant(trial.theta, rhs, 2, n - 3, g);
            } else {
                trial.theta = f.theta;
                for (int i = 2; i <= n - 3; ++i) trial.theta[i] = f.theta[i] - dt * resid[i];
            }
            pin(trial);
            const double e_trial = energy_1d_core(trial, p.nu, p.beta, plan).total;
            if (e_trial <= energy + 1e-14 * (1.0 + std::abs(energy))) {
                last_decrease = energy - e_trial;
                rep.worst_energy_increase = std::max(rep.worst_energy_increase, -last_decrease);
                if (-last_decrease > 1e-10 * (1.0 + std::abs(energy))) ++rep.lyapunov_violations;
                energy = e_trial;
                std::swap(f.theta, trial.theta);
                accepted = true;
                break;
            }
            dt *= 0.5;
            ++rep.backtracks;
        }
        if (!accepted) {
            rep.termination = Termination::diverged;
            break;
        }
        resid = el_residual_1d_core(f, p.nu, p.beta, plan);
        rsup = residual_sup_1d(resid);
        dt = std::min(dt * 1.1, dt_max);

        if (cfg.trace_every > 0 && (step + 1) % cfg.trace_every == 0)
            rep.energy_trace.emplace_back(step + 1, energy);
        if (checkpoint && cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0)
            checkpoint(step + 1, f, energy);

        if ((step + 1) % 64 == 0 && rsup > 100.0 * cfg.residual_tol) {
            const double xc = detail::crossing_position(f, level);
            const int s = std::isnan(xc) ? 0 : static_cast<int>(std::lround(xc / h));
            if (s != 0) {
                detail::shift_cells(f, s, p.alpha_limit, 0.0);
                pin(f);
                rep.recentre_shift_cells += s;
                energy = energy_1d_core(f, p.nu, p.beta, plan).total;
                resid = el_residual_1d_core(f, p.nu, p.beta, plan);
                rsup = residual_sup_1d(resid);
            }
        }
    }

    rep.steps_taken = step;
    rep.final_residual = rsup;
    rep.final_energy = energy;
    if (rep.energy_trace.empty() || rep.energy_trace.back().second != energy)
        rep.energy_trace.emplace_back(step, energy);
    const double xc = detail::crossing_position(f, level);
    rep.subcell_offset = std::isnan(xc) ? 0.0 : xc;
    rep.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(f), std::move(rep)};
}

// ---- 2D relaxation ---------------------------------------------------------

using Checkpoint2D = std::function<void(long step, const AngleField2D&, double energy)>;

// Semi-implicit step diagonalized by the cell-centered cosine transform,
// whose basis functions are exactly the eigenvectors of the reflected-ghost
// (Neumann) five-point Laplacian.
class NeumannSolver2D {
public:
    explicit NeumannSolver2D(const Grid2D& g)
        : g_(g),
          fwd_(g.ny, g.nx, FFTW_REDFT10, FFTW_REDFT10),
          bwd_(g.ny, g.nx, FFTW_REDFT01, FFTW_REDFT01),
          lam_(static_cast<size_t>(g.cells())) {
        const double invh2 = 1.0 / (g.h * g.h);
        for (int j = 0; j < g.ny; ++j) {
            const double ly = (2.0 - 2.0 * std::cos(pi * j / g.ny)) * invh2;
            for (int i = 0; i < g.nx; ++i) {
                const double lx = (2.0 - 2.0 * std::cos(pi * i / g.nx)) * invh2;
                lam_[static_cast<size_t>(j) * g.nx + i] = lx + ly;
            }
        }
    }

    // solves (I - dt lap) out = in
    void solve(const std::vector<double>& in, std::vector<double>& out, double dt) {
        const size_t cells = lam_.size();
        std::memcpy(fwd_.data(), in.data(), sizeof(double) * cells);
        fwd_.execute();
        const double norm = 1.0 / (4.0 * static_cast<double>(g_.nx) * g_.ny);
        double* a = fwd_.data();
        double* b = bwd_.data();
        for (size_t k = 0; k < cells; ++k) b[k] = a[k] * norm / (1.0 + dt * lam_[k]);
        bwd_.execute();
        out.resize(cells);
        std::memcpy(out.data(), bwd_.data(), sizeof(double) * cells);
    }

private:
    Grid2D g_;
    R2RPlan fwd_, bwd_;
    std::vector<double> lam_;
};

inline std::pair<AngleField2D, RelaxReport> relax_2d(const FilmProblem& p, const AngleField2D& init,
                                                     const RelaxConfig& cfg,
                                                     const Checkpoint2D& checkpoint = {}) {
    const auto t_start = std::chrono::steady_clock::now();
    if (!(init.grid == p.grid)) throw PreconditionError("relax_2d: init lives on a different grid");
    check_finite(init.theta, "relax_2d init");

    const Grid2D& g = p.grid;
    AngleField2D f = init;
    StrayFieldPlan2D plan(g);
    NeumannSolver2D solver(g);
    RelaxReport rep;

    const double dt_cap = (p.nu > 0.0) ? std::min(1.0, 0.9 * 4.0 * g.h / (pi * std::numbers::sqrt2 * p.nu))
                                       : 1.0;
    double dt = cfg.dt > 0 ? cfg.dt : 0.25 * dt_cap;
    const double dt_floor = 1e-14;
    const double dt_max = (cfg.stepping == Stepping::explicit_euler)
                              ? std::min(dt_cap, 0.2 * g.h * g.h)
                              : dt_cap;
    dt = std::min(dt, dt_max);

    double energy = energy_2d(f, p.nu, plan).total;
    std::vector<double> force = effective_field_2d(f, p.nu, plan);
    auto sup = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    double rsup = sup(force);
    double last_decrease = 0.0;
    rep.energy_trace.emplace_back(0, energy);

    const size_t cells = f.theta.size();
    const double invh2 = 1.0 / (g.h * g.h);
    std::vector<double> rhs(cells), lap(cells);
    AngleField2D trial = f;

    long step = 0;
    for (; step < cfg.max_steps; ++step) {
        if (rsup <= cfg.residual_tol && last_decrease <= cfg.energy_tol * (1.0 + std::abs(energy))) {
            rep.termination = Termination::converged;
            break;
        }

        // nonlinear part of the force: everything except the Laplacian
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const size_t k = static_cast<size_t>(j) * g.nx + i;
                double l = 0.0;
                const double c = f.theta[k];
                if (i > 0) l += f.theta[k - 1] - c;
                if (i + 1 < g.nx) l += f.theta[k + 1] - c;
                if (j > 0) l += f.theta[k - g.nx] - c;
                if (j + 1 < g.ny) l += f.theta[k + g.nx] - c;
                lap[k] = l * invh2;
            }

        bool accepted = false;
        while (dt >= dt_floor) {
            if (cfg.stepping == Stepping::semi_implicit) {
                for (size_t k = 0; k < cells; ++k) rhs[k] = f.theta[k] + dt * (force[k] - lap[k]);
                solver.solve(rhs, trial.theta, dt);
            } else {
                for (size_t k = 0; k < cells; ++k) trial.theta[k] = f.theta[k] + dt * force[k];
            }
            const double e_trial = energy_2d(trial, p.nu, plan).total;
            if (e_trial <= energy + 1e-14 * (1.0 + std::abs(energy))) {
                last_decrease = energy - e_trial;
                rep.worst_energy_increase = std::max(rep.worst_energy_increase, -last_decrease);
                if (-last_decrease > 1e-10 * (1.0 + std::abs(energy))) ++rep.lyapunov_violations;
                energy = e_trial;
                std::swap(f.theta, trial.theta);
                accepted = true;
                break;
            }
            dt *= 0.5;
            ++rep.backtracks;
        }
        if (!accepted) {
            rep.termination = Termination::diverged;
            break;
        }
        force = effective_field_2d(f, p.nu, plan);
        rsup = sup(force);
        dt = std::min(dt * 1.1, dt_max);

        if (cfg.trace_every > 0 && (step + 1) % cfg.trace_every == 0)
            rep.energy_trace.emplace_back(step + 1, energy);
        if (checkpoint && cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0)
            checkpoint(step + 1, f, energy);
    }

    rep.steps_taken = step;
    rep.final_residual = rsup;
    rep.final_energy = energy;
    if (rep.energy_trace.empty() || rep.energy_trace.back().second != energy)
        rep.energy_trace.emplace_back(step, energy);
    rep.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(f), std::move(rep)};
}

} // namespace fourfold
