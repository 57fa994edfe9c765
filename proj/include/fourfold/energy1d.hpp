#pragma once

#include <cmath>
#include <vector>

#include "fourfold/problem.hpp"
#include "fourfold/quadrature.hpp"
#include "fourfold/spectral.hpp"

namespace fourfold {

struct EnergyBreakdown {
    double exchange = 0.0;
    double anisotropy = 0.0;
    double magnetostatic = 0.0;
    double total = 0.0;
};

inline std::vector<double> nonlocal_operand(const AngleField1D& f, double beta) {
    std::vector<double> u(f.theta.size());
    for (size_t i = 0; i < u.size(); ++i) u[i] = std::sin(f.theta[i] - beta);
    return u;
}

// Discretization chosen so that el_residual_1d is the exact gradient:
//   exchange     = sum over links (dtheta)^2 / (2h)   (midpoint rule for (1/2) int theta'^2)
//   anisotropy   = (h/8) sum sin^2(2 theta)
//   magnetostatic = (nu/4) * h-weighted quadratic form of sin(theta - beta)
// No admissibility check here; energy_1d wraps this with one.
inline EnergyBreakdown energy_1d_core(const AngleField1D& f, double nu, double beta, SpectralPlan1D& plan) {
    const int n = f.n();
    const double h = f.grid.h;
    EnergyBreakdown e;
    for (int i = 0; i + 1 < n; ++i) {
        const double d = f.theta[i + 1] - f.theta[i];
        e.exchange += d * d;
    }
    e.exchange /= 2.0 * h;
    for (int i = 0; i < n; ++i) {
        const double s = std::sin(2.0 * f.theta[i]);
        e.anisotropy += s * s;
    }
    e.anisotropy *= h / 8.0;
    if (nu > 0.0) e.magnetostatic = 0.25 * nu * plan.seminorm_sq(nonlocal_operand(f, beta));
    e.total = e.exchange + e.anisotropy + e.magnetostatic;
    return e;
}

inline EnergyBreakdown energy_1d(const AngleField1D& f, const WallProblem& p, SpectralPlan1D& plan) {
    p.require_admissible(f);
    return energy_1d_core(f, p.nu, p.beta, plan);
}

// Same breakdown with the O(n^2) double-sum seminorm in place of the
// spectral one; the inequality checks need this form (optionally without
// the diagonal strip, the part that transfers termwise under folds).
inline EnergyBreakdown energy_1d_quadrature_core(const AngleField1D& f, double nu, double beta,
                                                 bool include_diagonal = true) {
    const int n = f.n();
    const double h = f.grid.h;
    EnergyBreakdown e;
    for (int i = 0; i + 1 < n; ++i) {
        const double d = f.theta[i + 1] - f.theta[i];
        e.exchange += d * d;
    }
    e.exchange /= 2.0 * h;
    for (int i = 0; i < n; ++i) {
        const double s = std::sin(2.0 * f.theta[i]);
        e.anisotropy += s * s;
    }
    e.anisotropy *= h / 8.0;
    if (nu > 0.0)
        e.magnetostatic =
            0.25 * nu * h_half_seminorm_sq_quadrature(nonlocal_operand(f, beta), f.grid, include_diagonal);
    e.total = e.exchange + e.anisotropy + e.magnetostatic;
    return e;
}

// r = -theta'' + (1/4) sin 4 theta + (nu/2) cos(theta-beta) HalfLap[sin(theta-beta)].
// h * r_i is exactly dE/dtheta_i for 0 < i < n-1; the end entries are set to
// zero (they are constraint rows of the pinned far field, not gradient rows).
inline std::vector<double> el_residual_1d_core(const AngleField1D& f, double nu, double beta,
                                               SpectralPlan1D& plan) {
    const int n = f.n();
    const double h = f.grid.h;
    std::vector<double> r(static_cast<size_t>(n), 0.0);
    std::vector<double> hl;
    if (nu > 0.0) hl = plan.half_laplacian(nonlocal_operand(f, beta));
    for (int i = 1; i + 1 < n; ++i) {
        const double lap = (f.theta[i + 1] - 2.0 * f.theta[i] + f.theta[i - 1]) / (h * h);
        double v = -lap + 0.25 * std::sin(4.0 * f.theta[i]);
        if (nu > 0.0) v += 0.5 * nu * std::cos(f.theta[i] - beta) * hl[i];
        r[i] = v;
    }
    return r;
}

inline std::vector<double> el_residual_1d(const AngleField1D& f, const WallProblem& p, SpectralPlan1D& plan) {
    p.require_admissible(f);
    return el_residual_1d_core(f, p.nu, p.beta, plan);
}

// Sup norm of the residual over the nodes the relaxer actually evolves
// (skip pinned cells at each end, default 2).
inline double residual_sup_1d(const std::vector<double>& r, int pinned = 2) {
    double m = 0.0;
    for (int i = pinned; i < static_cast<int>(r.size()) - pinned; ++i) m = std::max(m, std::abs(r[i]));
    return m;
}

} // namespace fourfold
