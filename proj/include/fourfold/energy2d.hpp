#pragma once

#include <cmath>
#include <vector>

#include "fourfold/energy1d.hpp"
#include "fourfold/stray_field.hpp"

namespace fourfold {

// Link-sum exchange (equivalently one-sided differences at the Neumann
// boundary), (1/8) int sin^2 2theta anisotropy, kernel-form magnetostatic
// energy.  The same discretizations whose exact gradient is
// effective_field_2d below.
inline EnergyBreakdown energy_2d(const AngleField2D& f, double nu, StrayFieldPlan2D& plan) {
    const Grid2D& g = f.grid;
    EnergyBreakdown e;
    double ex = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double d = f.at(i + 1, j) - f.at(i, j);
            ex += d * d;
        }
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double d = f.at(i, j + 1) - f.at(i, j);
            ex += d * d;
        }
    e.exchange = 0.5 * ex;
    double an = 0.0;
    for (double t : f.theta) {
        const double s = std::sin(2.0 * t);
        an += s * s;
    }
    e.anisotropy = an * g.h * g.h / 8.0;
    if (nu > 0.0) e.magnetostatic = magnetostatic_energy_2d(magnetization_of(f), plan, nu);
    e.total = e.exchange + e.anisotropy + e.magnetostatic;
    return e;
}

// F = lap theta - (1/4) sin 4 theta + t . h_stray with t = (-cos, -sin);
// h^2 * F_k = -dE/dtheta_k exactly.  The five-point Laplacian drops missing
// neighbors, which is the reflected-ghost (homogeneous Neumann) stencil.
inline std::vector<double> effective_field_2d(const AngleField2D& f, double nu, StrayFieldPlan2D& plan) {
    const Grid2D& g = f.grid;
    std::vector<double> F(f.theta.size(), 0.0);
    const double invh2 = 1.0 / (g.h * g.h);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const size_t k = static_cast<size_t>(j) * g.nx + i;
            const double c = f.theta[k];
            double lap = 0.0;
            if (i > 0) lap += f.theta[k - 1] - c;
            if (i + 1 < g.nx) lap += f.theta[k + 1] - c;
            if (j > 0) lap += f.theta[k - g.nx] - c;
            if (j + 1 < g.ny) lap += f.theta[k + g.nx] - c;
            F[k] = lap * invh2 - 0.25 * std::sin(4.0 * c);
        }
    }
    if (nu > 0.0) {
        const VectorField2D m = magnetization_of(f);
        const VectorField2D hs = stray_field_2d(m, plan, nu);
        for (size_t k = 0; k < F.size(); ++k)
            F[k] += -std::cos(f.theta[k]) * hs.m1[k] - std::sin(f.theta[k]) * hs.m2[k];
    }
    return F;
}

} // namespace fourfold
