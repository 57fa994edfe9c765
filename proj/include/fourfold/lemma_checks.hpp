#pragma once

#include <cmath>

#include "fourfold/energy1d.hpp"
#include "fourfold/transform.hpp"

namespace fourfold {

// All three checks work with the double-sum (quadrature) seminorm: the
// inequalities transfer to it term by term, so they can be asserted with
// rounding-only slack.  Scale for relative slack is max(1, |total energy|).

struct FoldCheckReport {
    EnergyBreakdown original, folded;
    double slack = 0.0;
    bool exchange_ok = false, anisotropy_ok = false, nonlocal_ok = false;
    bool holds() const { return exchange_ok && anisotropy_ok && nonlocal_ok; }
};

// Folding theta into [0, pi/2] cannot raise the energy:
//   exchange    : the fold is 1-Lipschitz, so every link difference shrinks;
//   anisotropy  : sin^2(2 theta) is invariant under the fold;
//   nonlocal    : |sin(fold - beta)| differences shrink pairwise.  For
//     beta = 0 that is ||a|-|b|| <= |a-b|; for beta = -pi/4 the folded
//     operand is g(|u|) with g(t) = max(t, sqrt(1-t^2)), which is
//     1-Lipschitz, so the pairwise bound holds again.
inline FoldCheckReport check_fold_inequality(const AngleField1D& f, const WallProblem& p) {
    FoldCheckReport r;
    r.original = energy_1d_quadrature_core(f, p.nu, p.beta, true);
    r.folded = energy_1d_quadrature_core(fold_to_quadrant(f), p.nu, p.beta, true);
    const double scale = std::max(1.0, std::abs(r.original.total));
    r.slack = 1e-12 * scale;
    r.exchange_ok = r.folded.exchange <= r.original.exchange + r.slack;
    r.anisotropy_ok = std::abs(r.folded.anisotropy - r.original.anisotropy) <= r.slack;
    r.nonlocal_ok = r.folded.magnetostatic <= r.original.magnetostatic + r.slack;
    return r;
}

struct CoercivityReport {
    double energy = 0.0;
    double grad_term = 0.0, mass_term = 0.0, nonlocal_term = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    bool holds() const { return energy + slack >= bound; }
};

// Lower bound for the 90-degree energy of the octant-folded profile
// rho in [0, pi/4] with rho -> 0 at both ends:
//   E(rho) >= (1/4) int rho'^2 + (1/8) int rho^2 + (nu/4) |sin(rho+pi/4)|^2.
// The middle term uses sin^2(2 rho) >= rho^2 on [0, pi/4] (from
// sin rho >= rho/sqrt2 and cos^2 rho >= 1/2), which makes the discrete
// inequality exact termwise.
inline CoercivityReport check_coercivity(const AngleField1D& f, const WallProblem& p) {
    if (std::abs(p.alpha_limit - pi / 2) > 1e-12)
        throw PreconditionError("check_coercivity: stated for the 90-degree problem only");
    const AngleField1D rho = fold_to_octant(fold_to_quadrant(f), pi / 2);
    const double h = rho.grid.h;
    CoercivityReport r;
    const EnergyBreakdown e = energy_1d_quadrature_core(rho, p.nu, -pi / 4, true);
    r.energy = e.total;
    r.grad_term = 0.5 * e.exchange;
    double mass = 0.0;
    for (double v : rho.theta) mass += v * v;
    r.mass_term = 0.125 * h * mass;
    r.nonlocal_term = e.magnetostatic;
    r.bound = r.grad_term + r.mass_term + r.nonlocal_term;
    r.slack = 1e-12 * std::max(1.0, std::abs(r.energy));
    return r;
}

struct RearrangementReport {
    EnergyBreakdown original, rearranged;
    double exchange_wrap_allowance = 0.0;
    double slack_exact = 0.0, slack_nonlocal = 0.0;
    bool exchange_ok = false, anisotropy_ok = false, nonlocal_ok = false;
    bool holds() const { return exchange_ok && anisotropy_ok && nonlocal_ok; }
};

// Organ-pipe rearrangement of a nonnegative profile: anisotropy is exactly
// preserved (value multiset unchanged), and on the cycle closing the window
// both the link sum and the kernel double sum decrease (circular
// rearrangement inequalities; the periodized kernel is nonincreasing in
// cyclic distance).  The path-form exchange differs from the cycle form by
// the wrap link, which enters the allowance below and vanishes for
// zero-ended profiles.
inline RearrangementReport check_rearrangement_inequality(const AngleField1D& rho, const WallProblem& p) {
    for (double v : rho.theta)
        if (v < 0) throw PreconditionError("check_rearrangement_inequality: negative value");
    const AngleField1D star = symmetric_decreasing_rearrangement(rho);
    RearrangementReport r;
    r.original = energy_1d_quadrature_core(rho, p.nu, p.beta, true);
    r.rearranged = energy_1d_quadrature_core(star, p.nu, p.beta, true);
    const double h = rho.grid.h;
    auto wrap = [&](const AngleField1D& v) {
        const double d = v.theta.back() - v.theta.front();
        return d * d / (2.0 * h);
    };
    r.exchange_wrap_allowance = wrap(rho) - wrap(star);
    const double scale = std::max(1.0, std::abs(r.original.total));
    r.slack_exact = 1e-12 * scale;
    r.slack_nonlocal = 1e-8 * scale;
    r.exchange_ok = r.rearranged.exchange <= r.original.exchange + r.exchange_wrap_allowance + r.slack_exact;
    r.anisotropy_ok = std::abs(r.rearranged.anisotropy - r.original.anisotropy) <= r.slack_exact;
    r.nonlocal_ok = r.rearranged.magnetostatic <= r.original.magnetostatic + r.slack_nonlocal;
    return r;
}

} // namespace fourfold
