#pragma once

#include <cmath>
#include <string>

#include "fourfold/field.hpp"
#include "fourfold/grid.hpp"

namespace fourfold {

// Reduced material parameters.  Lengths are measured in units of L, the
// Bloch wall width; nu is the dimensionless film thickness that multiplies
// the nonlocal (stray-field) energy.
struct PhysicalParams {
    double exchange_length_nm = 3.37; // l
    double quality_factor = 0.08;     // Q = (l/L)^2
    double thickness_nm = 1.0;        // d

    double bloch_width_nm() const { return exchange_length_nm / std::sqrt(quality_factor); }
    double nu() const { return thickness_nm / (exchange_length_nm * std::sqrt(quality_factor)); }
};

// One-dimensional wall problem between far-field angles alpha_limit (left)
// and 0 (right).  The in-plane rotation beta selects the profile axis; only
// the net-charge-free pairings are accepted:
//   alpha = pi/2  requires beta = -pi/4,
//   alpha = pi    requires beta = 0,
// because those are the orientations with sin(alpha - beta) = sin(-beta),
// i.e. equal far-field values of the stray-field operand.
struct WallProblem {
    double nu = 0.0;
    double alpha_limit = pi / 2;
    double beta = -pi / 4;
    Grid1D grid;
    double boundary_tolerance = 1e-6;

    WallProblem(double nu_, double alpha, double beta_, const Grid1D& g, double btol = 1e-6)
        : nu(nu_), alpha_limit(alpha), beta(beta_), grid(g), boundary_tolerance(btol) {
        if (!(nu >= 0.0)) throw ConfigError("WallProblem: nu must be nonnegative");
        if (!(boundary_tolerance > 0.0)) throw ConfigError("WallProblem: boundary tolerance must be positive");
        const double eps = 1e-12;
        const bool wall90 = std::abs(alpha_limit - pi / 2) < eps;
        const bool wall180 = std::abs(alpha_limit - pi) < eps;
        if (!wall90 && !wall180)
            throw ConfigError("WallProblem: alpha_limit must be pi/2 or pi");
        const double required_beta = wall90 ? -pi / 4 : 0.0;
        if (std::abs(beta - required_beta) > eps)
            throw ConfigError(
                "WallProblem: beta=" + std::to_string(beta) + " is not charge-free for this wall; "
                "sin(theta - beta) must take equal values at both far fields, which forces beta=" +
                std::to_string(required_beta));
    }

    static WallProblem ninety(double nu, const Grid1D& g, double btol = 1e-6) {
        return WallProblem(nu, pi / 2, -pi / 4, g, btol);
    }
    static WallProblem one_eighty(double nu, const Grid1D& g, double btol = 1e-6) {
        return WallProblem(nu, pi, 0.0, g, btol);
    }

    // Common far-field value of the operand sin(theta - beta).
    double operand_limit() const { return std::sin(-beta); }

    bool is_admissible(const AngleField1D& f) const {
        if (!(f.grid == grid)) return false;
        return std::abs(f.theta.front() - alpha_limit) <= boundary_tolerance &&
               std::abs(f.theta.back()) <= boundary_tolerance;
    }

    void require_admissible(const AngleField1D& f) const {
        if (!(f.grid == grid)) throw PreconditionError("WallProblem: field lives on a different grid");
        if (std::abs(f.theta.front() - alpha_limit) > boundary_tolerance ||
            std::abs(f.theta.back()) > boundary_tolerance)
            throw PreconditionError("WallProblem: far-field mismatch beyond boundary tolerance");
    }
};

// Rectangular film sample with an initial-condition recipe (parsed elsewhere).
struct FilmProblem {
    double nu = 0.0;
    Grid2D grid;
    std::string init_recipe = "monodomain(0)";

    FilmProblem(double nu_, const Grid2D& g, std::string recipe)
        : nu(nu_), grid(g), init_recipe(std::move(recipe)) {
        if (!(nu >= 0.0)) throw ConfigError("FilmProblem: nu must be nonnegative");
    }
};

} // namespace fourfold
