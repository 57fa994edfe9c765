#pragma once

#include <cmath>
#include <vector>

#include "fourfold/grid.hpp"

namespace fourfold {

// In-plane magnetization is parametrized by the angle theta:
//   m = -e1 sin(theta) + e2 cos(theta).
// Angle fields store theta as a plain real array (unwrapped, not reduced
// modulo 2*pi, so winding is visible in the values).

struct AngleField1D {
    Grid1D grid;
    std::vector<double> theta;

    AngleField1D() = default;
    explicit AngleField1D(const Grid1D& g, double fill = 0.0) : grid(g), theta(g.n, fill) {}
    AngleField1D(const Grid1D& g, std::vector<double> values) : grid(g), theta(std::move(values)) {
        if (static_cast<int>(theta.size()) != g.n)
            throw PreconditionError("AngleField1D: value count does not match grid");
    }

    int n() const { return grid.n; }
    double& operator[](int i) { return theta[i]; }
    double operator[](int i) const { return theta[i]; }
};

struct AngleField2D {
    Grid2D grid;
    std::vector<double> theta; // row-major, j*nx + i

    AngleField2D() = default;
    explicit AngleField2D(const Grid2D& g, double fill = 0.0) : grid(g), theta(static_cast<size_t>(g.cells()), fill) {}

    double& at(int i, int j) { return theta[static_cast<size_t>(j) * grid.nx + i]; }
    double at(int i, int j) const { return theta[static_cast<size_t>(j) * grid.nx + i]; }
};

struct VectorField2D {
    Grid2D grid;
    std::vector<double> m1, m2; // row-major, same layout as AngleField2D

    VectorField2D() = default;
    explicit VectorField2D(const Grid2D& g)
        : grid(g), m1(static_cast<size_t>(g.cells()), 0.0), m2(static_cast<size_t>(g.cells()), 0.0) {}
};

inline VectorField2D magnetization_of(const AngleField2D& f) {
    VectorField2D m(f.grid);
    const size_t cells = f.theta.size();
    for (size_t k = 0; k < cells; ++k) {
        m.m1[k] = -std::sin(f.theta[k]);
        m.m2[k] = std::cos(f.theta[k]);
    }
    return m;
}

inline void check_finite(const std::vector<double>& v, const char* who) {
    for (double x : v)
        if (!std::isfinite(x)) throw PreconditionError(std::string(who) + ": non-finite value");
}

} // namespace fourfold
