#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fourfold/errors.hpp"

namespace fourfold {

inline constexpr double pi = std::numbers::pi;

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline int next_power_of_two(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Uniform 1D grid x_i = x0 + i*h.  Spectral transforms require n to be a
// power of two, so that is enforced here for every 1D grid.
struct Grid1D {
    int n = 0;
    double h = 0.0;
    double x0 = 0.0;

    Grid1D() = default;
    Grid1D(int n_, double h_, double x0_) : n(n_), h(h_), x0(x0_) {
        if (n < 8 || !is_power_of_two(n))
            throw PreconditionError("Grid1D: n must be a power of two >= 8, got " + std::to_string(n));
        if (!(h > 0.0)) throw PreconditionError("Grid1D: spacing must be positive");
    }

    // Window symmetric about the origin; no node sits exactly at x = 0.
    static Grid1D symmetric(int n, double window) {
        double h = window / n;
        return Grid1D(n, h, -0.5 * (n - 1) * h);
    }

    double x(int i) const { return x0 + i * h; }
    double window() const { return n * h; }

    bool operator==(const Grid1D& o) const { return n == o.n && h == o.h && x0 == o.x0; }
};

// Cell-centered 2D grid over the sample [0,Lx]x[0,Ly]; cell (i,j) has center
// ((i+1/2)h, (j+1/2)h).  Values are stored row-major, index j*nx + i.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double h = 0.0;

    Grid2D() = default;
    Grid2D(int nx_, int ny_, double h_) : nx(nx_), ny(ny_), h(h_) {
        if (nx < 2 || ny < 2) throw PreconditionError("Grid2D: need at least 2 cells per side");
        if (!(h > 0.0)) throw PreconditionError("Grid2D: spacing must be positive");
    }

    static Grid2D from_sample(double lx, double ly, double cells_per_unit) {
        if (!(lx > 0) || !(ly > 0) || !(cells_per_unit > 0))
            throw ConfigError("Grid2D: sample dimensions and resolution must be positive");
        int nx = static_cast<int>(std::lround(lx * cells_per_unit));
        int ny = static_cast<int>(std::lround(ly * cells_per_unit));
        return Grid2D(nx, ny, 1.0 / cells_per_unit);
    }

    double lx() const { return nx * h; }
    double ly() const { return ny * h; }
    int cells() const { return nx * ny; }
    double xc(int i) const { return (i + 0.5) * h; }
    double yc(int j) const { return (j + 0.5) * h; }

    bool operator==(const Grid2D& o) const { return nx == o.nx && ny == o.ny && h == o.h; }
};

} // namespace fourfold
