#pragma once

#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "fourfold/fft.hpp"
#include "fourfold/field.hpp"
#include "fourfold/grid.hpp"

namespace fourfold {

// Charge density of the zero-extended magnetization: rho = -div m by
// centered differences.  Everything nonzero fits on the sample cells plus a
// one-cell rim, so the array is (nx+2) x (ny+2) with the sample occupying
// indices 1..nx, 1..ny.  The rim rows/columns carry the edge-charge layer.
struct PaddedCharge {
    int cx = 0, cy = 0;
    double h = 0.0;
    std::vector<double> rho;

    double& at(int i, int j) { return rho[static_cast<size_t>(j) * cx + i]; }
    double at(int i, int j) const { return rho[static_cast<size_t>(j) * cx + i]; }
    double total() const {
        double s = 0.0;
        for (double v : rho) s += v;
        return s;
    }
};

inline PaddedCharge charge_density_2d(const VectorField2D& m) {
    const Grid2D& g = m.grid;
    PaddedCharge c;
    c.cx = g.nx + 2;
    c.cy = g.ny + 2;
    c.h = g.h;
    c.rho.assign(static_cast<size_t>(c.cx) * c.cy, 0.0);
    auto m1 = [&](int i, int j) -> double {
        if (i < 0 || i >= g.nx || j < 0 || j >= g.ny) return 0.0;
        return m.m1[static_cast<size_t>(j) * g.nx + i];
    };
    auto m2 = [&](int i, int j) -> double {
        if (i < 0 || i >= g.nx || j < 0 || j >= g.ny) return 0.0;
        return m.m2[static_cast<size_t>(j) * g.nx + i];
    };
    const double inv2h = 1.0 / (2.0 * g.h);
    for (int j = -1; j <= g.ny; ++j)
        for (int i = -1; i <= g.nx; ++i)
            c.at(i + 1, j + 1) =
                -((m1(i + 1, j) - m1(i - 1, j)) + (m2(i, j + 1) - m2(i, j - 1))) * inv2h;
    return c;
}

// Free-space convolution with the Riesz kernel 1/|r| by zero-padded FFTs.
// The kernel is point-sampled except at the origin, where the exact cell
// average of 1/|r| over one cell is 4*ln(1+sqrt 2)/h.  Padded extent is
// twice the charge extent, so the circular convolution is the linear one.
//
// A plan owns transform buffers: use one plan per thread.
class StrayFieldPlan2D {
public:
    explicit StrayFieldPlan2D(const Grid2D& g)
        : grid_(g),
          cx_(g.nx + 2),
          cy_(g.ny + 2),
          px_(2 * (g.nx + 2)),
          py_(2 * (g.ny + 2)),
          dft_(py_, px_),
          khat_(dft_.spectrum_size()) {
        double* real = dft_.real();
        const double kc = 4.0 * std::log(1.0 + std::numbers::sqrt2) / g.h;
        for (int jy = 0; jy < py_; ++jy) {
            const int dy = (jy <= py_ / 2) ? jy : jy - py_;
            for (int jx = 0; jx < px_; ++jx) {
                const int dx = (jx <= px_ / 2) ? jx : jx - px_;
                double v;
                if (dx == 0 && dy == 0)
                    v = kc;
                else
                    v = 1.0 / (g.h * std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy));
                real[static_cast<size_t>(jy) * px_ + jx] = v;
            }
        }
        dft_.forward();
        const fftw_complex* s = dft_.spectrum();
        for (size_t k = 0; k < khat_.size(); ++k) khat_[k] = std::complex<double>(s[k][0], s[k][1]);
    }

    const Grid2D& grid() const { return grid_; }
    int cx() const { return cx_; }
    int cy() const { return cy_; }

    // phi(r) = sum over charges rho(r') K(r - r') h^2, returned on the
    // charge grid (cx x cy).
    void potential(const PaddedCharge& c, std::vector<double>& phi) {
        if (c.cx != cx_ || c.cy != cy_ || c.h != grid_.h)
            throw PreconditionError("StrayFieldPlan2D: charge grid does not match plan");
        double* real = dft_.real();
        std::memset(real, 0, sizeof(double) * dft_.real_size());
        for (int j = 0; j < cy_; ++j)
            std::memcpy(real + static_cast<size_t>(j) * px_, c.rho.data() + static_cast<size_t>(j) * cx_,
                        sizeof(double) * cx_);
        dft_.forward();
        fftw_complex* s = dft_.spectrum();
        const double scale = grid_.h * grid_.h / (static_cast<double>(px_) * py_);
        for (size_t k = 0; k < khat_.size(); ++k) {
            const std::complex<double> z = std::complex<double>(s[k][0], s[k][1]) * khat_[k] * scale;
            s[k][0] = z.real();
            s[k][1] = z.imag();
        }
        dft_.backward();
        phi.resize(static_cast<size_t>(cx_) * cy_);
        for (int j = 0; j < cy_; ++j)
            std::memcpy(phi.data() + static_cast<size_t>(j) * cx_, real + static_cast<size_t>(j) * px_,
                        sizeof(double) * cx_);
    }

private:
    Grid2D grid_;
    int cx_, cy_, px_, py_;
    RealDft2D dft_;
    std::vector<std::complex<double>> khat_;
};

// h_stray = -(nu/4pi) grad(K * rho): the negative variational derivative of
// the nonlocal energy with respect to m.  Returned on the sample cells.
inline VectorField2D stray_field_2d(const VectorField2D& m, StrayFieldPlan2D& plan, double nu,
                                    std::vector<double>* phi_out = nullptr) {
    const Grid2D& g = m.grid;
    if (!(g == plan.grid())) throw PreconditionError("stray_field_2d: plan built for a different grid");
    PaddedCharge c = charge_density_2d(m);
    std::vector<double> phi;
    plan.potential(c, phi);
    VectorField2D h(g);
    const int cx = plan.cx();
    const double pref = -nu / (4.0 * pi) / (2.0 * g.h);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int ci = i + 1, cj = j + 1;
            const size_t k = static_cast<size_t>(j) * g.nx + i;
            h.m1[k] = pref * (phi[static_cast<size_t>(cj) * cx + ci + 1] - phi[static_cast<size_t>(cj) * cx + ci - 1]);
            h.m2[k] = pref * (phi[static_cast<size_t>(cj + 1) * cx + ci] - phi[static_cast<size_t>(cj - 1) * cx + ci]);
        }
    }
    if (phi_out) *phi_out = std::move(phi);
    return h;
}

// (nu/8pi) * h^2 * sum rho * phi; exactly equal, by summation by parts, to
// -(1/2) h^2 sum m . h_stray over the sample.
inline double magnetostatic_energy_2d(const VectorField2D& m, StrayFieldPlan2D& plan, double nu) {
    PaddedCharge c = charge_density_2d(m);
    std::vector<double> phi;
    plan.potential(c, phi);
    double acc = 0.0;
    for (size_t k = 0; k < phi.size(); ++k) acc += c.rho[k] * phi[k];
    return nu / (8.0 * pi) * m.grid.h * m.grid.h * acc;
}

} // namespace fourfold
