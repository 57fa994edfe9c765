#pragma once

#include <cmath>
#include <cstring>
#include <vector>

#include "fourfold/fft.hpp"
#include "fourfold/grid.hpp"

namespace fourfold {

// Periodic realization of (-d^2/dx^2)^{1/2} on the window W = n*h via the
// real-DFT multiplier |k_m|, k_m = 2*pi*m/W.  Periodic treatment is valid
// only for operands with equal values at both window ends, which is checked
// on every call; both wall problems satisfy this for sin(theta - beta).
//
// A plan owns its transform buffers: use one plan per thread.
class SpectralPlan1D {
public:
    explicit SpectralPlan1D(const Grid1D& g, double far_field_tol = 1e-6)
        : grid_(g),
          tol_(far_field_tol),
          fwd_(g.n, FFTW_R2HC),
          bwd_(g.n, FFTW_HC2R),
          symbol_(static_cast<size_t>(g.n) / 2 + 1) {
        for (size_t m = 0; m < symbol_.size(); ++m) symbol_[m] = 2.0 * pi * static_cast<double>(m) / g.window();
    }

    const Grid1D& grid() const { return grid_; }
    double far_field_tol() const { return tol_; }

    void half_laplacian(const std::vector<double>& u, std::vector<double>& v) {
        check_operand(u);
        const int n = grid_.n;
        v.resize(u.size());
        double* f = fwd_.data();
        std::memcpy(f, u.data(), sizeof(double) * n);
        fwd_.execute();
        double* b = bwd_.data();
        b[0] = 0.0;
        b[n / 2] = symbol_[n / 2] * f[n / 2];
        for (int m = 1; m < n / 2; ++m) {
            b[m] = symbol_[m] * f[m];
            b[n - m] = symbol_[m] * f[n - m];
        }
        bwd_.execute();
        const double scale = 1.0 / n;
        for (int i = 0; i < n; ++i) v[i] = scale * b[i];
    }

    std::vector<double> half_laplacian(const std::vector<double>& u) {
        std::vector<double> v;
        half_laplacian(u, v);
        return v;
    }

    // h-weighted quadratic form sum_i u_i * (HalfLap u)_i * h, evaluated by
    // Parseval on the forward transform alone.
    double seminorm_sq(const std::vector<double>& u) {
        check_operand(u);
        const int n = grid_.n;
        double* f = fwd_.data();
        std::memcpy(f, u.data(), sizeof(double) * n);
        fwd_.execute();
        double acc = symbol_[n / 2] * f[n / 2] * f[n / 2];
        for (int m = 1; m < n / 2; ++m)
            acc += 2.0 * symbol_[m] * (f[m] * f[m] + f[n - m] * f[n - m]);
        return acc * grid_.h / n;
    }

private:
    void check_operand(const std::vector<double>& u) const {
        if (static_cast<int>(u.size()) != grid_.n)
            throw PreconditionError("SpectralPlan1D: operand size does not match grid");
        if (std::abs(u.front() - u.back()) > tol_)
            throw PreconditionError("SpectralPlan1D: operand end values differ beyond tolerance; periodic transform would wrap a jump");
    }

    Grid1D grid_;
    double tol_;
    R2RPlan fwd_, bwd_;
    std::vector<double> symbol_;
};

} // namespace fourfold
