#pragma once

#include <cmath>
#include <vector>

#include "fourfold/grid.hpp"

namespace fourfold {

// Summing the line kernel 1/z^2 over all periodic images of the window W
// gives the closed form (pi/W)^2 / sin^2(pi z / W); using it makes the
// direct sums below discretizations of the same periodic operator as the
// spectral route, so the two can be compared at tight tolerance.
inline std::vector<double> periodized_kernel_by_offset(const Grid1D& g) {
    std::vector<double> kper(static_cast<size_t>(g.n), 0.0);
    const double f = pi / g.window();
    for (int r = 1; r < g.n; ++r) {
        const double s = std::sin(pi * r / static_cast<double>(g.n));
        kper[r] = f * f / (s * s);
    }
    return kper;
}

inline double second_derivative_6th_periodic(const std::vector<double>& u, int i, double h) {
    const int n = static_cast<int>(u.size());
    auto at = [&](int k) { return u[((k % n) + n) % n]; };
    const double c1 = 3.0 / 2.0, c2 = -3.0 / 20.0, c3 = 1.0 / 90.0;
    const double c0 = -49.0 / 18.0;
    return (c0 * u[i] + c1 * (at(i + 1) + at(i - 1)) + c2 * (at(i + 2) + at(i - 2)) +
            c3 * (at(i + 3) + at(i - 3))) /
           (h * h);
}

// Direct principal-value quadrature of (1/pi) * p.v. integral
// (u(x_i) - u(y)) K(x_i - y) dy: midpoint sums over every cell but the
// singular one, whose p.v. contribution is -u''(x_i) * h / 2 (the odd Taylor
// term cancels, the quadratic one integrates to that).  O(n^2); test oracle
// and cross-validation route, independent of any transform code.
inline std::vector<double> half_laplacian_quadrature(const std::vector<double>& u, const Grid1D& g) {
    const int n = g.n;
    if (static_cast<int>(u.size()) != n)
        throw PreconditionError("half_laplacian_quadrature: operand size does not match grid");
    const std::vector<double> kper = periodized_kernel_by_offset(g);
    double ksum = 0.0;
    for (int r = 1; r < n; ++r) ksum += kper[r];
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double conv = 0.0;
        for (int j = 0; j < i; ++j) conv += u[j] * kper[i - j];
        for (int j = i + 1; j < n; ++j) conv += u[j] * kper[j - i];
        const double offdiag = u[i] * ksum - conv;
        v[i] = (g.h * offdiag - 0.5 * g.h * second_derivative_6th_periodic(u, i, g.h)) / pi;
    }
    return v;
}

// Double-sum form of the quadratic form: (1/2pi) * [ h^2 * sum_{i != j}
// (u_i - u_j)^2 K(i-j) + diagonal ], diagonal = sum over links (du)^2
// (the |x-y| < h/2 strip where the integrand tends to u'(x)^2).  The
// inequality checks drop the diagonal: the pure double sum is the part for
// which pointwise difference inequalities transfer term by term.
inline double h_half_seminorm_sq_quadrature(const std::vector<double>& u, const Grid1D& g,
                                            bool include_diagonal = true) {
    const int n = g.n;
    if (static_cast<int>(u.size()) != n)
        throw PreconditionError("h_half_seminorm_sq_quadrature: operand size does not match grid");
    const std::vector<double> kper = periodized_kernel_by_offset(g);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double d = u[i] - u[j];
            row += d * d * kper[j - i];
        }
        acc += row;
    }
    acc *= 2.0 * g.h * g.h;
    double diag = 0.0;
    if (include_diagonal) {
        for (int i = 0; i < n; ++i) {
            const double d = u[(i + 1) % n] - u[i];
            diag += d * d;
        }
    }
    return (acc + diag) / (2.0 * pi);
}

} // namespace fourfold
