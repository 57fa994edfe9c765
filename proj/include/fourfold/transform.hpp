#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fourfold/field.hpp"
#include "fourfold/problem.hpp"

namespace fourfold {

// Tent map over multiples of pi: the distance from theta to the nearest
// point of {0, pi, 2pi, ...} reflected into [0, pi/2].  Equals asin(|sin t|).
inline double fold_to_quadrant(double t) {
    double r = std::fmod(t, pi);
    if (r < 0) r += pi;
    return (r <= pi / 2) ? r : pi - r;
}

inline AngleField1D fold_to_quadrant(const AngleField1D& f) {
    AngleField1D out = f;
    for (double& t : out.theta) t = fold_to_quadrant(t);
    return out;
}

// Pointwise reflection into the lower half of [0, alpha].  For alpha = pi/2
// values above pi/4 reflect to pi/2 - t; for alpha = pi values above pi/2
// reflect to pi - t.  Input must already lie in [0, alpha].
inline double fold_to_octant(double t, double alpha_limit) {
    constexpr double slack = 1e-9;
    if (t < -slack || t > alpha_limit + slack)
        throw PreconditionError("fold_to_octant: value outside [0, alpha_limit]");
    t = std::clamp(t, 0.0, alpha_limit);
    const double mid = alpha_limit / 2;
    return (t <= mid) ? t : alpha_limit - t;
}

inline AngleField1D fold_to_octant(const AngleField1D& f, double alpha_limit) {
    AngleField1D out = f;
    for (double& t : out.theta) t = fold_to_octant(t, alpha_limit);
    return out;
}

// The admissible-class reflection x -> -x, theta -> alpha - theta.  On a grid
// symmetric about 0 this maps the class to itself and preserves the energy.
inline AngleField1D reflect_profile(const AngleField1D& f, double alpha_limit) {
    AngleField1D out = f;
    const int n = f.n();
    for (int i = 0; i < n; ++i) out.theta[i] = alpha_limit - f.theta[n - 1 - i];
    return out;
}

// Organ-pipe layout of the sorted values: largest at index n/2, then
// alternating left, right, left, ... outward.  Equal values keep a fixed
// deterministic order (the earlier-indexed one lands further right).
inline std::vector<double> rearrange_descending_from_center(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a > b;
    });
    std::vector<double> out(n);
    const int c = n / 2;
    for (int k = 0; k < n; ++k) {
        const int slot = (k == 0) ? c : (k % 2 == 1 ? c - (k + 1) / 2 : c + k / 2);
        out[slot] = v[order[k]];
    }
    return out;
}

inline AngleField1D symmetric_decreasing_rearrangement(const AngleField1D& f) {
    for (double t : f.theta)
        if (t < 0) throw PreconditionError("symmetric_decreasing_rearrangement: negative value");
    return AngleField1D(f.grid, rearrange_descending_from_center(f.theta));
}

} // namespace fourfold
