#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fourfold/relax.hpp"

namespace fourfold {

// Cubic Lagrange interpolation on the uniform grid (4-point stencil).
inline double interp_cubic(const AngleField1D& f, double x) {
    const int n = f.n();
    const double t = (x - f.grid.x0) / f.grid.h;
    int i1 = static_cast<int>(std::floor(t));
    if (i1 < 1) i1 = 1;
    if (i1 > n - 3) i1 = n - 3;
    const double s = t - i1;
    const double wm1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double w0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double w1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double w2 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return wm1 * f.theta[i1 - 1] + w0 * f.theta[i1] + w1 * f.theta[i1 + 1] + w2 * f.theta[i1 + 2];
}

// Position where the profile crosses the given level, nearest to x = 0.
inline double crossing_of(const AngleField1D& f, double level) {
    return detail::crossing_position(f, level);
}

struct MonotonicityReport {
    bool is_nonincreasing = false;
    double max_violation = 0.0; // max of theta_{i+1} - theta_i; positive = violation
    bool strict_in_core = false;
};

inline MonotonicityReport monotonicity_report(const AngleField1D& f, double alpha_limit) {
    MonotonicityReport r;
    double mx = -std::numeric_limits<double>::infinity();
    bool strict = true;
    const double lo = 0.05 * alpha_limit, hi = 0.95 * alpha_limit;
    for (int i = 0; i + 1 < f.n(); ++i) {
        const double d = f.theta[i + 1] - f.theta[i];
        mx = std::max(mx, d);
        const bool in_core = f.theta[i] >= lo && f.theta[i] <= hi && f.theta[i + 1] >= lo && f.theta[i + 1] <= hi;
        if (in_core && !(d < -1e-10)) strict = false;
    }
    r.max_violation = mx;
    r.is_nonincreasing = mx <= 0.0;
    r.strict_in_core = strict;
    return r;
}

// sup |theta(xc + u) + theta(xc - u) - alpha| where xc is the alpha/2
// crossing.  When the mirror pairs land on grid nodes the test is pure
// lookup; otherwise both sides are resampled cubically.
inline double symmetry_residual(const AngleField1D& f, double alpha_limit) {
    const double xc = crossing_of(f, 0.5 * alpha_limit);
    if (std::isnan(xc)) throw PreconditionError("symmetry_residual: profile never crosses alpha/2");
    const int n = f.n();
    const double h = f.grid.h;
    const double s_exact = (2.0 * xc - 2.0 * f.grid.x0) / h;
    const long s_round = std::lround(s_exact);
    double worst = 0.0;
    if (std::abs(s_exact - static_cast<double>(s_round)) < 1e-9) {
        for (int i = 0; i < n; ++i) {
            const long j = s_round - i;
            if (j < 0 || j >= n) continue;
            worst = std::max(worst, std::abs(f.theta[i] + f.theta[j] - alpha_limit));
        }
        return worst;
    }
    const double reach = std::min(xc - f.grid.x(2), f.grid.x(n - 3) - xc);
    const int kmax = static_cast<int>(std::floor(reach / h));
    for (int k = 0; k <= kmax; ++k) {
        const double u = k * h;
        worst = std::max(worst, std::abs(interp_cubic(f, xc + u) + interp_cubic(f, xc - u) - alpha_limit));
    }
    return worst;
}

// sup distance between two profiles after aligning each one's alpha/2
// crossing; used by the uniqueness and translation-quotient probes.
inline double aligned_sup_distance(const AngleField1D& a, const AngleField1D& b, double alpha_limit) {
    if (!(a.grid == b.grid)) throw PreconditionError("aligned_sup_distance: grids differ");
    const double ca = crossing_of(a, 0.5 * alpha_limit);
    const double cb = crossing_of(b, 0.5 * alpha_limit);
    if (std::isnan(ca) || std::isnan(cb))
        throw PreconditionError("aligned_sup_distance: a profile never crosses alpha/2");
    const int n = a.n();
    const double h = a.grid.h;
    const double margin = 2.0 * h;
    const double reach = std::min({ca - a.grid.x(1), a.grid.x(n - 2) - ca, cb - b.grid.x(1),
                                   b.grid.x(n - 2) - cb}) -
                         margin;
    const int kmax = static_cast<int>(std::floor(reach / h));
    double worst = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        const double u = k * h;
        worst = std::max(worst, std::abs(interp_cubic(a, ca + u) - interp_cubic(b, cb + u)));
    }
    return worst;
}

struct UniquenessReport {
    double max_pairwise_distance = 0.0;
    std::vector<AngleField1D> profiles;
    std::vector<RelaxReport> runs;
    bool all_converged = true;
};

inline UniquenessReport uniqueness_probe(const WallProblem& p, const std::vector<AngleField1D>& inits,
                                         const RelaxConfig& cfg) {
    UniquenessReport u;
    for (const AngleField1D& init : inits) {
        auto [f, rep] = relax_1d(p, init, cfg);
        if (rep.termination != Termination::converged) u.all_converged = false;
        u.profiles.push_back(std::move(f));
        u.runs.push_back(std::move(rep));
    }
    for (size_t i = 0; i < u.profiles.size(); ++i)
        for (size_t j = i + 1; j < u.profiles.size(); ++j)
            u.max_pairwise_distance = std::max(
                u.max_pairwise_distance, aligned_sup_distance(u.profiles[i], u.profiles[j], p.alpha_limit));
    return u;
}

// Distance between the level_hi and level_lo crossings (wall splitting
// measure: for 180-degree profiles these are 3pi/4 and pi/4).
inline double level_crossing_distance(const AngleField1D& f, double level_hi, double level_lo) {
    const double xh = crossing_of(f, level_hi);
    const double xl = crossing_of(f, level_lo);
    if (std::isnan(xh) || std::isnan(xl))
        throw PreconditionError("level_crossing_distance: level not crossed");
    return xl - xh;
}

struct TailFitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double x_lo = 0.0, x_hi = 0.0;
    double r_squared = 0.0;
    bool crossover_detected = false;
};

// Least-squares slope of log theta vs log x over an automatically selected
// window where the local log-log slope is stable (each sample within 0.1 of
// the window mean), at least two octaves wide, with |slope| >= 0.5; the
// rightmost such window wins.  Flags a crossover when some 5-sample region
// left of the window has mean |slope| < 1.5.  Constants documented in
// docs/formats.md.
inline TailFitResult tail_fit(const AngleField1D& f) {
    std::vector<double> lx, ly;
    const double x_stop = 0.85 * f.grid.x(f.n() - 1);
    for (int i = 0; i < f.n(); ++i) {
        const double x = f.grid.x(i);
        if (x < 0.5) continue;
        if (x > x_stop) break;
        if (f.theta[i] <= 0.0) break;
        lx.push_back(std::log(x));
        ly.push_back(std::log(f.theta[i]));
    }
    if (lx.size() < 16) throw PreconditionError("tail_fit: too little positive tail data");

    // log-spaced resample, ~200 points
    std::vector<int> pick;
    const int target = 200;
    const double l0 = lx.front(), l1 = lx.back();
    int last = -1;
    for (int k = 0; k < target; ++k) {
        const double want = l0 + (l1 - l0) * k / (target - 1);
        int idx = static_cast<int>(std::lower_bound(lx.begin(), lx.end(), want) - lx.begin());
        if (idx >= static_cast<int>(lx.size())) idx = static_cast<int>(lx.size()) - 1;
        if (idx != last) pick.push_back(idx), last = idx;
    }
    const int m = static_cast<int>(pick.size());
    if (m < 12) throw PreconditionError("tail_fit: too few resample points");

    std::vector<double> sl(static_cast<size_t>(m - 1)), smidx(static_cast<size_t>(m - 1));
    for (int k = 0; k + 1 < m; ++k) {
        const double dx = lx[pick[k + 1]] - lx[pick[k]];
        sl[k] = (ly[pick[k + 1]] - ly[pick[k]]) / dx;
        smidx[k] = 0.5 * (lx[pick[k]] + lx[pick[k + 1]]);
    }

    // greedy maximal stable runs
    struct Run {
        int a, b; // slope sample range [a, b]
        double mean;
    };
    std::vector<Run> runs;
    int a = 0;
    double mean = sl[0];
    for (int k = 1; k < m - 1; ++k) {
        const double cand = (mean * (k - a) + sl[k]) / (k - a + 1);
        bool ok = true;
        for (int q = a; q <= k; ++q)
            if (std::abs(sl[q] - cand) > 0.1) {
                ok = false;
                break;
            }
        if (ok) {
            mean = cand;
        } else {
            runs.push_back({a, k - 1, mean});
            a = k;
            mean = sl[k];
        }
    }
    runs.push_back({a, m - 2, mean});

    const Run* chosen = nullptr;
    for (const Run& r : runs) {
        const double xlo = std::exp(lx[pick[r.a]]);
        const double xhi = std::exp(lx[pick[r.b + 1]]);
        if (xhi / xlo >= 4.0 && std::abs(r.mean) >= 0.5) chosen = &r;
    }
    if (!chosen) throw PreconditionError("tail_fit: no stable algebraic window");

    TailFitResult out;
    out.x_lo = std::exp(lx[pick[chosen->a]]);
    out.x_hi = std::exp(lx[pick[chosen->b + 1]]);

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int cnt = 0;
    for (int k = chosen->a; k <= chosen->b + 1; ++k) {
        const double X = lx[pick[k]], Y = ly[pick[k]];
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        syy += Y * Y;
        ++cnt;
    }
    const double den = cnt * sxx - sx * sx;
    out.slope = (cnt * sxy - sx * sy) / den;
    out.intercept = (sy - out.slope * sx) / cnt;
    double ss_res = 0.0;
    const double ybar = sy / cnt;
    double ss_tot = 0.0;
    for (int k = chosen->a; k <= chosen->b + 1; ++k) {
        const double X = lx[pick[k]], Y = ly[pick[k]];
        const double e = Y - (out.slope * X + out.intercept);
        ss_res += e * e;
        ss_tot += (Y - ybar) * (Y - ybar);
    }
    out.r_squared = ss_tot > 0 ? std::max(0.0, std::min(1.0, 1.0 - ss_res / ss_tot)) : 1.0;

    const double lwin = lx[pick[chosen->a]];
    for (int k = 0; k + 4 < m - 1; ++k) {
        if (smidx[k + 4] >= lwin) break;
        double acc = 0.0;
        for (int q = k; q <= k + 4; ++q) acc += sl[q];
        if (std::abs(acc / 5.0) < 1.5) {
            out.crossover_detected = true;
            break;
        }
    }
    return out;
}

} // namespace fourfold
