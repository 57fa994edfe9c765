#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "fourfold/field.hpp"

namespace fourfold {

enum class StateLabel { C, S, HalfLandau, Monodomain, SplitWalls, Unclassified };

inline const char* to_string(StateLabel s) {
    switch (s) {
        case StateLabel::C: return "C";
        case StateLabel::S: return "S";
        case StateLabel::HalfLandau: return "HalfLandau";
        case StateLabel::Monodomain: return "Monodomain";
        case StateLabel::SplitWalls: return "SplitWalls";
        default: return "Unclassified";
    }
}

inline double wrap_pi(double a) {
    a = std::fmod(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    if (a > pi) a -= 2.0 * pi;
    return a;
}

// Boundary ring of cell indices, counterclockwise from the bottom-left cell.
inline std::vector<size_t> boundary_ring(const Grid2D& g) {
    std::vector<size_t> ring;
    ring.reserve(2 * (g.nx + g.ny));
    for (int i = 0; i < g.nx; ++i) ring.push_back(static_cast<size_t>(0) * g.nx + i);
    for (int j = 1; j < g.ny; ++j) ring.push_back(static_cast<size_t>(j) * g.nx + (g.nx - 1));
    for (int i = g.nx - 2; i >= 0; --i) ring.push_back(static_cast<size_t>(g.ny - 1) * g.nx + i);
    for (int j = g.ny - 2; j >= 1; --j) ring.push_back(static_cast<size_t>(j) * g.nx + 0);
    return ring;
}

struct BoundaryVortex {
    double x = 0.0, y = 0.0;  // event center, sample coordinates
    double rotation = 0.0;    // tangent-relative rotation across the arc (radians)
    int quarter_turns = 0;    // rotation rounded to multiples of pi/2
};

// Winding number of theta along the closed boundary walk (full turns).
inline int boundary_degree(const AngleField2D& f) {
    const std::vector<size_t> ring = boundary_ring(f.grid);
    double acc = 0.0;
    const size_t L = ring.size();
    for (size_t k = 0; k < L; ++k) acc += wrap_pi(f.theta[ring[(k + 1) % L]] - f.theta[ring[k]]);
    return static_cast<int>(std::lround(acc / (2.0 * pi)));
}

// Localized arcs along the boundary walk where the magnetization angle
// measured against the local boundary tangent rotates by at least 0.7*pi
// within a sliding window of 6 length units.  The tangent turns by pi/2 at
// each corner cell, so a plain corner reads a quarter turn and stays quiet,
// while a 90-degree wall terminating at a corner reads a half turn and
// registers.  Runs of triggered windows merge into one arc; the reported
// rotation is the strongest contiguous swing inside the arc and the position
// is the |increment|-weighted centroid of that swing.  Constants documented
// in docs/formats.md.
inline std::vector<BoundaryVortex> boundary_vortex_scan(const AngleField2D& f) {
    const Grid2D& g = f.grid;
    const std::vector<size_t> ring = boundary_ring(g);
    const size_t L = ring.size();
    auto is_corner = [&g](size_t cell) {
        const int i = static_cast<int>(cell % g.nx);
        const int j = static_cast<int>(cell / g.nx);
        return (i == 0 || i == g.nx - 1) && (j == 0 || j == g.ny - 1);
    };
    std::vector<double> u(L);
    for (size_t k = 0; k < L; ++k) {
        u[k] = wrap_pi(f.theta[ring[(k + 1) % L]] - f.theta[ring[k]]);
        if (is_corner(ring[k])) u[k] -= 0.5 * pi;
    }

    const size_t w =
        std::min(std::max<size_t>(3, static_cast<size_t>(std::lround(6.0 / g.h))), L / 4);
    const double trigger = 0.7 * pi;
    std::vector<double> win(L, 0.0);
    for (size_t k = 0; k < L; ++k) {
        double s = 0.0;
        for (size_t q = 0; q < w; ++q) s += u[(k + q) % L];
        win[k] = s;
    }

    // start the cyclic scan at the quietest window
    size_t k0 = 0;
    for (size_t k = 1; k < L; ++k)
        if (std::abs(win[k]) < std::abs(win[k0])) k0 = k;

    std::vector<BoundaryVortex> out;
    size_t k = 0;
    while (k < L) {
        if (std::abs(win[(k0 + k) % L]) < trigger) {
            ++k;
            continue;
        }
        size_t run_end = k;
        while (run_end + 1 < L && std::abs(win[(k0 + run_end + 1) % L]) >= trigger) ++run_end;
        const size_t first = (k0 + k) % L;
        const size_t nsteps = std::min(run_end - k + w, L);
        std::vector<double> pre(nsteps + 1, 0.0);
        for (size_t q = 0; q < nsteps; ++q) pre[q + 1] = pre[q] + u[(first + q) % L];
        double hi = 0.0, lo = 0.0;
        size_t hi_a = 0, hi_b = 0, lo_a = 0, lo_b = 0;
        size_t amin = 0, amax = 0;
        for (size_t b = 1; b <= nsteps; ++b) {
            if (pre[b] - pre[amin] > hi) { hi = pre[b] - pre[amin]; hi_a = amin; hi_b = b; }
            if (pre[b] - pre[amax] < lo) { lo = pre[b] - pre[amax]; lo_a = amax; lo_b = b; }
            if (pre[b] < pre[amin]) amin = b;
            if (pre[b] > pre[amax]) amax = b;
        }
        const bool downward = -lo > hi;
        const double rot = downward ? lo : hi;
        const size_t sa = downward ? lo_a : hi_a;
        const size_t sb = downward ? lo_b : hi_b;
        double wsum = 0.0, cx = 0.0, cy = 0.0;
        for (size_t q = sa; q < sb; ++q) {
            const size_t s = (first + q) % L;
            const double wt = std::abs(u[s]);
            wsum += wt;
            cx += wt * g.xc(static_cast<int>(ring[s] % g.nx));
            cy += wt * g.yc(static_cast<int>(ring[s] / g.nx));
        }
        if (std::abs(rot) >= trigger && wsum > 0.0) {
            BoundaryVortex v;
            v.x = cx / wsum;
            v.y = cy / wsum;
            v.rotation = rot;
            v.quarter_turns = static_cast<int>(std::lround(rot / (0.5 * pi)));
            out.push_back(v);
        }
        k = run_end + w;
    }
    return out;
}

struct DomainStat {
    int k4 = 0;          // easy-axis index mod 4 (theta near k*pi/2)
    double mean_k = 0.0; // unreduced mean of round(theta/(pi/2))
    size_t cells = 0;
    double mean_x = 0.0, mean_y = 0.0;
    size_t bottom_half = 0, top_half = 0;
};

struct StateReport {
    StateLabel label = StateLabel::Unclassified;
    double concentration = 0.0; // fraction of all cells aligned with the modal axis
    int modal_k4 = 0;
    double edge_dev_a = 0.0, edge_dev_b = 0.0; // short-edge strip deviations (signed)
    std::vector<DomainStat> domains;           // by size, descending
    std::vector<BoundaryVortex> vortices;
    int degree = 0;
};

// Feature-based labeling per the constants table in docs/formats.md:
// alignment threshold pi/6, near-monodomain concentration 0.8, edge strips
// one length unit deep along the two short edges, half-Landau when the
// middle domain of a three-domain sequence sits mostly in one vertical half.
inline StateReport classify_state_2d(const AngleField2D& f) {
    const Grid2D& g = f.grid;
    StateReport rep;
    rep.vortices = boundary_vortex_scan(f);
    rep.degree = boundary_degree(f);

    const size_t cells = f.theta.size();
    std::vector<int> kidx(cells);
    std::vector<double> dev(cells);
    std::map<int, DomainStat> by_k4;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const size_t c = static_cast<size_t>(j) * g.nx + i;
            const int k = static_cast<int>(std::lround(f.theta[c] / (0.5 * pi)));
            kidx[c] = k;
            dev[c] = f.theta[c] - k * 0.5 * pi;
            if (std::abs(dev[c]) < pi / 6.0) {
                DomainStat& ds = by_k4[((k % 4) + 4) % 4];
                ds.k4 = ((k % 4) + 4) % 4;
                ds.mean_k += k;
                ds.cells += 1;
                ds.mean_x += g.xc(i);
                ds.mean_y += g.yc(j);
                if (g.yc(j) < 0.5 * g.ly()) ds.bottom_half += 1;
                else ds.top_half += 1;
            }
        }
    for (auto& [k4, ds] : by_k4) {
        ds.mean_k /= static_cast<double>(ds.cells);
        ds.mean_x /= static_cast<double>(ds.cells);
        ds.mean_y /= static_cast<double>(ds.cells);
        rep.domains.push_back(ds);
    }
    std::sort(rep.domains.begin(), rep.domains.end(),
              [](const DomainStat& a, const DomainStat& b) { return a.cells > b.cells; });
    if (rep.domains.empty()) return rep;

    rep.modal_k4 = rep.domains.front().k4;
    rep.concentration = static_cast<double>(rep.domains.front().cells) / static_cast<double>(cells);
    const double modal_angle = rep.domains.front().mean_k * 0.5 * pi;

    if (rep.concentration >= 0.8) {
        // near-monodomain family: measure the two short-edge strips
        const int depth = std::max(2, static_cast<int>(std::lround(1.0 / g.h)));
        double da = 0.0, db = 0.0;
        size_t na = 0, nb = 0;
        if (g.lx() <= g.ly()) {
            for (int j = 0; j < std::min(depth, g.ny); ++j)
                for (int i = 0; i < g.nx; ++i) {
                    da += wrap_pi(f.at(i, j) - modal_angle);
                    ++na;
                }
            for (int j = std::max(0, g.ny - depth); j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    db += wrap_pi(f.at(i, j) - modal_angle);
                    ++nb;
                }
        } else {
            for (int i = 0; i < std::min(depth, g.nx); ++i)
                for (int j = 0; j < g.ny; ++j) {
                    da += wrap_pi(f.at(i, j) - modal_angle);
                    ++na;
                }
            for (int i = std::max(0, g.nx - depth); i < g.nx; ++i)
                for (int j = 0; j < g.ny; ++j) {
                    db += wrap_pi(f.at(i, j) - modal_angle);
                    ++nb;
                }
        }
        rep.edge_dev_a = da / static_cast<double>(na);
        rep.edge_dev_b = db / static_cast<double>(nb);
        const double thresh = pi / 6.0;
        const bool ea = std::abs(rep.edge_dev_a) >= thresh;
        const bool eb = std::abs(rep.edge_dev_b) >= thresh;
        if (!ea && !eb) rep.label = StateLabel::Monodomain;
        else if (ea && eb)
            rep.label = (rep.edge_dev_a * rep.edge_dev_b < 0) ? StateLabel::C : StateLabel::S;
        else
            rep.label = StateLabel::Unclassified;
        return rep;
    }

    // multi-domain: look for a three-domain horizontal sequence with 90-degree
    // angular steps (pi, pi/2, 0 from a split 180-degree wall); thin edge
    // strips below the size floor are ignored
    std::vector<DomainStat> big;
    for (const DomainStat& ds : rep.domains)
        if (static_cast<double>(ds.cells) / static_cast<double>(cells) >= 0.05) big.push_back(ds);
    if (big.size() >= 3) {
        big.resize(3);
        std::sort(big.begin(), big.end(),
                  [](const DomainStat& a, const DomainStat& b) { return a.mean_x < b.mean_x; });
        const double al = big[0].mean_k * 0.5 * pi;
        const double am = big[1].mean_k * 0.5 * pi;
        const double ar = big[2].mean_k * 0.5 * pi;
        const bool ninety_steps = std::abs(std::abs(al - am) - 0.5 * pi) < 0.26 &&
                                  std::abs(std::abs(am - ar) - 0.5 * pi) < 0.26;
        if (ninety_steps) {
            const DomainStat& mid = big[1];
            const double tot = static_cast<double>(mid.bottom_half + mid.top_half);
            const double imbalance =
                std::abs(static_cast<double>(mid.bottom_half) - static_cast<double>(mid.top_half)) / tot;
            rep.label = imbalance >= 0.35 ? StateLabel::HalfLandau : StateLabel::SplitWalls;
            return rep;
        }
    }
    rep.label = StateLabel::Unclassified;
    return rep;
}

} // namespace fourfold
