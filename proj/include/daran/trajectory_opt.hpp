#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "daran/association.hpp"
#include "daran/channel.hpp"
#include "daran/errors.hpp"
#include "daran/geometry.hpp"
#include "daran/scenario.hpp"

namespace daran {

// Inputs for one slot's horizontal update: the two neighboring waypoints, the
// served AoI, the slot's current height and position, the speed limit, and
// the backhaul feasibility radius at that height (already clamped to the
// coverage disk).
struct SlotContext {
    Vec2 prev;
    Vec2 next;
    Vec2 target;
    Vec2 current;
    double height = 0.0;
    double v_max = 0.0;
    double d2b_radius = 0.0;
};

inline SlotContext make_slot_context(const Vec2& prev, const Vec2& next, const Vec2& target,
                                     const Vec2& current, double height, double v_max,
                                     const D2BEnvParams& env, double r_cap) {
    return {prev, next, target, current, height, v_max,
            d2b_feasible_horizontal_radius(height, env, r_cap)};
}

namespace detail {

inline Vec2 project_disk(const Vec2& p, const Vec2& center, double radius) {
    const Vec2 d = p - center;
    const double n = d.norm();
    if (n <= radius || n == 0.0) return p;
    return center + d * (radius / n);
}

}  // namespace detail

// Horizontal update for one slot: the projection of the served AoI center
// onto the intersection of three disks (reachable from the previous waypoint,
// able to reach the next one, inside the backhaul radius), computed with
// Dykstra's cyclic projections. Falls back to the current waypoint whenever
// the candidate would not move closer to the target, so the slot's pathloss
// never increases. Throws when the disks do not intersect.
inline Vec2 optimize_slot_position(const SlotContext& ctx) {
    const Vec2 centers[3] = {ctx.prev, ctx.next, Vec2{0.0, 0.0}};
    const double radii[3] = {ctx.v_max, ctx.v_max, ctx.d2b_radius};

    Vec2 x = ctx.target;
    Vec2 inc[3] = {{0, 0}, {0, 0}, {0, 0}};
    const double tol = 1e-6;
    for (int cycle = 0; cycle < 200; ++cycle) {
        const Vec2 before = x;
        for (int i = 0; i < 3; ++i) {
            const Vec2 y = x + inc[i];
            const Vec2 p = detail::project_disk(y, centers[i], radii[i]);
            inc[i] = y - p;
            x = p;
        }
        if (dist(before, x) <= tol && cycle > 0) break;
    }

    // The cyclic projections stall when two boundaries meet at a shallow
    // angle, so polish with the stationary-point candidates: the target's
    // projection onto each circle and the pairwise circle crossings. This
    // set contains the exact projection whenever the disks intersect.
    const auto excess = [&](const Vec2& p) {
        double e = 0.0;
        for (int i = 0; i < 3; ++i) e = std::max(e, dist(p, centers[i]) - radii[i]);
        return e;
    };
    Vec2 best = x;
    double best_d = dist(x, ctx.target);
    bool best_ok = excess(x) <= 1e-9;
    const auto consider = [&](const Vec2& c) {
        if (excess(c) > 1e-9) return;
        const double d = dist(c, ctx.target);
        if (!best_ok || d < best_d) {
            best = c;
            best_d = d;
            best_ok = true;
        }
    };
    consider(ctx.target);
    for (int i = 0; i < 3; ++i) {
        const Vec2 dv = ctx.target - centers[i];
        const double n = dv.norm();
        if (n > 1e-12) consider(centers[i] + dv * (radii[i] / n));
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const Vec2 dv = centers[j] - centers[i];
            const double L = dv.norm();
            if (L < 1e-12 || L > radii[i] + radii[j] + 1e-7) continue;
            const double a = (radii[i] * radii[i] - radii[j] * radii[j] + L * L) / (2.0 * L);
            double h2 = radii[i] * radii[i] - a * a;
            if (h2 < 0.0) {
                if (h2 < -1e-6 * radii[i] * radii[i]) continue;
                h2 = 0.0;
            }
            const double h = std::sqrt(h2);
            const Vec2 mid = centers[i] + dv * (a / L);
            const Vec2 perp{-dv.y / L, dv.x / L};
            consider(mid + perp * h);
            consider(mid + perp * (-h));
        }
    }
    x = best;

    double violation = 0.0;
    for (int i = 0; i < 3; ++i)
        violation = std::max(violation, dist(x, centers[i]) - radii[i]);
    if (violation > 1e-5)
        throw InfeasibleError(
            ConstraintClass::speed,
            "slot position: disks do not intersect (residual " + std::to_string(violation) +
                " m, speed slack " +
                std::to_string(std::max(dist(ctx.current, ctx.prev), dist(ctx.current, ctx.next)) -
                               ctx.v_max) +
                " m, backhaul slack " + std::to_string(ctx.current.norm() - ctx.d2b_radius) + " m)");

    if (dist(x, ctx.target) > dist(ctx.current, ctx.target) - 1e-12) return ctx.current;
    return x;
}

// Height for one slot at horizontal range r_du from the served AoI: ride the
// optimal elevation angle, clamped into the allowed bounds. Zero range means
// the drone hovers above the AoI, where lower is better.
inline double optimize_slot_height(double r_du, const HeightInterval& bounds, double theta_opt_deg) {
    if (bounds.empty || bounds.lower > bounds.upper)
        throw InfeasibleError(ConstraintClass::backhaul, "slot height: empty bounds");
    if (r_du < 0.0) throw std::invalid_argument("optimize_slot_height: negative range");
    if (r_du == 0.0) return bounds.lower;
    return std::clamp(r_du * tan_deg(theta_opt_deg), bounds.lower, bounds.upper);
}

namespace detail {

// Summed pathloss of one drone toward its per-slot targets.
inline double drone_objective(const Trajectory& traj, const std::vector<int>& target_aoi,
                              const Scenario& sc) {
    double acc = 0.0;
    for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
        const int u = target_aoi[i];
        if (u < 0) continue;
        const Vec3& w = traj.waypoints[i];
        acc += d2u_pathloss(hdist(w, sc.aois[u]), w.h, sc.d2u_env);
    }
    return acc;
}

}  // namespace detail

// One coordinate sweep over a single drone's trajectory under fixed slot
// targets: a full horizontal pass (slot order, neighbors from the partially
// updated cycle), then a full height pass, then a ceiling repair. Waypoints
// in a backhaul-infeasible pocket at their current height hold position and
// recover over later iterations. The repair clamps every height under the
// local backhaul ceiling and restores the climb-rate limit with a cyclic
// distance transform, which matters where the ceiling drops faster per slot
// than the drone may descend (outbound from the near-station chimney). If
// the sweep ever fails to improve the drone's summed pathloss, the input
// trajectory is kept, so the per-drone objective never increases.
inline void sweep_update(Trajectory& traj, const std::vector<int>& target_aoi,
                         const Scenario& sc, const D2BRegionCache& cache,
                         double theta_opt_deg) {
    const int n = sc.n_slots;
    if (static_cast<int>(traj.waypoints.size()) != n ||
        static_cast<int>(target_aoi.size()) != n)
        throw std::invalid_argument("sweep_update: slot count mismatch");

    const Trajectory snapshot = traj;
    auto& wp = traj.waypoints;
    for (int i = 0; i < n; ++i) {
        const int u = target_aoi[i];
        if (u < 0) continue;
        const double radius = std::min(cache.radius(wp[i].h), sc.r_bs);
        if (wp[i].xy().norm() > radius + 1e-6) continue;  // pocket: hold position
        SlotContext ctx{wp[(i + n - 1) % n].xy(), wp[(i + 1) % n].xy(), sc.aois[u],
                        wp[i].xy(), wp[i].h, sc.v_max, radius};
        const Vec2 pos = optimize_slot_position(ctx);
        wp[i].x = pos.x;
        wp[i].y = pos.y;
    }

    std::vector<HeightInterval> base(n);
    for (int i = 0; i < n; ++i) base[i] = effective_height_bounds(sc, wp[i].xy().norm());

    for (int i = 0; i < n; ++i) {
        const int u = target_aoi[i];
        if (u < 0 || base[i].empty) continue;
        const double h_prev = wp[(i + n - 1) % n].h;
        const double h_next = wp[(i + 1) % n].h;
        const double win_lo = std::max(h_prev, h_next) - sc.h_max_rate;
        const double win_hi = std::min(h_prev, h_next) + sc.h_max_rate;
        HeightInterval bounds;
        bounds.empty = false;
        bounds.lower = std::max(base[i].lower, win_lo);
        bounds.upper = std::min(base[i].upper, win_hi);
        if (bounds.lower > bounds.upper) {
            // Ceiling outside kinematic reach; move at full rate toward it.
            wp[i].h = (base[i].upper < win_lo) ? win_lo : win_hi;
            continue;
        }
        const double r_du = hdist(wp[i], sc.aois[u]);
        wp[i].h = optimize_slot_height(r_du, bounds, theta_opt_deg);
    }

    // Ceiling repair: cap each height, then restore the climb-rate Lipschitz
    // bound around the ring (two directed passes compute the exact cyclic
    // distance transform). Heights only move down here.
    for (int i = 0; i < n; ++i)
        if (!base[i].empty) wp[i].h = std::min(wp[i].h, base[i].upper);
    for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k < 2 * n; ++k) {
            const int i = k % n, j = (i + 1) % n;
            wp[j].h = std::min(wp[j].h, wp[i].h + sc.h_max_rate);
        }
        for (int k = 2 * n - 1; k >= 0; --k) {
            const int j = k % n, i = (j + 1) % n;
            wp[j].h = std::min(wp[j].h, wp[i].h + sc.h_max_rate);
        }
    }
    for (int i = 0; i < n; ++i)
        if (!base[i].empty) wp[i].h = std::max(wp[i].h, base[i].lower);

    if (detail::drone_objective(traj, target_aoi, sc) >
        detail::drone_objective(snapshot, target_aoi, sc) + 1e-12)
        traj = snapshot;
}

}  // namespace daran
