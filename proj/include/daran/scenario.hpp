#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "daran/channel.hpp"
#include "daran/errors.hpp"
#include "daran/geometry.hpp"
#include "daran/rng.hpp"

namespace daran {

// One planning instance: coverage geometry, user areas of interest (AoIs),
// fleet and slot counts, kinematic and scheduling limits, channel envs.
struct Scenario {
    double r_bs = 900.0;      // coverage disk radius around the base station, m
    double grid_len = 20.0;   // AoI grid cell edge, m
    std::vector<Vec2> aois;   // AoI cell centers, base station at the origin
    int n_drones = 5;
    int n_slots = 60;
    double v_max = 90.0;      // per-slot horizontal speed limit, m
    double h_max_rate = 10.0; // per-slot climb/descent limit, m
    double z_min = 200.0;     // pairwise drone separation, m
    int s_min = 10;           // minimum slots per served AoI
    int capacity = 6;         // max AoIs per drone
    double h_min = 20.0;      // operating altitude floor, m (planner policy)
    D2UEnvParams d2u_env = D2UEnvParams::suburban();
    D2BEnvParams d2b_env = D2BEnvParams::suburban();
    std::uint64_t seed = 0;

    void validate() const {
        if (!(r_bs > 0.0)) throw std::invalid_argument("Scenario: r_bs must be positive");
        if (!(grid_len > 0.0)) throw std::invalid_argument("Scenario: grid_len must be positive");
        if (n_drones < 1) throw std::invalid_argument("Scenario: need at least one drone");
        if (n_slots < 1) throw std::invalid_argument("Scenario: need at least one slot");
        if (s_min < 1 || s_min > n_slots)
            throw std::invalid_argument("Scenario: s_min outside [1, n_slots]");
        if (capacity < 1) throw std::invalid_argument("Scenario: capacity must be positive");
        if (!(v_max >= 0.0) || !(h_max_rate >= 0.0) || !(z_min >= 0.0) || !(h_min >= 0.0))
            throw std::invalid_argument("Scenario: negative limit");
        d2u_env.validate();
        d2b_env.validate();
        for (const Vec2& u : aois)
            if (u.norm() > r_bs + 1e-9)
                throw std::invalid_argument("Scenario: AoI outside the coverage disk");
    }
};

// Cyclic per-slot waypoint list for one drone.
struct Trajectory {
    int drone_id = 0;
    std::vector<Vec3> waypoints;  // one per slot; slot n wraps to slot 0
};

// Fleet trajectories plus start-slot offsets. A drone with start slot s is at
// waypoint (n - s) mod n_slots during global slot n, so offsets rotate the
// whole cycle without changing the set of visited points.
struct FleetPlan {
    std::vector<Trajectory> trajectories;
    std::vector<int> start_slots;
};

// All grid cell centers falling inside the coverage disk, sorted by (x, y).
inline std::vector<Vec2> coverage_cells(double r_bs, double grid_len) {
    std::vector<Vec2> cells;
    const int k = static_cast<int>(std::ceil(r_bs / grid_len)) + 1;
    for (int i = -k; i <= k; ++i) {
        for (int j = -k; j <= k; ++j) {
            const Vec2 c{(i + 0.5) * grid_len, (j + 0.5) * grid_len};
            if (c.norm() <= r_bs) cells.push_back(c);
        }
    }
    std::sort(cells.begin(), cells.end(), [](const Vec2& a, const Vec2& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    return cells;
}

// Deterministic scenario draw: n_aois distinct grid cells sampled without
// replacement from the coverage disk. Geometry, limits and channel envs come
// from the template; its AoI list is ignored.
inline Scenario generate_scenario(std::uint64_t seed, int n_aois, int n_drones,
                                  const Scenario& tmpl = Scenario{}) {
    if (n_aois < 0) throw std::invalid_argument("generate_scenario: negative AoI count");
    Scenario s = tmpl;
    s.seed = seed;
    s.n_drones = n_drones;
    s.aois.clear();
    std::vector<Vec2> cells = coverage_cells(s.r_bs, s.grid_len);
    if (static_cast<std::size_t>(n_aois) > cells.size())
        throw std::invalid_argument("generate_scenario: more AoIs than grid cells");
    DetRng rng(derive_seed(seed, 0xA015ULL));
    rng.shuffle(cells);
    s.aois.assign(cells.begin(), cells.begin() + n_aois);
    s.validate();
    return s;
}

// 3D distance between two drones' waypoints at the same global slot, given
// their start-slot offsets.
inline double slot_3d_distance(const Trajectory& a, int start_a, const Trajectory& b,
                               int start_b, int slot) {
    const int n = static_cast<int>(a.waypoints.size());
    const int m = static_cast<int>(b.waypoints.size());
    if (n == 0 || m == 0) throw std::invalid_argument("slot_3d_distance: empty trajectory");
    const int ia = ((slot - start_a) % n + n) % n;
    const int ib = ((slot - start_b) % m + m) % m;
    return dist3(a.waypoints[ia], b.waypoints[ib]);
}

struct Violation {
    ConstraintClass cls;
    int slot;
    std::string detail;
};

// Checks one trajectory against the per-drone constraints: cyclic closure
// (implicit in the wrap), horizontal speed, climb rate, and the backhaul
// pathloss cap at every waypoint. Tolerance 1e-6 m on the geometric limits.
inline std::vector<Violation> validate_trajectory(const Trajectory& t, const Scenario& sc) {
    std::vector<Violation> out;
    const int n = static_cast<int>(t.waypoints.size());
    if (n != sc.n_slots) {
        out.push_back({ConstraintClass::structure, -1,
                       "waypoint count " + std::to_string(n) + " != n_slots"});
        return out;
    }
    const double tol = 1e-6;
    for (int i = 0; i < n; ++i) {
        const Vec3& cur = t.waypoints[i];
        const Vec3& nxt = t.waypoints[(i + 1) % n];
        const double hstep = dist(cur.xy(), nxt.xy());
        if (hstep > sc.v_max + tol)
            out.push_back({ConstraintClass::speed, i,
                           "horizontal step " + std::to_string(hstep)});
        const double vstep = std::abs(nxt.h - cur.h);
        if (vstep > sc.h_max_rate + tol)
            out.push_back({ConstraintClass::climb_rate, i,
                           "vertical step " + std::to_string(vstep)});
        const double r_db = cur.xy().norm();
        const HeightInterval iv = d2b_feasible_height_interval(std::max(r_db, 1e-9), sc.d2b_env);
        if (!iv.contains(cur.h, tol))
            out.push_back({ConstraintClass::backhaul, i,
                           "height " + std::to_string(cur.h) + " outside backhaul bounds"});
        if (cur.h < -tol)
            out.push_back({ConstraintClass::structure, i, "negative height"});
    }
    return out;
}

// Minimum pairwise 3D distance over all global slots under the plan's start
// slots. +inf for fewer than two drones.
inline double validate_separation(const FleetPlan& plan, const Scenario& sc) {
    const int d = static_cast<int>(plan.trajectories.size());
    if (static_cast<int>(plan.start_slots.size()) != d)
        throw std::invalid_argument("validate_separation: start slot count mismatch");
    if (d < 2) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (int n = 0; n < sc.n_slots; ++n)
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                best = std::min(best, slot_3d_distance(plan.trajectories[i], plan.start_slots[i],
                                                       plan.trajectories[j], plan.start_slots[j], n));
    return best;
}

// Height bounds the planner actually uses at horizontal range r_db: the
// backhaul interval with the altitude floor applied. The floor yields to the
// ceiling when they conflict, so a nonempty backhaul interval stays nonempty.
inline HeightInterval effective_height_bounds(const Scenario& sc, double r_db) {
    const HeightInterval iv = d2b_feasible_height_interval(std::max(r_db, 1e-9), sc.d2b_env);
    if (iv.empty) return iv;
    HeightInterval out = iv;
    out.lower = std::max(iv.lower, std::min(sc.h_min, iv.upper));
    return out;
}

}  // namespace daran
