#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "daran/association.hpp"
#include "daran/channel.hpp"
#include "daran/errors.hpp"
#include "daran/rng.hpp"
#include "daran/scenario.hpp"
#include "daran/trajectory_opt.hpp"

namespace daran {

struct PlannerConfig {
    double epsilon_w = 0.1;      // waypoint-displacement stop threshold, m
    int max_iterations = 100;
    double init_radius = 1.0;    // initial holding-circle radius, m
    double init_height = 80.0;   // requested cruise height, capped by geometry, m
    int kmeans_restarts = 10;
    std::uint64_t seed = 0;
};

struct ObjectiveValue {
    double objective = 0.0;   // global normalization: sum / (n_slots * n_aois)
    double served_mean = 0.0; // sum / served slot count
};

struct PlanSolution {
    Association association;
    Schedule schedule;
    FleetPlan fleet_plan;
    double objective = 0.0;        // global normalization: sum / (n_slots * n_aois)
    double served_mean = 0.0;
    std::vector<double> objective_log;  // one entry per outer iteration
    bool converged = false;
    int iterations = 0;
};

// Mean pathloss of the fleet under a schedule: the global normalization
// divides by n_slots * n_aois, the served mean by the number of served slots.
inline ObjectiveValue objective_value(const Scenario& sc, const std::vector<Trajectory>& trajs,
                                      const Schedule& k) {
    double acc = 0.0;
    long served = 0;
    for (std::size_t d = 0; d < trajs.size(); ++d) {
        for (int nslot = 0; nslot < sc.n_slots; ++nslot) {
            const int u = k.served(static_cast<int>(d), nslot);
            if (u < 0) continue;
            const Vec3& w = trajs[d].waypoints[nslot];
            acc += d2u_pathloss(hdist(w, sc.aois[u]), w.h, sc.d2u_env);
            ++served;
        }
    }
    ObjectiveValue out;
    const long denom = static_cast<long>(sc.n_slots) * static_cast<long>(sc.aois.size());
    out.objective = denom > 0 ? acc / static_cast<double>(denom) : 0.0;
    out.served_mean = served > 0 ? acc / static_cast<double>(served) : 0.0;
    return out;
}

namespace detail {

// k-means++ over the AoI centers with the drone-to-user pathloss at a probe
// height as the distance measure. Restarts keep the lowest inertia.
inline std::vector<Vec2> kmeans_centers(const Scenario& sc, int k, double probe_h,
                                        int restarts, std::uint64_t seed) {
    const int n_u = static_cast<int>(sc.aois.size());
    std::vector<Vec2> best;
    double best_inertia = std::numeric_limits<double>::infinity();
    const auto pl = [&](const Vec2& a, const Vec2& b) {
        return d2u_pathloss(dist(a, b), probe_h, sc.d2u_env);
    };
    for (int rs = 0; rs < restarts; ++rs) {
        DetRng rng(derive_seed(seed, 0xC0DE + static_cast<std::uint64_t>(rs)));
        std::vector<Vec2> centers;
        centers.push_back(sc.aois[rng.index(n_u)]);
        std::vector<double> d2(n_u);
        while (static_cast<int>(centers.size()) < k) {
            for (int u = 0; u < n_u; ++u) {
                double m = std::numeric_limits<double>::infinity();
                for (const Vec2& c : centers) m = std::min(m, pl(sc.aois[u], c));
                d2[u] = m * m;
            }
            centers.push_back(sc.aois[rng.weighted_index(d2)]);
        }
        std::vector<int> owner(n_u, 0);
        for (int it = 0; it < 50; ++it) {
            bool moved = false;
            for (int u = 0; u < n_u; ++u) {
                int bestc = 0;
                double bd = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < centers.size(); ++c) {
                    const double v = pl(sc.aois[u], centers[c]);
                    if (v < bd) { bd = v; bestc = static_cast<int>(c); }
                }
                if (owner[u] != bestc) { owner[u] = bestc; moved = true; }
            }
            for (std::size_t c = 0; c < centers.size(); ++c) {
                Vec2 acc{0, 0};
                int cnt = 0;
                for (int u = 0; u < n_u; ++u)
                    if (owner[u] == static_cast<int>(c)) { acc = acc + sc.aois[u]; ++cnt; }
                if (cnt > 0) centers[c] = acc * (1.0 / cnt);
                else {
                    // Empty cluster: grab the AoI farthest from its center.
                    int far_u = 0;
                    double far_d = -1.0;
                    for (int u = 0; u < n_u; ++u) {
                        const double v = pl(sc.aois[u], centers[owner[u]]);
                        if (v > far_d) { far_d = v; far_u = u; }
                    }
                    centers[c] = sc.aois[far_u];
                    owner[far_u] = static_cast<int>(c);
                    moved = true;
                }
            }
            if (!moved) break;
        }
        double inertia = 0.0;
        for (int u = 0; u < n_u; ++u) inertia += pl(sc.aois[u], centers[owner[u]]);
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best = centers;
        }
    }
    return best;
}

}  // namespace detail

// Initial fleet: small holding circles at clustered AoI centers, flown at the
// requested cruise height capped by the lowest backhaul ceiling across the
// disk (so no drone starts pinned under a locally generous ceiling it could
// not carry along). Surplus drones beyond the AoI count park near the
// station. Every returned trajectory passes validate_trajectory.
inline std::vector<Trajectory> initial_trajectories(const Scenario& sc,
                                                    const PlannerConfig& cfg,
                                                    const D2BRegionCache& cache) {
    sc.validate();
    const int n_u = static_cast<int>(sc.aois.size());
    const int k = std::min(sc.n_drones, n_u);
    std::vector<Vec2> centers;
    if (k > 0)
        centers = detail::kmeans_centers(sc, k, cfg.init_height, cfg.kmeans_restarts, cfg.seed);
    for (int extra = 0; static_cast<int>(centers.size()) < sc.n_drones; ++extra)
        centers.push_back({4.0 * cfg.init_radius * (extra + 1), 0.0});

    const double cruise_cap = cache.min_ceiling();
    std::vector<Trajectory> out(sc.n_drones);
    for (int d = 0; d < sc.n_drones; ++d) {
        out[d].drone_id = d;
        out[d].waypoints.resize(sc.n_slots);
        for (int i = 0; i < sc.n_slots; ++i) {
            const double ang = 2.0 * kPi * i / sc.n_slots;
            Vec2 p = centers[d] + Vec2{std::cos(ang), std::sin(ang)} * cfg.init_radius;
            const double pn = p.norm();
            if (pn > sc.r_bs) p = p * (sc.r_bs / pn);
            const HeightInterval b = effective_height_bounds(sc, p.norm());
            if (b.empty)
                throw InfeasibleError(ConstraintClass::backhaul,
                                      "initial circle outside backhaul coverage");
            const double h = std::clamp(std::min(cfg.init_height, cruise_cap), b.lower, b.upper);
            out[d].waypoints[i] = {p.x, p.y, h};
        }
    }
    return out;
}

// Start-slot offsets keeping every drone pair at least z_min apart in every
// global slot. Greedy per drone over all candidate offsets, restarting with
// the first drone's offset advanced when a later drone cannot be placed.
inline std::vector<int> schedule_start_slots(const std::vector<Trajectory>& trajs,
                                             double z_min, int n_slots) {
    const int nd = static_cast<int>(trajs.size());
    std::vector<int> offsets(nd, 0);
    if (nd <= 1) return offsets;
    for (const Trajectory& t : trajs)
        if (static_cast<int>(t.waypoints.size()) != n_slots)
            throw std::invalid_argument("schedule_start_slots: slot count mismatch");

    // min_table[i][j][delta]: closest approach of drones i and j over the
    // cycle when j's waypoints are read delta slots ahead of i's.
    std::vector<std::vector<std::vector<double>>> min_table(
        nd, std::vector<std::vector<double>>(nd));
    for (int i = 0; i < nd; ++i) {
        for (int j = i + 1; j < nd; ++j) {
            min_table[i][j].assign(n_slots, std::numeric_limits<double>::infinity());
            for (int delta = 0; delta < n_slots; ++delta) {
                double m = std::numeric_limits<double>::infinity();
                for (int s = 0; s < n_slots; ++s)
                    m = std::min(m, dist3(trajs[i].waypoints[s],
                                          trajs[j].waypoints[(s + delta) % n_slots]));
                min_table[i][j][delta] = m;
            }
        }
    }
    // Drone i at offset a and drone j at offset b (j later in placement
    // order) stay separated iff min_table[i][j][(a - b) mod n] >= z_min:
    // global slot g reads i at (g - a) and j at (g - b) = (g - a) + (a - b).
    const auto pair_ok = [&](int i, int a, int j, int b) {
        const int delta = ((a - b) % n_slots + n_slots) % n_slots;
        return min_table[i][j][delta] >= z_min;
    };

    for (int first = 0; first < n_slots; ++first) {
        offsets[0] = first;
        bool ok = true;
        for (int d = 1; d < nd && ok; ++d) {
            bool placed = false;
            for (int cand = 0; cand < n_slots && !placed; ++cand) {
                bool fits = true;
                for (int p = 0; p < d && fits; ++p)
                    fits = pair_ok(p, offsets[p], d, cand);
                if (fits) {
                    offsets[d] = cand;
                    placed = true;
                }
            }
            ok = placed;
        }
        if (ok) return offsets;
    }
    throw InfeasibleError(ConstraintClass::separation,
                          "no start-slot offsets reach the required separation");
}

// Block-coordinate descent: association, schedule, horizontal sweep, height
// sweep, iterated until the largest waypoint displacement falls under
// epsilon_w. The association step minimizes a whole-cycle surrogate, so two
// guards keep the reported objective non-increasing: a failed association
// update falls back to the previous ownership (rescheduled on the current
// trajectories), and a failed full iteration is rolled back entirely and
// treated as a fixed point. Start slots are assigned once at the end.
inline PlanSolution plan(const Scenario& sc, const PlannerConfig& cfg = PlannerConfig{}) {
    sc.validate();
    const int eff_cap = std::min(sc.capacity, sc.n_slots / sc.s_min);
    if (static_cast<long>(eff_cap) * sc.n_drones < static_cast<long>(sc.aois.size()))
        throw InfeasibleError(ConstraintClass::capacity,
                              "fleet cannot cover all AoIs under the effective capacity");

    const auto cache_ptr = shared_region_cache(sc.d2b_env, sc.r_bs);
    const D2BRegionCache& cache = *cache_ptr;
    const double theta_opt = optimal_elevation_angle(sc.d2u_env);
    std::vector<Trajectory> w = initial_trajectories(sc, cfg, cache);

    PlanSolution sol;
    Association assoc;
    Schedule sched;
    double prev_obj = std::numeric_limits<double>::infinity();
    bool have_state = false;

    for (int it = 0; it < cfg.max_iterations; ++it) {
        Association a_new = optimize_association(sc, w);
        Schedule k_new = optimize_schedule(sc, w, a_new);
        if (have_state && objective_value(sc, w, k_new).objective > prev_obj + 1e-12) {
            a_new = assoc;  // surrogate regressed; reschedule under the old ownership
            k_new = optimize_schedule(sc, w, a_new);
        }

        const std::vector<Trajectory> w_before = w;
        const auto per_drone_targets = [&](int d) { return k_new.served_table[d]; };
        for (int d = 0; d < sc.n_drones; ++d) {
            bool loaded = false;
            for (int s = 0; s < sc.n_slots; ++s)
                if (k_new.served(d, s) >= 0) loaded = true;
            if (loaded) sweep_update(w[d], per_drone_targets(d), sc, cache, theta_opt);
        }

        double delta_w = 0.0;
        for (int d = 0; d < sc.n_drones; ++d)
            for (int s = 0; s < sc.n_slots; ++s)
                delta_w = std::max(delta_w, dist3(w[d].waypoints[s], w_before[d].waypoints[s]));

        const double obj = objective_value(sc, w, k_new).objective;
        if (have_state && obj > prev_obj + 1e-12) {
            // A ceiling repair raised the objective past the previous iterate;
            // roll back and stop at the previous fixed point.
            w = w_before;
            break;
        }
        assoc = a_new;
        sched = k_new;
        prev_obj = obj;
        have_state = true;
        sol.objective_log.push_back(obj);
        sol.iterations = it + 1;
        if (delta_w <= cfg.epsilon_w) {
            sol.converged = true;
            break;
        }
    }

    sol.association = assoc;
    sol.schedule = sched;
    sol.fleet_plan.trajectories = w;
    sol.fleet_plan.start_slots = schedule_start_slots(w, sc.z_min, sc.n_slots);
    const ObjectiveValue ov = objective_value(sc, w, sched);
    sol.objective = ov.objective;
    sol.served_mean = ov.served_mean;
    return sol;
}

}  // namespace daran
