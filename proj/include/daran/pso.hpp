#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "daran/association.hpp"
#include "daran/channel.hpp"
#include "daran/errors.hpp"
#include "daran/planner.hpp"
#include "daran/rng.hpp"
#include "daran/scenario.hpp"

namespace daran {

struct PsoParams {
    int swarm = 40;
    double inertia = 0.72;
    double cognitive = 1.49;
    double social = 1.49;
    int iterations = 300;
    int placement_rounds = 5;
    std::uint64_t seed = 0;
};

// Static hovering deployment: one fixed position per drone, AoIs time-shared
// through the same block schedules as the mobile planner.
struct StaticDeployment {
    std::vector<Vec3> positions;
    Association association;
    double objective = 0.0;     // global normalization: sum / (n_slots * n_aois)
    double served_mean = 0.0;

    // Broadcast to the common solution form: constant trajectories plus the
    // exact block schedule for the fixed positions.
    PlanSolution to_plan_solution(const Scenario& sc) const {
        PlanSolution sol;
        sol.fleet_plan.trajectories.resize(positions.size());
        for (std::size_t d = 0; d < positions.size(); ++d) {
            sol.fleet_plan.trajectories[d].drone_id = static_cast<int>(d);
            sol.fleet_plan.trajectories[d].waypoints.assign(sc.n_slots, positions[d]);
        }
        sol.fleet_plan.start_slots.assign(positions.size(), 0);
        sol.association = association;
        sol.schedule = optimize_schedule(sc, sol.fleet_plan.trajectories, association);
        const ObjectiveValue ov = objective_value(sc, sol.fleet_plan.trajectories, sol.schedule);
        sol.objective = ov.objective;
        sol.served_mean = ov.served_mean;
        sol.converged = true;
        sol.iterations = 0;
        return sol;
    }
};

namespace detail {

struct StaticEval {
    double objective = 0.0;   // global normalization: sum / (n_slots * n_aois)
    double served_mean = 0.0;
};

// Globally normalized objective of a static deployment under the canonical block
// time-sharing for a given ownership.
inline StaticEval static_objective(const Scenario& sc, const std::vector<Vec3>& pos,
                                   const Association& assoc) {
    const auto per_drone = assoc.aois_of(static_cast<int>(pos.size()));
    double acc = 0.0;
    long served = 0;
    for (std::size_t d = 0; d < pos.size(); ++d) {
        const auto& owned = per_drone[d];
        if (owned.empty()) continue;
        // Blocks always sum to the full cycle; the block -> AoI matching does
        // not change the summed cost ordering per AoI, so assign the longer
        // blocks to the lower-loss AoIs (exactly what the schedule step does).
        std::vector<double> pl(owned.size());
        for (std::size_t j = 0; j < owned.size(); ++j)
            pl[j] = d2u_pathloss(hdist(pos[d], sc.aois[owned[j]]), pos[d].h, sc.d2u_env);
        std::vector<double> sorted_pl = pl;
        std::sort(sorted_pl.begin(), sorted_pl.end());
        std::vector<int> lens = blocks_for(sc.n_slots, static_cast<int>(owned.size()));
        // lens is big-first; pair with ascending pathloss.
        for (std::size_t j = 0; j < owned.size(); ++j) acc += lens[j] * sorted_pl[j];
        served += sc.n_slots;
    }
    StaticEval out;
    const long denom = static_cast<long>(sc.n_slots) * static_cast<long>(sc.aois.size());
    out.objective = denom > 0 ? acc / static_cast<double>(denom) : 0.0;
    out.served_mean = served > 0 ? acc / static_cast<double>(served) : 0.0;
    return out;
}

inline CostMatrix static_cost(const Scenario& sc, const std::vector<Vec3>& pos) {
    CostMatrix c(static_cast<int>(pos.size()), static_cast<int>(sc.aois.size()));
    for (int d = 0; d < c.rows; ++d)
        for (int u = 0; u < c.cols; ++u)
            c.at(d, u) = d2u_pathloss(hdist(pos[d], sc.aois[u]), pos[d].h, sc.d2u_env);
    return c;
}

}  // namespace detail

// Particle-swarm placement of static hovering drones, iterated drone by
// drone with the ownership re-solved after each move, up to
// placement_rounds or until no drone moves. Each swarm is anchored at the
// drone's current position, so the deployment objective never worsens; the
// best (positions, ownership) pair ever seen is returned.
inline StaticDeployment plan_static_pso(const Scenario& sc, const PsoParams& params = PsoParams{}) {
    sc.validate();
    const int eff_cap = std::min(sc.capacity, sc.n_slots / sc.s_min);
    if (static_cast<long>(eff_cap) * sc.n_drones < static_cast<long>(sc.aois.size()))
        throw InfeasibleError(ConstraintClass::capacity,
                              "fleet cannot cover all AoIs under the effective capacity");

    const auto cache_ptr = shared_region_cache(sc.d2b_env, sc.r_bs);
    const D2BRegionCache& cache = *cache_ptr;
    const double grid_margin = 0.25;  // in-cell ceiling variation bound, m

    // Clamp a candidate into the coverage disk and under the (margin-pulled)
    // backhaul ceiling, floor applied.
    const auto project_fast = [&](Vec3 p) {
        const double rn = std::hypot(p.x, p.y);
        if (rn > sc.r_bs) {
            p.x *= sc.r_bs / rn;
            p.y *= sc.r_bs / rn;
        }
        const double r = std::hypot(p.x, p.y);
        const double hi = cache.ceiling_at(r, grid_margin);
        const double lo = std::min(sc.h_min, std::max(hi, 0.0));
        p.h = std::clamp(p.h, lo, std::max(hi, lo));
        return p;
    };
    const auto project_exact = [&](Vec3 p) {
        const double rn = std::hypot(p.x, p.y);
        if (rn > sc.r_bs) {
            p.x *= sc.r_bs / rn;
            p.y *= sc.r_bs / rn;
        }
        const HeightInterval b = effective_height_bounds(sc, std::hypot(p.x, p.y));
        if (!b.empty) p.h = std::clamp(p.h, b.lower, b.upper);
        return p;
    };

    const int nd = sc.n_drones;
    std::vector<Vec3> pos(nd);
    DetRng init_rng(derive_seed(params.seed, 0x1217ULL));
    for (int d = 0; d < nd; ++d) {
        const double r = sc.r_bs * std::sqrt(init_rng.uniform());
        const double ang = 2.0 * kPi * init_rng.uniform();
        Vec3 p{r * std::cos(ang), r * std::sin(ang), 0.0};
        const double hi = std::min(cache.ceiling_at(std::max(r, 1e-6), grid_margin), 400.0);
        const double lo = std::min(sc.h_min, std::max(hi, 0.0));
        p.h = init_rng.uniform(lo, std::max(hi, lo));
        pos[d] = project_exact(p);
    }

    Association assoc{capacity_assignment(detail::static_cost(sc, pos), eff_cap).agent_of_task};
    std::vector<Vec3> best_pos = pos;
    Association best_assoc = assoc;
    double best_obj = detail::static_objective(sc, pos, assoc).objective;

    for (int round = 0; round < params.placement_rounds; ++round) {
        bool moved = false;
        for (int d = 0; d < nd; ++d) {
            const auto owned = assoc.aois_of(nd)[d];
            if (owned.empty()) continue;
            const std::vector<int> lens = blocks_for(sc.n_slots, static_cast<int>(owned.size()));
            const auto fitness = [&](const Vec3& p) {
                std::vector<double> pl(owned.size());
                for (std::size_t j = 0; j < owned.size(); ++j)
                    pl[j] = d2u_pathloss(hdist(p, sc.aois[owned[j]]), p.h, sc.d2u_env);
                std::sort(pl.begin(), pl.end());
                double acc = 0.0;
                for (std::size_t j = 0; j < owned.size(); ++j) acc += lens[j] * pl[j];
                return acc;
            };

            DetRng rng(derive_seed(params.seed,
                                   0xB00ULL + 1000 * static_cast<std::uint64_t>(round) + d));
            const int m = params.swarm;
            std::vector<Vec3> x(m), v(m), pbest(m);
            std::vector<double> pfit(m);
            for (int i = 0; i < m; ++i) {
                if (i == 0) {
                    x[i] = pos[d];  // anchor: the swarm can only improve on it
                } else {
                    const double r = sc.r_bs * std::sqrt(rng.uniform());
                    const double ang = 2.0 * kPi * rng.uniform();
                    Vec3 p{r * std::cos(ang), r * std::sin(ang), 0.0};
                    const double hi = std::min(cache.ceiling_at(std::max(r, 1e-6), grid_margin), 400.0);
                    const double lo = std::min(sc.h_min, std::max(hi, 0.0));
                    p.h = rng.uniform(lo, std::max(hi, lo));
                    x[i] = project_fast(p);
                }
                v[i] = {rng.uniform(-90.0, 90.0), rng.uniform(-90.0, 90.0), rng.uniform(-10.0, 10.0)};
                pbest[i] = x[i];
                pfit[i] = fitness(x[i]);
            }
            int gi = 0;
            for (int i = 1; i < m; ++i)
                if (pfit[i] < pfit[gi]) gi = i;
            Vec3 gbest = pbest[gi];
            double gfit = pfit[gi];

            for (int it = 0; it < params.iterations; ++it) {
                for (int i = 0; i < m; ++i) {
                    const double r1 = rng.uniform(), r2 = rng.uniform();
                    v[i].x = params.inertia * v[i].x + params.cognitive * r1 * (pbest[i].x - x[i].x) +
                             params.social * r2 * (gbest.x - x[i].x);
                    v[i].y = params.inertia * v[i].y + params.cognitive * r1 * (pbest[i].y - x[i].y) +
                             params.social * r2 * (gbest.y - x[i].y);
                    v[i].h = params.inertia * v[i].h + params.cognitive * r1 * (pbest[i].h - x[i].h) +
                             params.social * r2 * (gbest.h - x[i].h);
                    x[i] = project_fast({x[i].x + v[i].x, x[i].y + v[i].y, x[i].h + v[i].h});
                    const double f = fitness(x[i]);
                    if (f < pfit[i]) {
                        pfit[i] = f;
                        pbest[i] = x[i];
                        if (f < gfit) {
                            gfit = f;
                            gbest = x[i];
                        }
                    }
                }
            }

            const Vec3 refined = project_exact(gbest);
            if (fitness(refined) <= fitness(pos[d])) {
                if (dist3(refined, pos[d]) > 1e-6) moved = true;
                pos[d] = refined;
            }
            assoc.owner = capacity_assignment(detail::static_cost(sc, pos), eff_cap).agent_of_task;
            const double obj = detail::static_objective(sc, pos, assoc).objective;
            if (obj < best_obj) {
                best_obj = obj;
                best_pos = pos;
                best_assoc = assoc;
            }
        }
        if (!moved) break;
    }

    StaticDeployment out;
    out.positions = best_pos;
    out.association = best_assoc;
    const detail::StaticEval ev = detail::static_objective(sc, best_pos, best_assoc);
    out.objective = ev.objective;
    out.served_mean = ev.served_mean;
    return out;
}

}  // namespace daran
