#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "daran/assignment.hpp"
#include "daran/channel.hpp"
#include "daran/errors.hpp"
#include "daran/scenario.hpp"

namespace daran {

// AoI ownership: owner[u] is the drone serving AoI u.
struct Association {
    std::vector<int> owner;

    std::vector<std::vector<int>> aois_of(int n_drones) const {
        std::vector<std::vector<int>> out(n_drones);
        for (std::size_t u = 0; u < owner.size(); ++u) out[owner[u]].push_back(static_cast<int>(u));
        return out;
    }
};

// One contiguous run of slots in which a drone serves a single AoI. Runs wrap
// cyclically past the last slot.
struct ScheduleBlock {
    int aoi = -1;
    int start = 0;   // first slot of the block, 0-based
    int length = 0;
};

// Per-drone cyclic block schedules plus the flattened slot -> AoI table.
struct Schedule {
    int n_slots = 0;
    std::vector<std::vector<ScheduleBlock>> rows;  // indexed by drone
    std::vector<std::vector<int>> served_table;    // drone x slot -> AoI or -1

    int served(int drone, int slot) const { return served_table[drone][slot]; }

    void rebuild_table() {
        served_table.assign(rows.size(), std::vector<int>(n_slots, -1));
        for (std::size_t d = 0; d < rows.size(); ++d)
            for (const ScheduleBlock& b : rows[d])
                for (int k = 0; k < b.length; ++k)
                    served_table[d][(b.start + k) % n_slots] = b.aoi;
    }
};

// Block lengths for serving n_aois AoIs over n_slots slots: as equal as
// possible, the first n_slots % n_aois blocks one slot longer.
inline std::vector<int> blocks_for(int n_slots, int n_aois) {
    if (n_aois < 1) throw std::invalid_argument("blocks_for: need at least one AoI");
    if (n_slots < n_aois) throw std::invalid_argument("blocks_for: fewer slots than AoIs");
    const int base = n_slots / n_aois;
    const int rem = n_slots % n_aois;
    std::vector<int> out(n_aois, base);
    for (int i = 0; i < rem; ++i) ++out[i];
    return out;
}

// Mean drone-to-user pathloss over the whole cycle, for every (drone, AoI)
// pair. This is the association surrogate: it ignores which slots would
// actually serve the AoI.
inline CostMatrix association_cost(const Scenario& sc, const std::vector<Trajectory>& trajs) {
    const int n_d = static_cast<int>(trajs.size());
    const int n_u = static_cast<int>(sc.aois.size());
    CostMatrix c(n_d, n_u);
    for (int d = 0; d < n_d; ++d) {
        const Trajectory& t = trajs[d];
        for (int u = 0; u < n_u; ++u) {
            double acc = 0.0;
            for (const Vec3& w : t.waypoints)
                acc += d2u_pathloss(hdist(w, sc.aois[u]), w.h, sc.d2u_env);
            c.at(d, u) = acc / static_cast<double>(t.waypoints.size());
        }
    }
    return c;
}

// Capacity-limited ownership minimizing the surrogate cost. The configured
// capacity is tightened to floor(n_slots / s_min) so every owned AoI can
// still get its minimum service block.
inline Association optimize_association(const Scenario& sc, const std::vector<Trajectory>& trajs) {
    const int eff_cap = std::min(sc.capacity, sc.n_slots / sc.s_min);
    if (static_cast<long>(eff_cap) * static_cast<long>(trajs.size()) <
        static_cast<long>(sc.aois.size()))
        throw InfeasibleError(ConstraintClass::capacity,
                              "effective capacity cannot cover all AoIs");
    const CostMatrix c = association_cost(sc, trajs);
    const AssignmentResult r = capacity_assignment(c, eff_cap);
    return Association{r.agent_of_task};
}

// Best block schedule for one drone: lengths fixed by blocks_for in cyclic
// order, all n_slots rotations tried, block -> AoI matching solved exactly
// per rotation. Returns the blocks and the summed pathloss.
namespace detail {

struct DroneScheduleResult {
    std::vector<ScheduleBlock> blocks;
    double cost = 0.0;
};

inline DroneScheduleResult schedule_one_drone(const Scenario& sc, const Trajectory& traj,
                                              const std::vector<int>& aois) {
    const int n = sc.n_slots;
    const int m = static_cast<int>(aois.size());
    DroneScheduleResult out;
    if (m == 0) return out;
    if (static_cast<long>(m) * sc.s_min > n)
        throw InfeasibleError(ConstraintClass::schedule,
                              "minimum service slots exceed the cycle length");

    // Doubled prefix sums of per-slot pathloss toward each owned AoI, so any
    // cyclic block sum is one subtraction.
    std::vector<std::vector<double>> pref(m, std::vector<double>(2 * n + 1, 0.0));
    for (int j = 0; j < m; ++j) {
        const Vec2& target = sc.aois[aois[j]];
        for (int i = 0; i < 2 * n; ++i) {
            const Vec3& w = traj.waypoints[i % n];
            pref[j][i + 1] = pref[j][i] + d2u_pathloss(hdist(w, target), w.h, sc.d2u_env);
        }
    }

    // The equal-split multiset fixes the block lengths but not their order
    // around the cycle; with three or more blocks of mixed lengths the
    // optimum may interleave long and short blocks, so enumerate every
    // placement of the longer blocks, not just rotations of one order.
    const std::vector<int> base = blocks_for(n, m);
    const int rem = n % m;
    std::vector<std::vector<int>> orders;
    if (rem == 0 || m == 1) {
        orders.push_back(base);
    } else {
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            if (__builtin_popcount(mask) != rem) continue;
            std::vector<int> lens(m, n / m);
            for (int i = 0; i < m; ++i)
                if (mask & (1u << i)) ++lens[i];
            orders.push_back(std::move(lens));
            if (orders.size() > 4096) {  // fall back for pathological fan-outs
                orders.assign(1, base);
                break;
            }
        }
    }

    double best_cost = std::numeric_limits<double>::infinity();
    int best_offset = 0;
    std::vector<int> best_perm;
    const std::vector<int>* best_lens = &base;
    CostMatrix c(m, m);
    for (const std::vector<int>& lens : orders) {
        for (int off = 0; off < n; ++off) {
            int s = off;
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) c.at(i, j) = pref[j][s + lens[i]] - pref[j][s];
                s += lens[i];
            }
            const AssignmentResult r = min_cost_assignment(c);
            if (r.total < best_cost) {
                best_cost = r.total;
                best_offset = off;
                best_lens = &lens;
                // r maps block -> AoI column: agent_of_task[j] is the block
                // row taking column j; invert to block -> AoI.
                best_perm.assign(m, -1);
                for (int j = 0; j < m; ++j) best_perm[r.agent_of_task[j]] = j;
            }
        }
    }
    int s = best_offset;
    for (int i = 0; i < m; ++i) {
        out.blocks.push_back({aois[best_perm[i]], s % n, (*best_lens)[i]});
        s += (*best_lens)[i];
    }
    out.cost = best_cost;
    return out;
}

}  // namespace detail

// Cyclic block schedules for the whole fleet under a fixed association.
inline Schedule optimize_schedule(const Scenario& sc, const std::vector<Trajectory>& trajs,
                                  const Association& assoc) {
    Schedule k;
    k.n_slots = sc.n_slots;
    k.rows.resize(trajs.size());
    const auto per_drone = assoc.aois_of(static_cast<int>(trajs.size()));
    for (std::size_t d = 0; d < trajs.size(); ++d)
        k.rows[d] = detail::schedule_one_drone(sc, trajs[d], per_drone[d]).blocks;
    k.rebuild_table();
    return k;
}

// Structural checks for a schedule against an association: every slot of a
// loaded drone serves exactly one owned AoI, each owned AoI appears as one
// cyclic contiguous block with the blocks_for length split, and every block
// meets the minimum service length.
inline std::vector<Violation> validate_schedule(const Schedule& k, const Association& assoc,
                                                const Scenario& sc) {
    std::vector<Violation> out;
    const int n = k.n_slots;
    const auto per_drone = assoc.aois_of(static_cast<int>(k.rows.size()));
    for (std::size_t d = 0; d < k.rows.size(); ++d) {
        const auto& owned = per_drone[d];
        const auto& row = k.rows[d];
        if (owned.empty()) {
            if (!row.empty())
                out.push_back({ConstraintClass::schedule, -1, "blocks on an unloaded drone"});
            continue;
        }
        if (row.size() != owned.size()) {
            out.push_back({ConstraintClass::schedule, -1, "block count != owned AoIs"});
            continue;
        }
        std::vector<int> lens_seen;
        std::vector<int> covered(n, 0);
        for (const ScheduleBlock& b : row) {
            if (b.length < sc.s_min)
                out.push_back({ConstraintClass::schedule, b.start, "block below minimum length"});
            if (std::find(owned.begin(), owned.end(), b.aoi) == owned.end())
                out.push_back({ConstraintClass::schedule, b.start, "block serves unowned AoI"});
            lens_seen.push_back(b.length);
            for (int i = 0; i < b.length; ++i) ++covered[(b.start + i) % n];
        }
        for (int slot = 0; slot < n; ++slot)
            if (covered[slot] != 1) {
                out.push_back({ConstraintClass::schedule, slot, "slot not covered exactly once"});
                break;
            }
        std::vector<int> want = blocks_for(n, static_cast<int>(owned.size()));
        std::sort(lens_seen.begin(), lens_seen.end());
        std::sort(want.begin(), want.end());
        if (lens_seen != want)
            out.push_back({ConstraintClass::schedule, -1, "block lengths not the equal split"});
        std::vector<int> aois_seen;
        for (const ScheduleBlock& b : row) aois_seen.push_back(b.aoi);
        std::sort(aois_seen.begin(), aois_seen.end());
        if (aois_seen != owned)
            out.push_back({ConstraintClass::schedule, -1, "blocks do not cover owned AoIs once"});
    }
    return out;
}

}  // namespace daran
