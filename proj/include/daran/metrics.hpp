#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "daran/planner.hpp"
#include "daran/scenario.hpp"

namespace daran {

// Summary statistics of one solution. The CDF holds (pathloss, probability)
// steps over all served slot samples.
struct Metrics {
    double objective_db = 0.0;
    double served_mean = 0.0;
    double served_std = 0.0;   // population std over served slot samples
    std::vector<std::pair<double, double>> cdf;
    double min_separation = 0.0;
    double hovering_fraction = 0.0;  // served slots within half a cell of the target
    std::vector<double> hovering_per_drone;
    double runtime_s = 0.0;    // filled by callers; never serialized to CSV
    int iterations = 0;
    bool converged = false;
};

inline Metrics compute_metrics(const PlanSolution& sol, const Scenario& sc) {
    Metrics m;
    const auto& trajs = sol.fleet_plan.trajectories;
    std::vector<double> samples;
    double acc = 0.0;
    long hover_total = 0;
    m.hovering_per_drone.assign(trajs.size(), 0.0);
    for (std::size_t d = 0; d < trajs.size(); ++d) {
        long hover = 0, served = 0;
        for (int s = 0; s < sc.n_slots; ++s) {
            const int u = sol.schedule.served(static_cast<int>(d), s);
            if (u < 0) continue;
            const Vec3& w = trajs[d].waypoints[s];
            const double r_du = hdist(w, sc.aois[u]);
            const double pl = d2u_pathloss(r_du, w.h, sc.d2u_env);
            samples.push_back(pl);
            acc += pl;
            ++served;
            if (r_du <= 0.5 * sc.grid_len) {
                ++hover;
                ++hover_total;
            }
        }
        m.hovering_per_drone[d] = served > 0 ? static_cast<double>(hover) / served : 0.0;
    }
    const long denom = static_cast<long>(sc.n_slots) * static_cast<long>(sc.aois.size());
    m.objective_db = denom > 0 ? acc / static_cast<double>(denom) : 0.0;
    if (!samples.empty()) {
        m.served_mean = acc / static_cast<double>(samples.size());
        double var = 0.0;
        for (double x : samples) var += (x - m.served_mean) * (x - m.served_mean);
        m.served_std = std::sqrt(var / static_cast<double>(samples.size()));
        m.hovering_fraction = static_cast<double>(hover_total) / static_cast<double>(samples.size());
        std::sort(samples.begin(), samples.end());
        m.cdf.reserve(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            m.cdf.emplace_back(samples[i],
                               static_cast<double>(i + 1) / static_cast<double>(samples.size()));
    }
    m.min_separation = validate_separation(sol.fleet_plan, sc);
    m.iterations = sol.iterations;
    m.converged = sol.converged;
    return m;
}

}  // namespace daran
