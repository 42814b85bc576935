#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "daran/planner.hpp"
#include "daran/pso.hpp"
#include "daran/scenario.hpp"

namespace daran {

using nlohmann::json;

inline json scenario_to_json(const Scenario& sc) {
    json j;
    j["schema_version"] = 1;
    j["r_bs"] = sc.r_bs;
    j["grid_len"] = sc.grid_len;
    j["n_drones"] = sc.n_drones;
    j["n_slots"] = sc.n_slots;
    j["v_max"] = sc.v_max;
    j["h_max_rate"] = sc.h_max_rate;
    j["z_min"] = sc.z_min;
    j["s_min"] = sc.s_min;
    j["capacity"] = sc.capacity;
    j["h_min"] = sc.h_min;
    j["seed"] = sc.seed;
    j["aois"] = json::array();
    for (const Vec2& u : sc.aois) j["aois"].push_back({u.x, u.y});
    j["d2u_env"] = {{"a", sc.d2u_env.a},
                    {"b", sc.d2u_env.b},
                    {"eta_los", sc.d2u_env.eta_los},
                    {"eta_nlos", sc.d2u_env.eta_nlos},
                    {"f_c", sc.d2u_env.f_c}};
    j["d2b_env"] = {{"alpha", sc.d2b_env.alpha},
                    {"a_excess", sc.d2b_env.a_excess},
                    {"theta0", sc.d2b_env.theta0},
                    {"b_scale", sc.d2b_env.b_scale},
                    {"eta0", sc.d2b_env.eta0},
                    {"p_db_max", sc.d2b_env.p_db_max}};
    return j;
}

inline Scenario scenario_from_json(const json& j) {
    Scenario sc;
    try {
        sc.r_bs = j.at("r_bs").get<double>();
        sc.grid_len = j.at("grid_len").get<double>();
        sc.n_drones = j.at("n_drones").get<int>();
        sc.n_slots = j.at("n_slots").get<int>();
        sc.v_max = j.at("v_max").get<double>();
        sc.h_max_rate = j.at("h_max_rate").get<double>();
        sc.z_min = j.at("z_min").get<double>();
        sc.s_min = j.at("s_min").get<int>();
        sc.capacity = j.at("capacity").get<int>();
        sc.h_min = j.value("h_min", 20.0);
        sc.seed = j.value("seed", std::uint64_t{0});
        sc.aois.clear();
        for (const auto& a : j.at("aois")) sc.aois.push_back({a.at(0), a.at(1)});
        const auto& du = j.at("d2u_env");
        sc.d2u_env = {du.at("a"), du.at("b"), du.at("eta_los"), du.at("eta_nlos"), du.at("f_c")};
        const auto& db = j.at("d2b_env");
        sc.d2b_env = {db.at("alpha"),  db.at("a_excess"), db.at("theta0"),
                      db.at("b_scale"), db.at("eta0"),     db.at("p_db_max")};
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scenario JSON: ") + e.what());
    }
    sc.validate();
    return sc;
}

inline json solution_to_json(const PlanSolution& sol, const std::string& mode = "planner") {
    json j;
    j["schema_version"] = 1;
    j["mode"] = mode;
    j["objective"] = sol.objective;
    j["served_mean"] = sol.served_mean;
    j["converged"] = sol.converged;
    j["iterations"] = sol.iterations;
    j["objective_log"] = sol.objective_log;
    j["association"] = sol.association.owner;
    j["start_slots"] = sol.fleet_plan.start_slots;
    j["n_slots"] = sol.schedule.n_slots;
    j["schedule"] = json::array();
    for (const auto& row : sol.schedule.rows) {
        json r = json::array();
        for (const ScheduleBlock& b : row)
            r.push_back({{"aoi", b.aoi}, {"start", b.start}, {"length", b.length}});
        j["schedule"].push_back(r);
    }
    j["trajectories"] = json::array();
    for (const Trajectory& t : sol.fleet_plan.trajectories) {
        json w = json::array();
        for (const Vec3& p : t.waypoints) w.push_back({p.x, p.y, p.h});
        j["trajectories"].push_back(w);
    }
    return j;
}

inline PlanSolution solution_from_json(const json& j) {
    PlanSolution sol;
    try {
        sol.objective = j.at("objective").get<double>();
        sol.served_mean = j.value("served_mean", 0.0);
        sol.converged = j.at("converged").get<bool>();
        sol.iterations = j.at("iterations").get<int>();
        sol.objective_log = j.value("objective_log", std::vector<double>{});
        sol.association.owner = j.at("association").get<std::vector<int>>();
        sol.fleet_plan.start_slots = j.at("start_slots").get<std::vector<int>>();
        sol.schedule.n_slots = j.at("n_slots").get<int>();
        for (const auto& row : j.at("schedule")) {
            std::vector<ScheduleBlock> r;
            for (const auto& b : row)
                r.push_back({b.at("aoi").get<int>(), b.at("start").get<int>(),
                             b.at("length").get<int>()});
            sol.schedule.rows.push_back(r);
        }
        for (const auto& tw : j.at("trajectories")) {
            Trajectory t;
            t.drone_id = static_cast<int>(sol.fleet_plan.trajectories.size());
            for (const auto& p : tw) t.waypoints.push_back({p.at(0), p.at(1), p.at(2)});
            sol.fleet_plan.trajectories.push_back(t);
        }
        sol.schedule.rebuild_table();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("solution JSON: ") + e.what());
    }
    return sol;
}

// Partial scenario override: any subset of fields on top of the defaults.
// AoIs are usually regenerated downstream, so none are required here.
inline Scenario scenario_template_from_json(const json& j) {
    Scenario sc;
    try {
        sc.r_bs = j.value("r_bs", sc.r_bs);
        sc.grid_len = j.value("grid_len", sc.grid_len);
        sc.n_drones = j.value("n_drones", sc.n_drones);
        sc.n_slots = j.value("n_slots", sc.n_slots);
        sc.v_max = j.value("v_max", sc.v_max);
        sc.h_max_rate = j.value("h_max_rate", sc.h_max_rate);
        sc.z_min = j.value("z_min", sc.z_min);
        sc.s_min = j.value("s_min", sc.s_min);
        sc.capacity = j.value("capacity", sc.capacity);
        sc.h_min = j.value("h_min", sc.h_min);
        if (j.contains("d2u_env")) {
            const auto& du = j.at("d2u_env");
            sc.d2u_env = {du.value("a", sc.d2u_env.a), du.value("b", sc.d2u_env.b),
                          du.value("eta_los", sc.d2u_env.eta_los),
                          du.value("eta_nlos", sc.d2u_env.eta_nlos),
                          du.value("f_c", sc.d2u_env.f_c)};
        }
        if (j.contains("d2b_env")) {
            const auto& db = j.at("d2b_env");
            sc.d2b_env = {db.value("alpha", sc.d2b_env.alpha),
                          db.value("a_excess", sc.d2b_env.a_excess),
                          db.value("theta0", sc.d2b_env.theta0),
                          db.value("b_scale", sc.d2b_env.b_scale),
                          db.value("eta0", sc.d2b_env.eta0),
                          db.value("p_db_max", sc.d2b_env.p_db_max)};
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scenario template JSON: ") + e.what());
    }
    return sc;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace daran
