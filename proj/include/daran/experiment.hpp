#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "daran/metrics.hpp"
#include "daran/planner.hpp"
#include "daran/pso.hpp"
#include "daran/serialize.hpp"

namespace daran {

// Locale-independent fixed formatting for CSV cells.
inline std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline int worker_count(int requested, int cells) {
    int w = requested;
    if (w <= 0) {
        if (const char* env = std::getenv("DARAN_WORKERS")) w = std::atoi(env);
        if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
        if (w <= 0) w = 1;
    }
    return std::max(1, std::min(w, std::max(1, cells)));
}

// Index-sharded parallel loop; results must be written to per-index slots.
template <class F>
inline void parallel_for(int n, int workers, F&& f) {
    if (n <= 0) return;
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    auto run = [&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
}

struct SweepCell {
    int n_drones = 0;
    double v_max = 0.0;
    std::uint64_t seed = 0;
    std::string mode;  // "planner" or "baseline"
};

struct SweepRow {
    SweepCell cell;
    Metrics metrics;
    bool failed = false;
    std::string error;
};

struct SweepOptions {
    int n_aois = 20;
    int workers = 0;  // 0: DARAN_WORKERS env or hardware concurrency
    PlannerConfig planner;
    PsoParams pso;
    bool validate = true;
};

namespace detail {

inline PlanSolution run_mode(const Scenario& sc, const std::string& mode,
                             const PlannerConfig& pcfg, const PsoParams& pso) {
    if (mode == "planner") {
        PlannerConfig cfg = pcfg;
        cfg.seed = derive_seed(sc.seed, 0x11ULL);
        return plan(sc, cfg);
    }
    if (mode == "baseline") {
        PsoParams p = pso;
        p.seed = derive_seed(sc.seed, 0x22ULL);
        return plan_static_pso(sc, p).to_plan_solution(sc);
    }
    throw std::invalid_argument("unknown mode: " + mode);
}

// The separation check applies to the planner only: the static reference
// deployment has no start-slot lever (or any other mechanism) to honor the
// protect distance, so its cells are compared on pathloss alone.
inline void validate_solution_or_throw(const PlanSolution& sol, const Scenario& sc,
                                       bool check_separation = true) {
    for (const Trajectory& t : sol.fleet_plan.trajectories) {
        const auto v = validate_trajectory(t, sc);
        if (!v.empty())
            throw InfeasibleError(v.front().cls,
                                  "emitted plan invalid at slot " + std::to_string(v.front().slot) +
                                      ": " + v.front().detail);
    }
    const auto sv = validate_schedule(sol.schedule, sol.association, sc);
    if (!sv.empty())
        throw InfeasibleError(ConstraintClass::schedule, "emitted schedule invalid: " + sv.front().detail);
    if (check_separation && sol.fleet_plan.trajectories.size() >= 2 &&
        validate_separation(sol.fleet_plan, sc) < sc.z_min - 1e-6)
        throw InfeasibleError(ConstraintClass::separation, "emitted plan under-separated");
}

}  // namespace detail

// Planner or baseline metrics over the (|D|, V, seed) grid. Cells run on a
// worker pool; results land in deterministic per-cell slots.
inline std::vector<SweepRow> sweep(const Scenario& tmpl, const std::vector<double>& v_list,
                                   const std::vector<int>& d_list,
                                   const std::vector<std::uint64_t>& seeds,
                                   const std::string& mode, const SweepOptions& opt = {}) {
    std::vector<SweepCell> cells;
    for (int d : d_list)
        for (double v : v_list)
            for (std::uint64_t s : seeds) cells.push_back({d, v, s, mode});
    std::vector<SweepRow> rows(cells.size());
    parallel_for(static_cast<int>(cells.size()), worker_count(opt.workers, static_cast<int>(cells.size())),
                 [&](int i) {
                     SweepRow& row = rows[i];
                     row.cell = cells[i];
                     try {
                         Scenario sc = generate_scenario(cells[i].seed, opt.n_aois, cells[i].n_drones, tmpl);
                         sc.v_max = cells[i].v_max;
                         const auto t0 = std::chrono::steady_clock::now();
                         const PlanSolution sol = detail::run_mode(sc, cells[i].mode, opt.planner, opt.pso);
                         if (opt.validate)
                             detail::validate_solution_or_throw(sol, sc, cells[i].mode != "baseline");
                         row.metrics = compute_metrics(sol, sc);
                         row.metrics.runtime_s =
                             std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                     } catch (const std::exception& e) {
                         row.failed = true;
                         row.error = e.what();
                     }
                 });
    return rows;
}

// Smallest fleet size in [ceil(|U| / capacity), |U|] whose plan keeps the
// worst served-slot pathloss at or under the threshold. Returns -1 when no
// size in the range reaches it. An infinite threshold short-circuits to the
// capacity floor. Infeasible fleet sizes (for example separation failures)
// are skipped.
inline int min_dbs_search(const Scenario& scenario, double threshold, double v_max,
                          const std::string& mode, const SweepOptions& opt = {}) {
    if (std::isnan(threshold)) throw std::invalid_argument("min_dbs_search: NaN threshold");
    const int n_u = static_cast<int>(scenario.aois.size());
    if (n_u == 0) return 0;  // nothing to serve
    const int floor_d = std::max(1, (n_u + scenario.capacity - 1) / scenario.capacity);
    if (std::isinf(threshold) && threshold > 0) return floor_d;
    for (int d = floor_d; d <= n_u; ++d) {
        Scenario sc = scenario;
        sc.n_drones = d;
        sc.v_max = v_max;
        try {
            const PlanSolution sol = detail::run_mode(sc, mode, opt.planner, opt.pso);
            if (opt.validate) detail::validate_solution_or_throw(sol, sc, mode != "baseline");
            const Metrics m = compute_metrics(sol, sc);
            if (!m.cdf.empty() && m.cdf.back().first <= threshold) return d;
        } catch (const std::exception&) {
            continue;
        }
    }
    return -1;
}

namespace detail {

class CsvFile {
  public:
    CsvFile(const std::filesystem::path& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << "# schema 1\n" << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

// Cache of per-cell results within one experiment run, so overlapping jobs
// (for example the mean sweep and the comparison) pay for each cell once.
class CellCache {
  public:
    CellCache(const Scenario& tmpl, const SweepOptions& opt) : tmpl_(tmpl), opt_(opt) {}

    // Baseline cells ignore v_max; they are keyed with v = 0.
    SweepRow& get(int d, double v, std::uint64_t seed, const std::string& mode) {
        const double vkey = mode == "baseline" ? 0.0 : v;
        const Key key{d, vkey, seed, mode};
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        SweepRow row;
        row.cell = {d, v, seed, mode};
        try {
            Scenario sc = generate_scenario(seed, opt_.n_aois, d, tmpl_);
            sc.v_max = v;
            const PlanSolution sol = run_mode(sc, mode, opt_.planner, opt_.pso);
            if (opt_.validate) validate_solution_or_throw(sol, sc, mode != "baseline");
            row.metrics = compute_metrics(sol, sc);
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        std::lock_guard<std::mutex> lk(mu_);
        return cache_.emplace(key, std::move(row)).first->second;
    }

    void prefetch(const std::vector<std::tuple<int, double, std::uint64_t, std::string>>& cells) {
        parallel_for(static_cast<int>(cells.size()),
                     worker_count(opt_.workers, static_cast<int>(cells.size())), [&](int i) {
                         const auto& [d, v, s, m] = cells[i];
                         get(d, v, s, m);
                     });
    }

  private:
    using Key = std::tuple<int, double, std::uint64_t, std::string>;
    Scenario tmpl_;
    SweepOptions opt_;
    std::map<Key, SweepRow> cache_;
    std::mutex mu_;
};

}  // namespace detail

// Runs the experiment config and writes the artifact CSVs into output_dir.
// Throws on invalid configs or on any cell that fails validation; partial
// results are left behind for inspection.
inline std::filesystem::path run_experiment(const json& config, const std::filesystem::path& output_dir) {
    std::filesystem::create_directories(output_dir);
    Scenario tmpl;
    if (config.contains("template")) tmpl = scenario_template_from_json(config.at("template"));

    SweepOptions opt;
    opt.n_aois = config.value("n_aois", 20);
    opt.workers = config.value("workers", 0);
    if (config.contains("planner")) {
        const auto& p = config.at("planner");
        opt.planner.epsilon_w = p.value("epsilon_w", opt.planner.epsilon_w);
        opt.planner.max_iterations = p.value("max_iterations", opt.planner.max_iterations);
        opt.planner.init_radius = p.value("init_radius", opt.planner.init_radius);
        opt.planner.init_height = p.value("init_height", opt.planner.init_height);
        opt.planner.kmeans_restarts = p.value("kmeans_restarts", opt.planner.kmeans_restarts);
    }
    if (config.contains("pso")) {
        const auto& p = config.at("pso");
        opt.pso.swarm = p.value("swarm", opt.pso.swarm);
        opt.pso.iterations = p.value("iterations", opt.pso.iterations);
        opt.pso.placement_rounds = p.value("placement_rounds", opt.pso.placement_rounds);
        opt.pso.inertia = p.value("inertia", opt.pso.inertia);
        opt.pso.cognitive = p.value("cognitive", opt.pso.cognitive);
        opt.pso.social = p.value("social", opt.pso.social);
    }

    detail::CellCache cache(tmpl, opt);
    bool any_failed = false;
    std::string first_error;
    const auto note_failure = [&](const SweepRow& row) {
        if (row.failed && !any_failed) {
            any_failed = true;
            first_error = row.cell.mode + " d=" + std::to_string(row.cell.n_drones) +
                          " v=" + fmt_num(row.cell.v_max) + " seed=" + std::to_string(row.cell.seed) +
                          ": " + row.error;
        }
    };

    for (const auto& job : config.value("jobs", json::array())) {
        const std::string type = job.at("type").get<std::string>();
        if (type == "trajectories") {
            const std::uint64_t seed = job.value("seed", std::uint64_t{7});
            const int d = job.value("n_drones", 5);
            const double v = job.value("v_max", 90.0);
            Scenario sc = generate_scenario(seed, opt.n_aois, d, tmpl);
            sc.v_max = v;
            PlannerConfig cfg = opt.planner;
            cfg.seed = derive_seed(sc.seed, 0x11ULL);
            const PlanSolution sol = plan(sc, cfg);
            detail::validate_solution_or_throw(sol, sc);
            detail::CsvFile csv(output_dir / "fig3_trajectories.csv",
                                "drone,slot,x,y,h,served_aoi,start_slot");
            for (std::size_t dr = 0; dr < sol.fleet_plan.trajectories.size(); ++dr)
                for (int s = 0; s < sc.n_slots; ++s) {
                    const Vec3& w = sol.fleet_plan.trajectories[dr].waypoints[s];
                    csv.row({std::to_string(dr), std::to_string(s), fmt_num(w.x), fmt_num(w.y),
                             fmt_num(w.h), std::to_string(sol.schedule.served(static_cast<int>(dr), s)),
                             std::to_string(sol.fleet_plan.start_slots[dr])});
                }
        } else if (type == "cdf") {
            const auto seeds = job.at("seeds").get<std::vector<std::uint64_t>>();
            const auto v_list = job.at("v_list").get<std::vector<double>>();
            const int d = job.value("n_drones", 4);
            std::vector<std::tuple<int, double, std::uint64_t, std::string>> cells;
            for (double v : v_list)
                for (auto s : seeds) cells.emplace_back(d, v, s, "planner");
            cache.prefetch(cells);
            detail::CsvFile csv(output_dir / "fig5_cdf.csv", "n_drones,v_max,pathloss_db,cdf");
            for (double v : v_list) {
                std::vector<double> pooled;
                for (auto s : seeds) {
                    const SweepRow& row = cache.get(d, v, s, "planner");
                    note_failure(row);
                    for (const auto& [x, p] : row.metrics.cdf) pooled.push_back(x);
                }
                std::sort(pooled.begin(), pooled.end());
                for (std::size_t i = 0; i < pooled.size(); ++i)
                    csv.row({std::to_string(d), fmt_num(v), fmt_num(pooled[i]),
                             fmt_num(static_cast<double>(i + 1) / static_cast<double>(pooled.size()))});
            }
        } else if (type == "means") {
            const auto seeds = job.at("seeds").get<std::vector<std::uint64_t>>();
            const auto v_list = job.at("v_list").get<std::vector<double>>();
            const auto d_list = job.at("d_list").get<std::vector<int>>();
            std::vector<std::tuple<int, double, std::uint64_t, std::string>> cells;
            for (int d : d_list)
                for (double v : v_list)
                    for (auto s : seeds) cells.emplace_back(d, v, s, "planner");
            cache.prefetch(cells);
            detail::CsvFile csv(output_dir / "fig7_means.csv", "n_drones,v_max,mean_db");
            for (int d : d_list)
                for (double v : v_list) {
                    double acc = 0.0;
                    int cnt = 0;
                    for (auto s : seeds) {
                        const SweepRow& row = cache.get(d, v, s, "planner");
                        note_failure(row);
                        if (!row.failed) {
                            acc += row.metrics.served_mean;
                            ++cnt;
                        }
                    }
                    csv.row({std::to_string(d), fmt_num(v), fmt_num(cnt ? acc / cnt : 0.0)});
                }
        } else if (type == "compare") {
            const auto seeds = job.at("seeds").get<std::vector<std::uint64_t>>();
            const auto v_list = job.at("v_list").get<std::vector<double>>();
            const auto d_list = job.at("d_list").get<std::vector<int>>();
            std::vector<std::tuple<int, double, std::uint64_t, std::string>> cells;
            for (int d : d_list) {
                for (double v : v_list)
                    for (auto s : seeds) cells.emplace_back(d, v, s, "planner");
                for (auto s : seeds) cells.emplace_back(d, v_list.empty() ? 0.0 : v_list.front(), s, "baseline");
            }
            cache.prefetch(cells);
            detail::CsvFile csv(output_dir / "fig9_compare.csv", "n_drones,mode,mean_db");
            detail::CsvFile csv2(output_dir / "table2_std.csv", "n_drones,mode,std_db");
            for (int d : d_list) {
                for (const std::string mode : {std::string("planner"), std::string("baseline")}) {
                    std::vector<double> pooled;
                    double acc = 0.0;
                    int cnt = 0;
                    const std::vector<double> vs =
                        mode == "baseline" ? std::vector<double>{v_list.empty() ? 0.0 : v_list.front()}
                                           : v_list;
                    for (double v : vs)
                        for (auto s : seeds) {
                            const SweepRow& row = cache.get(d, v, s, mode);
                            note_failure(row);
                            if (row.failed) continue;
                            acc += row.metrics.served_mean;
                            ++cnt;
                            for (const auto& [x, p] : row.metrics.cdf) pooled.push_back(x);
                        }
                    csv.row({std::to_string(d), mode, fmt_num(cnt ? acc / cnt : 0.0)});
                    double mean = 0.0, var = 0.0;
                    for (double x : pooled) mean += x;
                    if (!pooled.empty()) mean /= static_cast<double>(pooled.size());
                    for (double x : pooled) var += (x - mean) * (x - mean);
                    const double sd = pooled.empty() ? 0.0 : std::sqrt(var / static_cast<double>(pooled.size()));
                    csv2.row({std::to_string(d), mode, fmt_num(sd)});
                }
            }
        } else if (type == "min_dbs") {
            const std::uint64_t seed = job.value("seed", std::uint64_t{7});
            const auto thresholds = job.at("thresholds").get<std::vector<double>>();
            const auto v_list = job.at("v_list").get<std::vector<double>>();
            const auto modes = job.value("modes", std::vector<std::string>{"planner", "baseline"});
            const Scenario base = generate_scenario(seed, opt.n_aois, 1, tmpl);
            // Static placements do not depend on the speed limit, so baseline
            // searches run once per threshold and fan out across the V rows.
            struct Item { double th; std::string mode; double v; int result; };
            std::vector<Item> items;
            for (double th : thresholds)
                for (const auto& mode : modes) {
                    if (mode == "baseline")
                        items.push_back({th, mode, v_list.empty() ? 0.0 : v_list.front(), -1});
                    else
                        for (double v : v_list) items.push_back({th, mode, v, -1});
                }
            parallel_for(static_cast<int>(items.size()),
                         worker_count(opt.workers, static_cast<int>(items.size())), [&](int i) {
                             items[i].result =
                                 min_dbs_search(base, items[i].th, items[i].v, items[i].mode, opt);
                         });
            detail::CsvFile csv(output_dir / "table3_min_dbs.csv", "threshold_db,mode,v_max,min_drones");
            for (double th : thresholds)
                for (const auto& mode : modes)
                    for (double v : v_list) {
                        int result = -1;
                        for (const Item& it : items)
                            if (it.th == th && it.mode == mode && (mode == "baseline" || it.v == v))
                                result = it.result;
                        csv.row({fmt_num(th), mode, fmt_num(v), std::to_string(result)});
                    }
        } else {
            throw std::invalid_argument("unknown job type: " + type);
        }
    }

    if (any_failed)
        throw std::runtime_error("experiment cell failed validation: " + first_error);
    return output_dir;
}

}  // namespace daran
