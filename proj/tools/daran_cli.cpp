// Command-line front end: scenario generation, planning, the static
// baseline, grid sweeps, minimum fleet-size search, and full experiment
// reproduction. All verbs are deterministic for fixed inputs.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "daran/experiment.hpp"
#include "daran/metrics.hpp"
#include "daran/planner.hpp"
#include "daran/pso.hpp"
#include "daran/serialize.hpp"

namespace {

daran::json default_reproduce_config() {
    daran::json j;
    j["schema_version"] = 1;
    j["n_aois"] = 20;
    j["workers"] = 0;
    j["template"] = daran::json::object();
    j["jobs"] = daran::json::array();
    daran::json seeds = {1, 2, 3, 4, 5};
    daran::json v_list = {30.0, 50.0, 70.0, 90.0, 110.0};
    daran::json d_list = {4, 5, 6, 7};
    j["jobs"].push_back({{"type", "trajectories"}, {"seed", 7}, {"n_drones", 5}, {"v_max", 90.0}});
    j["jobs"].push_back({{"type", "cdf"}, {"seeds", seeds}, {"n_drones", 4}, {"v_list", v_list}});
    j["jobs"].push_back({{"type", "means"}, {"seeds", seeds}, {"v_list", v_list}, {"d_list", d_list}});
    j["jobs"].push_back({{"type", "compare"}, {"seeds", seeds}, {"v_list", v_list}, {"d_list", d_list}});
    j["jobs"].push_back({{"type", "min_dbs"},
                         {"seed", 7},
                         {"thresholds", {98.0, 95.0, 92.0, 89.0, 86.0}},
                         {"v_list", v_list}});
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"Multi-drone aerial RAN trajectory planner"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a scenario JSON");
    std::uint64_t gen_seed = 0;
    int gen_aois = 20, gen_drones = 5;
    std::string gen_out = "scenario.json", gen_template;
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--aois", gen_aois, "AoI count");
    gen->add_option("--drones", gen_drones, "Fleet size");
    gen->add_option("--template", gen_template, "Partial scenario JSON with overrides");
    gen->add_option("-o,--output", gen_out, "Output path");

    // plan
    auto* planv = app.add_subcommand("plan", "Plan trajectories for a scenario");
    std::string plan_scn, plan_out = "solution.json";
    bool plan_metrics = false;
    planv->add_option("--scenario", plan_scn, "Scenario JSON")->required();
    planv->add_option("-o,--output", plan_out, "Output path");
    planv->add_flag("--print-metrics", plan_metrics, "Print summary metrics to stdout");

    // baseline
    auto* base = app.add_subcommand("baseline", "Static PSO deployment for a scenario");
    std::string base_scn, base_out = "deployment.json";
    bool base_metrics = false;
    base->add_option("--scenario", base_scn, "Scenario JSON")->required();
    base->add_option("-o,--output", base_out, "Output path");
    base->add_flag("--print-metrics", base_metrics, "Print summary metrics to stdout");

    // sweep
    auto* sw = app.add_subcommand("sweep", "Metrics over a (drones, v_max, seed) grid");
    std::vector<double> sw_v{30, 50, 70, 90, 110};
    std::vector<int> sw_d{4, 5, 6, 7};
    std::vector<std::uint64_t> sw_seeds{1, 2, 3, 4, 5};
    std::string sw_mode = "planner", sw_out = "sweep.csv", sw_template;
    int sw_aois = 20;
    sw->add_option("--v-list", sw_v, "Speed limits");
    sw->add_option("--d-list", sw_d, "Fleet sizes");
    sw->add_option("--seeds", sw_seeds, "Scenario seeds");
    sw->add_option("--mode", sw_mode, "planner or baseline");
    sw->add_option("--aois", sw_aois, "AoI count");
    sw->add_option("--template", sw_template, "Partial scenario JSON with overrides");
    sw->add_option("-o,--output", sw_out, "Output CSV path");

    // min-dbs
    auto* md = app.add_subcommand("min-dbs", "Smallest fleet meeting a worst-case threshold");
    std::string md_scn, md_mode = "planner";
    double md_threshold = 92.0, md_v = 90.0;
    md->add_option("--scenario", md_scn, "Scenario JSON")->required();
    md->add_option("--threshold", md_threshold, "Worst served-slot pathloss cap, dB");
    md->add_option("--v-max", md_v, "Speed limit");
    md->add_option("--mode", md_mode, "planner or baseline");

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "Run the bundled experiment suite");
    std::string rep_out = "out", rep_cfg;
    rep->add_option("-o,--output", rep_out, "Output directory");
    rep->add_option("--config", rep_cfg, "Experiment config JSON (default: bundled)");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        daran::Scenario tmpl;
        if (!gen_template.empty())
            tmpl = daran::scenario_template_from_json(daran::load_json_file(gen_template));
        const daran::Scenario sc = daran::generate_scenario(gen_seed, gen_aois, gen_drones, tmpl);
        daran::save_json_file(gen_out, daran::scenario_to_json(sc));
        std::cout << gen_out << "\n";
        return 0;
    }
    if (planv->parsed()) {
        const daran::Scenario sc = daran::scenario_from_json(daran::load_json_file(plan_scn));
        daran::PlannerConfig cfg;
        cfg.seed = daran::derive_seed(sc.seed, 0x11ULL);
        const daran::PlanSolution sol = daran::plan(sc, cfg);
        for (const auto& t : sol.fleet_plan.trajectories) {
            const auto v = daran::validate_trajectory(t, sc);
            if (!v.empty()) {
                std::cerr << "plan failed validation: " << v.front().detail << "\n";
                return 2;
            }
        }
        daran::save_json_file(plan_out, daran::solution_to_json(sol, "planner"));
        if (plan_metrics) {
            const daran::Metrics m = daran::compute_metrics(sol, sc);
            std::cout << "objective_db " << daran::fmt_num(m.objective_db) << "\n"
                      << "served_mean_db " << daran::fmt_num(m.served_mean) << "\n"
                      << "served_std_db " << daran::fmt_num(m.served_std) << "\n"
                      << "min_separation_m " << daran::fmt_num(m.min_separation) << "\n"
                      << "hovering_fraction " << daran::fmt_num(m.hovering_fraction) << "\n"
                      << "iterations " << m.iterations << "\n"
                      << "converged " << (m.converged ? 1 : 0) << "\n";
        } else {
            std::cout << plan_out << "\n";
        }
        return 0;
    }
    if (base->parsed()) {
        const daran::Scenario sc = daran::scenario_from_json(daran::load_json_file(base_scn));
        daran::PsoParams params;
        params.seed = daran::derive_seed(sc.seed, 0x22ULL);
        const daran::StaticDeployment dep = daran::plan_static_pso(sc, params);
        const daran::PlanSolution sol = dep.to_plan_solution(sc);
        daran::save_json_file(base_out, daran::solution_to_json(sol, "baseline"));
        if (base_metrics) {
            const daran::Metrics m = daran::compute_metrics(sol, sc);
            std::cout << "objective_db " << daran::fmt_num(m.objective_db) << "\n"
                      << "served_mean_db " << daran::fmt_num(m.served_mean) << "\n"
                      << "served_std_db " << daran::fmt_num(m.served_std) << "\n";
        } else {
            std::cout << base_out << "\n";
        }
        return 0;
    }
    if (sw->parsed()) {
        daran::Scenario tmpl;
        if (!sw_template.empty())
            tmpl = daran::scenario_template_from_json(daran::load_json_file(sw_template));
        daran::SweepOptions opt;
        opt.n_aois = sw_aois;
        const auto rows = daran::sweep(tmpl, sw_v, sw_d, sw_seeds, sw_mode, opt);
        std::ofstream out(sw_out);
        if (!out) {
            std::cerr << "cannot write " << sw_out << "\n";
            return 1;
        }
        out << "# schema 1\nn_drones,v_max,seed,mode,objective_db,served_mean_db,served_std_db,"
               "min_separation_m,hovering_fraction,converged,failed\n";
        bool any_failed = false;
        for (const auto& r : rows) {
            any_failed = any_failed || r.failed;
            out << r.cell.n_drones << "," << daran::fmt_num(r.cell.v_max) << "," << r.cell.seed << ","
                << r.cell.mode << "," << daran::fmt_num(r.metrics.objective_db) << ","
                << daran::fmt_num(r.metrics.served_mean) << ","
                << daran::fmt_num(r.metrics.served_std) << ","
                << daran::fmt_num(r.metrics.min_separation) << ","
                << daran::fmt_num(r.metrics.hovering_fraction) << ","
                << (r.metrics.converged ? 1 : 0) << "," << (r.failed ? 1 : 0) << "\n";
        }
        std::cout << sw_out << "\n";
        return any_failed ? 2 : 0;
    }
    if (md->parsed()) {
        const daran::Scenario sc = daran::scenario_from_json(daran::load_json_file(md_scn));
        const int result = daran::min_dbs_search(sc, md_threshold, md_v, md_mode);
        std::cout << result << "\n";
        return 0;
    }
    if (rep->parsed()) {
        const daran::json cfg =
            rep_cfg.empty() ? default_reproduce_config() : daran::load_json_file(rep_cfg);
        daran::run_experiment(cfg, rep_out);
        std::cout << rep_out << "\n";
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const daran::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
