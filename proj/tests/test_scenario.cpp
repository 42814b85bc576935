#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "daran/scenario.hpp"
#include "daran/serialize.hpp"

using namespace daran;

namespace {

int count_class(const std::vector<Violation>& vs, ConstraintClass cls) {
    int n = 0;
    for (const Violation& v : vs) n += (v.cls == cls);
    return n;
}

// Closed hovering trajectory at a backhaul-safe height (the coverage-wide
// ceiling sits just above 34.5 m, so 30 m is feasible everywhere).
Trajectory hover_at(double x, double y, double h, int n_slots) {
    Trajectory t;
    t.waypoints.assign(n_slots, Vec3{x, y, h});
    return t;
}

Scenario small_scenario() {
    Scenario sc;
    sc.n_slots = 8;
    sc.s_min = 1;
    sc.aois = {{10.0, 10.0}, {50.0, 10.0}};
    return sc;
}

}  // namespace

TEST(CoverageCells, FrozenCountsAndOrdering) {
    const auto big = coverage_cells(900.0, 20.0);
    EXPECT_EQ(big.size(), 6376u);

    const auto small = coverage_cells(50.0, 20.0);
    ASSERT_EQ(small.size(), 16u);
    EXPECT_DOUBLE_EQ(small.front().x, -30.0);
    EXPECT_DOUBLE_EQ(small.front().y, -30.0);
    EXPECT_DOUBLE_EQ(small.back().x, 30.0);
    EXPECT_DOUBLE_EQ(small.back().y, 30.0);
    for (std::size_t i = 1; i < small.size(); ++i) {
        const bool ordered = small[i - 1].x < small[i].x ||
                             (small[i - 1].x == small[i].x && small[i - 1].y < small[i].y);
        EXPECT_TRUE(ordered);
    }
}

TEST(CoverageCells, AllCentersInsideDiskOnGrid) {
    for (const Vec2& c : coverage_cells(300.0, 20.0)) {
        EXPECT_LE(c.norm(), 300.0 + 1e-9);
        EXPECT_NEAR(std::remainder(c.x - 10.0, 20.0), 0.0, 1e-9);
        EXPECT_NEAR(std::remainder(c.y - 10.0, 20.0), 0.0, 1e-9);
    }
}

TEST(GenerateScenario, DeterministicAndDistinct) {
    const Scenario a = generate_scenario(42, 20, 5);
    const Scenario b = generate_scenario(42, 20, 5);
    ASSERT_EQ(a.aois.size(), 20u);
    ASSERT_EQ(b.aois.size(), 20u);
    std::set<std::pair<double, double>> seen;
    for (std::size_t i = 0; i < a.aois.size(); ++i) {
        EXPECT_DOUBLE_EQ(a.aois[i].x, b.aois[i].x);
        EXPECT_DOUBLE_EQ(a.aois[i].y, b.aois[i].y);
        seen.insert({a.aois[i].x, a.aois[i].y});
    }
    EXPECT_EQ(seen.size(), 20u) << "sampled cells must be distinct";
    EXPECT_EQ(a.seed, 42u);
    EXPECT_EQ(a.n_drones, 5);

    const Scenario c = generate_scenario(43, 20, 5);
    bool same = true;
    for (std::size_t i = 0; i < 20; ++i)
        same = same && a.aois[i].x == c.aois[i].x && a.aois[i].y == c.aois[i].y;
    EXPECT_FALSE(same) << "different seeds should draw different AoI sets";
}

TEST(GenerateScenario, DrawsFromTheCellGrid) {
    const Scenario sc = generate_scenario(3, 30, 4);
    const auto cells = coverage_cells(sc.r_bs, sc.grid_len);
    const std::set<std::pair<double, double>> grid = [&] {
        std::set<std::pair<double, double>> g;
        for (const Vec2& c : cells) g.insert({c.x, c.y});
        return g;
    }();
    for (const Vec2& u : sc.aois) EXPECT_TRUE(grid.count({u.x, u.y})) << u.x << "," << u.y;
}

TEST(GenerateScenario, ExhaustiveDrawAndOverflow) {
    Scenario tmpl;
    tmpl.r_bs = 50.0;
    const Scenario all = generate_scenario(1, 16, 2, tmpl);
    EXPECT_EQ(all.aois.size(), 16u);
    EXPECT_THROW(generate_scenario(1, 17, 2, tmpl), std::invalid_argument);
    EXPECT_THROW(generate_scenario(1, -1, 2, tmpl), std::invalid_argument);
}

TEST(ScenarioValidate, RejectsBadParameters) {
    Scenario sc;
    sc.s_min = 61;
    EXPECT_THROW(sc.validate(), std::invalid_argument);
    sc = Scenario{};
    sc.capacity = 0;
    EXPECT_THROW(sc.validate(), std::invalid_argument);
    sc = Scenario{};
    sc.aois = {{901.0, 0.0}};
    EXPECT_THROW(sc.validate(), std::invalid_argument);
    sc = Scenario{};
    sc.aois = {{100.0, 100.0}};
    EXPECT_NO_THROW(sc.validate());
}

TEST(ValidateTrajectory, CleanHoverPasses) {
    const Scenario sc = small_scenario();
    const Trajectory t = hover_at(300.0, 0.0, 30.0, sc.n_slots);
    EXPECT_TRUE(validate_trajectory(t, sc).empty());
}

TEST(ValidateTrajectory, WaypointCountMismatch) {
    const Scenario sc = small_scenario();
    const Trajectory t = hover_at(300.0, 0.0, 30.0, sc.n_slots + 1);
    const auto vs = validate_trajectory(t, sc);
    ASSERT_EQ(vs.size(), 1u);
    EXPECT_EQ(vs[0].cls, ConstraintClass::structure);
    EXPECT_EQ(vs[0].slot, -1);
}

TEST(ValidateTrajectory, SpeedViolationOnBothAdjacentSteps) {
    Scenario sc = small_scenario();
    sc.v_max = 50.0;
    Trajectory t = hover_at(300.0, 0.0, 30.0, sc.n_slots);
    t.waypoints[2].x += 60.0;
    const auto vs = validate_trajectory(t, sc);
    EXPECT_EQ(count_class(vs, ConstraintClass::speed), 2);
    EXPECT_EQ(count_class(vs, ConstraintClass::climb_rate), 0);
    bool slot1 = false, slot2 = false;
    for (const Violation& v : vs) {
        slot1 = slot1 || v.slot == 1;
        slot2 = slot2 || v.slot == 2;
    }
    EXPECT_TRUE(slot1 && slot2);
}

TEST(ValidateTrajectory, ClimbRateViolation) {
    const Scenario sc = small_scenario();
    Trajectory t = hover_at(300.0, 0.0, 20.0, sc.n_slots);
    t.waypoints[4].h = 31.0;  // 11 m jumps in and out, limit is 10
    const auto vs = validate_trajectory(t, sc);
    EXPECT_EQ(count_class(vs, ConstraintClass::climb_rate), 2);
    EXPECT_EQ(count_class(vs, ConstraintClass::backhaul), 0);
}

TEST(ValidateTrajectory, BackhaulCeilingViolation) {
    const Scenario sc = small_scenario();
    // 120 m at range 300 is far above the backhaul ceiling there.
    const Trajectory t = hover_at(300.0, 0.0, 120.0, sc.n_slots);
    const auto vs = validate_trajectory(t, sc);
    EXPECT_EQ(count_class(vs, ConstraintClass::backhaul), sc.n_slots);
    EXPECT_EQ(count_class(vs, ConstraintClass::speed), 0);
}

TEST(ValidateTrajectory, NegativeHeightFlagged) {
    const Scenario sc = small_scenario();
    Trajectory t = hover_at(300.0, 0.0, 5.0, sc.n_slots);
    t.waypoints[0].h = -1.0;
    const auto vs = validate_trajectory(t, sc);
    EXPECT_GE(count_class(vs, ConstraintClass::structure), 1);
}

TEST(ValidateTrajectory, WrapStepChecked) {
    Scenario sc = small_scenario();
    sc.v_max = 50.0;
    Trajectory t = hover_at(300.0, 0.0, 30.0, sc.n_slots);
    t.waypoints.back().x += 60.0;  // breaks last->first closure step too
    const auto vs = validate_trajectory(t, sc);
    bool wrap = false;
    for (const Violation& v : vs) wrap = wrap || (v.cls == ConstraintClass::speed && v.slot == sc.n_slots - 1);
    EXPECT_TRUE(wrap);
}

TEST(Slot3dDistance, RotatedSquareHandCase) {
    Trajectory a, b;
    const double h = 30.0;
    a.waypoints = {{100.0, 0.0, h}, {160.0, 0.0, h}, {160.0, 60.0, h}, {100.0, 60.0, h}};
    b.waypoints = a.waypoints;
    // b lags one slot: at global slot n it sits at a's previous corner, so the
    // pairwise distance is always one square side.
    for (int n = 0; n < 4; ++n)
        EXPECT_NEAR(slot_3d_distance(a, 0, b, 1, n), 60.0, 1e-12) << "slot " << n;
    // Same start slot puts them on top of each other.
    EXPECT_DOUBLE_EQ(slot_3d_distance(a, 0, b, 0, 2), 0.0);
    // Height difference enters through the 3D norm.
    b.waypoints[3].h = h + 80.0;
    EXPECT_NEAR(slot_3d_distance(a, 0, b, 1, 0), 100.0, 1e-12);
}

TEST(ValidateSeparation, HandCases) {
    Scenario sc = small_scenario();
    sc.n_slots = 4;
    FleetPlan solo;
    solo.trajectories = {hover_at(100.0, 0.0, 30.0, 4)};
    solo.start_slots = {0};
    EXPECT_TRUE(std::isinf(validate_separation(solo, sc)));

    FleetPlan pair;
    pair.trajectories = {hover_at(100.0, 0.0, 30.0, 4), hover_at(400.0, 0.0, 30.0, 4)};
    pair.start_slots = {0, 2};
    EXPECT_NEAR(validate_separation(pair, sc), 300.0, 1e-12);

    Trajectory sq;
    sq.waypoints = {{100.0, 0.0, 30.0}, {160.0, 0.0, 30.0}, {160.0, 60.0, 30.0}, {100.0, 60.0, 30.0}};
    FleetPlan rot;
    rot.trajectories = {sq, sq};
    rot.start_slots = {0, 1};
    EXPECT_NEAR(validate_separation(rot, sc), 60.0, 1e-12);
    rot.start_slots = {3, 3};
    EXPECT_DOUBLE_EQ(validate_separation(rot, sc), 0.0);

    rot.start_slots = {3};
    EXPECT_THROW(validate_separation(rot, sc), std::invalid_argument);
}

TEST(EffectiveHeightBounds, FloorAppliesAndYields) {
    Scenario sc;
    // Plenty of ceiling at range 300: floor lifts the lower bound to h_min.
    const HeightInterval mid = effective_height_bounds(sc, 300.0);
    ASSERT_FALSE(mid.empty);
    EXPECT_DOUBLE_EQ(mid.lower, sc.h_min);
    EXPECT_GT(mid.upper, sc.h_min);

    // With an absurd floor the ceiling wins and the interval pins to it.
    sc.h_min = 100.0;
    const HeightInterval pinned = effective_height_bounds(sc, 700.0);
    ASSERT_FALSE(pinned.empty);
    EXPECT_NEAR(pinned.lower, pinned.upper, 1e-9);
    EXPECT_NEAR(pinned.upper, 52.905, 0.02);

    // Outside the reachable region the interval stays empty.
    sc.d2b_env = D2BEnvParams::suburban();
    EXPECT_TRUE(effective_height_bounds(sc, 1400.0).empty);
}

TEST(ScenarioJson, RoundTripPreservesEverything) {
    Scenario sc = generate_scenario(5, 10, 3);
    sc.v_max = 77.5;
    sc.seed = 990;
    const Scenario back = scenario_from_json(scenario_to_json(sc));
    EXPECT_DOUBLE_EQ(back.r_bs, sc.r_bs);
    EXPECT_DOUBLE_EQ(back.grid_len, sc.grid_len);
    EXPECT_EQ(back.n_drones, sc.n_drones);
    EXPECT_EQ(back.n_slots, sc.n_slots);
    EXPECT_DOUBLE_EQ(back.v_max, sc.v_max);
    EXPECT_DOUBLE_EQ(back.h_max_rate, sc.h_max_rate);
    EXPECT_DOUBLE_EQ(back.z_min, sc.z_min);
    EXPECT_EQ(back.s_min, sc.s_min);
    EXPECT_EQ(back.capacity, sc.capacity);
    EXPECT_DOUBLE_EQ(back.h_min, sc.h_min);
    EXPECT_EQ(back.seed, sc.seed);
    ASSERT_EQ(back.aois.size(), sc.aois.size());
    for (std::size_t i = 0; i < sc.aois.size(); ++i) {
        EXPECT_DOUBLE_EQ(back.aois[i].x, sc.aois[i].x);
        EXPECT_DOUBLE_EQ(back.aois[i].y, sc.aois[i].y);
    }
    EXPECT_DOUBLE_EQ(back.d2u_env.f_c, sc.d2u_env.f_c);
    EXPECT_DOUBLE_EQ(back.d2b_env.p_db_max, sc.d2b_env.p_db_max);
}

TEST(ScenarioJson, MissingFieldReportsContext) {
    json j = scenario_to_json(Scenario{});
    j.erase("v_max");
    try {
        scenario_from_json(j);
        FAIL() << "expected a throw";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("scenario JSON"), std::string::npos);
    }
}

TEST(ScenarioJson, TemplatePartialOverride) {
    const Scenario sc = scenario_template_from_json(json{{"v_max", 50.0}, {"n_slots", 30}});
    EXPECT_DOUBLE_EQ(sc.v_max, 50.0);
    EXPECT_EQ(sc.n_slots, 30);
    EXPECT_DOUBLE_EQ(sc.r_bs, 900.0);
    EXPECT_EQ(sc.capacity, 6);

    const Scenario env = scenario_template_from_json(json{{"d2b_env", {{"p_db_max", 75.0}}}});
    EXPECT_DOUBLE_EQ(env.d2b_env.p_db_max, 75.0);
    EXPECT_DOUBLE_EQ(env.d2b_env.alpha, 3.04);
}
