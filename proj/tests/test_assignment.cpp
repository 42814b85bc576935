#include <gtest/gtest.h>

#include <algorithm>

#include "daran/assignment.hpp"
#include "daran/rng.hpp"
#include "oracles.hpp"

using namespace daran;

namespace {

CostMatrix random_matrix(DetRng& rng, int rows, int cols, double lo, double hi) {
    CostMatrix c(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int t = 0; t < cols; ++t) c.at(r, t) = rng.uniform(lo, hi);
    return c;
}

}  // namespace

TEST(MinCostAssignment, HandCases) {
    CostMatrix c(2, 2);
    c.at(0, 0) = 1.0; c.at(0, 1) = 4.0;
    c.at(1, 0) = 2.0; c.at(1, 1) = 3.0;
    const AssignmentResult r = min_cost_assignment(c);
    EXPECT_DOUBLE_EQ(r.total, 4.0);
    EXPECT_EQ(r.agent_of_task[0], 0);
    EXPECT_EQ(r.agent_of_task[1], 1);

    CostMatrix d(3, 3);
    const double vals[3][3] = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d.at(i, j) = vals[i][j];
    EXPECT_DOUBLE_EQ(min_cost_assignment(d).total, 5.0);
}

TEST(MinCostAssignment, EmptyAndSingleton) {
    EXPECT_DOUBLE_EQ(min_cost_assignment(CostMatrix(0, 0)).total, 0.0);
    CostMatrix c(1, 1);
    c.at(0, 0) = -7.5;
    const AssignmentResult r = min_cost_assignment(c);
    EXPECT_DOUBLE_EQ(r.total, -7.5);
    EXPECT_EQ(r.agent_of_task[0], 0);
}

TEST(MinCostAssignment, MatchesEnumerationOnRandomMatrices) {
    DetRng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + rng.index(7);
        const CostMatrix c = random_matrix(rng, n, n, -10.0, 10.0);
        const AssignmentResult impl = min_cost_assignment(c);
        const double ref = oracle::enumerate_matching(c);
        EXPECT_NEAR(impl.total, ref, 1e-9) << "trial " << trial << " n " << n;

        std::vector<int> seen(n, 0);
        double recomputed = 0.0;
        for (int t = 0; t < n; ++t) {
            ASSERT_GE(impl.agent_of_task[t], 0);
            ASSERT_LT(impl.agent_of_task[t], n);
            ++seen[impl.agent_of_task[t]];
            recomputed += c.at(impl.agent_of_task[t], t);
        }
        for (int a = 0; a < n; ++a) EXPECT_EQ(seen[a], 1) << "not a permutation";
        EXPECT_NEAR(recomputed, impl.total, 1e-9);
    }
}

TEST(MinCostAssignment, RejectsBadInput) {
    EXPECT_THROW(min_cost_assignment(CostMatrix(2, 3)), std::invalid_argument);
    CostMatrix c(2, 2);
    c.at(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(min_cost_assignment(c), std::invalid_argument);
}

TEST(CapacityAssignment, HandCaseWithBindingCapacity) {
    // One agent is cheap for every task but can only take two of them.
    CostMatrix c(2, 3);
    c.at(0, 0) = 1.0; c.at(0, 1) = 1.0; c.at(0, 2) = 1.0;
    c.at(1, 0) = 5.0; c.at(1, 1) = 2.0; c.at(1, 2) = 9.0;
    const AssignmentResult r = capacity_assignment(c, 2);
    EXPECT_DOUBLE_EQ(r.total, 4.0);  // agent 0 takes tasks 0 and 2, agent 1 takes 1
    EXPECT_EQ(r.agent_of_task[0], 0);
    EXPECT_EQ(r.agent_of_task[1], 1);
    EXPECT_EQ(r.agent_of_task[2], 0);
}

TEST(CapacityAssignment, SlackCapacityPicksColumnMinima) {
    DetRng rng(5);
    const CostMatrix c = random_matrix(rng, 4, 5, 0.0, 100.0);
    const AssignmentResult r = capacity_assignment(c, 5);
    double colmin = 0.0;
    for (int t = 0; t < c.cols; ++t) {
        double m = c.at(0, t);
        for (int a = 1; a < c.rows; ++a) m = std::min(m, c.at(a, t));
        colmin += m;
    }
    EXPECT_NEAR(r.total, colmin, 1e-9);
}

TEST(CapacityAssignment, InfeasibleThrowsCapacityClass) {
    const CostMatrix c(2, 5);
    try {
        capacity_assignment(c, 2);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.constraint(), ConstraintClass::capacity);
    }
    EXPECT_THROW(capacity_assignment(c, 0), std::invalid_argument);
}

TEST(CapacityAssignment, MatchesBruteForceOnRandomInstances) {
    DetRng rng(31337);
    for (int trial = 0; trial < 80; ++trial) {
        const int agents = 1 + rng.index(3);
        const int tasks = 1 + rng.index(6);
        const int cap_floor = (tasks + agents - 1) / agents;
        const int cap = cap_floor + rng.index(3);
        const bool with_negatives = trial % 3 == 0;
        const CostMatrix c =
            random_matrix(rng, agents, tasks, with_negatives ? -20.0 : 0.0, 50.0);

        const AssignmentResult impl = capacity_assignment(c, cap);
        const AssignmentResult ref = brute_force_assignment(c, cap);
        EXPECT_NEAR(impl.total, ref.total, 1e-9)
            << "trial " << trial << " agents " << agents << " tasks " << tasks << " cap " << cap;

        std::vector<int> load(agents, 0);
        double recomputed = 0.0;
        for (int t = 0; t < tasks; ++t) {
            ++load[impl.agent_of_task[t]];
            recomputed += c.at(impl.agent_of_task[t], t);
        }
        for (int a = 0; a < agents; ++a) EXPECT_LE(load[a], cap);
        EXPECT_NEAR(recomputed, impl.total, 1e-9);
    }
}

TEST(CapacityAssignment, MatchesOwnerEnumerationOracle) {
    DetRng rng(40);
    for (int trial = 0; trial < 40; ++trial) {
        const int agents = 2 + rng.index(2);
        const int tasks = 2 + rng.index(4);
        const int cap = (tasks + agents - 1) / agents + rng.index(2);
        const CostMatrix c = random_matrix(rng, agents, tasks, 0.0, 30.0);
        const double ref = oracle::enumerate_assignments(c, cap).cost;
        EXPECT_NEAR(capacity_assignment(c, cap).total, ref, 1e-9) << "trial " << trial;
    }
}

TEST(BruteForceAssignment, LexicographicTieBreak) {
    const CostMatrix zeros(2, 3, 0.0);
    const AssignmentResult r = brute_force_assignment(zeros, 2);
    EXPECT_DOUBLE_EQ(r.total, 0.0);
    ASSERT_EQ(r.agent_of_task.size(), 3u);
    EXPECT_EQ(r.agent_of_task[0], 0);
    EXPECT_EQ(r.agent_of_task[1], 0);
    EXPECT_EQ(r.agent_of_task[2], 1);  // agent 0 is full, first feasible fill-in
}

TEST(BruteForceAssignment, GuardsAndEdges) {
    EXPECT_THROW(brute_force_assignment(CostMatrix(2, 9), 5), std::invalid_argument);
    EXPECT_THROW(brute_force_assignment(CostMatrix(30, 8, 1.0), 8), std::invalid_argument);
    EXPECT_THROW(brute_force_assignment(CostMatrix(1, 3), 2), InfeasibleError);
    EXPECT_DOUBLE_EQ(brute_force_assignment(CostMatrix(3, 0), 1).total, 0.0);
}
