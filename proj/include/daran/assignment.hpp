#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "daran/errors.hpp"

namespace daran {

// Dense row-major cost matrix, rows = agents, cols = tasks.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> cost;

    CostMatrix() = default;
    CostMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), cost(static_cast<std::size_t>(r) * c, fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("CostMatrix: negative shape");
    }

    double& at(int r, int c) { return cost[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return cost[static_cast<std::size_t>(r) * cols + c]; }

    void validate_finite() const {
        for (double v : cost)
            if (!std::isfinite(v))
                throw std::invalid_argument("CostMatrix: non-finite entry");
    }
};

struct AssignmentResult {
    std::vector<int> agent_of_task;  // task index -> agent index
    double total = 0.0;
};

// Minimum-cost perfect matching on a square cost matrix via shortest
// augmenting paths with potentials, O(n^3). Deterministic for fixed input.
inline AssignmentResult min_cost_assignment(const CostMatrix& c) {
    if (c.rows != c.cols) throw std::invalid_argument("min_cost_assignment: matrix not square");
    c.validate_finite();
    const int n = c.rows;
    AssignmentResult res;
    res.agent_of_task.assign(n, -1);
    if (n == 0) return res;

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, n);  // column -> row, extra column n is the root
    for (int row = 0; row < n; ++row) {
        match[n] = row;
        int j0 = n;
        std::vector<double> dist(n + 1, inf);
        std::vector<int> prev(n + 1, -1);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = -1;
            for (int j = 0; j < n; ++j) {
                if (used[j]) continue;
                const double cur = c.at(i0, j) - u[i0] - v[j];
                if (cur < dist[j]) { dist[j] = cur; prev[j] = j0; }
                if (dist[j] < delta) { delta = dist[j]; j1 = j; }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) { u[match[j]] += delta; v[j] -= delta; }
                else dist[j] -= delta;
            }
            j0 = j1;
        } while (match[j0] != n);
        while (j0 != n) {
            const int j1 = prev[j0];
            match[j0] = match[j1];
            j0 = j1;
        }
    }
    for (int j = 0; j < n; ++j) {
        res.agent_of_task[j] = match[j];
        res.total += c.at(match[j], j);
    }
    return res;
}

// Minimum-cost assignment of every task to an agent where each agent takes at
// most `capacity` tasks. Solved exactly by replicating each agent `capacity`
// times and padding with zero-cost dummy tasks to a square matrix.
inline AssignmentResult capacity_assignment(const CostMatrix& c, int capacity) {
    if (capacity < 1) throw std::invalid_argument("capacity_assignment: capacity must be positive");
    c.validate_finite();
    const long need = static_cast<long>(c.rows) * capacity;
    if (need < c.cols)
        throw InfeasibleError(ConstraintClass::capacity,
                              "capacity * agents < tasks (" + std::to_string(need) + " < " +
                                  std::to_string(c.cols) + ")");
    const int n = static_cast<int>(need);
    CostMatrix big(n, n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int t = 0; t < c.cols; ++t)
            big.at(r, t) = c.at(r / capacity, t);
    const AssignmentResult flat = min_cost_assignment(big);
    AssignmentResult res;
    res.agent_of_task.assign(c.cols, -1);
    for (int t = 0; t < c.cols; ++t) {
        res.agent_of_task[t] = flat.agent_of_task[t] / capacity;
        res.total += c.at(res.agent_of_task[t], t);
    }
    return res;
}

// Exhaustive reference for capacity_assignment. Enumerates owner vectors in
// lexicographic order, so cost ties resolve to the lexicographically lowest
// vector. Guarded to small instances.
inline AssignmentResult brute_force_assignment(const CostMatrix& c, int capacity) {
    if (capacity < 1) throw std::invalid_argument("brute_force_assignment: capacity must be positive");
    c.validate_finite();
    if (c.cols > 8) throw std::invalid_argument("brute_force_assignment: more than 8 tasks");
    if (static_cast<long>(c.rows) * capacity < c.cols)
        throw InfeasibleError(ConstraintClass::capacity, "capacity * agents < tasks");
    double total_combos = std::pow(static_cast<double>(c.rows), c.cols);
    if (total_combos > 17000000.0)
        throw std::invalid_argument("brute_force_assignment: search space too large");

    bool non_negative = true;
    for (double v : c.cost)
        if (v < 0.0) non_negative = false;

    std::vector<int> owner(c.cols, 0), best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<int> load(c.rows, 0);
    const auto recurse = [&](auto&& self, int t, double acc) -> void {
        // Prefix pruning is only sound without negative entries. The >= keeps
        // the first minimum found, i.e. the lexicographically lowest vector.
        if (non_negative && acc >= best_cost) return;
        if (t == c.cols) {
            if (acc < best_cost) {
                best_cost = acc;
                best = owner;
            }
            return;
        }
        for (int d = 0; d < c.rows; ++d) {
            if (load[d] == capacity) continue;
            owner[t] = d;
            ++load[d];
            self(self, t + 1, acc + c.at(d, t));
            --load[d];
        }
    };
    recurse(recurse, 0, 0.0);
    AssignmentResult res;
    res.agent_of_task = best;
    res.total = c.cols == 0 ? 0.0 : best_cost;
    return res;
}

}  // namespace daran
