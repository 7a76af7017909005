#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "embedding_space.hpp"
#include "errors.hpp"

namespace clsts {

/// A maximum-weight perfect matching. matching[i] is the column assigned to
/// row i; total is the sum of the selected weights.
struct assignment_result {
    std::vector<std::size_t> matching;
    double total = 0.0;
};

namespace detail {

/// Kuhn-Munkres in the O(n^3) shortest-augmenting-path form, minimizing
/// `cost`. Fills col_to_row and the dual potentials u (rows) and v (columns);
/// on exit u[i] + v[j] <= cost(i,j) with equality on matched edges.
inline void hungarian_min(const dense_matrix& cost, std::vector<std::size_t>& col_to_row,
                          std::vector<double>& u, std::vector<double>& v) {
    const std::size_t n = static_cast<std::size_t>(cost.rows());
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based with a virtual column 0, the classic formulation
    std::vector<double> pu(n + 1, 0.0), pv(n + 1, 0.0), min_to(n + 1);
    std::vector<std::size_t> matched_row(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        matched_row[0] = i;
        std::size_t j0 = 0;
        std::fill(min_to.begin(), min_to.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            std::size_t i0 = matched_row[j0], j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                             pu[i0] - pv[j];
                if (cur < min_to[j]) {
                    min_to[j] = cur;
                    way[j] = j0;
                }
                if (min_to[j] < delta) {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    pu[matched_row[j]] += delta;
                    pv[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
        } while (matched_row[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    col_to_row.assign(n, 0);
    u.assign(n, 0.0);
    v.assign(n, 0.0);
    for (std::size_t j = 1; j <= n; ++j) col_to_row[j - 1] = matched_row[j] - 1;
    for (std::size_t i = 1; i <= n; ++i) u[i - 1] = pu[i];
    for (std::size_t j = 1; j <= n; ++j) v[j - 1] = pv[j];
}

/// Kuhn-style augmenting search over an adjacency structure restricted to
/// still-free columns; used to re-route a displaced row.
inline bool reroute(std::size_t row, const std::vector<std::vector<std::size_t>>& tight_cols,
                    const std::vector<char>& col_fixed, std::vector<std::size_t>& row_to_col,
                    std::vector<std::size_t>& col_to_row, std::vector<char>& visited) {
    for (std::size_t col : tight_cols[row]) {
        if (col_fixed[col] || visited[col]) continue;
        visited[col] = 1;
        std::size_t occupant = col_to_row[col];
        if (occupant == std::numeric_limits<std::size_t>::max() ||
            reroute(occupant, tight_cols, col_fixed, row_to_col, col_to_row, visited)) {
            row_to_col[row] = col;
            col_to_row[col] = row;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Exact maximum-weight assignment of a square matrix. Deterministic: among
/// optimal matchings, the lexicographically smallest matching vector is
/// returned. Every optimal matching lives inside the zero-reduced-cost edge
/// graph of the dual solution, so the extraction greedily fixes the smallest
/// feasible column per row with an augmenting-path feasibility check.
inline assignment_result solve_max_assignment(const dense_matrix& weights) {
    if (weights.rows() < 1 || weights.rows() != weights.cols())
        throw domain_error("assignment requires a nonempty square matrix");
    if (!weights.allFinite()) throw domain_error("assignment weights must be finite");

    const std::size_t n = static_cast<std::size_t>(weights.rows());
    dense_matrix cost = -weights;

    std::vector<std::size_t> col_to_row;
    std::vector<double> u, v;
    detail::hungarian_min(cost, col_to_row, u, v);

    // tight edges: zero reduced cost up to numerical slack (dual arithmetic
    // error grows with n, genuine weight gaps sit many orders above this)
    const double slack = 1e-12 * static_cast<double>(n) * std::max(1.0, weights.cwiseAbs().maxCoeff());
    std::vector<std::vector<std::size_t>> tight_cols(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - u[i] - v[j] <=
                slack)
                tight_cols[i].push_back(j);

    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> row_to_col(n, none), cur_col_to_row(n, none);
    for (std::size_t j = 0; j < n; ++j) {
        row_to_col[col_to_row[j]] = j;
        cur_col_to_row[j] = col_to_row[j];
    }

    std::vector<char> col_fixed(n, 0), visited(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t candidate : tight_cols[i]) {  // ascending by construction
            if (col_fixed[candidate]) continue;
            if (row_to_col[i] == candidate) break;  // already there, smallest feasible
            // try to move row i onto `candidate`, re-routing its occupant
            std::size_t old_col = row_to_col[i];
            std::size_t occupant = cur_col_to_row[candidate];
            cur_col_to_row[old_col] = none;
            row_to_col[i] = candidate;
            cur_col_to_row[candidate] = i;
            if (occupant == none) break;
            std::fill(visited.begin(), visited.end(), 0);
            visited[candidate] = 1;
            if (detail::reroute(occupant, tight_cols, col_fixed, row_to_col, cur_col_to_row,
                                visited))
                break;
            // rollback
            row_to_col[i] = old_col;
            cur_col_to_row[old_col] = i;
            cur_col_to_row[candidate] = occupant;
        }
        col_fixed[row_to_col[i]] = 1;
    }

    assignment_result result;
    result.matching = std::move(row_to_col);
    for (std::size_t i = 0; i < n; ++i)
        result.total +=
            weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(result.matching[i]));
    return result;
}

}  // namespace clsts
