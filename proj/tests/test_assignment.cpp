#include <catch2/catch_amalgamated.hpp>

#include <chrono>

#include "clsts/assignment.hpp"
#include "support.hpp"

using namespace clsts;

TEST_CASE("assignment picks the obvious diagonal") {
    dense_matrix w{{1.0, 0.0}, {0.0, 1.0}};
    auto result = solve_max_assignment(w);
    CHECK(result.matching == std::vector<std::size_t>{0, 1});
    CHECK(result.total == Catch::Approx(2.0));
}

TEST_CASE("assignment beats the alternative permutation") {
    dense_matrix w{{0.9, 0.1}, {0.2, 0.8}};
    auto result = solve_max_assignment(w);
    CHECK(result.matching == std::vector<std::size_t>{0, 1});
    CHECK(result.total == Catch::Approx(1.7));  // vs 0.3 for the swap
}

TEST_CASE("all-equal matrix resolves to the lexicographic identity") {
    dense_matrix w = dense_matrix::Constant(3, 3, 0.5);
    auto result = solve_max_assignment(w);
    CHECK(result.matching == std::vector<std::size_t>{0, 1, 2});
    CHECK(result.total == Catch::Approx(1.5));
}

TEST_CASE("assignment input validation") {
    CHECK_THROWS_AS(solve_max_assignment(dense_matrix(0, 0)), domain_error);
    CHECK_THROWS_AS(solve_max_assignment(dense_matrix(2, 3)), domain_error);
    dense_matrix bad(2, 2);
    bad << 1.0, 2.0, 3.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_max_assignment(bad), domain_error);
}

TEST_CASE("single cell and negative weights") {
    dense_matrix one(1, 1);
    one << -3.5;
    auto result = solve_max_assignment(one);
    CHECK(result.matching == std::vector<std::size_t>{0});
    CHECK(result.total == Catch::Approx(-3.5));
}

TEST_CASE("matches brute force on random matrices") {
    test_support::rng r(7);
    for (std::size_t n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 60; ++trial) {
            dense_matrix w = test_support::random_matrix(
                r, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), -1.0, 1.0);
            auto got = solve_max_assignment(w);
            auto [best, best_total] = test_support::brute_max_assignment(w);
            CHECK(std::abs(got.total - best_total) < 1e-9);
        }
    }
}

TEST_CASE("tie-break yields the lexicographically smallest optimum") {
    SECTION("hand-made ties") {
        dense_matrix w{{2.0, 2.0}, {1.0, 1.0}};
        CHECK(solve_max_assignment(w).matching == std::vector<std::size_t>{0, 1});
        dense_matrix w2{{1.0, 1.0}, {1.0, 1.0}};
        CHECK(solve_max_assignment(w2).matching == std::vector<std::size_t>{0, 1});
    }
    SECTION("random matrices with duplicated entries to force ties") {
        test_support::rng r(11);
        for (int trial = 0; trial < 120; ++trial) {
            const std::size_t n = 2 + r.index(3);
            dense_matrix w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                for (Eigen::Index j = 0; j < w.cols(); ++j)
                    w(i, j) = static_cast<double>(r.index(3));  // heavy ties
            auto got = solve_max_assignment(w);
            auto [best, best_total] = test_support::brute_max_assignment(w);
            CHECK(std::abs(got.total - best_total) < 1e-9);
            CHECK(got.matching == best);
        }
    }
}

TEST_CASE("adding a constant shifts the total by n * c") {
    test_support::rng r(13);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + r.index(6);
        dense_matrix w = test_support::random_matrix(r, static_cast<Eigen::Index>(n),
                                                     static_cast<Eigen::Index>(n), -1.0, 1.0);
        const double c = r.uniform(-2.0, 2.0);
        auto base = solve_max_assignment(w);
        auto shifted = solve_max_assignment(w.array() + c);
        CHECK(shifted.total ==
              Catch::Approx(base.total + static_cast<double>(n) * c).margin(1e-9));
        // the shifted optimum is optimal for the shifted brute force too
        if (n <= 6) {
            auto [perm, total] = test_support::brute_max_assignment(dense_matrix(w.array() + c));
            CHECK(std::abs(shifted.total - total) < 1e-9);
        }
    }
}

TEST_CASE("n=500 solves within the cubic-scaling budget") {
    test_support::rng r(17);
    dense_matrix w = test_support::random_matrix(r, 500, 500, -1.0, 1.0);
    const auto start = std::chrono::steady_clock::now();
    auto result = solve_max_assignment(w);
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    CHECK(elapsed.count() < 5.0);
    CHECK(result.matching.size() == 500);
    // sanity: must beat the identity assignment almost surely
    double identity_total = 0.0;
    for (Eigen::Index i = 0; i < 500; ++i) identity_total += w(i, i);
    CHECK(result.total >= identity_total);
}
