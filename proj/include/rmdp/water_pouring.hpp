#pragma once

#include <cstddef>
#include <span>

#include "rmdp/dispersion.hpp"
#include "rmdp/mdp.hpp"

namespace rmdp {

/**
 * max over the simplex of -alpha ||c||_q + <c, b>, with q the conjugate
 * of p and b sorted in descending order.
 */
struct WaterPouringProblem {
    numvec b;
    double alpha = 0.0;
    NormParam p;
};

struct WaterPouringResult {
    double zeta = 0.0;
    /// number of entries with b_i >= zeta
    std::size_t chi = 0;
    numvec weights;
    /// |sum_{b_i >= zeta} (b_i - zeta)^p - alpha^p|
    double residual = 0.0;
    std::size_t iterations = 0;
};

inline constexpr double default_pouring_tol = 1e-12;

/// Optimal level and active count without the weights.
struct WaterLevel {
    double zeta = 0.0;
    std::size_t chi = 0;
    std::size_t iterations = 0;
};

/**
 * Bisection for zeta on [b_1 - alpha, b_1]. Dispatches p = 1 and p = inf
 * to the exact routines.
 */
WaterPouringResult solve_general(const WaterPouringProblem& prob, double tol = default_pouring_tol);

/**
 * Adds actions one at a time in decreasing order of b and stops at the
 * first k with lambda_k > b_{k+1}. Exact for p = 1 and p = 2, per-step
 * bisection otherwise.
 */
WaterPouringResult solve_iterative(const WaterPouringProblem& prob, double tol = default_pouring_tol);

/// p = inf: zeta = b_1 - alpha, weights e_1.
WaterPouringResult solve_linf(const WaterPouringProblem& prob);

/// Picks the exact routine for p in {1, 2, inf} and bisection otherwise.
WaterPouringResult solve_water_pouring(const WaterPouringProblem& prob,
                                       double tol = default_pouring_tol);

/// max{k : sum_{i<=k} (b_i - b_k)^p <= alpha^p}, computed without zeta.
std::size_t active_count(std::span<const double> b, double alpha, NormParam p);

/**
 * Allocation-free level computation used by the operator sweeps.
 * b must be sorted descending and alpha > 0.
 */
WaterLevel water_level(std::span<const double> b, double alpha, NormParam p, double tol);

/**
 * Simplex weights proportional to (b_i - zeta)^(p-1) over the first chi
 * entries; uniform over them for p = 1 and e_1 for p = inf.
 */
void pouring_weights(std::span<const double> b, double zeta, std::size_t chi, NormParam p,
                     std::span<double> out);

/// |sum_{b_i >= zeta}(b_i - zeta)^p - alpha^p|; for p = inf, |b_1 - zeta - alpha|.
double pouring_residual(std::span<const double> b, double zeta, double alpha, NormParam p);

} // namespace rmdp
