#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rmdp/mdp.hpp"
#include "rmdp/robust_bellman.hpp"

namespace rmdp {

struct SolveConfig {
    /// sup-norm distance to the optimal value function
    double target_eps = 1e-6;
    std::size_t max_sweeps = 100000;
    /// dispersion and level search tolerance; 0 means target_eps (1 - gamma) / 6
    double inner_tol = 0.0;
    bool record_trace = false;
    /// starting values; empty means zeros
    ValueFunction v0;
    /// called on each new iterate, e.g. to inject approximation error
    std::function<void(std::span<double>, std::size_t)> perturb;
};

struct SweepRecord {
    double residual = 0.0;
    double kappa = 0.0;
};

struct SolveResult {
    ValueFunction value;
    StochasticPolicy policy;
    indvec chi;
    std::size_t sweeps = 0;
    /// ||v_{n+1} - v_n||_inf of the last sweep
    double final_residual = 0.0;
    /// residual level that stops the iteration
    double threshold = 0.0;
    bool converged = false;
    std::vector<SweepRecord> trace;
    /// time spent computing the dispersion, and in total
    double kappa_seconds = 0.0;
    double total_seconds = 0.0;
};

/// target_eps (1 - gamma) / (2 gamma); 0 when gamma = 0.
double stopping_threshold(double target_eps, double gamma);

/**
 * Synchronous value iteration with the operator chosen by u.rect. Stops
 * when the residual drops below stopping_threshold, which bounds the
 * distance to the fixed point by target_eps. Hitting max_sweeps returns
 * the partial result with converged = false.
 */
SolveResult solve(const Mdp& m, const UncertaintySpec& u, const SolveConfig& cfg = {});

/**
 * Q-value iteration for sa-rectangular sets:
 * Q_{n+1} = R0 - alpha - gamma beta kappa(v_n) + gamma P0 v_n, v_n = max_a Q_n.
 */
SolveResult solve_q_recursion(const Mdp& m, const UncertaintySpec& u, const SolveConfig& cfg = {});

/// gamma^n (eps / (1 - gamma) + v0_gap) + eps / (1 - gamma)
double approximate_iteration_bound(double eps_per_step, double gamma, double v0_gap, std::size_t n);

/**
 * Solves the level equation with penalty alpha + gamma beta kappa and with
 * kappa shifted by +-eps, and checks that the level moves by at most
 * gamma beta eps (plus the solver tolerance).
 */
bool kappa_error_propagation_check(std::span<const double> b, double alpha, double beta,
                                   double gamma, NormParam p, double eps, double kappa,
                                   double tol = default_pouring_tol);

} // namespace rmdp
