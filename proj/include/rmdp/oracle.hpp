#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "rmdp/dispersion.hpp"
#include "rmdp/mdp.hpp"
#include "rmdp/robust_bellman.hpp"

/**
 * Brute-force reference computations for small instances. Nothing here
 * calls the closed forms or searches of the main library; only the data
 * types are shared.
 */
namespace rmdp::oracle {

struct OracleConfig {
    double grid_step = 1e-3;
    std::size_t num_noise_samples = 10000;
    std::uint64_t seed = 42;
};

struct NoiseResult {
    numvec noise;
    /// <noise, v>
    double value = 0.0;
};

/**
 * Minimizer of <c, v> over {||c||_p <= radius, sum c = 0}, from the
 * first-order conditions with omega found by golden-section search.
 */
NoiseResult worst_case_noise(std::span<const double> v, NormParam p, double radius);

struct BruteOperatorResult {
    ValueFunction value;
    /// smallest (sampled objective - analytic objective); negative means a
    /// sample beat the analytic worst case
    double worst_sample_gap = 0.0;
    std::size_t samples = 0;
};

/**
 * sa-rectangular policy evaluation: worst reward -alpha plus the analytic
 * worst kernel noise per (s,a), cross-checked against random feasible
 * (reward, kernel) perturbations.
 */
BruteOperatorResult brute_sa_operator(const Mdp& m, const UncertaintySpec& u,
                                      const ValueFunction& v, const StochasticPolicy& pi,
                                      const OracleConfig& cfg = {});

/**
 * s-rectangular policy evaluation: splits the per-state budgets over
 * actions by the Hoelder-tight allocation and evaluates each action with
 * worst_case_noise; random allocations with ||budget||_p <= radius are
 * sampled as a check.
 */
BruteOperatorResult brute_s_policy_operator(const Mdp& m, const UncertaintySpec& u,
                                            const ValueFunction& v, const StochasticPolicy& pi,
                                            const OracleConfig& cfg = {});

struct SimplexResult {
    double zeta = 0.0;
    numvec weights;
};

/// Best point of -sigma ||c||_q + <c, q_row> on a simplex grid (A <= 3).
SimplexResult brute_s_improvement(std::span<const double> q_row, double sigma, NormParam p,
                                  const OracleConfig& cfg = {});

/// Grid search for omega over [min v, max v].
DispersionResult brute_dispersion(std::span<const double> v, NormParam p,
                                  const OracleConfig& cfg = {});

/// Independent Q lookahead: R0 + gamma P0 v by explicit loops.
QTable lookahead(const Mdp& m, const ValueFunction& v);

} // namespace rmdp::oracle
