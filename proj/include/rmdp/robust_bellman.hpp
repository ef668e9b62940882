#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rmdp/dispersion.hpp"
#include "rmdp/mdp.hpp"
#include "rmdp/water_pouring.hpp"

namespace rmdp {

/// Rectangularity of the uncertainty set.
enum class Rect { none, sa, s };

std::string to_string(Rect r);
Rect parse_rect(std::string_view text);

/**
 * L_p ball radii around the nominal reward (alpha) and kernel (beta).
 *
 * rect = sa: alpha and beta have S * A entries (row-major).
 * rect = s:  alpha and beta have S entries.
 * rect = none: both empty.
 */
struct UncertaintySpec {
    Rect rect = Rect::none;
    NormParam p;
    numvec alpha;
    numvec beta;

    static UncertaintySpec none() { return {}; }
    static UncertaintySpec sa(NormParam p, numvec alpha, numvec beta);
    static UncertaintySpec s(NormParam p, numvec alpha, numvec beta);
    /// Same radii everywhere.
    static UncertaintySpec uniform(Rect rect, NormParam p, std::size_t S, std::size_t A,
                                   double alpha, double beta);

    /// Radii multiplied by f.
    UncertaintySpec scaled(double f) const;

    /// Shape and sign problems; empty when consistent with an S x A model.
    std::vector<std::string> validate(std::size_t S, std::size_t A) const;
};

/// One application of a robust (or nominal) Bellman operator.
struct OperatorOutput {
    ValueFunction value;
    /// nominal lookahead Q
    QTable q;
    indvec chi;
    /// effective per-state penalty
    numvec sigma;
    /// the conjugate-index dispersion used in the penalty
    double kappa = 0.0;
    /// maximizing (or most probable) action per state
    indvec best_action;
    Rect rect = Rect::none;
    NormParam p;
};

OperatorOutput sa_policy_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                  const StochasticPolicy& pi, double tol = default_dispersion_tol);

OperatorOutput sa_optimal_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                   double tol = default_dispersion_tol);

/// value(s) = -sigma_s ||pi(.|s)||_q + sum_a pi(a|s) Q(s,a)
OperatorOutput s_policy_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                 const StochasticPolicy& pi, double tol = default_dispersion_tol);

/**
 * Per state, solves the water-pouring problem with b = sorted Q(s,.) and
 * alpha = sigma_s. tol bounds both the dispersion and the level searches.
 */
OperatorOutput s_optimal_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                  double tol = default_pouring_tol);

/// The nominal optimal operator in OperatorOutput form.
OperatorOutput nominal_optimal_operator(const Mdp& m, const ValueFunction& v);

/// Dispatches on u.rect.
OperatorOutput optimal_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                double tol = default_pouring_tol);

/**
 * Greedy policy of an optimal operator output. For rect = s the policy
 * puts mass proportional to (Q - value)^(p-1) on actions with Q >= value;
 * uniform over the top chi actions for p = 1, the best action for p = inf.
 * Other rectangularities give the deterministic best action.
 */
StochasticPolicy greedy_policy(const OperatorOutput& out, NormParam p);

/**
 * Reusable buffers for repeated optimal sweeps at a fixed model. The
 * dispersion is supplied by the caller so it is computed once per sweep.
 */
class OptimalSweep {
public:
    OptimalSweep(const Mdp& m, const UncertaintySpec& u, double tol);

    /// Writes T v into out. kappa is ignored for rect = none.
    void apply(std::span<const double> v, double kappa, std::span<double> out);

    const QTable& q() const noexcept { return q_; }
    const indvec& chi() const noexcept { return chi_; }
    const numvec& sigma() const noexcept { return sigma_; }
    const indvec& best_action() const noexcept { return best_; }

    /// Packs the buffers of the last apply call.
    OperatorOutput output(std::span<const double> value, double kappa) const;

private:
    void state_s(std::size_t s, double kappa, double& value);

    const Mdp& m_;
    const UncertaintySpec& u_;
    double tol_;
    QTable q_;
    indvec chi_;
    numvec sigma_;
    indvec best_;
    std::vector<std::pair<double, std::size_t>> order_;
    numvec sorted_;
};

/// Actions of Q row s ordered by decreasing value, lower index first on ties.
indvec sorted_actions(std::span<const double> q_row);

struct StateDiagnostics {
    std::size_t chi_reported = 0;
    /// |{a : Q(s,a) >= value(s)}|
    std::size_t chi_recount = 0;
    /// Q(s, a_chi) - value(s)
    double upper_slack = 0.0;
    /// value(s) - Q(s, a_{chi+1}); NaN when chi = A
    double lower_slack = 0.0;
    /// |sum_{Q >= value}(Q - value)^p - sigma^p|
    double residual = 0.0;
    bool pass = false;
};

struct PropertyReport {
    std::vector<StateDiagnostics> states;
    bool all_pass = true;
};

/**
 * Recounts the active actions and checks
 * Q(s,a_{chi+1}) <= value(s) <= Q(s,a_chi), each within slack.
 */
PropertyReport verify_properties(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                 const OperatorOutput& out, double slack = 1e-9);

/**
 * Minimizer of <c, v> over {||c||_p <= radius, sum c = 0} built from the
 * conjugate-index dispersion of v.
 */
numvec kernel_worst_noise(std::span<const double> v, NormParam p, double radius);

/**
 * Warnings for kernel radii where the worst-case noise at the nominal
 * optimal value function leaves [0,1] in some entry.
 */
std::vector<std::string> radii_feasibility_warnings(const Mdp& m, const UncertaintySpec& u);

} // namespace rmdp
