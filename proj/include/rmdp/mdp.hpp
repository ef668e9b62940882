#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rmdp {

using numvec = std::vector<double>;
using indvec = std::vector<std::size_t>;

/// Dense value function over states.
using ValueFunction = numvec;

/**
 * Dense S x A table stored row-major. Used for Q-values and for
 * per state-action radii.
 */
class QTable {
public:
    QTable() = default;
    QTable(std::size_t states, std::size_t actions, double fill = 0.0)
        : states_(states), actions_(actions), data_(states * actions, fill) {}

    std::size_t states() const noexcept { return states_; }
    std::size_t actions() const noexcept { return actions_; }

    double& operator()(std::size_t s, std::size_t a) { return data_[s * actions_ + a]; }
    double operator()(std::size_t s, std::size_t a) const { return data_[s * actions_ + a]; }

    std::span<double> row(std::size_t s) { return {data_.data() + s * actions_, actions_}; }
    std::span<const double> row(std::size_t s) const {
        return {data_.data() + s * actions_, actions_};
    }

    numvec& data() noexcept { return data_; }
    const numvec& data() const noexcept { return data_; }

private:
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    numvec data_;
};

/**
 * Randomized policy: one distribution over actions per state.
 * support_size[s] is the number of strictly positive entries of row s.
 */
struct StochasticPolicy {
    QTable probs;
    indvec support_size;

    StochasticPolicy() = default;
    explicit StochasticPolicy(QTable p);

    /// Deterministic policy from one action per state.
    static StochasticPolicy deterministic(const indvec& actions, std::size_t num_actions);
    /// Uniform over all actions in every state.
    static StochasticPolicy uniform(std::size_t num_states, std::size_t num_actions);

    /// Recomputes support_size from probs.
    void update_support();
};

/**
 * Nominal MDP (S, A, P0, R0, gamma, mu). The kernel is stored as
 * kernel[(s * A + a) * S + s'] so that each (s,a) row is contiguous.
 *
 * Construction does not validate; call validate_mdp.
 */
struct Mdp {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    double gamma = 0.0;
    numvec kernel;
    numvec reward;
    numvec mu;

    Mdp() = default;
    Mdp(std::size_t S, std::size_t A, double discount);

    std::span<const double> transition(std::size_t s, std::size_t a) const {
        return {kernel.data() + (s * num_actions + a) * num_states, num_states};
    }
    std::span<double> transition(std::size_t s, std::size_t a) {
        return {kernel.data() + (s * num_actions + a) * num_states, num_states};
    }
    double& r(std::size_t s, std::size_t a) { return reward[s * num_actions + a]; }
    double r(std::size_t s, std::size_t a) const { return reward[s * num_actions + a]; }
};

/// Tolerance for row sums of exactly constructed models.
inline constexpr double exact_sum_tolerance = 1e-12;
/// Looser tolerance for models parsed from decimal text.
inline constexpr double file_sum_tolerance = 1e-9;

/**
 * Lists every violated model invariant with its indices. An empty
 * result means the model is valid.
 */
std::vector<std::string> validate_mdp(const Mdp& m, double sum_tol = exact_sum_tolerance);

/// Throws std::invalid_argument unless the table sizes match S and A.
void check_shapes(const Mdp& m);

/// Q(s,a) = R0(s,a) + gamma * P0(s,a,.) v
QTable q_from_value(const Mdp& m, const ValueFunction& v);

/// Writes q_from_value into an existing table of the right shape.
void q_from_value(const Mdp& m, std::span<const double> v, QTable& out);

ValueFunction bellman_policy(const Mdp& m, const ValueFunction& v, const StochasticPolicy& pi);

ValueFunction bellman_optimal(const Mdp& m, const ValueFunction& v);

/// Index of the largest element, lowest index on ties.
std::size_t argmax(std::span<const double> x);

/// Sup norm of the difference.
double max_abs_diff(std::span<const double> x, std::span<const double> y);

} // namespace rmdp
