#include "rmdp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmdp {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

double inner_tolerance(const Mdp& m, const SolveConfig& cfg) {
    if (cfg.inner_tol > 0.0) return cfg.inner_tol;
    return cfg.target_eps * (1.0 - m.gamma) / 6.0;
}

void check_config(const Mdp& m, const UncertaintySpec& u, const SolveConfig& cfg) {
    if (!(cfg.target_eps > 0.0)) throw std::invalid_argument("target_eps must be positive");
    if (cfg.inner_tol < 0.0) throw std::invalid_argument("inner_tol must be positive");
    if (!validate_mdp(m, file_sum_tolerance).empty()) throw std::invalid_argument("invalid mdp");
    if (!u.validate(m.num_states, m.num_actions).empty())
        throw std::invalid_argument("uncertainty radii do not match the model");
    if (!cfg.v0.empty() && cfg.v0.size() != m.num_states)
        throw std::invalid_argument("initial value length mismatch");
}

} // namespace

double stopping_threshold(double target_eps, double gamma) {
    if (gamma == 0.0) return 0.0;
    return target_eps * (1.0 - gamma) / (2.0 * gamma);
}

SolveResult solve(const Mdp& m, const UncertaintySpec& u, const SolveConfig& cfg) {
    check_config(m, u, cfg);
    const auto t_start = clock_type::now();
    const double tol = inner_tolerance(m, cfg);
    const std::size_t S = m.num_states;

    SolveResult res;
    res.threshold = stopping_threshold(cfg.target_eps, m.gamma);
    ValueFunction v = cfg.v0.empty() ? ValueFunction(S, 0.0) : cfg.v0;
    ValueFunction next(S);
    OptimalSweep sweep(m, u, tol);

    double kappa = 0.0;
    while (res.sweeps < cfg.max_sweeps) {
        if (u.rect != Rect::none) {
            const auto t0 = clock_type::now();
            kappa = kappa_for_penalty(v, u.p, tol).kappa;
            res.kappa_seconds += seconds_since(t0);
        }
        sweep.apply(v, kappa, next);
        if (cfg.perturb) cfg.perturb(next, res.sweeps);
        ++res.sweeps;
        res.final_residual = max_abs_diff(next, v);
        if (cfg.record_trace) res.trace.push_back({res.final_residual, kappa});
        std::swap(v, next);
        if (res.final_residual <= res.threshold || m.gamma == 0.0) {
            res.converged = true;
            break;
        }
    }

    // greedy policy of the returned values
    if (u.rect != Rect::none) kappa = kappa_for_penalty(v, u.p, tol).kappa;
    sweep.apply(v, kappa, next);
    const OperatorOutput out = sweep.output(next, kappa);
    res.policy = greedy_policy(out, u.p);
    res.chi = out.chi;
    res.value = std::move(v);
    res.total_seconds = seconds_since(t_start);
    return res;
}

SolveResult solve_q_recursion(const Mdp& m, const UncertaintySpec& u, const SolveConfig& cfg) {
    if (u.rect != Rect::sa) throw std::invalid_argument("Q recursion needs rect sa");
    check_config(m, u, cfg);
    const auto t_start = clock_type::now();
    const double tol = inner_tolerance(m, cfg);
    const std::size_t S = m.num_states, A = m.num_actions;

    SolveResult res;
    res.threshold = stopping_threshold(cfg.target_eps, m.gamma);
    // Q_0 = v0 in every action so that v_0 = max_a Q_0 = v0
    QTable q(S, A, 0.0);
    if (!cfg.v0.empty())
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) q(s, a) = cfg.v0[s];
    ValueFunction v(S), vnext(S);
    QTable lookahead(S, A);
    auto max_rows = [&](const QTable& t, ValueFunction& out) {
        for (std::size_t s = 0; s < S; ++s) out[s] = t(s, argmax(t.row(s)));
    };
    max_rows(q, v);

    while (res.sweeps < cfg.max_sweeps) {
        const auto t0 = clock_type::now();
        const double kappa = kappa_for_penalty(v, u.p, tol).kappa;
        res.kappa_seconds += seconds_since(t0);
        q_from_value(m, v, lookahead);
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a)
                q(s, a) = lookahead(s, a) - u.alpha[s * A + a] -
                          m.gamma * u.beta[s * A + a] * kappa;
        max_rows(q, vnext);
        if (cfg.perturb) cfg.perturb(vnext, res.sweeps);
        ++res.sweeps;
        res.final_residual = max_abs_diff(vnext, v);
        if (cfg.record_trace) res.trace.push_back({res.final_residual, kappa});
        std::swap(v, vnext);
        if (res.final_residual <= res.threshold || m.gamma == 0.0) {
            res.converged = true;
            break;
        }
    }

    indvec best(S);
    for (std::size_t s = 0; s < S; ++s) best[s] = argmax(q.row(s));
    res.policy = StochasticPolicy::deterministic(best, A);
    res.chi.assign(S, 1);
    res.value = std::move(v);
    res.total_seconds = seconds_since(t_start);
    return res;
}

double approximate_iteration_bound(double eps_per_step, double gamma, double v0_gap, std::size_t n) {
    if (!(eps_per_step >= 0.0)) throw std::invalid_argument("eps_per_step must be nonnegative");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0,1)");
    const double ball = eps_per_step / (1.0 - gamma);
    return std::pow(gamma, double(n)) * (ball + v0_gap) + ball;
}

bool kappa_error_propagation_check(std::span<const double> b, double alpha, double beta,
                                   double gamma, NormParam p, double eps, double kappa,
                                   double tol) {
    auto level = [&](double k) {
        WaterPouringProblem prob{numvec(b.begin(), b.end()),
                                 std::max(0.0, alpha + gamma * beta * k), p};
        return solve_water_pouring(prob, tol).zeta;
    };
    const double zeta = level(kappa);
    double scale = std::abs(alpha) + gamma * beta * (std::abs(kappa) + eps);
    for (double x : b) scale = std::max(scale, std::abs(x));
    // each level is within tol / 2 of its root, up to rounding
    const double bound = gamma * beta * eps + tol + 8.0 * scale * std::numeric_limits<double>::epsilon();
    for (double shifted : {kappa - eps, kappa + eps})
        if (std::abs(level(shifted) - zeta) > bound) return false;
    return true;
}

} // namespace rmdp
