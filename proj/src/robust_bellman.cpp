#include "rmdp/robust_bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rmdp {

std::string to_string(Rect r) {
    switch (r) {
    case Rect::none: return "none";
    case Rect::sa: return "sa";
    case Rect::s: return "s";
    }
    return "none";
}

Rect parse_rect(std::string_view text) {
    if (text == "none") return Rect::none;
    if (text == "sa") return Rect::sa;
    if (text == "s") return Rect::s;
    throw std::invalid_argument("unknown rectangularity '" + std::string(text) + "'");
}

UncertaintySpec UncertaintySpec::sa(NormParam p, numvec alpha, numvec beta) {
    return {Rect::sa, p, std::move(alpha), std::move(beta)};
}

UncertaintySpec UncertaintySpec::s(NormParam p, numvec alpha, numvec beta) {
    return {Rect::s, p, std::move(alpha), std::move(beta)};
}

UncertaintySpec UncertaintySpec::uniform(Rect rect, NormParam p, std::size_t S, std::size_t A,
                                         double alpha, double beta) {
    const std::size_t n = rect == Rect::sa ? S * A : rect == Rect::s ? S : 0;
    return {rect, p, numvec(n, alpha), numvec(n, beta)};
}

UncertaintySpec UncertaintySpec::scaled(double f) const {
    UncertaintySpec out = *this;
    for (double& x : out.alpha) x *= f;
    for (double& x : out.beta) x *= f;
    return out;
}

std::vector<std::string> UncertaintySpec::validate(std::size_t S, std::size_t A) const {
    std::vector<std::string> out;
    const std::size_t n = rect == Rect::sa ? S * A : rect == Rect::s ? S : 0;
    if (alpha.size() != n || beta.size() != n) {
        std::ostringstream msg;
        msg << "radii for rect " << to_string(rect) << " need " << n << " entries, got "
            << alpha.size() << " (alpha) and " << beta.size() << " (beta)";
        out.push_back(msg.str());
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(alpha[i] >= 0.0) || !std::isfinite(alpha[i]))
            out.push_back("alpha[" + std::to_string(i) + "] is not a finite nonnegative number");
        if (!(beta[i] >= 0.0) || !std::isfinite(beta[i]))
            out.push_back("beta[" + std::to_string(i) + "] is not a finite nonnegative number");
    }
    return out;
}

namespace {

void require(const Mdp& m, const UncertaintySpec& u, Rect rect, const ValueFunction& v) {
    if (u.rect != rect)
        throw std::invalid_argument("operator needs rect " + to_string(rect) + ", got " +
                                    to_string(u.rect));
    check_shapes(m);
    if (v.size() != m.num_states) throw std::invalid_argument("value function length mismatch");
    if (!u.validate(m.num_states, m.num_actions).empty())
        throw std::invalid_argument("uncertainty radii do not match the model");
}

void require_policy(const Mdp& m, const StochasticPolicy& pi) {
    if (pi.probs.states() != m.num_states || pi.probs.actions() != m.num_actions)
        throw std::invalid_argument("policy shape mismatch");
}

OperatorOutput blank(const Mdp& m, const UncertaintySpec& u) {
    OperatorOutput out;
    out.value.assign(m.num_states, 0.0);
    out.chi.assign(m.num_states, 1);
    out.sigma.assign(m.num_states, 0.0);
    out.best_action.assign(m.num_states, 0);
    out.rect = u.rect;
    out.p = u.p;
    return out;
}

} // namespace

OperatorOutput sa_policy_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                  const StochasticPolicy& pi, double tol) {
    require(m, u, Rect::sa, v);
    require_policy(m, pi);
    OperatorOutput out = blank(m, u);
    out.kappa = kappa_for_penalty(v, u.p, tol).kappa;
    out.q = q_from_value(m, v);
    const std::size_t A = m.num_actions;
    for (std::size_t s = 0; s < m.num_states; ++s) {
        double val = 0.0, pen = 0.0;
        for (std::size_t a = 0; a < A; ++a) {
            const double penalty = u.alpha[s * A + a] + m.gamma * u.beta[s * A + a] * out.kappa;
            val += pi.probs(s, a) * (out.q(s, a) - penalty);
            pen += pi.probs(s, a) * penalty;
        }
        out.value[s] = val;
        out.sigma[s] = pen;
        out.best_action[s] = argmax(pi.probs.row(s));
    }
    return out;
}

OperatorOutput sa_optimal_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                   double tol) {
    require(m, u, Rect::sa, v);
    OptimalSweep sweep(m, u, tol);
    const double kappa = kappa_for_penalty(v, u.p, tol).kappa;
    ValueFunction value(m.num_states);
    sweep.apply(v, kappa, value);
    return sweep.output(value, kappa);
}

OperatorOutput s_policy_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                 const StochasticPolicy& pi, double tol) {
    require(m, u, Rect::s, v);
    require_policy(m, pi);
    OperatorOutput out = blank(m, u);
    out.kappa = kappa_for_penalty(v, u.p, tol).kappa;
    out.q = q_from_value(m, v);
    const NormParam q = conjugate(u.p);
    for (std::size_t s = 0; s < m.num_states; ++s) {
        const auto row = pi.probs.row(s);
        out.sigma[s] = u.alpha[s] + m.gamma * u.beta[s] * out.kappa;
        double val = 0.0;
        for (std::size_t a = 0; a < m.num_actions; ++a) val += row[a] * out.q(s, a);
        if (out.sigma[s] != 0.0) val -= out.sigma[s] * lp_norm(row, q);
        out.value[s] = val;
        out.best_action[s] = argmax(row);
    }
    return out;
}

OperatorOutput s_optimal_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                  double tol) {
    require(m, u, Rect::s, v);
    OptimalSweep sweep(m, u, tol);
    const double kappa = kappa_for_penalty(v, u.p, tol).kappa;
    ValueFunction value(m.num_states);
    sweep.apply(v, kappa, value);
    return sweep.output(value, kappa);
}

OperatorOutput nominal_optimal_operator(const Mdp& m, const ValueFunction& v) {
    const UncertaintySpec u = UncertaintySpec::none();
    require(m, u, Rect::none, v);
    OptimalSweep sweep(m, u, default_pouring_tol);
    ValueFunction value(m.num_states);
    sweep.apply(v, 0.0, value);
    return sweep.output(value, 0.0);
}

OperatorOutput optimal_operator(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                double tol) {
    switch (u.rect) {
    case Rect::sa: return sa_optimal_operator(m, u, v, tol);
    case Rect::s: return s_optimal_operator(m, u, v, tol);
    case Rect::none: break;
    }
    return nominal_optimal_operator(m, v);
}

OptimalSweep::OptimalSweep(const Mdp& m, const UncertaintySpec& u, double tol)
    : m_(m), u_(u), tol_(tol), q_(m.num_states, m.num_actions), chi_(m.num_states, 1),
      sigma_(m.num_states, 0.0), best_(m.num_states, 0), order_(m.num_actions),
      sorted_(m.num_actions) {
    check_shapes(m);
    if (!u.validate(m.num_states, m.num_actions).empty())
        throw std::invalid_argument("uncertainty radii do not match the model");
}

void OptimalSweep::apply(std::span<const double> v, double kappa, std::span<double> out) {
    q_from_value(m_, v, q_);
    const std::size_t S = m_.num_states, A = m_.num_actions;
    if (out.size() != S) throw std::invalid_argument("output length mismatch");
    switch (u_.rect) {
    case Rect::none:
        for (std::size_t s = 0; s < S; ++s) {
            const auto row = q_.row(s);
            best_[s] = argmax(row);
            out[s] = row[best_[s]];
        }
        break;
    case Rect::sa:
        for (std::size_t s = 0; s < S; ++s) {
            const auto row = q_.row(s);
            std::size_t best = 0;
            double best_val = -std::numeric_limits<double>::infinity(), best_pen = 0.0;
            for (std::size_t a = 0; a < A; ++a) {
                const double pen = u_.alpha[s * A + a] + m_.gamma * u_.beta[s * A + a] * kappa;
                const double val = row[a] - pen;
                if (val > best_val) {
                    best_val = val;
                    best_pen = pen;
                    best = a;
                }
            }
            best_[s] = best;
            sigma_[s] = best_pen;
            out[s] = best_val;
        }
        break;
    case Rect::s:
        for (std::size_t s = 0; s < S; ++s) state_s(s, kappa, out[s]);
        break;
    }
}

void OptimalSweep::state_s(std::size_t s, double kappa, double& value) {
    const auto row = q_.row(s);
    const double sigma = u_.alpha[s] + m_.gamma * u_.beta[s] * kappa;
    sigma_[s] = sigma;
    if (sigma == 0.0 || u_.p.is_inf()) {
        const std::size_t best = argmax(row);
        best_[s] = best;
        value = row[best] - sigma;
        chi_[s] = std::size_t(std::count_if(row.begin(), row.end(),
                                            [&](double x) { return x >= value; }));
        return;
    }
    const std::size_t A = row.size();
    for (std::size_t a = 0; a < A; ++a) order_[a] = {row[a], a};
    std::sort(order_.begin(), order_.end(), [](const auto& x, const auto& y) {
        return x.first > y.first || (x.first == y.first && x.second < y.second);
    });
    for (std::size_t i = 0; i < A; ++i) sorted_[i] = order_[i].first;
    const WaterLevel lvl = water_level(sorted_, sigma, u_.p, tol_);
    best_[s] = order_[0].second;
    chi_[s] = lvl.chi;
    value = lvl.zeta;
}

OperatorOutput OptimalSweep::output(std::span<const double> value, double kappa) const {
    OperatorOutput out;
    out.value.assign(value.begin(), value.end());
    out.q = q_;
    out.chi = chi_;
    out.sigma = sigma_;
    out.kappa = kappa;
    out.best_action = best_;
    out.rect = u_.rect;
    out.p = u_.p;
    if (u_.rect != Rect::s) std::fill(out.chi.begin(), out.chi.end(), 1);
    return out;
}

indvec sorted_actions(std::span<const double> q_row) {
    indvec idx(q_row.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return q_row[a] > q_row[b]; });
    return idx;
}

StochasticPolicy greedy_policy(const OperatorOutput& out, NormParam p) {
    const std::size_t S = out.q.states(), A = out.q.actions();
    QTable probs(S, A, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        const auto row = out.q.row(s);
        if (out.rect != Rect::s || p.is_inf() || out.sigma[s] == 0.0) {
            probs(s, out.best_action[s]) = 1.0;
            continue;
        }
        if (p.is(1.0)) {
            const indvec order = sorted_actions(row);
            const std::size_t k = std::clamp<std::size_t>(out.chi[s], 1, A);
            for (std::size_t i = 0; i < k; ++i) probs(s, order[i]) = 1.0 / double(k);
            continue;
        }
        const double top = row[argmax(row)] - out.value[s];
        if (top < 0.0) throw std::runtime_error("no action with nonnegative advantage");
        if (top == 0.0) {
            probs(s, argmax(row)) = 1.0;
            continue;
        }
        double sum = 0.0;
        for (std::size_t a = 0; a < A; ++a) {
            const double adv = (row[a] - out.value[s]) / top;
            if (adv >= 0.0) {
                probs(s, a) = p.is(2.0) ? adv : std::pow(adv, p.value() - 1.0);
                sum += probs(s, a);
            }
        }
        for (std::size_t a = 0; a < A; ++a) probs(s, a) /= sum;
    }
    return StochasticPolicy(std::move(probs));
}

PropertyReport verify_properties(const Mdp& m, const UncertaintySpec& u, const ValueFunction& v,
                                 const OperatorOutput& out, double slack) {
    require(m, u, Rect::s, v);
    if (out.value.size() != m.num_states || out.chi.size() != m.num_states)
        throw std::invalid_argument("operator output does not match the model");
    const QTable q = q_from_value(m, v);
    const double kappa = kappa_for_penalty(v, u.p, default_pouring_tol).kappa;
    const std::size_t A = m.num_actions;

    PropertyReport report;
    for (std::size_t s = 0; s < m.num_states; ++s) {
        StateDiagnostics d;
        const auto row = q.row(s);
        const double val = out.value[s];
        const double sigma = u.alpha[s] + m.gamma * u.beta[s] * kappa;
        d.chi_reported = out.chi[s];
        std::size_t above = 0, near_above = 0;
        for (double x : row) {
            if (x >= val) ++d.chi_recount;
            if (x >= val + slack) ++above;
            if (x >= val - slack) ++near_above;
        }
        const bool chi_ok = d.chi_reported == d.chi_recount ||
                            (above <= d.chi_reported && d.chi_reported <= near_above);

        const indvec order = sorted_actions(row);
        const std::size_t chi = std::clamp<std::size_t>(d.chi_reported, 1, A);
        d.upper_slack = row[order[chi - 1]] - val;
        d.lower_slack = chi < A ? val - row[order[chi]] : std::numeric_limits<double>::quiet_NaN();
        const bool sandwich = d.upper_slack >= -slack && (chi == A || d.lower_slack >= -slack);

        double resid_tol;
        if (u.p.is_inf()) {
            d.residual = std::abs(row[order[0]] - val - sigma);
            resid_tol = 1e-6 * std::max(1.0, sigma);
        } else {
            double sum = 0.0;
            for (double x : row)
                if (x >= val) sum += std::pow(x - val, u.p.value());
            const double sp = std::pow(sigma, u.p.value());
            d.residual = std::abs(sum - sp);
            resid_tol = 1e-6 * std::max(1.0, sp);
        }
        d.pass = chi_ok && sandwich && d.residual <= resid_tol;
        report.all_pass = report.all_pass && d.pass;
        report.states.push_back(d);
    }
    return report;
}

numvec kernel_worst_noise(std::span<const double> v, NormParam p, double radius) {
    const std::size_t n = v.size();
    numvec c(n, 0.0);
    if (n == 0 || radius == 0.0) return c;
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    if (*mn == *mx) return c;
    if (p.is(1.0)) {
        c[std::size_t(mn - v.begin())] = radius / 2.0;
        c[std::size_t(mx - v.begin())] = -radius / 2.0;
        return c;
    }
    if (p.is_inf()) {
        // +radius on the lower half, -radius on the upper half
        indvec idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        for (std::size_t i = 0; i < n / 2; ++i) {
            c[idx[i]] = radius;
            c[idx[n - 1 - i]] = -radius;
        }
        return c;
    }
    const NormParam q = conjugate(p);
    const double omega = kappa_for_penalty(v, p, 1e-14).omega;
    const double scale = *mx - *mn;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (v[i] - omega) / scale;
        const double mag = std::pow(std::abs(d), q.value() - 1.0);
        c[i] = d > 0 ? -mag : d < 0 ? mag : 0.0;
    }
    const double norm = lp_norm(c, p);
    if (norm == 0.0) return numvec(n, 0.0);
    for (double& x : c) x *= radius / norm;
    return c;
}

std::vector<std::string> radii_feasibility_warnings(const Mdp& m, const UncertaintySpec& u) {
    std::vector<std::string> out;
    if (u.rect == Rect::none) return out;
    check_shapes(m);
    if (!u.validate(m.num_states, m.num_actions).empty())
        throw std::invalid_argument("uncertainty radii do not match the model");

    const std::size_t S = m.num_states, A = m.num_actions;
    // nominal optimal values by plain value iteration
    ValueFunction v(S, 0.0);
    for (std::size_t it = 0; it < 100000; ++it) {
        ValueFunction next = bellman_optimal(m, v);
        const double res = max_abs_diff(next, v);
        v = std::move(next);
        if (res <= 1e-12 * (1.0 + *std::max_element(v.begin(), v.end())) || m.gamma == 0.0) break;
    }

    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const double beta = u.rect == Rect::sa ? u.beta[s * A + a] : u.beta[s];
            if (beta == 0.0) continue;
            const numvec c = kernel_worst_noise(v, u.p, beta);
            const auto row = m.transition(s, a);
            for (std::size_t t = 0; t < S; ++t) {
                const double x = row[t] + c[t];
                if (x < -1e-12 || x > 1.0 + 1e-12) {
                    std::ostringstream msg;
                    msg.precision(17);
                    msg << "warning: beta " << beta << " at (" << s << "," << a
                        << ") moves kernel entry " << t << " to " << x << ", outside [0,1]";
                    out.push_back(msg.str());
                    break;
                }
            }
        }
    }
    return out;
}

} // namespace rmdp
