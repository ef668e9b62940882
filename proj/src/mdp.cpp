#include "rmdp/mdp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rmdp {

StochasticPolicy::StochasticPolicy(QTable p) : probs(std::move(p)) { update_support(); }

StochasticPolicy StochasticPolicy::deterministic(const indvec& actions, std::size_t num_actions) {
    QTable p(actions.size(), num_actions, 0.0);
    for (std::size_t s = 0; s < actions.size(); ++s) {
        if (actions[s] >= num_actions) throw std::invalid_argument("action index out of range");
        p(s, actions[s]) = 1.0;
    }
    return StochasticPolicy(std::move(p));
}

StochasticPolicy StochasticPolicy::uniform(std::size_t num_states, std::size_t num_actions) {
    return StochasticPolicy(QTable(num_states, num_actions, 1.0 / double(num_actions)));
}

void StochasticPolicy::update_support() {
    support_size.assign(probs.states(), 0);
    for (std::size_t s = 0; s < probs.states(); ++s)
        for (double x : probs.row(s))
            if (x > 0.0) ++support_size[s];
}

Mdp::Mdp(std::size_t S, std::size_t A, double discount)
    : num_states(S), num_actions(A), gamma(discount), kernel(S * A * S, 0.0),
      reward(S * A, 0.0), mu(S, S > 0 ? 1.0 / double(S) : 0.0) {}

std::vector<std::string> validate_mdp(const Mdp& m, double sum_tol) {
    std::vector<std::string> out;
    const std::size_t S = m.num_states, A = m.num_actions;
    if (S == 0) out.emplace_back("num_states must be positive");
    if (A == 0) out.emplace_back("num_actions must be positive");
    if (!(m.gamma >= 0.0 && m.gamma < 1.0)) out.emplace_back("discount not in [0,1)");

    bool shapes_ok = true;
    auto shape = [&](const char* name, std::size_t got, std::size_t want) {
        if (got != want) {
            std::ostringstream msg;
            msg << name << " has " << got << " entries, expected " << want;
            out.push_back(msg.str());
            shapes_ok = false;
        }
    };
    shape("kernel", m.kernel.size(), S * A * S);
    shape("reward", m.reward.size(), S * A);
    shape("mu", m.mu.size(), S);
    if (!shapes_ok || S == 0 || A == 0) return out;

    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            double sum = 0.0;
            bool bad_entry = false;
            for (double x : m.transition(s, a)) {
                if (!(x >= 0.0 && x <= 1.0)) bad_entry = true;
                sum += x;
            }
            if (bad_entry) {
                std::ostringstream msg;
                msg << "kernel row (" << s << "," << a << ") has an entry outside [0,1]";
                out.push_back(msg.str());
            }
            if (!(std::abs(sum - 1.0) <= sum_tol)) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "kernel row (" << s << "," << a << ") sums to " << sum;
                out.push_back(msg.str());
            }
            if (!std::isfinite(m.r(s, a))) {
                std::ostringstream msg;
                msg << "reward (" << s << "," << a << ") is not finite";
                out.push_back(msg.str());
            }
        }
    }
    double musum = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        if (!(m.mu[s] >= 0.0)) {
            std::ostringstream msg;
            msg << "mu[" << s << "] is negative";
            out.push_back(msg.str());
        }
        musum += m.mu[s];
    }
    if (!(std::abs(musum - 1.0) <= sum_tol)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "mu sums to " << musum;
        out.push_back(msg.str());
    }
    return out;
}

void check_shapes(const Mdp& m) {
    const std::size_t S = m.num_states, A = m.num_actions;
    if (S == 0 || A == 0 || m.kernel.size() != S * A * S || m.reward.size() != S * A)
        throw std::invalid_argument("mdp tables do not match the declared dimensions");
}

namespace {
void check_value(const Mdp& m, std::size_t n) {
    check_shapes(m);
    if (n != m.num_states) throw std::invalid_argument("value function length mismatch");
}
} // namespace

void q_from_value(const Mdp& m, std::span<const double> v, QTable& out) {
    check_value(m, v.size());
    const std::size_t S = m.num_states, A = m.num_actions;
    if (out.states() != S || out.actions() != A) out = QTable(S, A);
    const double* p = m.kernel.data();
    double* q = out.data().data();
    for (std::size_t sa = 0; sa < S * A; ++sa) {
        double ev = 0.0;
        for (std::size_t t = 0; t < S; ++t) ev += p[t] * v[t];
        q[sa] = m.reward[sa] + m.gamma * ev;
        p += S;
    }
}

QTable q_from_value(const Mdp& m, const ValueFunction& v) {
    QTable q;
    q_from_value(m, v, q);
    return q;
}

ValueFunction bellman_policy(const Mdp& m, const ValueFunction& v, const StochasticPolicy& pi) {
    const QTable q = q_from_value(m, v);
    if (pi.probs.states() != m.num_states || pi.probs.actions() != m.num_actions)
        throw std::invalid_argument("policy shape mismatch");
    ValueFunction out(m.num_states, 0.0);
    for (std::size_t s = 0; s < m.num_states; ++s)
        for (std::size_t a = 0; a < m.num_actions; ++a) out[s] += pi.probs(s, a) * q(s, a);
    return out;
}

ValueFunction bellman_optimal(const Mdp& m, const ValueFunction& v) {
    const QTable q = q_from_value(m, v);
    ValueFunction out(m.num_states);
    for (std::size_t s = 0; s < m.num_states; ++s) out[s] = q(s, argmax(q.row(s)));
    return out;
}

std::size_t argmax(std::span<const double> x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i] > x[best]) best = i;
    return best;
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

} // namespace rmdp
