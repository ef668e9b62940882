#include "rmdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rmdp::oracle {

namespace {

double norm(std::span<const double> x, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double e : x) m = std::max(m, std::abs(e));
        return m;
    }
    double s = 0.0;
    for (double e : x) s += std::pow(std::abs(e), p);
    return std::pow(s, 1.0 / p);
}

double conj(double p) {
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

// argmin over [lo, hi] of a convex function
template <class F>
double golden_section(F&& f, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 300 && hi - lo > 0.0; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
        if (!(x1 > lo && x2 < hi && x1 <= x2)) break;
    }
    return (lo + hi) / 2.0;
}

// zero-sum vector with ||c||_p = radius * t, t uniform in (0,1] or 1
numvec random_noise(std::size_t n, double p, double radius, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    numvec c(n);
    for (double& x : c) x = gauss(rng);
    const double mean = std::accumulate(c.begin(), c.end(), 0.0) / double(n);
    for (double& x : c) x -= mean;
    const double nc = norm(c, p);
    if (nc == 0.0) return numvec(n, 0.0);
    const double t = unit(rng) < 0.5 ? 1.0 : unit(rng);
    for (double& x : c) x *= radius * t / nc;
    return c;
}

void guard(const Mdp& m) {
    if (m.num_states > 8 || m.num_actions > 4)
        throw std::invalid_argument("oracle instance too large (S <= 8, A <= 4)");
    if (m.kernel.size() != m.num_states * m.num_actions * m.num_states ||
        m.reward.size() != m.num_states * m.num_actions)
        throw std::invalid_argument("mdp tables do not match the declared dimensions");
}

} // namespace

QTable lookahead(const Mdp& m, const ValueFunction& v) {
    const std::size_t S = m.num_states, A = m.num_actions;
    QTable q(S, A);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a) {
            double ev = 0.0;
            for (std::size_t t = 0; t < S; ++t) ev += m.kernel[(s * A + a) * S + t] * v[t];
            q(s, a) = m.reward[s * A + a] + m.gamma * ev;
        }
    return q;
}

NoiseResult worst_case_noise(std::span<const double> v, NormParam pp, double radius) {
    if (!(radius >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
    const std::size_t n = v.size();
    NoiseResult res;
    res.noise.assign(n, 0.0);
    if (n == 0) return res;
    const double vmin = *std::min_element(v.begin(), v.end());
    const double vmax = *std::max_element(v.begin(), v.end());
    if (vmin == vmax || radius == 0.0) return res;
    const double p = pp.value();
    const double q = conj(p);

    if (p == 1.0) {
        // all mass on the two extremes
        const auto lo = std::size_t(std::min_element(v.begin(), v.end()) - v.begin());
        const auto hi = std::size_t(std::max_element(v.begin(), v.end()) - v.begin());
        res.noise[lo] = radius / 2.0;
        res.noise[hi] = -radius / 2.0;
    } else if (std::isinf(p)) {
        // a box: +radius below the median, -radius above
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return v[a] < v[b] || (v[a] == v[b] && a < b);
        });
        for (std::size_t i = 0; i < n / 2; ++i) {
            res.noise[idx[i]] = radius;
            res.noise[idx[n - 1 - i]] = -radius;
        }
    } else {
        const double scale = vmax - vmin;
        auto f = [&](double w) {
            double s = 0.0;
            for (double x : v) s += std::pow(std::abs(x - w) / scale, q);
            return s;
        };
        const double omega = golden_section(f, vmin, vmax);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = (v[i] - omega) / scale;
            const double mag = std::pow(std::abs(d), q - 1.0);
            res.noise[i] = d > 0 ? -mag : (d < 0 ? mag : 0.0);
        }
        const double mean = std::accumulate(res.noise.begin(), res.noise.end(), 0.0) / double(n);
        for (double& x : res.noise) x -= mean;
        const double nc = norm(res.noise, p);
        for (double& x : res.noise) x *= radius / nc;
    }
    res.value = dot(res.noise, v);
    return res;
}

BruteOperatorResult brute_sa_operator(const Mdp& m, const UncertaintySpec& u,
                                      const ValueFunction& v, const StochasticPolicy& pi,
                                      const OracleConfig& cfg) {
    guard(m);
    if (u.rect != Rect::sa) throw std::invalid_argument("brute_sa_operator needs rect sa");
    const std::size_t S = m.num_states, A = m.num_actions;
    if (u.alpha.size() != S * A || u.beta.size() != S * A || v.size() != S)
        throw std::invalid_argument("shape mismatch");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double p = u.p.value();

    BruteOperatorResult res;
    res.value.assign(S, 0.0);
    res.worst_sample_gap = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const double alpha = u.alpha[s * A + a], beta = u.beta[s * A + a];
            std::span<const double> row(m.kernel.data() + (s * A + a) * S, S);
            const double nominal = m.reward[s * A + a] + m.gamma * dot(row, v);
            const double worst = nominal - alpha + m.gamma * worst_case_noise(v, u.p, beta).value;
            res.value[s] += pi.probs(s, a) * worst;
            for (std::size_t j = 0; j < cfg.num_noise_samples; ++j) {
                const numvec c = random_noise(S, p, beta, rng);
                const double r = alpha * unit(rng);
                const double sampled = nominal + r + m.gamma * dot(c, v);
                res.worst_sample_gap = std::min(res.worst_sample_gap, sampled - worst);
                ++res.samples;
            }
        }
    }
    return res;
}

BruteOperatorResult brute_s_policy_operator(const Mdp& m, const UncertaintySpec& u,
                                            const ValueFunction& v, const StochasticPolicy& pi,
                                            const OracleConfig& cfg) {
    guard(m);
    if (u.rect != Rect::s) throw std::invalid_argument("brute_s_policy_operator needs rect s");
    const std::size_t S = m.num_states, A = m.num_actions;
    if (u.alpha.size() != S || u.beta.size() != S || v.size() != S)
        throw std::invalid_argument("shape mismatch");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double p = u.p.value(), q = conj(p);
    const QTable nominal = lookahead(m, v);
    // dispersion of v as the attained value of a unit-radius noise
    const double kappa = -worst_case_noise(v, u.p, 1.0).value;

    BruteOperatorResult res;
    res.value.assign(S, 0.0);
    res.worst_sample_gap = std::numeric_limits<double>::infinity();
    numvec share(A), budget(A);
    for (std::size_t s = 0; s < S; ++s) {
        const auto prob = pi.probs.row(s);
        // Hoelder-tight split: ||share||_p = 1 and <prob, share> = ||prob||_q
        std::fill(share.begin(), share.end(), 0.0);
        if (std::isinf(q)) {
            share[std::size_t(std::max_element(prob.begin(), prob.end()) - prob.begin())] = 1.0;
        } else if (q == 1.0) {
            for (std::size_t a = 0; a < A; ++a) share[a] = 1.0;
        } else {
            const double nq = norm(prob, q);
            for (std::size_t a = 0; a < A; ++a) share[a] = std::pow(prob[a] / nq, q - 1.0);
        }
        double analytic = 0.0;
        for (std::size_t a = 0; a < A; ++a) {
            const double noise = worst_case_noise(v, u.p, u.beta[s] * share[a]).value;
            analytic += prob[a] * (nominal(s, a) - u.alpha[s] * share[a] + m.gamma * noise);
        }
        res.value[s] = analytic;

        for (std::size_t j = 0; j < cfg.num_noise_samples; ++j) {
            for (double& x : budget) x = unit(rng);
            const double nb = norm(budget, p);
            const double t = unit(rng) < 0.5 ? 1.0 : unit(rng);
            double sampled = 0.0;
            for (std::size_t a = 0; a < A; ++a) {
                const double w = nb > 0 ? budget[a] * t / nb : 0.0;
                sampled += prob[a] * (nominal(s, a) - u.alpha[s] * w - m.gamma * u.beta[s] * w * kappa);
            }
            res.worst_sample_gap = std::min(res.worst_sample_gap, sampled - analytic);
            ++res.samples;
        }
    }
    return res;
}

SimplexResult brute_s_improvement(std::span<const double> b, double sigma, NormParam pp,
                                  const OracleConfig& cfg) {
    const std::size_t A = b.size();
    if (A == 0 || A > 3) throw std::invalid_argument("simplex grid needs 1 <= A <= 3");
    if (!(cfg.grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
    const double q = conj(pp.value());
    const auto n = std::size_t(std::llround(1.0 / cfg.grid_step));

    SimplexResult best;
    best.zeta = -std::numeric_limits<double>::infinity();
    numvec c(A);
    auto consider = [&]() {
        const double val = -sigma * norm(c, q) + dot(c, b);
        if (val > best.zeta) {
            best.zeta = val;
            best.weights = c;
        }
    };
    if (A == 1) {
        c[0] = 1.0;
        consider();
    } else if (A == 2) {
        for (std::size_t i = 0; i <= n; ++i) {
            c[0] = double(i) / double(n);
            c[1] = double(n - i) / double(n);
            consider();
        }
    } else {
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; i + j <= n; ++j) {
                c[0] = double(i) / double(n);
                c[1] = double(j) / double(n);
                c[2] = double(n - i - j) / double(n);
                consider();
            }
    }
    return best;
}

DispersionResult brute_dispersion(std::span<const double> v, NormParam pp,
                                  const OracleConfig& cfg) {
    if (v.empty()) throw std::invalid_argument("dispersion of an empty vector");
    if (!(cfg.grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
    const double vmin = *std::min_element(v.begin(), v.end());
    const double vmax = *std::max_element(v.begin(), v.end());
    const double p = pp.value();
    DispersionResult best;
    best.omega = vmin;
    best.kappa = std::numeric_limits<double>::infinity();
    const auto n = std::size_t(std::ceil((vmax - vmin) / cfg.grid_step));
    numvec d(v.size());
    for (std::size_t i = 0; i <= n; ++i) {
        const double w = std::min(vmax, vmin + double(i) * cfg.grid_step);
        for (std::size_t k = 0; k < v.size(); ++k) d[k] = v[k] - w;
        const double val = norm(d, p);
        if (val < best.kappa) {
            best.kappa = val;
            best.omega = w;
        }
        ++best.iterations;
    }
    return best;
}

} // namespace rmdp::oracle
