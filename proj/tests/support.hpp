#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "rmdp/bench.hpp"
#include "rmdp/mdp.hpp"
#include "rmdp/robust_bellman.hpp"

namespace testing {

using rmdp::numvec;

inline numvec random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    numvec v(n);
    for (double& x : v) x = d(rng);
    return v;
}

inline numvec sorted_desc(numvec v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

inline rmdp::StochasticPolicy random_policy(std::size_t S, std::size_t A, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    rmdp::QTable p(S, A);
    for (std::size_t s = 0; s < S; ++s) {
        double sum = 0.0;
        for (double& x : p.row(s)) sum += (x = e(rng));
        for (double& x : p.row(s)) x /= sum;
    }
    return rmdp::StochasticPolicy(std::move(p));
}

inline numvec random_simplex(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    numvec c(n);
    double sum = 0.0;
    for (double& x : c) sum += (x = e(rng));
    for (double& x : c) x /= sum;
    return c;
}

/// Random radii of the given shape, uniform on [0, scale].
inline rmdp::UncertaintySpec random_uncertainty(rmdp::Rect rect, rmdp::NormParam p, std::size_t S,
                                                std::size_t A, double scale, std::mt19937_64& rng) {
    const std::size_t n = rect == rmdp::Rect::sa ? S * A : rect == rmdp::Rect::s ? S : 0;
    return {rect, p, random_vector(n, rng, 0.0, scale), random_vector(n, rng, 0.0, scale)};
}

/**
 * Random model whose kernel entries are at least 1/(2S): half a uniform
 * simplex draw, half the uniform distribution.
 */
inline rmdp::Mdp spread_mdp(std::size_t S, std::size_t A, double gamma, std::mt19937_64& rng) {
    rmdp::Mdp m = rmdp::random_mdp(S, A, gamma, rng);
    for (double& x : m.kernel) x = 0.5 * x + 0.5 / double(S);
    return m;
}

/**
 * Radii small enough that every noise with ||c||_p <= beta keeps the
 * kernel of spread_mdp inside [0,1]: beta <= 1/(2S) bounds every entry
 * change. alpha is uniform on [0, alpha_scale].
 */
inline rmdp::UncertaintySpec feasible_uncertainty(rmdp::Rect rect, rmdp::NormParam p, std::size_t S,
                                                  std::size_t A, double alpha_scale,
                                                  std::mt19937_64& rng) {
    const std::size_t n = rect == rmdp::Rect::sa ? S * A : rect == rmdp::Rect::s ? S : 0;
    return {rect, p, random_vector(n, rng, 0.0, alpha_scale), random_vector(n, rng, 0.0, 0.5 / double(S))};
}

/// ||x||_p written out directly.
inline double pnorm(const numvec& x, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double e : x) m = std::max(m, std::abs(e));
        return m;
    }
    double s = 0.0;
    for (double e : x) s += std::pow(std::abs(e), p);
    return std::pow(s, 1.0 / p);
}

inline double conj(double p) {
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

/// -alpha ||c||_q + <c, b>
inline double pouring_objective(const numvec& c, const numvec& b, double alpha, double p) {
    double dot = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) dot += c[i] * b[i];
    return -alpha * pnorm(c, conj(p)) + dot;
}

/// Best point of the pouring objective on a two-action grid.
inline std::pair<double, numvec> grid_pouring_2(const numvec& b, double alpha, double p, double step) {
    const auto n = std::size_t(std::llround(1.0 / step));
    std::pair<double, numvec> best{-std::numeric_limits<double>::infinity(), {}};
    for (std::size_t i = 0; i <= n; ++i) {
        numvec c{double(i) / double(n), double(n - i) / double(n)};
        const double val = pouring_objective(c, b, alpha, p);
        if (val > best.first) best = {val, c};
    }
    return best;
}

} // namespace testing
