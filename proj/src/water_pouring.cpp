#include "rmdp/water_pouring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmdp {

namespace {

void check_problem(std::span<const double> b, double alpha) {
    if (b.empty()) throw std::invalid_argument("water pouring needs at least one value");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("alpha must be finite and nonnegative");
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!std::isfinite(b[i])) throw std::invalid_argument("b has a non-finite entry");
        if (i > 0 && b[i] > b[i - 1]) throw std::invalid_argument("b must be sorted descending");
    }
}

std::size_t count_at_least(std::span<const double> b, double x) {
    std::size_t k = 0;
    while (k < b.size() && b[k] >= x) ++k;
    return k;
}

WaterLevel level_no_penalty(std::span<const double> b) {
    return {b[0], count_at_least(b, b[0]), 0};
}

WaterLevel level_linf(std::span<const double> b, double alpha) {
    const double zeta = b[0] - alpha;
    return {zeta, count_at_least(b, zeta), 0};
}

// lambda_k = (b_1 + ... + b_k - alpha) / k; zeta is the largest of them
WaterLevel level_l1(std::span<const double> b, double alpha) {
    const std::size_t A = b.size();
    double prefix = b[0];
    std::size_t k = 1;
    double lambda = (prefix - alpha) / 1.0;
    while (k < A && lambda <= b[k]) {
        prefix += b[k];
        ++k;
        lambda = (prefix - alpha) / double(k);
    }
    double best = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t i = 0; i < A; ++i) {
        s += b[i];
        best = std::max(best, (s - alpha) / double(i + 1));
    }
    return {best, k, k};
}

// lambda_k = mean_k - sqrt((alpha^2 - D_k) / k), D_k the centered sum of squares
WaterLevel level_l2(std::span<const double> b, double alpha) {
    const std::size_t A = b.size();
    const double a2 = alpha * alpha;
    double mean = b[0], dev = 0.0;
    std::size_t k = 1;
    double lambda = b[0] - alpha;
    while (k < A && lambda <= b[k]) {
        const double x = b[k];
        ++k;
        const double delta = x - mean;
        mean += delta / double(k);
        dev += delta * (x - mean);
        lambda = mean - std::sqrt(std::max(0.0, (a2 - dev) / double(k)));
    }
    return {lambda, k, k};
}

// decreasing f with f(lo) >= 0 >= f(hi)
template <class F>
double bisect(F&& f, double lo, double hi, double tol, std::size_t& iterations) {
    std::size_t it = 0;
    while (hi - lo > tol) {
        if (it == max_bisection_iterations)
            throw std::runtime_error("water-pouring bisection did not converge");
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        ++it;
        const double fm = f(mid);
        if (fm > 0) lo = mid;
        else if (fm < 0) hi = mid;
        else {
            lo = hi = mid;
        }
    }
    iterations += it;
    return lo + (hi - lo) / 2.0;
}

// sum_{i<k, b_i >= x} ((b_i - x)/alpha)^p - 1
double scaled_excess(std::span<const double> b, std::size_t k, double x, double alpha, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < k && b[i] >= x; ++i) s += std::pow((b[i] - x) / alpha, p);
    return s - 1.0;
}

WaterLevel level_bisection(std::span<const double> b, double alpha, double p, double tol) {
    WaterLevel w;
    const std::size_t A = b.size();
    auto f = [&](double x) { return scaled_excess(b, A, x, alpha, p); };
    w.zeta = bisect(f, b[0] - alpha, b[0], tol, w.iterations);
    w.chi = std::max<std::size_t>(1, count_at_least(b, w.zeta));
    return w;
}

WaterLevel level_iterative_general(std::span<const double> b, double alpha, double p, double tol) {
    WaterLevel w;
    const std::size_t A = b.size();
    std::size_t k = 1;
    double lambda = b[0] - alpha;
    while (k < A && lambda <= b[k]) {
        ++k;
        auto f = [&](double x) { return scaled_excess(b, k, x, alpha, p); };
        // lambda_{k-1} <= lambda_k <= b_k
        lambda = bisect(f, lambda, b[k - 1], tol, w.iterations);
    }
    w.zeta = lambda;
    w.chi = k;
    return w;
}

WaterPouringResult finish(std::span<const double> b, double alpha, NormParam p, WaterLevel lvl) {
    WaterPouringResult r;
    r.zeta = lvl.zeta;
    r.chi = lvl.chi;
    r.iterations = lvl.iterations;
    r.weights.assign(b.size(), 0.0);
    if (alpha == 0.0) r.weights[0] = 1.0;
    else pouring_weights(b, r.zeta, r.chi, p, r.weights);
    r.residual = pouring_residual(b, r.zeta, alpha, p);
    return r;
}

} // namespace

void pouring_weights(std::span<const double> b, double zeta, std::size_t chi, NormParam p,
                     std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (p.is_inf()) {
        out[0] = 1.0;
        return;
    }
    const std::size_t n = std::clamp<std::size_t>(chi, 1, b.size());
    if (p.is(1.0)) {
        for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / double(n);
        return;
    }
    const double top = b[0] - zeta;
    if (!(top > 0.0)) {
        out[0] = 1.0;
        return;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::max(0.0, b[i] - zeta) / top;
        out[i] = p.is(2.0) ? d : std::pow(d, p.value() - 1.0);
        sum += out[i];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= sum;
}

double pouring_residual(std::span<const double> b, double zeta, double alpha, NormParam p) {
    if (p.is_inf()) return std::abs(b[0] - zeta - alpha);
    double s = 0.0;
    for (std::size_t i = 0; i < b.size() && b[i] >= zeta; ++i) s += std::pow(b[i] - zeta, p.value());
    return std::abs(s - std::pow(alpha, p.value()));
}

WaterLevel water_level(std::span<const double> b, double alpha, NormParam p, double tol) {
    if (alpha == 0.0) return level_no_penalty(b);
    if (p.is_inf()) return level_linf(b, alpha);
    if (p.is(1.0)) return level_l1(b, alpha);
    if (p.is(2.0)) return level_l2(b, alpha);
    return level_bisection(b, alpha, p.value(), tol);
}

WaterPouringResult solve_linf(const WaterPouringProblem& prob) {
    check_problem(prob.b, prob.alpha);
    if (!prob.p.is_inf()) throw std::invalid_argument("solve_linf needs p = inf");
    const WaterLevel lvl = prob.alpha == 0.0 ? level_no_penalty(prob.b) : level_linf(prob.b, prob.alpha);
    return finish(prob.b, prob.alpha, prob.p, lvl);
}

WaterPouringResult solve_general(const WaterPouringProblem& prob, double tol) {
    check_problem(prob.b, prob.alpha);
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (prob.p.is_inf()) return solve_linf(prob);
    if (prob.p.is(1.0)) return solve_iterative(prob, tol);
    if (prob.alpha == 0.0) return finish(prob.b, 0.0, prob.p, level_no_penalty(prob.b));
    return finish(prob.b, prob.alpha, prob.p,
                  level_bisection(prob.b, prob.alpha, prob.p.value(), tol));
}

WaterPouringResult solve_iterative(const WaterPouringProblem& prob, double tol) {
    check_problem(prob.b, prob.alpha);
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (prob.p.is_inf()) return solve_linf(prob);
    if (prob.alpha == 0.0) return finish(prob.b, 0.0, prob.p, level_no_penalty(prob.b));
    WaterLevel lvl;
    if (prob.p.is(1.0)) lvl = level_l1(prob.b, prob.alpha);
    else if (prob.p.is(2.0)) lvl = level_l2(prob.b, prob.alpha);
    else lvl = level_iterative_general(prob.b, prob.alpha, prob.p.value(), tol);
    return finish(prob.b, prob.alpha, prob.p, lvl);
}

WaterPouringResult solve_water_pouring(const WaterPouringProblem& prob, double tol) {
    check_problem(prob.b, prob.alpha);
    if (prob.p.is_inf()) return solve_linf(prob);
    if (prob.p.is(1.0) || prob.p.is(2.0)) return solve_iterative(prob, tol);
    return solve_general(prob, tol);
}

std::size_t active_count(std::span<const double> b, double alpha, NormParam p) {
    check_problem(b, alpha);
    if (p.is_inf()) return count_at_least(b, b[0] - alpha);
    const double ap = std::pow(alpha, p.value());
    std::size_t chi = 1;
    for (std::size_t k = 1; k < b.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += std::pow(b[i] - b[k], p.value());
        if (s > ap) break;
        chi = k + 1;
    }
    return chi;
}

} // namespace rmdp
