#include "rmdp/dispersion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace rmdp {

NormParam::NormParam(double p) {
    if (std::isinf(p) && p > 0) {
        inf_ = true;
        p_ = 0.0;
        return;
    }
    if (!(p >= 1.0) || std::isnan(p))
        throw std::invalid_argument("norm index must be >= 1");
    p_ = p;
}

std::string NormParam::to_string() const {
    if (inf_) return "inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), p_);
    return std::string(buf, res.ptr);
}

NormParam NormParam::parse(std::string_view text) {
    if (text == "inf" || text == "infinity" || text == "Inf" || text == "INF")
        return infinity();
    double p = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), p);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("cannot parse norm index '" + std::string(text) + "'");
    return NormParam(p);
}

NormParam conjugate(NormParam p) {
    if (p.is_inf()) return NormParam(1.0);
    if (p.is(1.0)) return NormParam::infinity();
    return NormParam(p.value() / (p.value() - 1.0));
}

double lp_norm(std::span<const double> x, NormParam p) {
    if (p.is_inf()) {
        double m = 0.0;
        for (double e : x) m = std::max(m, std::abs(e));
        return m;
    }
    if (p.is(1.0)) {
        double s = 0.0;
        for (double e : x) s += std::abs(e);
        return s;
    }
    if (p.is(2.0)) {
        double s = 0.0;
        for (double e : x) s += e * e;
        return std::sqrt(s);
    }
    // scale by the largest magnitude to keep pow in range
    double m = 0.0;
    for (double e : x) m = std::max(m, std::abs(e));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double e : x) s += std::pow(std::abs(e) / m, p.value());
    return m * std::pow(s, 1.0 / p.value());
}

namespace {

void check_input(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("dispersion of an empty vector");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("dispersion input is not finite");
}

double deviation_norm(std::span<const double> v, double omega, NormParam p) {
    std::vector<double> d(v.begin(), v.end());
    for (double& x : d) x -= omega;
    return lp_norm(d, p);
}

} // namespace

DispersionResult dispersion_closed(std::span<const double> v, NormParam p) {
    check_input(v);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    DispersionResult r;
    if (p.is_inf()) {
        r.omega = (*hi + *lo) / 2.0;
        r.kappa = (*hi - *lo) / 2.0;
    } else if (p.is(2.0)) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= double(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        r.omega = mean;
        r.kappa = std::sqrt(ss);
    } else if (p.is(1.0)) {
        std::vector<double> s(v.begin(), v.end());
        std::sort(s.begin(), s.end(), std::greater<>());
        const std::size_t n = s.size();
        // 1-based positions floor((n+1)/2) and ceil((n+1)/2)
        const std::size_t lo_pos = (n + 1) / 2;
        const std::size_t hi_pos = (n + 2) / 2;
        r.omega = (s[lo_pos - 1] + s[hi_pos - 1]) / 2.0;
        double top = 0.0, bottom = 0.0;
        for (std::size_t i = 0; i < lo_pos; ++i) top += s[i];
        for (std::size_t i = hi_pos - 1; i < n; ++i) bottom += s[i];
        r.kappa = std::max(0.0, top - bottom);
    } else {
        throw std::invalid_argument("closed-form dispersion needs p in {1, 2, inf}");
    }
    return r;
}

DispersionResult dispersion_search(std::span<const double> v, NormParam p, double tol) {
    check_input(v);
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double vmin = *mn, vmax = *mx;
    DispersionResult r;
    if (vmin == vmax) {
        r.omega = vmin;
        return r;
    }
    const double scale = vmax - vmin;
    const double e = p.is_inf() ? 0.0 : p.value() - 1.0;

    // strictly decreasing in w on [vmin, vmax]
    auto h = [&](double w) {
        if (p.is_inf()) return (vmax - w) + (vmin - w);
        double s = 0.0;
        for (double x : v) {
            const double d = (x - w) / scale;
            if (d > 0) s += e == 0.0 ? 1.0 : std::pow(d, e);
            else if (d < 0) s -= e == 0.0 ? 1.0 : std::pow(-d, e);
        }
        return s;
    };

    double lo = vmin, hi = vmax;
    while (hi - lo > tol) {
        if (r.iterations == max_bisection_iterations)
            throw std::runtime_error("dispersion bisection did not converge");
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        ++r.iterations;
        const double hm = h(mid);
        if (hm > 0) lo = mid;
        else if (hm < 0) hi = mid;
        else {
            lo = hi = mid;
        }
    }
    r.omega = lo + (hi - lo) / 2.0;
    r.kappa = deviation_norm(v, r.omega, p);
    return r;
}

DispersionResult kappa_for_penalty(std::span<const double> v, NormParam p, double tol) {
    const NormParam q = conjugate(p);
    if (q.is_inf() || q.is(1.0) || q.is(2.0)) return dispersion_closed(v, q);
    return dispersion_search(v, q, tol);
}

} // namespace rmdp
