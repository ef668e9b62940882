#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>

namespace rmdp {

/**
 * Norm index p: a finite real >= 1 or infinity.
 */
class NormParam {
public:
    /// Defaults to p = 2.
    constexpr NormParam() = default;

    /// Throws std::invalid_argument unless p >= 1 (p = +inf is accepted).
    explicit NormParam(double p);

    static NormParam infinity() { return NormParam(std::numeric_limits<double>::infinity()); }

    bool is_inf() const noexcept { return inf_; }
    /// The index as a double; +inf for infinity.
    double value() const noexcept { return inf_ ? std::numeric_limits<double>::infinity() : p_; }
    bool is(double x) const noexcept { return !inf_ && p_ == x; }

    /// "inf" or the shortest decimal form of p.
    std::string to_string() const;
    /// Accepts "inf", "infinity" or a decimal number.
    static NormParam parse(std::string_view text);

    friend bool operator==(const NormParam&, const NormParam&) = default;

private:
    double p_ = 2.0;
    bool inf_ = false;
};

/// Hoelder conjugate q with 1/p + 1/q = 1.
NormParam conjugate(NormParam p);

/// ||x||_p
double lp_norm(std::span<const double> x, NormParam p);

struct DispersionResult {
    double omega = 0.0;
    double kappa = 0.0;
    std::size_t iterations = 0;
};

/**
 * Closed forms of omega_p(v) = argmin_w ||v - w1||_p and
 * kappa_p(v) = min_w ||v - w1||_p for p in {1, 2, inf}.
 *
 * p = 1 uses the average of the two middle order statistics for omega.
 */
DispersionResult dispersion_closed(std::span<const double> v, NormParam p);

inline constexpr double default_dispersion_tol = 1e-10;
inline constexpr std::size_t max_bisection_iterations = 200;

/**
 * Bisection for omega_p on [min v, max v] using the stationarity
 * condition sum sign(v - w)|v - w|^(p-1) = 0. Stops when the bracket
 * is narrower than tol or cannot shrink in floating point.
 *
 * @param v   values, nonempty and finite
 * @param p   any norm index; p = inf bisects (max - w) + (min - w)
 * @param tol bracket width
 */
DispersionResult dispersion_search(std::span<const double> v, NormParam p,
                                   double tol = default_dispersion_tol);

/// Dispersion of v under the conjugate index of p, as used by penalties.
DispersionResult kappa_for_penalty(std::span<const double> v, NormParam p,
                                   double tol = default_dispersion_tol);

} // namespace rmdp
