#include <doctest.h>

#include <cmath>

#include "rmdp/dispersion.hpp"
#include "support.hpp"

using namespace rmdp;

namespace {
const NormParam inf = NormParam::infinity();

// ||v - w 1||_p by direct summation
double deviation(const numvec& v, double w, double p) {
    numvec d(v);
    for (double& x : d) x -= w;
    return testing::pnorm(d, p);
}
} // namespace

TEST_CASE("NormParam") {
    CHECK_THROWS_AS(NormParam(0.5), std::invalid_argument);
    CHECK_THROWS_AS(NormParam(std::nan("")), std::invalid_argument);
    CHECK(NormParam::parse("inf").is_inf());
    CHECK(NormParam::parse("1.5").is(1.5));
    CHECK_THROWS(NormParam::parse("1.5x"));
    CHECK(NormParam(3.0).to_string() == "3");
    CHECK(inf.to_string() == "inf");
}

TEST_CASE("conjugate") {
    CHECK(conjugate(NormParam(2.0)) == NormParam(2.0));
    CHECK(conjugate(NormParam(1.0)).is_inf());
    CHECK(conjugate(inf) == NormParam(1.0));
    CHECK(conjugate(NormParam(3.0)).is(1.5));
    CHECK(conjugate(NormParam(1.5)).is(3.0));
}

TEST_CASE("lp_norm") {
    const numvec x{3.0, -4.0};
    CHECK(lp_norm(x, NormParam(1.0)) == 7.0);
    CHECK(lp_norm(x, NormParam(2.0)) == 5.0);
    CHECK(lp_norm(x, inf) == 4.0);
    CHECK(lp_norm(x, NormParam(3.0)) == doctest::Approx(std::cbrt(91.0)).epsilon(1e-15));
}

TEST_CASE("dispersion_closed") {
    auto r = dispersion_closed(numvec{0, 4}, inf);
    CHECK(r.omega == 2.0);
    CHECK(r.kappa == 2.0);
    CHECK(r.iterations == 0);

    r = dispersion_closed(numvec{1, 1, 1}, NormParam(2.0));
    CHECK(r.omega == 1.0);
    CHECK(r.kappa == 0.0);

    // grid minimization of ||v - w||_1 over [1,3] with step 1e-4 gives w = 2, value 2
    r = dispersion_closed(numvec{3, 2, 1}, NormParam(1.0));
    CHECK(r.omega == 2.0);
    CHECK(r.kappa == 2.0);

    // even length: average of the middle pair
    r = dispersion_closed(numvec{5, 1, 2, 0}, NormParam(1.0));
    CHECK(r.omega == 1.5);
    CHECK(r.kappa == 6.0);

    for (NormParam p : {NormParam(1.0), NormParam(2.0), inf}) {
        r = dispersion_closed(numvec{7.5}, p);
        CHECK(r.omega == 7.5);
        CHECK(r.kappa == 0.0);
    }
    CHECK_THROWS_AS(dispersion_closed(numvec{}, inf), std::invalid_argument);
    CHECK_THROWS_AS(dispersion_closed(numvec{1, 2}, NormParam(3.0)), std::invalid_argument);
}

TEST_CASE("dispersion_search") {
    for (double p : {1.0, 1.5, 2.0, 3.0, 7.0}) {
        const auto r = dispersion_search(numvec{4.25, 4.25, 4.25}, NormParam(p));
        CHECK(r.omega == 4.25);
        CHECK(r.kappa == 0.0);
    }
    auto r = dispersion_search(numvec{0, 1, 2}, NormParam(2.0), 1e-12);
    CHECK(r.omega == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(r.kappa == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));

    r = dispersion_search(numvec{0, 1}, NormParam(3.0));
    CHECK(r.omega == 0.5);
    CHECK(r.kappa == doctest::Approx(0.62996052494743658).epsilon(1e-14));

    // the minimizer of ||v - w||_2 is the mean, even for skewed data
    r = dispersion_search(numvec{0, 0, 3}, NormParam(2.0), 1e-13);
    CHECK(r.omega == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(dispersion_search(numvec{0, NAN}, NormParam(2.0)), std::invalid_argument);
    CHECK_THROWS_AS(dispersion_search(numvec{0, INFINITY}, NormParam(2.0)), std::invalid_argument);
    CHECK_THROWS_AS(dispersion_search(numvec{0, 1}, NormParam(2.0), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(dispersion_search(numvec{}, NormParam(2.0)), std::invalid_argument);
}

TEST_CASE("kappa_for_penalty") {
    CHECK(kappa_for_penalty(numvec{0, 4}, NormParam(1.0)).kappa == 2.0);
    const numvec v{0.3, -1.2, 2.0, 0.7};
    CHECK(kappa_for_penalty(v, NormParam(2.0)).kappa == dispersion_closed(v, NormParam(2.0)).kappa);
    CHECK(kappa_for_penalty(v, inf).kappa == dispersion_closed(v, NormParam(1.0)).kappa);

    const auto k15 = kappa_for_penalty(v, NormParam(3.0));
    CHECK(k15.iterations > 0);
    CHECK(k15.kappa <= dispersion_closed(v, NormParam(1.0)).kappa);
    CHECK(k15.kappa >= dispersion_closed(v, inf).kappa);
}

TEST_CASE("dispersion properties") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> shift(-100, 100), scale(-5, 5), wdist(-3, 3);
    const std::vector<double> ps{1.0, 1.3, 2.0, 3.0, 6.0, INFINITY};
    for (int trial = 0; trial < 50; ++trial) {
        const numvec v = testing::random_vector(2 + std::size_t(trial % 9), rng, -2, 2);
        for (double pv : ps) {
            const NormParam p(pv);
            const auto base = dispersion_search(v, p, 1e-13);

            numvec shifted(v);
            const double c = shift(rng);
            for (double& x : shifted) x += c;
            CHECK(dispersion_search(shifted, p, 1e-13).kappa == doctest::Approx(base.kappa).epsilon(1e-9).scale(1));

            const double lam = scale(rng);
            numvec scaled(v);
            for (double& x : scaled) x *= lam;
            CHECK(std::abs(dispersion_search(scaled, p, 1e-13).kappa - std::abs(lam) * base.kappa) <=
                  1e-9 * std::max(1.0, std::abs(lam) * base.kappa));

            for (int i = 0; i < 100; ++i)
                CHECK(base.kappa <= deviation(v, wdist(rng), pv) + 1e-10);

            const double eps = 1e-3;
            const double bound = std::isinf(pv) ? eps : std::pow(double(v.size()), 1.0 / pv) * eps;
            CHECK(std::abs(deviation(v, base.omega + eps, pv) - base.kappa) <= bound + 1e-12);
        }
        for (std::size_t i = 0; i + 1 < ps.size(); ++i)
            CHECK(dispersion_search(v, NormParam(ps[i]), 1e-13).kappa >=
                  dispersion_search(v, NormParam(ps[i + 1]), 1e-13).kappa - 1e-10);
    }
}

TEST_CASE("dispersion_search bisects to machine precision and stops") {
    const numvec v{1e8, 1e8 + 1.0, 1e8 + 3.0};
    const auto r = dispersion_search(v, NormParam(2.5), 1e-300);
    CHECK(r.iterations < max_bisection_iterations);
    CHECK(r.kappa <= deviation(v, 1e8 + 1.0, 2.5));
}
