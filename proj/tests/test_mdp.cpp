#include <doctest.h>

#include <Eigen/Dense>

#include "rmdp/mdp.hpp"
#include "support.hpp"

using namespace rmdp;

namespace {

Mdp identity_mdp() {
    Mdp m(2, 1, 0.9);
    m.transition(0, 0)[0] = 1.0;
    m.transition(1, 0)[1] = 1.0;
    return m;
}

// T^pi v through explicit policy-averaged matrices
Eigen::VectorXd dense_policy_update(const Mdp& m, const ValueFunction& v, const StochasticPolicy& pi) {
    const auto S = Eigen::Index(m.num_states);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(S);
    for (Eigen::Index s = 0; s < S; ++s)
        for (std::size_t a = 0; a < m.num_actions; ++a) {
            const double w = pi.probs(std::size_t(s), a);
            r(s) += w * m.r(std::size_t(s), a);
            for (Eigen::Index t = 0; t < S; ++t)
                P(s, t) += w * m.transition(std::size_t(s), a)[std::size_t(t)];
        }
    const Eigen::Map<const Eigen::VectorXd> vv(v.data(), S);
    return r + m.gamma * P * vv;
}

} // namespace

TEST_CASE("validate_mdp") {
    CHECK(validate_mdp(identity_mdp()).empty());

    Mdp bad = identity_mdp();
    bad.transition(1, 0)[1] = 0.9;
    const auto v = validate_mdp(bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("(1,0)") != std::string::npos);

    Mdp g = identity_mdp();
    g.gamma = 1.0;
    const auto vg = validate_mdp(g);
    REQUIRE(vg.size() == 1);
    CHECK(vg[0] == "discount not in [0,1)");

    Mdp neg = identity_mdp();
    neg.transition(0, 0)[0] = 1.5;
    neg.transition(0, 0)[1] = -0.5;
    CHECK(validate_mdp(neg).size() == 1);

    Mdp mu = identity_mdp();
    mu.mu = {0.7, 0.7};
    CHECK(validate_mdp(mu).size() == 1);

    Mdp shape = identity_mdp();
    shape.reward.pop_back();
    CHECK(!validate_mdp(shape).empty());

    Mdp loose = identity_mdp();
    loose.transition(0, 0)[0] = 1.0 - 1e-10;
    CHECK(validate_mdp(loose).size() == 1);
    CHECK(validate_mdp(loose, file_sum_tolerance).empty());
}

TEST_CASE("bellman_policy") {
    std::mt19937_64 rng(7);
    Mdp m = random_mdp(4, 3, 0.8, rng);
    for (double& r : m.reward) r = 1.0;
    const auto pi = testing::random_policy(4, 3, rng);
    for (double x : bellman_policy(m, ValueFunction(4, 0.0), pi)) CHECK(x == doctest::Approx(1.0).epsilon(1e-15));

    Mdp myopic = random_mdp(4, 3, 0.0, rng);
    const ValueFunction v = testing::random_vector(4, rng);
    const auto out = bellman_policy(myopic, v, pi);
    for (std::size_t s = 0; s < 4; ++s) {
        double expect = 0.0;
        for (std::size_t a = 0; a < 3; ++a) expect += pi.probs(s, a) * myopic.r(s, a);
        CHECK(out[s] == doctest::Approx(expect).epsilon(1e-14));
    }

    for (int trial = 0; trial < 20; ++trial) {
        const Mdp r = random_mdp(3, 2, 0.9, rng);
        const auto p = testing::random_policy(3, 2, rng);
        const ValueFunction w = testing::random_vector(3, rng, -5, 5);
        const auto got = bellman_policy(r, w, p);
        const Eigen::VectorXd want = dense_policy_update(r, w, p);
        for (std::size_t s = 0; s < 3; ++s) CHECK(got[s] == doctest::Approx(want(Eigen::Index(s))).epsilon(1e-13));
    }

    CHECK_THROWS_AS(bellman_policy(m, ValueFunction(3, 0.0), pi), std::invalid_argument);
    CHECK_THROWS_AS(bellman_policy(m, ValueFunction(4, 0.0), StochasticPolicy::uniform(4, 2)),
                    std::invalid_argument);
}

TEST_CASE("bellman_optimal") {
    std::mt19937_64 rng(11);
    const Mdp single = random_mdp(5, 1, 0.9, rng);
    const ValueFunction v = testing::random_vector(5, rng);
    CHECK(bellman_optimal(single, v) == bellman_policy(single, v, StochasticPolicy::uniform(5, 1)));

    const Mdp m = random_mdp(5, 4, 0.9, rng);
    const auto at_zero = bellman_optimal(m, ValueFunction(5, 0.0));
    for (std::size_t s = 0; s < 5; ++s) {
        double best = m.r(s, 0);
        for (std::size_t a = 1; a < 4; ++a) best = std::max(best, m.r(s, a));
        CHECK(at_zero[s] == best);
    }

    const ValueFunction w = testing::random_vector(5, rng, -3, 3);
    const auto opt = bellman_optimal(m, w);
    for (int i = 0; i < 100; ++i) {
        const auto pol = bellman_policy(m, w, testing::random_policy(5, 4, rng));
        for (std::size_t s = 0; s < 5; ++s) CHECK(opt[s] >= pol[s] - 1e-12);
    }
}

TEST_CASE("q_from_value") {
    std::mt19937_64 rng(3);
    const Mdp myopic = random_mdp(4, 3, 0.0, rng);
    const QTable q0 = q_from_value(myopic, testing::random_vector(4, rng));
    CHECK(q0.data() == myopic.reward);

    const Mdp m = random_mdp(4, 3, 0.7, rng);
    const QTable qc = q_from_value(m, ValueFunction(4, 2.5));
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t a = 0; a < 3; ++a) CHECK(qc(s, a) == doctest::Approx(m.r(s, a) + 0.7 * 2.5).epsilon(1e-14));

    const ValueFunction v = testing::random_vector(4, rng, -2, 2);
    const QTable q = q_from_value(m, v);
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t a = 0; a < 3; ++a) {
            double ev = 0.0;
            for (std::size_t t = 0; t < 4; ++t) ev += m.kernel[(s * 3 + a) * 4 + t] * v[t];
            CHECK(q(s, a) == doctest::Approx(m.reward[s * 3 + a] + 0.7 * ev).epsilon(1e-14));
        }
}

TEST_CASE("nominal operators contract, are monotone, and max over Q") {
    std::mt19937_64 rng(5);
    const Mdp m = random_mdp(6, 3, 0.9, rng);
    const auto pi = testing::random_policy(6, 3, rng);
    for (int i = 0; i < 200; ++i) {
        const ValueFunction u = testing::random_vector(6, rng, -10, 10);
        const ValueFunction v = testing::random_vector(6, rng, -10, 10);
        const double d = max_abs_diff(u, v);
        CHECK(max_abs_diff(bellman_optimal(m, u), bellman_optimal(m, v)) <= 0.9 * d + 1e-12);
        CHECK(max_abs_diff(bellman_policy(m, u, pi), bellman_policy(m, v, pi)) <= 0.9 * d + 1e-12);

        ValueFunction hi = u;
        for (double& x : hi) x += std::abs(testing::random_vector(1, rng)[0]);
        const auto tu = bellman_optimal(m, u), thi = bellman_optimal(m, hi);
        const auto pu = bellman_policy(m, u, pi), phi = bellman_policy(m, hi, pi);
        for (std::size_t s = 0; s < 6; ++s) {
            CHECK(tu[s] <= thi[s]);
            CHECK(pu[s] <= phi[s]);
        }

        const QTable q = q_from_value(m, u);
        for (std::size_t s = 0; s < 6; ++s)
            CHECK(tu[s] == *std::max_element(q.row(s).begin(), q.row(s).end()));
    }
}

TEST_CASE("policy helpers") {
    const auto det = StochasticPolicy::deterministic({1, 0}, 3);
    CHECK(det.support_size == indvec{1, 1});
    CHECK(det.probs(0, 1) == 1.0);
    const auto uni = StochasticPolicy::uniform(2, 4);
    CHECK(uni.support_size == indvec{4, 4});
    CHECK(argmax(std::vector<double>{1.0, 3.0, 3.0}) == 1);
}
