#include <doctest.h>

#include <cmath>

#include "maxocc/mdp.hpp"
#include "maxocc/rng.hpp"
#include "maxocc/verify.hpp"
#include "support.hpp"

using namespace maxocc;
using test::make_mdp;

TEST_SUITE_BEGIN("mdp");

TEST_CASE("validate accepts a well-formed symmetric model") {
    const Mdp mdp = test::two_state_symmetric(0.5);
    CHECK_NOTHROW(validate(mdp));
    CHECK(mdp.n_states() == 2);
    CHECK(mdp.available_count(0) == 2);
}

TEST_CASE("validate rejects a mass-deficient row") {
    MdpBuilder builder(2, 1, 0.9, 1.0, 0.0);
    builder.begin_row(0, 0);
    builder.add(0, 0.5);
    builder.add(1, 0.4);
    builder.begin_row(1, 0);
    builder.add(1, 1.0);
    try {
        builder.finish();
        FAIL("expected RowSumError");
    } catch (const RowSumError& e) {
        CHECK(e.state == 0);
        CHECK(e.action == 0);
        CHECK(e.sum == doctest::Approx(0.9));
    }
}

TEST_CASE("validate rejects a state with no available action") {
    MdpBuilder builder(2, 2, 0.9, 1.0, 0.0);
    builder.begin_row(0, 0);
    builder.add(0, 1.0);
    // state 1 never opens a row
    CHECK_THROWS_AS(builder.finish(), NoActionError);
}

TEST_CASE("validate rejects transition mass on unavailable actions") {
    // only reachable through the serialized form, where availability and
    // transitions are separate
    const std::string doc =
        R"({"n_states":1,"n_actions":2,"gamma":0.9,"alpha":1,"beta":0,)"
        R"("availability":[[1,0]],"transitions":[{"s":0,"a":0,"rows":[[0,1.0]]},{"s":0,"a":1,"rows":[[0,1.0]]}]})";
    CHECK_THROWS_AS(Mdp::from_json(doc), GhostTransitionError);
}

TEST_CASE("negative probabilities are rejected") {
    MdpBuilder builder(1, 1, 0.9, 1.0, 0.0);
    builder.begin_row(0, 0);
    builder.add(0, 1.5);
    builder.add(0, -0.5);
    CHECK_THROWS_AS(builder.finish(), RowSumError);
}

TEST_CASE("discrete_entropy on point, uniform and mixed masses") {
    const std::vector<double> point = {1.0};
    CHECK(discrete_entropy(point) == doctest::Approx(0.0).epsilon(1e-15));
    std::vector<double> uniform9(9, 1.0 / 9.0);
    CHECK(discrete_entropy(uniform9) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
    const std::vector<double> mixed = {0.2, 0.3, 0.5};
    CHECK(discrete_entropy(mixed) == doctest::Approx(1.0296530140645737).epsilon(1e-12));
    const std::vector<double> with_zero = {0.5, 0.0, 0.5};
    CHECK(discrete_entropy(with_zero) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("discrete_entropy rejects non-distributions") {
    const std::vector<double> off = {0.5, 0.4};
    CHECK_THROWS_AS(discrete_entropy(off), NotADistribution);
    const std::vector<double> neg = {1.5, -0.5};
    CHECK_THROWS_AS(discrete_entropy(neg), NotADistribution);
}

TEST_CASE("entropy is permutation-invariant and maximal at uniform") {
    SeededRng rng(7, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.next_u64() % 6;
        std::vector<double> p(n);
        double sum = 0.0;
        for (double& v : p) {
            v = rng.next_double() + 1e-3;
            sum += v;
        }
        for (double& v : p) v /= sum;
        const double h = discrete_entropy(p);
        CHECK(h <= std::log(static_cast<double>(n)) + 1e-12);
        std::vector<double> shuffled = p;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.next_u64() % i]);
        CHECK(discrete_entropy(shuffled) == doctest::Approx(h).epsilon(1e-12));
    }
}

TEST_CASE("entropy cache vanishes for deterministic rows and beta zero") {
    const Mdp det = test::two_state_symmetric(0.5, 1.0, 1.0);
    const EntropyCache cache = build_entropy_cache(det);
    for (double h : cache.h) CHECK(h == 0.0);

    const Mdp stochastic = make_mdp(2, 1, 0.9, {{0, 0, {{0, 0.5}, {1, 0.5}}}, {1, 0, {{1, 1.0}}}},
                                    1.0, 0.0);
    const EntropyCache zero = build_entropy_cache(stochastic);
    for (double h : zero.h) CHECK(h == 0.0);
}

TEST_CASE("entropy cache scales a fair coin row to ln 2") {
    const Mdp mdp = make_mdp(2, 1, 0.9, {{0, 0, {{0, 0.5}, {1, 0.5}}}, {1, 0, {{1, 1.0}}}}, 1.0,
                             1.0);
    const EntropyCache cache = build_entropy_cache(mdp);
    CHECK(cache.at(0, 0) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    CHECK(cache.at(1, 0) == 0.0);
}

TEST_CASE("policy transition matrix composes point masses into a 0/1 matrix") {
    const Mdp mdp = test::two_state_symmetric(0.5);
    Policy policy(2, 2);
    policy.at(0, 1) = 1.0;  // switch
    policy.at(1, 0) = 1.0;  // stay
    const std::vector<double> m = policy_transition_matrix(mdp, policy);
    CHECK(m[0 * 2 + 1] == doctest::Approx(1.0));
    CHECK(m[1 * 2 + 1] == doctest::Approx(1.0));
    CHECK(m[0 * 2 + 0] == doctest::Approx(0.0));
}

TEST_CASE("uniform two-action policy mixes stay and switch into half-half rows") {
    const Mdp mdp = test::two_state_symmetric(0.5);
    Policy policy(2, 2);
    for (StateId s = 0; s < 2; ++s)
        for (ActionId a = 0; a < 2; ++a) policy.at(s, a) = 0.5;
    const std::vector<double> m = policy_transition_matrix(mdp, policy);
    for (double v : m) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("policy transition rows stay stochastic on random models") {
    SeededRng rng(11, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const Mdp mdp = random_mdp(rng, 4, 3, 0.9);
        Policy policy(4, 3);
        for (StateId s = 0; s < 4; ++s) {
            double sum = 0.0;
            std::vector<double> w(3, 0.0);
            for (ActionId a = 0; a < 3; ++a)
                if (mdp.available(s, a)) {
                    w[a] = 0.1 + rng.next_double();
                    sum += w[a];
                }
            for (ActionId a = 0; a < 3; ++a) policy.at(s, a) = w[a] / sum;
        }
        const std::vector<double> m = policy_transition_matrix(mdp, policy);
        for (StateId s = 0; s < 4; ++s) {
            double row = 0.0;
            for (StateId j = 0; j < 4; ++j) row += m[s * 4 + j];
            CHECK(std::abs(row - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("randomized clean and corrupt instances hit exactly the invariants") {
    SeededRng rng(13, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const Mdp clean = random_mdp(rng, 6, 3, 0.9);
        CHECK_NOTHROW(validate(clean));
        // rebuild with one row scaled out of the simplex
        MdpBuilder corrupt(6, 3, 0.9, 1.0, 0.0);
        bool poisoned = false;
        for (StateId s = 0; s < 6; ++s)
            for (ActionId a = 0; a < 3; ++a) {
                if (!clean.available(s, a)) continue;
                corrupt.begin_row(s, a);
                const TransitionRow row = clean.row(s, a);
                const bool poison_here = !poisoned && rng.next_double() < 0.2;
                for (std::size_t i = 0; i < row.size(); ++i)
                    corrupt.add(row.next[i], row.prob[i] * (poison_here ? 1.01 : 1.0));
                poisoned = poisoned || poison_here;
            }
        if (poisoned)
            CHECK_THROWS_AS(corrupt.finish(), RowSumError);
        else
            CHECK_NOTHROW(corrupt.finish());
    }
}

TEST_CASE("builder merges duplicate successors") {
    MdpBuilder builder(2, 1, 0.9, 1.0, 0.0);
    builder.begin_row(0, 0);
    builder.add(1, 0.25);
    builder.add(1, 0.75);
    builder.begin_row(1, 0);
    builder.add(1, 1.0);
    const Mdp mdp = builder.finish();
    const TransitionRow row = mdp.row(0, 0);
    REQUIRE(row.size() == 1);
    CHECK(row.next[0] == 1);
    CHECK(row.prob[0] == doctest::Approx(1.0));
}

TEST_CASE("absorbing detection requires a single self-loop action") {
    const Mdp mdp = make_mdp(3, 2, 0.9,
                             {{0, 0, {{0, 1.0}}},
                              {1, 0, {{1, 1.0}}},
                              {1, 1, {{0, 1.0}}},
                              {2, 0, {{1, 1.0}}}});
    CHECK(mdp.is_absorbing(0));
    CHECK_FALSE(mdp.is_absorbing(1));  // two actions
    CHECK_FALSE(mdp.is_absorbing(2));  // moves away
}

TEST_SUITE_END();
