#include <doctest.h>

#include "occlab/absorption.hpp"
#include "occlab/errors.hpp"
#include "support/support.hpp"

using namespace occlab;
using namespace occlab::testing;

namespace {

/// Two transient states that can only hand the process back and forth.
ExactMdp cycle_model()
{
    ExactMdp m({"p", "r", "end"}, {"end"}, {{"to_r"}, {"to_p"}, {"stop"}}, 1);
    m.transition(m.pair_id("p", "to_r"), 1) = 1;
    m.transition(m.pair_id("r", "to_p"), 0) = 1;
    m.transition(m.pair_id("end", "stop"), 2) = 1;
    m.initial()[0] = 1;
    return m;
}

/// Every transient action jumps straight to the absorbing state.
ExactMdp one_step_model()
{
    ExactMdp m({"p", "r", "end"}, {"end"}, {{"a", "b"}, {"c"}, {"stop"}}, 1);
    for (auto k : {m.pair_id("p", "a"), m.pair_id("p", "b"), m.pair_id("r", "c"), m.pair_id("end", "stop")})
        m.transition(k, 2) = 1;
    m.initial()[0] = q(1, 3);
    m.initial()[1] = q(2, 3);
    return m;
}

}  // namespace

TEST_SUITE("absorption") {

TEST_CASE("M1 has no end component inside the transient states")
{
    CHECK(max_end_components(m1()).empty());
    CHECK(oracle_absorbing(m1()));
}

TEST_CASE("a self-loop under a2 is an end component")
{
    auto m = m1(q(1));
    auto mecs = max_end_components(m);
    REQUIRE(mecs.size() == 1);
    CHECK(mecs[0].states == std::vector<std::size_t>{0});
    CHECK(mecs[0].actions == std::vector<std::vector<std::size_t>>{{1}});
    CHECK_THROWS_AS(require_absorbing(m), NotAbsorbingError);
    try {
        max_expected_hitting_time(m);
        FAIL("expected refusal");
    } catch (const NotAbsorbingError& e) {
        CHECK(e.witness().size() == 1);
    }
    CHECK_THROWS_AS(uniform_tail_bound(m), NotAbsorbingError);
    auto cert = certify_absorption(m);
    CHECK_FALSE(cert.absorbing);
    CHECK_FALSE(cert.hitting.has_value());
}

TEST_CASE("a closed two-state cycle is one end component")
{
    auto mecs = max_end_components(cycle_model());
    REQUIRE(mecs.size() == 1);
    CHECK(mecs[0].states == std::vector<std::size_t>{0, 1});
}

TEST_CASE("witness invariants: closed and nonempty action sets")
{
    std::mt19937_64 rng(5);
    int seen = 0;
    for (int trial = 0; trial < 200 && seen < 20; ++trial) {
        // Random models without the absorption filter.
        auto m = random_model(rng, {3, 3, 1, 3});
        // Break absorption by turning one action into a self-loop.
        std::size_t x = trial % m.pairs().transient_states().size();
        auto& row = m.transition_row(m.pairs().id(x, 0));
        std::fill(row.begin(), row.end(), Rational(0));
        row[x] = 1;
        auto mecs = max_end_components(m);
        CHECK(mecs.empty() == oracle_absorbing(m));
        for (const auto& ec : mecs) {
            ++seen;
            for (std::size_t i = 0; i < ec.states.size(); ++i) {
                CHECK_FALSE(ec.actions[i].empty());
                for (auto a : ec.actions[i]) {
                    const auto& r = m.transition_row(m.pairs().id(ec.states[i], a));
                    for (std::size_t y = 0; y < r.size(); ++y)
                        if (r[y] > 0)
                            CHECK(std::find(ec.states.begin(), ec.states.end(), y) != ec.states.end());
                }
            }
        }
    }
    CHECK(seen > 0);
}

TEST_CASE("M1 worst-case hitting time")
{
    auto h = max_expected_hitting_time(m1());
    CHECK(h.value == RVec{q(2), q(0)});
    CHECK(h.expected == q(2));
    CHECK(h.worst.choice[0] == 1);
    auto f = max_expected_hitting_time(convert_model<double>(m1()));
    CHECK(f.value[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.fixpoint_residual <= 1e-9);
}

TEST_CASE("forced one-step absorption gives v = 1")
{
    auto h = max_expected_hitting_time(one_step_model());
    CHECK(h.value == RVec{q(1), q(1), q(0)});
    auto t = uniform_tail_bound(one_step_model());
    CHECK(t.epsilon == 1);
    CHECK(t.horizon == 2);
    CHECK(t(0) == 2);
    CHECK(t(2) == 0);
}

TEST_CASE("slow leak: Q(s|s,a2) = 0.9")
{
    auto m = m1(q(9, 10));
    CHECK(max_expected_hitting_time(m).value[0] == 10);
    // Truncated geometric series oracle.
    double series = 0.0, p = 1.0;
    for (int t = 0; t < 2000; ++t, p *= 0.9)
        series += p;
    CHECK(to_double(max_expected_hitting_time(m).value[0]) == doctest::Approx(series).epsilon(1e-12));
    auto t = uniform_tail_bound(m);
    CHECK(t.epsilon == q(1, 10));
    CHECK(t(3) == Rational(1) * q(729, 1000) * 10);
}

TEST_CASE("M1 tail bound")
{
    auto t = uniform_tail_bound(m1());
    CHECK(t.horizon == 1);
    CHECK(t.epsilon == q(1, 2));
    for (std::size_t n = 0; n < 10; ++n) {
        Rational expect = 2;
        for (std::size_t i = 0; i < n; ++i)
            expect /= 2;
        CHECK(t(n) == expect);
    }
    auto cert = certify_absorption(m1());
    CHECK(cert.absorbing);
    CHECK(cert.tail->epsilon == q(1, 2));
}

TEST_CASE("worst-case hitting time matches brute force on the corpus")
{
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 30; ++i) {
        auto m = random_model(rng, {4, 3, 1, 5});
        auto exact = max_expected_hitting_time(m);
        CHECK(exact.expected == oracle_max_expected_hitting(m));
        auto f = max_expected_hitting_time(convert_model<double>(m));
        CHECK(f.expected == doctest::Approx(to_double(exact.expected)).epsilon(1e-8));
        // Bellman equation holds exactly at the exact solution.
        for (auto x : m.pairs().transient_states()) {
            Rational best = -1;
            for (std::size_t a = 0; a < m.actions(x).size(); ++a) {
                Rational s = 1;
                const auto& row = m.transition_row(m.pairs().id(x, a));
                for (std::size_t y = 0; y < row.size(); ++y)
                    s += row[y] * exact.value[y];
                best = std::max(best, s);
            }
            CHECK(best == exact.value[x]);
        }
    }
}

TEST_CASE("the tail bound dominates every deterministic policy's tail")
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 15; ++i) {
        auto m = random_model(rng, {3, 2, 1, 4});
        auto f = convert_model<double>(m);
        auto bound = uniform_tail_bound(f);
        CHECK(bound.epsilon > 0.0);
        CHECK(bound.epsilon <= 1.0);
        for (const auto& sel : all_selectors(m)) {
            // P(T > t) by forward propagation; tail sums from the back.
            const std::size_t horizon = 400;
            std::vector<double> surv;
            std::vector<double> cur(f.num_states(), 0.0);
            for (std::size_t x = 0; x < f.num_states(); ++x)
                cur[x] = f.is_absorbing(x) ? 0.0 : f.initial()[x];
            for (std::size_t t = 0; t < horizon; ++t) {
                double mass = 0.0;
                for (double c : cur)
                    mass += c;
                surv.push_back(mass);
                std::vector<double> next(f.num_states(), 0.0);
                for (std::size_t x = 0; x < f.num_states(); ++x)
                    if (!f.is_absorbing(x))
                        for (std::size_t y = 0; y < f.num_states(); ++y)
                            if (!f.is_absorbing(y))
                                next[y] += cur[x] * f.transition(f.pairs().id(x, sel.choice[x]), y);
                cur.swap(next);
            }
            double tail = 0.0;
            for (std::size_t n = horizon; n-- > 0;) {
                tail += surv[n];
                if (n < 50)
                    CHECK(tail <= bound(n) + 1e-9);
            }
        }
    }
}

TEST_CASE("more mass towards the absorbing set never increases the hitting time")
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 20; ++i) {
        auto m = random_model(rng, {3, 3, 1, 4});
        auto before = max_expected_hitting_time(m).expected;
        auto shifted = m;
        std::size_t k = m.pairs().transient_pairs()[i % m.pairs().transient_pairs().size()];
        auto& row = shifted.transition_row(k);
        std::size_t end = m.num_states() - 1;
        // Move half of the in-row transient mass to the absorbing state.
        for (std::size_t y = 0; y < end; ++y) {
            Rational moved = row[y] / 2;
            row[y] -= moved;
            row[end] += moved;
        }
        CHECK(validate(shifted).ok());
        CHECK(max_expected_hitting_time(shifted).expected <= before);
    }
}

}
