#include <doctest.h>

#include <cmath>

#include "occlab/absorption.hpp"
#include "occlab/simulate.hpp"
#include "support/support.hpp"

using namespace occlab;
using namespace occlab::testing;

namespace {

FloatMdp fm1() { return convert_model<double>(m1()); }

StationaryPolicy<double> half() { return StationaryPolicy<double>{{{0.5, 0.5}, {1.0}}}; }

bool within(double est, double se, double truth, double k = 4.0)
{
    return std::abs(est - truth) <= k * se + 1e-12;
}

}  // namespace

TEST_SUITE("simulate")
{
TEST_CASE("Philox4x32-10 known-answer vectors")
{
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff})
          == C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0})
          == C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("episode streams are uniform in [0,1) and reproducible")
{
    EpisodeStream a(7, 3), b(7, 3), c(7, 4);
    double sum = 0;
    bool differs = false;
    for (int i = 0; i < 4000; ++i) {
        double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(u == b.uniform());
        differs = differs || u != c.uniform();
        sum += u;
    }
    CHECK(differs);
    CHECK(std::abs(sum / 4000 - 0.5) < 4 * std::sqrt(1.0 / 12 / 4000));
    CHECK(a.draws() == 4000);
}

TEST_CASE("rollout under always-a1 is one step")
{
    auto m = fm1();
    for (std::uint64_t e = 0; e < 20; ++e) {
        auto ep = rollout(m, SimPolicy{always(0)}, 11, 100, e);
        REQUIRE(ep.length() == 1);
        CHECK(ep.pairs[0] == m.pair_id("s", "a1"));
        CHECK(ep.final_state == 1);
        CHECK_FALSE(ep.truncated);
    }
}

TEST_CASE("step cap truncates")
{
    auto m = convert_model<double>(m1(q(99, 100)));
    SimOptions o;
    o.episodes = 2000;
    o.step_cap = 3;
    auto est = estimate(m, SimPolicy{always(1)}, o);
    CHECK(est.truncated > 0);
    CHECK(est.truncation_warning);
    CHECK(est.length_histogram.rbegin()->first <= 3);
}

TEST_CASE("always-a2 length is geometric with mean 2")
{
    SimOptions o;
    o.episodes = 20000;
    o.seed = 5;
    auto est = estimate(fm1(), SimPolicy{always(1)}, o);
    CHECK(within(est.absorption_time, est.absorption_time_se, 2.0));
    CHECK(within(est.occupancy[1], est.occupancy_se[1], 2.0));
    CHECK(est.occupancy[0] == 0.0);
    CHECK(est.performance[0] == 0.0);
    CHECK_FALSE(est.truncation_warning);
}

TEST_CASE("degenerate mixture matches its selector")
{
    SimOptions o;
    o.episodes = 3000;
    o.seed = 9;
    MixturePolicy<double> mix{{1.0, 0.0}, {always(0), always(1)}};
    auto a = estimate(fm1(), SimPolicy{mix}, o);
    auto b = estimate(fm1(), SimPolicy{always(0)}, o);
    CHECK(a.occupancy == b.occupancy);
    CHECK(a.absorption_time == 1.0);
    CHECK(a.absorption_time_se == 0.0);
    CHECK(a.performance == std::vector<double>{1.0});
}

TEST_CASE("stationary and mixture estimates cover the analytic values")
{
    SimOptions o;
    o.episodes = 40000;
    o.seed = 123;
    auto st = estimate(fm1(), SimPolicy{half()}, o);
    CHECK(within(st.occupancy[0], st.occupancy_se[0], 2.0 / 3));
    CHECK(within(st.occupancy[1], st.occupancy_se[1], 2.0 / 3));
    CHECK(within(st.performance[0], st.performance_se[0], 2.0 / 3));
    CHECK(within(st.absorption_time, st.absorption_time_se, 4.0 / 3));

    MixturePolicy<double> mix{{2.0 / 3, 1.0 / 3}, {always(0), always(1)}};
    auto mx = estimate(fm1(), SimPolicy{mix}, o);
    CHECK(within(mx.occupancy[0], mx.occupancy_se[0], 2.0 / 3));
    CHECK(within(mx.occupancy[1], mx.occupancy_se[1], 2.0 / 3));
    CHECK(within(mx.absorption_time, mx.absorption_time_se, 4.0 / 3));
}

TEST_CASE("chattering kernel estimate covers its occupancy")
{
    // beta(s) = (1/2, 1/2) over {always-a1, always-a2} acts like half-half.
    ChatteringKernel<double> k{{always(0), always(1)}, {{0.5, 0.5}, {1.0, 0.0}}};
    SimOptions o;
    o.episodes = 20000;
    o.seed = 77;
    auto est = estimate(fm1(), SimPolicy{k}, o);
    CHECK(within(est.occupancy[0], est.occupancy_se[0], 2.0 / 3));
    CHECK(within(est.occupancy[1], est.occupancy_se[1], 2.0 / 3));
}

TEST_CASE("results do not depend on worker count and repeat exactly")
{
    SimOptions o;
    o.episodes = 5000;  // several blocks, last one partial
    o.seed = 42;
    auto a = estimate(fm1(), SimPolicy{half()}, o);
    auto b = estimate(fm1(), SimPolicy{half()}, o);
    o.workers = 4;
    auto c = estimate(fm1(), SimPolicy{half()}, o);
    CHECK(a == b);
    CHECK(a == c);
    o.seed = 43;
    CHECK_FALSE(a == estimate(fm1(), SimPolicy{half()}, o));
}

TEST_CASE("policy checks")
{
    SimOptions o;
    o.episodes = 10;
    CHECK_THROWS_AS(estimate(fm1(), SimPolicy{StationaryPolicy<double>{{{0.5, 0.6}, {1.0}}}}, o), InvalidArgument);
    CHECK_THROWS_AS(estimate(fm1(), SimPolicy{DeterministicPolicy{{2, 0}}}, o), StructuralError);
    o.episodes = 0;
    CHECK_THROWS_AS(estimate(fm1(), SimPolicy{always(0)}, o), InvalidArgument);
}

TEST_CASE("tail curve")
{
    SimOptions o;
    o.episodes = 20000;
    o.seed = 3;
    auto one = tail_curve(fm1(), SimPolicy{always(0)}, o, 5);
    REQUIRE(one.size() == 6);
    CHECK(one[0].value == 1.0);
    for (std::size_t n = 1; n < one.size(); ++n)
        CHECK(one[n].value == 0.0);

    auto geo = tail_curve(fm1(), SimPolicy{always(1)}, o, 12);
    auto bound = uniform_tail_bound(fm1());
    for (std::size_t n = 0; n < geo.size(); ++n) {
        CHECK(within(geo[n].value, geo[n].se, 2.0 * std::pow(0.5, static_cast<double>(n))));
        CHECK(geo[n].value <= bound(n) + 4 * geo[n].se);
        if (n > 0)
            CHECK(geo[n].value <= geo[n - 1].value);
    }
}
}
