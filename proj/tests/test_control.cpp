#include "svc/control.hpp"
#include "svc/errors.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace svc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("dtip law") {
    const DtipGains g{4.0, 2.0, 1};
    CHECK_THAT(dtip_law(1.0, 0.0, 0.5, g), WithinAbs(-0.5, 1e-15));
    CHECK_THAT(dtip_law(0.0, 1.0, 0.0, g), WithinAbs(0.25, 1e-15));
    const double u0 = dtip_law(0.0, 0.0, 0.0, g);
    CHECK(u0 == 0.0);
    CHECK_FALSE(std::signbit(u0));
    CHECK_THROWS_AS(dtip_law(std::nan(""), 0.0, 0.0, g), NonFiniteInput);
}

TEST_CASE("gain validation") {
    CHECK_NOTHROW(DtipGains{1.0, 1.0, 1}.validate());
    CHECK_NOTHROW(DtipGains{-2.0, 1.0, 1}.validate());
    CHECK_THROWS_AS((DtipGains{0.0, 1.0, 1}.validate()), InvalidArgument);
    CHECK_THROWS_AS((DtipGains{1.0, 0.0, 1}.validate()), InvalidArgument);
    CHECK_THROWS_AS((DtipGains{1.0, 1.0, 0}.validate()), InvalidArgument);
}

TEST_CASE("reference composition") {
    CHECK(compose_reference(1.5, 0.0) == 1.5);
    CHECK(compose_reference(1.5, 0.25) == 1.75);
    CHECK(compose_reference(1.0, 0.5, 2.0) == 2.0);
}

TEST_CASE("dtip loop construction checks") {
    CHECK_THROWS_AS(DtipLoop({1.0, 1.0, 1}, {0.02, 5}, 0.05), InvalidArgument);
    CHECK_THROWS_AS(DtipLoop({1.0, 1.0, 1}, {0.01, 5}, 0.05, {0.1, 1.0}), InvalidArgument);
    CHECK_NOTHROW(DtipLoop({1.0, 1.0, 1}, {0.01, 5}, 0.05, {-1.0, 1.0}));
}

TEST_CASE("dtip loop is silent during warm-up") {
    DtipLoop loop({2.0, 1.0, 1}, {0.01, 5}, 0.05);
    for (int k = 0; k < 4; ++k) {
        loop.observe(1.0, 0.0);
        CHECK_FALSE(loop.ready());
        CHECK(loop.control(1.0, 0.0) == 0.0);
    }
    loop.observe(1.0, 0.0);
    REQUIRE(loop.ready());
    // Constant output, zero stored control: f_bar = 0, u = -k_p e / alpha.
    CHECK_THAT(loop.control(1.0, 0.0), WithinAbs(-0.5, 1e-15));
    CHECK_THAT(loop.delayed_control(), WithinAbs(-0.5, 1e-15));
}

TEST_CASE("dtip loop clamps its output") {
    DtipLoop loop({1.0, 1.0, 1}, {0.01, 3}, 0.05, {-0.1, 0.2});
    for (int k = 0; k < 3; ++k)
        loop.observe(5.0, 0.0);
    CHECK(loop.control(5.0, 0.0) == -0.1);
    loop.observe(-5.0, 0.0);
    loop.observe(-5.0, 0.0);
    loop.observe(-5.0, 0.0);
    CHECK(loop.control(-5.0, 0.0) <= 0.2);
}

TEST_CASE("stored control is delayed by h_d periods") {
    DtipLoop loop({1.0, 1.0, 3}, {0.01, 3}, 0.05);
    for (int k = 0; k < 3; ++k)
        loop.observe(0.0, 0.0);
    std::vector<double> issued;
    for (int k = 0; k < 6; ++k) {
        const double y = 0.1 * (k + 1);
        if (k >= 3)
            CHECK(loop.delayed_control() == issued[static_cast<std::size_t>(k - 3)]);
        loop.observe(y, 0.0);
        issued.push_back(loop.control(y, 0.0));
    }
}

TEST_CASE("exact disturbance estimate gives exponential tracking") {
    // y' = alpha_true u with f_bar = 0 supplied exactly.
    const DtipGains g{3.0, 0.5, 1};
    const double dt = 1e-4;
    double y = 1.0;
    double t = 0.0;
    const double e0 = y;
    auto advance_to = [&](double t_end) {
        while (t < t_end - 1e-12) {
            const double u = dtip_law(0.0, 0.0, y, g);
            y += dt * g.alpha * u;
            t += dt;
        }
    };
    advance_to(1.0 / g.k_p);
    CHECK_THAT(y / e0, WithinRel(std::exp(-1.0), 0.05));
    advance_to(3.0 / g.k_p);
    CHECK_THAT(y / e0, WithinRel(std::exp(-3.0), 0.05));
}

TEST_CASE("dtip loop rejects an unknown constant disturbance") {
    // y' = F + alpha u with F unknown to the controller.
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const double f = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
        const double alpha = std::uniform_real_distribution<double>(0.5, 5.0)(rng);
        const double ref = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        DtipLoop loop({alpha, 2.0, 1}, {0.01, 5}, 0.05);
        const double dt = 0.001;
        double y = 0.0;
        double u = 0.0;
        for (int k = 0; k <= 20000; ++k) {
            if (k % 10 == 0)
                loop.observe(y, ref);
            if (k % 50 == 0)
                u = loop.control(y, ref);
            y += dt * (f + alpha * u);
        }
        CHECK_THAT(y, WithinAbs(ref, 1e-3));
    }
}

TEST_CASE("inner agent gating") {
    InnerAgent agent({1.0, 1.0, 1}, {0.01, 3}, 0.05);
    for (int k = 0; k < 3; ++k)
        agent.observe(1.0, 0.0);
    REQUIRE(agent.ready());
    CHECK(agent.control(1.0, 0.0) != 0.0);
    agent.gate(false);
    CHECK_FALSE(agent.enabled());
    CHECK_FALSE(agent.ready());
    agent.observe(1.0, 0.0);
    CHECK(agent.control(1.0, 0.0) == 0.0);
    CHECK(agent.fires() == 2);
    agent.gate(true);
    CHECK_FALSE(agent.ready());
    CHECK(agent.loop().delayed_control() == 0.0);
}

TEST_CASE("outer controller enforces the rate ratio") {
    CHECK_NOTHROW(OuterController({1.0, 1.0, 1}, {0.1, 5}, 0.5, 0.05));
    CHECK_NOTHROW(OuterController({1.0, 1.0, 1}, {0.1, 5}, 0.5, 0.1));
    CHECK_THROWS_AS(OuterController({1.0, 1.0, 1}, {0.1, 5}, 0.5, 0.2), InvalidArgument);
    CHECK_THROWS_AS(OuterController({1.0, 1.0, 1}, {0.1, 5}, 0.5, 0.025), InvalidArgument);
}

TEST_CASE("delay buffer") {
    DelayBuffer buf;
    CHECK_THROWS_AS(buf.read(0.0), InvalidArgument);
    buf.push(0.0, 1.0);
    CHECK(buf.read(0.0) == 1.0);
    buf.push(0.1, 2.0);
    CHECK(buf.read(0.1) == 2.0);

    DelayBuffer late(1.0);
    for (int k = 0; k <= 30; ++k) {
        const double t = 0.1 * k;
        late.push(t, static_cast<double>(k));
        const double expected = k < 10 ? 0.0 : static_cast<double>(k - 10);
        CHECK(late.read(t) == expected);
    }
    CHECK_THROWS_AS(late.push(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(DelayBuffer(-1.0), InvalidArgument);
}
