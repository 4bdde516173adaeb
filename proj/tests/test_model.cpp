#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "wavekit/model.hpp"

using namespace wavekit;
using model::decompose;
using model::Problem;

TEST_CASE("decompose: one sign change through 3/4") {
    auto p = fixtures::sqrt_aggregation(0.25);
    auto d = decompose(p);

    REQUIRE(d.D0.size() == 1);
    CHECK(d.D0[0] == doctest::Approx(0.75).epsilon(1e-10));
    REQUIRE(d.intervals.size() == 2);
    CHECK(d.intervals[0].alpha == 0.0);
    CHECK(d.intervals[0].beta == doctest::Approx(0.75));
    CHECK(d.intervals[0].h_positive);
    CHECK(d.intervals[1].beta == 1.0);
    CHECK(!d.intervals[1].h_positive);
    CHECK(d.D00.empty());
    CHECK(d.K0_minus.empty());
    CHECK(std::fabs(p.D(d.D0[0])) <= 1e-12);
}

TEST_CASE("decompose: even-order zero is recovered without a sign change") {
    auto p = fixtures::parabolic_pinch();
    auto d = decompose(p);

    REQUIRE(d.D0.size() == 1);
    CHECK(d.D0[0] == doctest::Approx(0.5).epsilon(1e-9));
    REQUIRE(d.intervals.size() == 2);
    CHECK(d.intervals[0].h_positive);
    CHECK(d.intervals[1].h_positive);  // K+ on both sides, K- empty
    REQUIRE(d.D00.size() == 1);
    CHECK(d.D00[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(d.K0_minus.empty());

    // same with an off-node cell count, so the zero is not a grid point
    model::DecomposeOptions opts;
    opts.scan_cells = 2047;
    auto d2 = decompose(p, opts);
    REQUIRE(d2.D0.size() == 1);
    CHECK(d2.D0[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("decompose: constant diffusion gives the single interval") {
    auto p = fixtures::kpp();
    auto d = decompose(p);
    CHECK(d.D0.empty());
    REQUIRE(d.intervals.size() == 1);
    CHECK(d.intervals[0].alpha == 0.0);
    CHECK(d.intervals[0].beta == 1.0);
    CHECK(d.intervals[0].h_positive);
}

TEST_CASE("decompose: tiling and interval sign invariants") {
    for (auto p : {fixtures::sqrt_aggregation(0.25), fixtures::parabolic_pinch(),
                   fixtures::cubic_flip(), fixtures::aggregative()}) {
        CAPTURE(p.name);
        auto d = decompose(p);

        double total = 0.0;
        double prev = 0.0;
        for (const auto& iv : d.intervals) {
            CHECK(iv.alpha == doctest::Approx(prev).epsilon(1e-12));
            total += iv.beta - iv.alpha;
            prev = iv.beta;

            // strict sign of h at 33 interior Chebyshev points
            for (int j = 1; j <= 33; ++j) {
                const double t = 0.5 * (1.0 - std::cos(3.14159265358979 * j / 34.0));
                const double u = iv.alpha + t * (iv.beta - iv.alpha);
                const double h = p.h(u);
                CHECK(((iv.h_positive && h > 0.0) || (!iv.h_positive && h < 0.0)));
            }
        }
        CHECK(prev == 1.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        for (double z : d.D0) CHECK(std::fabs(p.D(z)) <= 1e-12);
    }
}

TEST_CASE("decompose: flat stretches of D are rejected") {
    Problem p = fixtures::kpp();
    // (u - 1/2) + |u - 1/2| vanishes identically on the left half
    p.D = fixtures::ScalarFunction::from_source("(u-1/2)+abs(u-1/2)");
    CHECK_THROWS_AS((void)decompose(p), PlateauError);
}

TEST_CASE("decompose: a near-tangency is reported but not split") {
    Problem p = fixtures::kpp();
    p.D = fixtures::ScalarFunction::from_source("(1/2-u)^2+1e-10");
    auto d = decompose(p);
    CHECK(d.D0.empty());
    REQUIRE(d.tangent_zero_warnings.size() == 1);
    CHECK(d.tangent_zero_warnings[0] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("validate_hypotheses: quadratic accumulation family") {
    // mean of g over (0,u) is u^2/3 - u/2 + K; at the interval end 3/4 it
    // equals K - 3/16, so the integral condition needs K > 3/16.
    auto pass = fixtures::sqrt_aggregation(0.25);
    auto d = decompose(pass);
    CHECK(model::validate_hypotheses(pass, d).all_pass());

    auto fail = fixtures::sqrt_aggregation(0.1);
    auto df = decompose(fail);
    auto report = model::validate_hypotheses(fail, df);
    CHECK(!report.all_pass());
    bool found = false;
    for (const auto& c : report.checks) {
        if (c.id.rfind("ip_g1", 0) == 0 && !c.pass) {
            found = true;
            // first zero of u^2/3 - u/2 + 0.1 is (1.5 - sqrt(1.05)) / 2
            const double root = (1.5 - std::sqrt(1.05)) / 2.0;
            CHECK(c.violating_u == doctest::Approx(root).epsilon(0.05));
        }
    }
    CHECK(found);
}

TEST_CASE("validate_hypotheses: monotone in K") {
    bool passed_before = false;
    for (double K : {0.15, 0.1875, 0.2, 0.25, 0.5, 1.0}) {
        auto p = fixtures::sqrt_aggregation(K);
        auto d = decompose(p);
        const bool pass = model::validate_hypotheses(p, d).all_pass();
        if (passed_before) CHECK(pass);
        passed_before = passed_before || pass;
    }
    CHECK(passed_before);
}

TEST_CASE("validate_hypotheses: negative accumulation fails fast") {
    Problem p = fixtures::kpp();
    p.g = fixtures::ScalarFunction::from_source("-1");
    auto d = decompose(p);
    auto report = model::validate_hypotheses(p, d);
    CHECK(!report.all_pass());
}

TEST_CASE("validate_hypotheses: bad reaction term is reported") {
    Problem p = fixtures::kpp();
    p.rho = fixtures::ScalarFunction::from_source("1-u");  // rho(0) != 0
    auto d = decompose(p);
    auto report = model::validate_hypotheses(p, d);
    bool rho_fail = false;
    for (const auto& c : report.checks)
        if (c.id == "rho_boundary" && !c.pass) rho_fail = true;
    CHECK(rho_fail);
}

TEST_CASE("necessary_speed_condition") {
    auto p = fixtures::kpp();
    CHECK(model::necessary_speed_condition(p, 1.0));
    CHECK(!model::necessary_speed_condition(p, -1.0));

    // g = f = 1: integral of (c - 1) is c - 1
    auto q = fixtures::parabolic_pinch();
    CHECK(model::necessary_speed_condition(q, 2.0));
    CHECK(!model::necessary_speed_condition(q, 0.5));
}

TEST_CASE("negate_g_transform") {
    auto p = fixtures::kpp();
    p.g = fixtures::ScalarFunction::from_source("-1");
    auto q = model::negate_g_transform(p);
    for (int i = 0; i <= 50; ++i) CHECK(q.g(i / 50.0) == doctest::Approx(1.0));

    // double application evaluates identically to the original
    auto r = model::negate_g_transform(q);
    for (int i = 0; i <= 50; ++i)
        CHECK(r.g(i / 50.0) == doctest::Approx(p.g(i / 50.0)).epsilon(1e-15));

    // negating the g of a problem built with negative accumulation makes
    // the hypotheses pass again
    auto neg = model::negate_g_transform(fixtures::sqrt_aggregation(0.25));
    auto fixed = model::negate_g_transform(neg);
    auto d = decompose(fixed);
    CHECK(model::validate_hypotheses(fixed, d).all_pass());
}
