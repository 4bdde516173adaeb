#pragma once

#include "wavekit/model.hpp"

// Shared problem constructions used across the test suites.
namespace fixtures {

using wavekit::expr::ScalarFunction;
using wavekit::model::Problem;

/// Sign-changing sqrt diffusion with quadratic accumulation:
/// g = u^2 - u + K, f = 0, D = (3/4 - u) sqrt(u - u^2), rho = sqrt(u - u^2).
inline Problem sqrt_aggregation(double K = 0.25) {
    Problem p;
    p.name = "sqrt_aggregation";
    p.g = ScalarFunction::from_source("u^2-u+K", {{"K", K}});
    p.f = ScalarFunction::from_source("0");
    p.D = ScalarFunction::from_source("(3/4-u)*sqrt(u-u^2)");
    p.rho = ScalarFunction::from_source("sqrt(u-u^2)");
    return p;
}

/// Simple sign flip at 1/2 with polynomial diffusion:
/// g = u^2 - u + K, f = 0, D = (1/2 - u)(u - u^2)^a, rho = (u - u^2)^b.
inline Problem cubic_flip(double K = 0.25, double a = 1.0, double b = 1.0) {
    Problem p;
    p.name = "cubic_flip";
    p.g = ScalarFunction::from_source("u^2-u+K", {{"K", K}});
    p.f = ScalarFunction::from_source("0");
    p.D = ScalarFunction::from_source("(1/2-u)*(u-u^2)^a", {{"a", a}});
    p.rho = ScalarFunction::from_source("(u-u^2)^b", {{"b", b}});
    return p;
}

/// Non-negative diffusion with an interior double zero:
/// g = 1, f = 1, D = (1/2 - u)^2, rho = u - u^2.
inline Problem parabolic_pinch() {
    Problem p;
    p.name = "parabolic_pinch";
    p.g = ScalarFunction::from_source("1");
    p.f = ScalarFunction::from_source("1");
    p.D = ScalarFunction::from_source("(1/2-u)^2");
    p.rho = ScalarFunction::from_source("u-u^2");
    return p;
}

/// The classic logistic front benchmark: g = 1, f = 0, D = d0, rho = u - u^2.
inline Problem kpp(double d0 = 1.0) {
    Problem p;
    p.name = "kpp";
    p.g = ScalarFunction::from_source("1");
    p.f = ScalarFunction::from_source("0");
    p.D = ScalarFunction::from_source("d0", {{"d0", d0}});
    p.rho = ScalarFunction::from_source("u-u^2");
    return p;
}

/// Purely aggregative diffusion, sharp at the right equilibrium for
/// moderate speeds: g = 1, f = 2 - 2u, D = -u(1-u), rho = u - u^2.
inline Problem aggregative() {
    Problem p;
    p.name = "aggregative";
    p.g = ScalarFunction::from_source("1");
    p.f = ScalarFunction::from_source("2-2*u");
    p.D = ScalarFunction::from_source("-u*(1-u)");
    p.rho = ScalarFunction::from_source("u-u^2");
    return p;
}

}  // namespace fixtures
