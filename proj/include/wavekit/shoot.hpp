#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "wavekit/bounds.hpp"
#include "wavekit/model.hpp"

namespace wavekit::shoot {

using model::Problem;
using model::SignInterval;

/// The two admissible boundary slopes of z at a zero of h: roots of
/// r^2 - (f - c g) r + hdot = 0. With a negative discriminant no real
/// slope exists and the interval cannot connect at this speed.
struct BoundarySlopes {
    double r_plus = 0.0;
    double r_minus = 0.0;
    double discriminant = 0.0;
    bool real() const { return discriminant >= 0.0; }
};

BoundarySlopes boundary_slopes(const Problem& p, double u0, double c, double hdot);
BoundarySlopes boundary_slopes(double f_minus_cg, double hdot);

/// One sign interval in launch form (h > 0, z < 0). Negative-h intervals
/// are brought to this form by the reflection u -> alpha + beta - u,
/// z -> -z, which flips the sign of h and swaps the endpoint roles.
struct IntervalOde {
    std::function<double(double)> f, g, h;
    double alpha = 0.0, beta = 1.0;
    double hdot_alpha = 0.0, hdot_beta = 0.0;  // one-sided slopes of h at the ends
    bool reflected = false;
    int k = 1;

    double f_minus_cg(double u, double c) const { return f(u) - c * g(u); }
};

/// Build the launch form of an interval. For h < 0 this applies the
/// reflection; solutions map back through ζ(u) = -z(alpha + beta - u).
/// The returned callables borrow `p`, which must outlive the IntervalOde.
IntervalOde reflect_interval(const Problem& p, const SignInterval& iv);

enum class Feasibility { feasible, interior_zero_crossing, terminal_mismatch, ambiguous };

struct ShootOptions {
    double tol = 1e-10;          // mixed abs/rel tolerance of the embedded pair
    double delta0_frac = 1e-6;   // launch offset as a fraction of beta - alpha
    double z_floor = 1e-13;      // |z| below which the trajectory counts as touching zero
    double max_step_frac = 1.0 / 256.0;  // keeps finite differences of the samples tight
    int max_steps = 400000;
};

/// Solution samples of z on one interval, in launch-form coordinates.
struct IntervalSolution {
    int k = 0;
    double c = 0.0;
    Feasibility feasibility = Feasibility::ambiguous;
    std::vector<double> u;      // strictly increasing in (alpha + d0, beta - d0)
    std::vector<double> z;
    std::vector<double> dz;     // ODE right-hand side at the samples
    double delta0 = 0.0;
    double endpoint_slope_alpha = 0.0;  // z(alpha + d0)/d0 when feasible
    double endpoint_slope_beta = 0.0;   // launch slope at beta
    bool reflected = false;             // samples are in reflected coordinates

    /// Hermite interpolation of z between samples.
    double interp(double at) const;
};

/// Integrate dz/du = f - c g - h/z backwards from beta to alpha. The launch
/// uses the first-order series z = r_plus (u - beta); when r_plus
/// degenerates to zero (tangential h) the start switches to the local
/// balance z = h/(f - c g). Interior touches of zero are classified as
/// crossings, arrivals are accepted inside a slope corridor at alpha.
IntervalSolution integrate_z(const IntervalOde& ode, double c, const ShootOptions& opts = {});

/// integrate_z with the ambiguity retry: an ambiguous verdict halves
/// delta0_frac and relaunches, at most four times.
IntervalSolution solve_interval(const IntervalOde& ode, double c, ShootOptions opts = {});

/// Maps a launch-form solution of a reflected interval back to original
/// coordinates (u -> alpha + beta - u, z -> -z, slopes swap ends).
IntervalSolution to_original_frame(const IntervalOde& ode, IntervalSolution sol);

struct ThresholdResult {
    int k = 0;
    double c_star = 0.0;
    std::pair<double, double> bracket_used{0.0, 0.0};
    int iterations = 0;
    double tol = 0.0;
    bool bracket_degenerate = false;  // the analytic lower end was already feasible
};

/// Bisect the feasibility predicate inside the analytic bracket. The upper
/// end is expanded geometrically when the grid bound undershoots; a
/// feasible lower end short-circuits with a degenerate-bracket note.
ThresholdResult threshold_for_interval(const IntervalOde& ode,
                                       std::pair<double, double> bracket,
                                       double tol_c = 1e-6,
                                       const ShootOptions& opts = {});

ThresholdResult threshold_for_interval(const Problem& p, const SignInterval& iv,
                                       std::pair<double, double> bracket,
                                       double tol_c = 1e-6,
                                       const ShootOptions& opts = {});

}  // namespace wavekit::shoot
