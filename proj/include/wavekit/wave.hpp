#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavekit/bounds.hpp"
#include "wavekit/model.hpp"
#include "wavekit/shoot.hpp"

namespace wavekit::wave {

using model::Decomposition;
using model::Problem;

struct WaveOptions {
    shoot::ShootOptions shoot;
    double tol_c = 1e-6;
    int grid = 8192;
    double t_span_cap = 50.0;
    // |c - c_hat| below this counts as "at the threshold", where existence
    // can only be asserted through the single-flip criterion
    double at_threshold_band = 1e-3;
};

/// Threshold speed assembled from the per-interval bisections plus the
/// degenerate-zero correction term.
struct ThresholdSpeed {
    double c_hat = 0.0;
    double c_star = 0.0;
    bounds::SpeedBracket bracket;
    std::vector<shoot::ThresholdResult> per_interval;
    std::optional<double> k0_term;
};

ThresholdSpeed compute_c_hat(const Problem& p, const Decomposition& d,
                             const WaveOptions& opts = {});

/// The glued first-order solution z_c on (0,1).
struct GluedZ {
    double c = 0.0;
    std::vector<shoot::IntervalSolution> pieces;  // original frame, by interval
    std::vector<double> boundaries;               // 0, interior zeros..., 1

    /// z at any u in [0,1]; inside the launch gaps the endpoint slope
    /// extends the samples linearly to the zero.
    double z_at(double u) const;
    /// one-sided slopes of z at an interior zero
    double slope_left_of(std::size_t zero_index) const;
    double slope_right_of(std::size_t zero_index) const;

    std::vector<std::pair<double, double>> phi_samples;  // (u, z/D) away from zeros
};

struct GlueOutcome {
    std::optional<GluedZ> glued;
    int failed_interval = 0;  // k of the first infeasible interval when empty
    shoot::Feasibility failure = shoot::Feasibility::feasible;
};

GlueOutcome glue(const Problem& p, const Decomposition& d, double c,
                 const WaveOptions& opts = {});

enum class ZeroKind { smooth_quotient, degenerate_limit, jump, infinite_quotient };
enum class Existence { yes, no, undetermined_at_c_hat };

struct ZeroVerdict {
    double u0 = 0.0;
    ZeroKind kind = ZeroKind::smooth_quotient;
    std::optional<double> phi_value;  // finite predicted limit of z/D when it exists
    double slope_left = 0.0, slope_right = 0.0;
    double d_slope = 0.0;  // dD/du at the zero
    bool cross_check_ok = true;
};

struct ExistenceVerdict {
    double c = 0.0;
    Existence exists = Existence::yes;
    std::vector<ZeroVerdict> zeros;
    std::string reason;
};

/// Decide whether z/D extends continuously through every interior zero of
/// D: the quotient of one-sided slopes when dD/du does not vanish, the
/// drift-ratio limit rho/(f - cg) at degenerate zeros with flat z, an
/// infinite quotient otherwise. Every prediction is cross-checked against
/// sampled z/D at shrinking offsets; a failed check downgrades the verdict.
ExistenceVerdict extension_check(const Problem& p, const Decomposition& d,
                                 const GluedZ& glued,
                                 const WaveOptions& opts = {});

enum class SingleFlipExistence { applies_exists, applies_conditions_fail, not_applicable };

/// The one-sign-change case (D positive then negative across a single
/// interior zero): existence holds at the threshold speed itself when the
/// accumulation integrals stay positive and, at a degenerate zero, either
/// the drift comparison or the vanishing-convection condition holds.
SingleFlipExistence single_flip_existence(const Problem& p, const Decomposition& d,
                                          const model::DecomposeOptions& dopts = {});

/// Existence policy at a requested speed: below the band no wave exists,
/// inside the band the assertion defers to the single-flip criterion, and
/// above it the extension verdict stands.
Existence resolve_existence(const Problem& p, const Decomposition& d, double c_hat,
                            double c, const ExistenceVerdict& verdict,
                            SingleFlipExistence flip, const WaveOptions& opts = {});

enum class WaveClass { classical, sharp_type_1, sharp_type_2, sharp_type_3, undetermined };

struct Classification {
    WaveClass wave_class = WaveClass::classical;
    bool a_finite = false;  // the wave reaches 1 at a finite time
    bool b_finite = false;  // the wave reaches 0 at a finite time
};

/// Classification for speeds strictly above the threshold, from the sign
/// of D near the equilibria and the endpoint conditions on D(0), dD/du
/// and the drift f - c g.
Classification classify(const Problem& p, const Decomposition& d, double c,
                        const ExistenceVerdict& verdict);

/// Classification at the threshold itself, from the measured terminal
/// behaviour of z/D of the glued solution.
Classification classify_at_threshold(const Problem& p, const GluedZ& glued,
                                     const ExistenceVerdict& verdict);

struct Profile {
    std::vector<double> t, u, z, phi;  // parallel samples, t ascending
    bool a_finite = false;
    bool b_finite = false;
    double u_ref = 0.5;

    /// monotone Hermite interpolation of u(t) using du/dt = phi
    double u_at(double at) const;
};

/// Wave profile u(t) through t(u) = integral of 1/phi from the reference
/// point, graded toward the equilibria and bridged through the zeros of D
/// with the verdict's phi values. Output is clipped to |t| <= t_span_cap
/// and normalised so the reference point sits at t = 0.
Profile reconstruct_profile(const Problem& p, const GluedZ& glued,
                            const ExistenceVerdict& verdict, double t_span_cap = 50.0);

}  // namespace wavekit::wave
