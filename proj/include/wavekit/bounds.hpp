#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wavekit/model.hpp"

namespace wavekit::bounds {

using model::Problem;
using model::SignInterval;

/// Mean-value functionals of one sign interval, anchored at alpha for
/// positive h and at beta for negative h:
///   G = inf of the running mean of g from the anchor,
///   F = sup of the running mean of f,
///   H = sup of the running mean of h(s)/(s - anchor).
struct IntervalConstants {
    int k = 0;
    double G = 0.0;
    double F = 0.0;
    double H = 0.0;
    double hdot_anchor = 0.0;  // one-sided derivative of h at the anchor
    double f_anchor = 0.0;
    double g_anchor = 0.0;
};

/// Analytic enclosure of the threshold speed.
struct SpeedBracket {
    double lower = 0.0;
    double upper = 0.0;
    struct PerInterval {
        int k = 0;
        double lower_k = 0.0;
        double upper_k = 0.0;
    };
    std::vector<PerInterval> per_interval;
    std::optional<double> k0_term;  // max of f(alpha_k)/g(alpha_k) over K0^-
};

/// Callable-level core used both for problems and for reflected slices in
/// the tests. `anchor_at_alpha` selects the running-mean direction.
IntervalConstants interval_constants(const std::function<double(double)>& g,
                                     const std::function<double(double)>& f,
                                     const std::function<double(double)>& h,
                                     double alpha, double beta,
                                     bool anchor_at_alpha, int k, int grid);

/// Constants of one interval of the decomposition. Running integrals use a
/// cosine-clustered grid; doubling it must not move any constant by more
/// than 1e-6 relative, otherwise GridNonConvergence is thrown.
IntervalConstants interval_constants(const Problem& p, const SignInterval& iv,
                                     int grid = 8192);

/// Assemble the two-sided speed estimate:
///   lower = max over intervals of (2 sqrt(hdot) + f) / g at the anchor,
///   upper = max over intervals of (2 sqrt(H) + F) / G,
/// both joined with max over K0^- of f(alpha_k)/g(alpha_k). Empty maxima
/// contribute -infinity.
SpeedBracket speed_bracket(const Problem& p, const model::Decomposition& d,
                           int grid = 8192);

}  // namespace wavekit::bounds
