#pragma once

#include <limits>
#include <string>
#include <vector>

#include "wavekit/expr.hpp"

namespace wavekit::model {

using expr::ScalarFunction;

/// The coefficient quadruple of the travelling-wave equation
/// g(u) u_tau + f(u) u_x = (D(u) u_x)_x + rho(u). Immutable.
struct Problem {
    ScalarFunction g, f, D, rho;
    std::string name;

    /// h = D * rho, the singular-ODE forcing term.
    double h(double u) const { return D(u) * rho(u); }
};

/// One maximal interval on which h = D*rho keeps a strict sign.
struct SignInterval {
    double alpha = 0.0;
    double beta = 1.0;
    bool h_positive = true;
    int k = 1;  // 1-based position in the decomposition
};

struct DecomposeOptions {
    int scan_cells = 2048;
    double root_tol = 1e-12;        // |D| at an accepted zero
    double deriv_zero_tol = 1e-7;   // |dD/du| below which a zero counts as degenerate
    double dip_tol = 1e-9;          // |D| dip that triggers the tangency report
};

/// Zeros of D inside (0,1) and the sign intervals they cut out.
struct Decomposition {
    std::vector<SignInterval> intervals;
    std::vector<double> D0;             // interior zeros of D
    std::vector<double> D00;            // zeros where dD/du vanishes as well
    std::vector<int> K0_minus;          // k >= 2 with k in K^- and dD/du(alpha_k) = 0
    std::vector<double> tangent_zero_warnings;  // |D| dipped below dip_tol without vanishing

    const SignInterval& interval(int k) const { return intervals.at(static_cast<std::size_t>(k - 1)); }
};

/// Locate the interior zeros of D by a sign-change scan plus bisection;
/// even-order zeros are recovered by golden-section refinement of the
/// local minima of |D|. Throws PlateauError when D vanishes on two or
/// more consecutive scan cells.
Decomposition decompose(const Problem& p, const DecomposeOptions& opts = {});

/// One named hypothesis check with its outcome.
struct ValidationCheck {
    std::string id;
    bool pass = true;
    double violating_u = std::numeric_limits<double>::quiet_NaN();
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Check every hypothesis the existence theory needs: the reaction sign
/// structure, the accumulation-integral positivity on each sign interval,
/// and g > 0 at degenerate zeros. Failures are reported, not thrown.
ValidationReport validate_hypotheses(const Problem& p, const Decomposition& d);

/// Necessary admissibility of a speed: integral of (c g - f) over (0,1)
/// must be positive.
bool necessary_speed_condition(const Problem& p, double c);

/// The same problem with g replaced by -g; callers pair it with speed
/// negation (thresholds map c to -c). Used when g is predominantly
/// negative.
Problem negate_g_transform(const Problem& p);

}  // namespace wavekit::model
