#include "wavekit/model.hpp"

#include <algorithm>
#include <cmath>

#include "wavekit/numeric.hpp"

namespace wavekit::model {

namespace {

std::string fmt_u(double u) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", u);
    return buf;
}

}  // namespace

Decomposition decompose(const Problem& p, const DecomposeOptions& opts) {
    const int n = std::max(opts.scan_cells, 64);
    std::vector<double> grid(static_cast<std::size_t>(n) + 1);
    std::vector<double> dv(grid.size());
    for (int i = 0; i <= n; ++i) {
        grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
        dv[static_cast<std::size_t>(i)] = p.D(grid[static_cast<std::size_t>(i)]);
    }

    // A run of vanishing nodes spanning two scan cells means D is flat at
    // zero there, which breaks the finiteness of its zero set.
    int run = 0;
    for (int i = 0; i <= n; ++i) {
        if (std::fabs(dv[static_cast<std::size_t>(i)]) <= opts.root_tol) {
            if (++run >= 3)
                throw PlateauError("D vanishes on consecutive scan cells near u = " +
                                   fmt_u(grid[static_cast<std::size_t>(i)]));
        } else {
            run = 0;
        }
    }

    std::vector<double> zeros;
    std::vector<double> warnings;
    auto add_zero = [&zeros](double z) {
        for (double existing : zeros)
            if (std::fabs(existing - z) < 1e-9) return;
        if (z > 1e-12 && z < 1.0 - 1e-12) zeros.push_back(z);
    };

    for (int i = 0; i < n; ++i) {
        const double a = dv[static_cast<std::size_t>(i)];
        const double b = dv[static_cast<std::size_t>(i + 1)];
        if (std::fabs(a) <= opts.root_tol) {
            add_zero(grid[static_cast<std::size_t>(i)]);
            continue;
        }
        if (std::fabs(b) <= opts.root_tol) continue;  // handled as the next cell's left node
        if ((a < 0.0) != (b < 0.0)) {
            const double z = numeric::bisect_root([&p](double u) { return p.D(u); },
                                                  grid[static_cast<std::size_t>(i)],
                                                  grid[static_cast<std::size_t>(i + 1)], 1e-14);
            add_zero(z);
        }
    }

    // Even-order zeros leave no sign change; refine every interior local
    // minimum of |D| and accept it as a zero only if |D| actually vanishes.
    for (int i = 1; i < n; ++i) {
        const double am = std::fabs(dv[static_cast<std::size_t>(i - 1)]);
        const double ac = std::fabs(dv[static_cast<std::size_t>(i)]);
        const double ap = std::fabs(dv[static_cast<std::size_t>(i + 1)]);
        if (!(ac <= am && ac <= ap)) continue;
        if (ac <= opts.root_tol) continue;  // already collected above
        const double lo = grid[static_cast<std::size_t>(i - 1)];
        const double hi = grid[static_cast<std::size_t>(i + 1)];
        const double zm = numeric::golden_min(
            [&p](double u) { return std::fabs(p.D(u)); }, lo, hi, 1e-13);
        const double dmin = std::fabs(p.D(zm));
        if (dmin <= opts.root_tol) {
            add_zero(zm);
        } else if (dmin <= opts.dip_tol) {
            warnings.push_back(zm);  // possible even-order zero, not split
        }
    }

    std::sort(zeros.begin(), zeros.end());

    Decomposition out;
    out.tangent_zero_warnings = std::move(warnings);
    out.D0 = zeros;

    std::vector<double> cuts;
    cuts.push_back(0.0);
    cuts.insert(cuts.end(), zeros.begin(), zeros.end());
    cuts.push_back(1.0);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        SignInterval iv;
        iv.alpha = cuts[i];
        iv.beta = cuts[i + 1];
        iv.k = static_cast<int>(i) + 1;
        iv.h_positive = p.h(0.5 * (iv.alpha + iv.beta)) > 0.0;
        // h = D*rho must keep a strict sign between consecutive zeros; a
        // flip here means the scan missed a zero of D
        for (int j = 1; j <= 17; ++j) {
            const double t = 0.5 * (1.0 - std::cos(3.14159265358979 * j / 18.0));
            const double hv = p.h(iv.alpha + t * (iv.beta - iv.alpha));
            if ((hv > 0.0) != iv.h_positive)
                throw NumericalError("sign of D*rho flips inside (" + fmt_u(iv.alpha) + ", " +
                                     fmt_u(iv.beta) + "); raise scan_cells");
        }
        out.intervals.push_back(iv);
    }

    for (double z : out.D0) {
        const double dd = expr::derivative_at(p.D, z, expr::Side::Central);
        if (std::isfinite(dd) && std::fabs(dd) <= opts.deriv_zero_tol) out.D00.push_back(z);
    }
    for (const auto& iv : out.intervals) {
        if (iv.k < 2 || iv.h_positive) continue;
        const double dd = expr::derivative_at(p.D, iv.alpha, expr::Side::Central);
        if (std::isfinite(dd) && std::fabs(dd) <= opts.deriv_zero_tol)
            out.K0_minus.push_back(iv.k);
    }
    return out;
}

namespace {

// Cumulative-integral positivity of g from the anchor endpoint, checked on
// a uniform grid and confirmed on its doubling.
ValidationCheck check_g_integral(const Problem& p, const SignInterval& iv) {
    ValidationCheck c;
    const bool from_alpha = iv.h_positive;
    c.id = (from_alpha ? "ip_g1[k=" : "ip_g2[k=") + std::to_string(iv.k) + "]";

    const double anchor = from_alpha ? iv.alpha : iv.beta;
    const double g_anchor = p.g(anchor);
    if (!(g_anchor > 0.0)) {
        c.pass = false;
        c.violating_u = anchor;
        c.detail = "g(" + fmt_u(anchor) + ") = " + fmt_u(g_anchor) + " is not positive";
        return c;
    }

    for (int pts : {512, 1024}) {
        std::vector<double> x(static_cast<std::size_t>(pts) + 1), y(x.size());
        for (int i = 0; i <= pts; ++i) {
            const double t = static_cast<double>(i) / pts;
            x[static_cast<std::size_t>(i)] =
                from_alpha ? iv.alpha + t * (iv.beta - iv.alpha)
                           : iv.beta - t * (iv.beta - iv.alpha);
            y[static_cast<std::size_t>(i)] = p.g(x[static_cast<std::size_t>(i)]);
        }
        // run the cumulative integral outward from the anchor
        double acc = 0.0;
        for (int i = 1; i <= pts; ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            acc += 0.5 * (y[s] + y[s - 1]) * std::fabs(x[s] - x[s - 1]);
            if (!(acc > 0.0)) {
                c.pass = false;
                c.violating_u = x[s];
                c.detail = "integral of g from " + fmt_u(anchor) + " reaches " +
                           fmt_u(acc) + " at u = " + fmt_u(x[s]);
                return c;
            }
        }
    }
    return c;
}

}  // namespace

ValidationReport validate_hypotheses(const Problem& p, const Decomposition& d) {
    ValidationReport report;

    {
        ValidationCheck c;
        c.id = "rho_boundary";
        const double r0 = p.rho(0.0), r1 = p.rho(1.0);
        if (std::fabs(r0) > 1e-10 || std::fabs(r1) > 1e-10) {
            c.pass = false;
            c.violating_u = std::fabs(r0) > 1e-10 ? 0.0 : 1.0;
            c.detail = "rho must vanish at both equilibria";
        }
        report.checks.push_back(c);
    }
    {
        ValidationCheck c;
        c.id = "rho_positive";
        for (int pts : {512, 1024}) {
            for (int i = 1; i < pts && c.pass; ++i) {
                const double u = static_cast<double>(i) / pts;
                if (!(p.rho(u) > 0.0)) {
                    c.pass = false;
                    c.violating_u = u;
                    c.detail = "rho(" + fmt_u(u) + ") = " + fmt_u(p.rho(u));
                }
            }
        }
        report.checks.push_back(c);
    }
    {
        ValidationCheck c;
        c.id = "h_boundary";
        if (std::fabs(p.h(0.0)) > 1e-10 || std::fabs(p.h(1.0)) > 1e-10) {
            c.pass = false;
            c.violating_u = std::fabs(p.h(0.0)) > 1e-10 ? 0.0 : 1.0;
            c.detail = "D*rho must vanish at both equilibria";
        }
        report.checks.push_back(c);
    }

    for (const auto& iv : d.intervals) report.checks.push_back(check_g_integral(p, iv));

    {
        ValidationCheck c;
        c.id = "ip_nonzero";
        for (double z : d.D00) {
            if (!(p.g(z) > 0.0)) {
                c.pass = false;
                c.violating_u = z;
                c.detail = "g(" + fmt_u(z) + ") = " + fmt_u(p.g(z)) +
                           " at a degenerate zero of D";
                break;
            }
        }
        report.checks.push_back(c);
    }
    return report;
}

bool necessary_speed_condition(const Problem& p, double c) {
    const double integral = numeric::adaptive_simpson(
        [&p, c](double u) { return c * p.g(u) - p.f(u); }, 0.0, 1.0, 1e-10);
    return integral > 0.0;
}

Problem negate_g_transform(const Problem& p) {
    Problem out = p;
    out.g = p.g.negated();
    return out;
}

}  // namespace wavekit::model
