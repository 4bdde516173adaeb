#include "wavekit/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace wavekit::shoot {

BoundarySlopes boundary_slopes(double f_minus_cg, double hdot) {
    BoundarySlopes out;
    out.discriminant = f_minus_cg * f_minus_cg - 4.0 * hdot;
    if (out.discriminant >= 0.0) {
        const double s = std::sqrt(out.discriminant);
        out.r_plus = 0.5 * (f_minus_cg + s);
        out.r_minus = 0.5 * (f_minus_cg - s);
    } else {
        out.r_plus = out.r_minus = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

BoundarySlopes boundary_slopes(const Problem& p, double u0, double c, double hdot) {
    return boundary_slopes(p.f(u0) - c * p.g(u0), hdot);
}

IntervalOde reflect_interval(const Problem& p, const SignInterval& iv) {
    IntervalOde ode;
    ode.alpha = iv.alpha;
    ode.beta = iv.beta;
    ode.k = iv.k;
    ode.reflected = !iv.h_positive;
    if (iv.h_positive) {
        ode.f = [&p](double u) { return p.f(u); };
        ode.g = [&p](double u) { return p.g(u); };
        ode.h = [&p](double u) { return p.h(u); };
    } else {
        const double s = iv.alpha + iv.beta;
        ode.f = [&p, s](double u) { return p.f(s - u); };
        ode.g = [&p, s](double u) { return p.g(s - u); };
        ode.h = [&p, s](double u) { return -p.h(s - u); };
    }
    ode.hdot_alpha = expr::secant_limit_at(ode.h, ode.alpha, expr::Side::Right).value;
    ode.hdot_beta = expr::secant_limit_at(ode.h, ode.beta, expr::Side::Left).value;
    return ode;
}

double IntervalSolution::interp(double at) const {
    if (u.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (at <= u.front()) return z.front();
    if (at >= u.back()) return z.back();
    auto it = std::upper_bound(u.begin(), u.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - u.begin()) - 1;
    const double h = u[i + 1] - u[i];
    const double t = (at - u[i]) / h;
    // cubic Hermite with the recorded slopes
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * z[i] + h10 * h * dz[i] + h01 * z[i + 1] + h11 * h * dz[i + 1];
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

// One corrected Newton pass on the slaved branch z = -h/(cg - f): the
// correction replaces the drift by cg - f + zdot, with zdot estimated from
// the uncorrected branch. Valid where the branch varies slowly against the
// drift; returns NaN outside that regime.
double slaved_branch(const IntervalOde& ode, double c, double u, double len) {
    const double m = -ode.f_minus_cg(u, c);
    if (!(m > 1e-12)) return std::numeric_limits<double>::quiet_NaN();
    const double dd = std::min({1e-4 * len, 0.5 * (ode.beta - u), 0.5 * (u - ode.alpha)});
    double zdot = 0.0;
    if (dd > 0.0) {
        const double zp = -ode.h(u + dd) / std::max(-ode.f_minus_cg(u + dd, c), 1e-12);
        const double zm = -ode.h(u - dd) / std::max(-ode.f_minus_cg(u - dd, c), 1e-12);
        zdot = (zp - zm) / (2.0 * dd);
    }
    if (!(m + zdot > 0.1 * m)) return std::numeric_limits<double>::quiet_NaN();
    return -ode.h(u) / (m + zdot);
}

}  // namespace

IntervalSolution integrate_z(const IntervalOde& ode, double c, const ShootOptions& opts) {
    IntervalSolution sol;
    sol.k = ode.k;
    sol.c = c;
    sol.reflected = ode.reflected;

    const double len = ode.beta - ode.alpha;
    const double d0 = opts.delta0_frac * len;
    sol.delta0 = d0;
    const double u_start = ode.beta - d0;
    const double u_end = ode.alpha + d0;
    // endpoint layers where the zero-floor monitor stays quiet: tangential
    // zeros of h make z quadratic there, legitimately below the floor
    const double w_end = std::max(8.0 * d0, 1e-4 * len);

    auto rhs = [&ode, c](double u, double z) {
        return ode.f(u) - c * ode.g(u) - ode.h(u) / z;
    };

    std::vector<double> us, zs, dzs;  // recorded in decreasing u
    auto record = [&](double u, double z) {
        us.push_back(u);
        zs.push_back(z);
        dzs.push_back(rhs(u, z));
    };
    auto finish = [&](Feasibility f) {
        sol.feasibility = f;
        sol.u.assign(us.rbegin(), us.rend());
        sol.z.assign(zs.rbegin(), zs.rend());
        sol.dz.assign(dzs.rbegin(), dzs.rend());
        return sol;
    };

    // ---- launch at beta ---------------------------------------------------
    // hdot_beta <= 0 keeps the endpoint discriminant real
    const double a_beta = ode.f_minus_cg(ode.beta, c);
    const auto bs_beta = boundary_slopes(a_beta, std::min(ode.hdot_beta, 0.0));
    double u, z;
    if (bs_beta.r_plus > 1e-6 * (1.0 + std::fabs(a_beta))) {
        // first-order series about the endpoint where z vanishes
        u = u_start;
        z = -d0 * bs_beta.r_plus;
        sol.endpoint_slope_beta = bs_beta.r_plus;
        record(u, z);
    } else {
        // Tangential end: the linear series vanishes and z leaves beta as
        // the slaved branch -h/(cg - f). The integrator cannot resolve that
        // branch at its own noise floor, so walk it analytically until it
        // clears the floor by a wide margin, recording geometric samples.
        double s = d0;
        double zm = slaved_branch(ode, c, ode.beta - s, len);
        if (!std::isfinite(zm) || !(zm < 0.0)) return finish(Feasibility::ambiguous);
        sol.endpoint_slope_beta = zm / (-d0);
        record(ode.beta - s, zm);
        while (s < 0.2 * len && std::fabs(zm) < 1e4 * opts.tol) {
            s *= 2.0;
            zm = slaved_branch(ode, c, ode.beta - s, len);
            if (!std::isfinite(zm) || !(zm < 0.0)) return finish(Feasibility::ambiguous);
            record(ode.beta - s, zm);
        }
        u = ode.beta - s;
        z = zm;
    }

    const double a_alpha = ode.f_minus_cg(ode.alpha, c);
    const auto bs_alpha = boundary_slopes(a_alpha, std::max(ode.hdot_alpha, 0.0));
    const bool alpha_tangential =
        std::fabs(ode.hdot_alpha) <= 1e-6 * (1.0 + a_alpha * a_alpha);

    const double max_step = opts.max_step_frac * len;
    // Steps stay a bounded fraction of the distance to either endpoint, so
    // the quotient h/z varies boundedly per step on the entry/exit ladders.
    auto step_cap = [&](double at) {
        const double from_beta = std::max(0.25 * (ode.beta - at), 2.0 * d0);
        const double from_alpha = std::max(0.25 * (at - ode.alpha), 2.0 * d0);
        return std::min(max_step, std::min(from_beta, from_alpha));
    };

    double h_step = -std::min(2.0 * d0, step_cap(u));
    double k1 = rhs(u, z);
    bool arrived = false;

    for (int step = 0; step < opts.max_steps && !arrived; ++step) {
        const double cap = step_cap(u);
        if (-h_step > cap) h_step = -cap;
        if (u + h_step < u_end) h_step = u_end - u;

        const double h = h_step;
        const double k2 = rhs(u + C2 * h, z + h * A21 * k1);
        const double k3 = rhs(u + C3 * h, z + h * (A31 * k1 + A32 * k2));
        const double k4 = rhs(u + C4 * h, z + h * (A41 * k1 + A42 * k2 + A43 * k3));
        const double k5 = rhs(u + C5 * h, z + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        const double k6 =
            rhs(u + h, z + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        const double z_new = z + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        const double k7 = rhs(u + h, z_new);
        const double err =
            h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        const double scale = opts.tol * (1.0 + std::max(std::fabs(z), std::fabs(z_new)));
        const double ratio = std::fabs(err) / scale;
        const bool finite = std::isfinite(z_new) && std::isfinite(err) && std::isfinite(k7);

        if (finite && ratio <= 1.0) {
            u += h;
            z = z_new;
            k1 = k7;  // FSAL
            us.push_back(u);
            zs.push_back(z);
            dzs.push_back(k7);

            if (z > opts.z_floor) return finish(Feasibility::interior_zero_crossing);
            if (z >= -opts.z_floor && u >= ode.alpha + w_end && u <= ode.beta - w_end)
                return finish(Feasibility::interior_zero_crossing);

            // Tangential arrival: once the trajectory sits tightly on the
            // slaved branch deep in the alpha zone, glide the rest of the
            // way on it. The zone is kept small and the handoff tolerance
            // tight so phi = z/D stays smooth across the switch.
            if (alpha_tangential && u - ode.alpha <= 0.01 * len && u > u_end) {
                const double zm = slaved_branch(ode, c, u, len);
                if (std::isfinite(zm) && zm < 0.0 && std::fabs(z - zm) <= 5e-4 * std::fabs(zm)) {
                    bool glide_ok = true;
                    double s = u - ode.alpha;
                    while (s > 2.0 * d0 && glide_ok) {
                        s *= 0.5;
                        const double zg = slaved_branch(ode, c, ode.alpha + s, len);
                        glide_ok = std::isfinite(zg) && zg < 0.0;
                        if (glide_ok) record(ode.alpha + s, zg);
                    }
                    const double zg = slaved_branch(ode, c, u_end, len);
                    if (glide_ok && std::isfinite(zg) && zg < 0.0) {
                        record(u_end, zg);
                        u = u_end;
                        z = zg;
                        arrived = true;
                        continue;
                    }
                }
            }
            if (u <= u_end + 1e-14 * len) arrived = true;
        }

        double grow = finite ? 0.9 * std::pow(std::max(ratio, 1e-10), -0.2) : 0.5;
        grow = std::clamp(grow, 0.2, 5.0);
        h_step = -std::min(std::fabs(h) * grow, step_cap(u));

        if (std::fabs(h_step) < 1e-15 * len && !arrived) {
            const bool near_end = (u - u_end < w_end) || (u_start - u < w_end);
            if (!near_end)
                throw StepUnderflow("integration step collapsed at u = " + std::to_string(u) +
                                    " (k=" + std::to_string(ode.k) + ", c=" + std::to_string(c) +
                                    ")");
            arrived = u - u_end < w_end;  // accept the last state as the arrival
            if (!arrived) return finish(Feasibility::ambiguous);
        }
    }
    if (!arrived) return finish(Feasibility::ambiguous);

    const double z_end = zs.back();
    if (z_end > opts.z_floor) return finish(Feasibility::interior_zero_crossing);
    if (!bs_alpha.real()) {
        // no admissible endpoint slope exists at this speed; a clearly
        // non-vanishing arrival is a plain mismatch
        const double corridor = (0.5 * std::fabs(a_alpha) + 1.0) * d0 * 10.0;
        return finish(std::fabs(z_end) > corridor ? Feasibility::terminal_mismatch
                                                  : Feasibility::ambiguous);
    }

    // arrival corridor around "z vanishes at alpha with a bounded slope"
    const double corridor = (std::fabs(bs_alpha.r_minus) + 1.0) * d0 * 10.0;
    if (std::fabs(z_end) > corridor) return finish(Feasibility::terminal_mismatch);

    // Slope at alpha from a least-squares line-plus-curvature fit over the
    // terminal sample ladder: the single-sample quotient z(alpha+d0)/d0
    // carries the integrator noise floor amplified by 1/d0.
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
    int count = 0;
    for (std::size_t i = zs.size(); i-- > 0;) {
        const double du = us[i] - ode.alpha;
        if (du > 100.0 * d0) break;
        const double du2 = du * du;
        s11 += du2;
        s12 += du2 * du;
        s22 += du2 * du2;
        b1 += zs[i] * du;
        b2 += zs[i] * du2;
        ++count;
    }
    const double det = s11 * s22 - s12 * s12;
    if (count >= 4 && std::fabs(det) > 0.0)
        sol.endpoint_slope_alpha = (b1 * s22 - b2 * s12) / det;
    else
        sol.endpoint_slope_alpha = z_end / d0;
    return finish(Feasibility::feasible);
}

IntervalSolution solve_interval(const IntervalOde& ode, double c, ShootOptions opts) {
    IntervalSolution sol = integrate_z(ode, c, opts);
    for (int retry = 0; retry < 4 && sol.feasibility == Feasibility::ambiguous; ++retry) {
        opts.delta0_frac *= 0.5;
        sol = integrate_z(ode, c, opts);
    }
    return sol;
}

IntervalSolution to_original_frame(const IntervalOde& ode, IntervalSolution sol) {
    if (!ode.reflected) return sol;
    const double s = ode.alpha + ode.beta;
    std::vector<double> u(sol.u.size()), z(sol.z.size()), dz(sol.dz.size());
    const std::size_t n = sol.u.size();
    for (std::size_t i = 0; i < n; ++i) {
        u[n - 1 - i] = s - sol.u[i];
        z[n - 1 - i] = -sol.z[i];
        dz[n - 1 - i] = sol.dz[i];  // dz/du is invariant under the reflection
    }
    sol.u = std::move(u);
    sol.z = std::move(z);
    sol.dz = std::move(dz);
    std::swap(sol.endpoint_slope_alpha, sol.endpoint_slope_beta);
    sol.reflected = false;
    return sol;
}

ThresholdResult threshold_for_interval(const IntervalOde& ode,
                                       std::pair<double, double> bracket, double tol_c,
                                       const ShootOptions& opts) {
    ThresholdResult out;
    out.k = ode.k;
    out.tol = tol_c;

    std::map<double, bool> cache;
    auto feasible = [&](double c) {
        auto it = cache.find(c);
        if (it != cache.end()) return it->second;
        const bool ok = solve_interval(ode, c, opts).feasibility == Feasibility::feasible;
        cache.emplace(c, ok);
        ++out.iterations;
        return ok;
    };

    double lo = bracket.first;
    double hi = std::max(bracket.second, lo);

    if (!feasible(hi)) {
        // grid bounds can undershoot the true threshold slightly
        double gap = std::max(8.0 * tol_c, 1e-4 * (1.0 + std::fabs(hi)));
        bool found = false;
        for (int i = 0; i < 8 && !found; ++i) {
            hi += gap;
            gap *= 1.5;
            found = feasible(hi);
        }
        if (!found)
            throw BracketFailure("no feasible speed found above the analytic bracket (k=" +
                                 std::to_string(ode.k) + ")");
    }
    if (feasible(lo)) {
        out.c_star = lo;
        out.bracket_used = {lo, hi};
        out.bracket_degenerate = true;
        return out;
    }

    out.bracket_used = {lo, hi};
    while (hi - lo > tol_c) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    out.c_star = hi;
    return out;
}

ThresholdResult threshold_for_interval(const Problem& p, const SignInterval& iv,
                                       std::pair<double, double> bracket, double tol_c,
                                       const ShootOptions& opts) {
    return threshold_for_interval(reflect_interval(p, iv), bracket, tol_c, opts);
}

}  // namespace wavekit::shoot
