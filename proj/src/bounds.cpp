#include "wavekit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavekit/numeric.hpp"

namespace wavekit::bounds {

namespace {

struct MeanExtrema {
    double g_min = 0.0;
    double f_max = 0.0;
    double q_max = 0.0;  // running mean of h(s)/(s - anchor)
};

// Running means over a cosine grid of n cells. For anchor_at_alpha the
// means run over (alpha, u]; otherwise over [u, beta). The integrand value
// at the anchor itself is the supplied limit.
MeanExtrema mean_extrema(const std::function<double(double)>& g,
                         const std::function<double(double)>& f,
                         const std::function<double(double)>& h,
                         double alpha, double beta, bool anchor_at_alpha,
                         double hdot_anchor, int n) {
    const auto x = numeric::cosine_grid(alpha, beta, n);
    const double anchor = anchor_at_alpha ? alpha : beta;

    std::vector<double> gv(x.size()), fv(x.size()), qv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i];
        gv[i] = g(u);
        fv[i] = f(u);
        qv[i] = (u == anchor) ? hdot_anchor : h(u) / (u - anchor);
    }

    auto gi = numeric::cumulative_trapezoid(x, gv);
    auto fi = numeric::cumulative_trapezoid(x, fv);
    auto qi = numeric::cumulative_trapezoid(x, qv);

    MeanExtrema out;
    out.g_min = std::numeric_limits<double>::infinity();
    out.f_max = -std::numeric_limits<double>::infinity();
    out.q_max = -std::numeric_limits<double>::infinity();
    const double total_g = gi.back(), total_f = fi.back(), total_q = qi.back();
    for (std::size_t i = 0; i < x.size(); ++i) {
        double len, mg, mf, mq;
        if (anchor_at_alpha) {
            len = x[i] - alpha;
            if (i == 0) {
                mg = gv[0];
                mf = fv[0];
                mq = qv[0];
            } else {
                mg = gi[i] / len;
                mf = fi[i] / len;
                mq = qi[i] / len;
            }
        } else {
            len = beta - x[i];
            if (i + 1 == x.size()) {
                mg = gv.back();
                mf = fv.back();
                mq = qv.back();
            } else {
                mg = (total_g - gi[i]) / len;
                mf = (total_f - fi[i]) / len;
                mq = (total_q - qi[i]) / len;
            }
        }
        out.g_min = std::min(out.g_min, mg);
        out.f_max = std::max(out.f_max, mf);
        out.q_max = std::max(out.q_max, mq);
    }
    return out;
}

bool moved(double a, double b) { return std::fabs(a - b) > 1e-6 * (1.0 + std::fabs(b)); }

}  // namespace

IntervalConstants interval_constants(const std::function<double(double)>& g,
                                     const std::function<double(double)>& f,
                                     const std::function<double(double)>& h,
                                     double alpha, double beta,
                                     bool anchor_at_alpha, int k, int grid) {
    const double anchor = anchor_at_alpha ? alpha : beta;
    const auto hdot =
        expr::secant_limit_at(h, anchor, anchor_at_alpha ? expr::Side::Right : expr::Side::Left);
    if (!hdot.converged)
        throw GridNonConvergence("one-sided slope of h at the anchor did not converge");

    const auto coarse = mean_extrema(g, f, h, alpha, beta, anchor_at_alpha, hdot.value, grid);
    const auto fine = mean_extrema(g, f, h, alpha, beta, anchor_at_alpha, hdot.value, 2 * grid);
    if (moved(coarse.g_min, fine.g_min) || moved(coarse.f_max, fine.f_max) ||
        moved(coarse.q_max, fine.q_max))
        throw GridNonConvergence("interval constants moved under grid doubling (k=" +
                                 std::to_string(k) + ")");

    IntervalConstants out;
    out.k = k;
    out.G = fine.g_min;
    out.F = fine.f_max;
    out.H = fine.q_max;
    out.hdot_anchor = hdot.value;
    out.f_anchor = f(anchor);
    out.g_anchor = g(anchor);
    return out;
}

IntervalConstants interval_constants(const Problem& p, const SignInterval& iv, int grid) {
    auto g = [&p](double u) { return p.g(u); };
    auto f = [&p](double u) { return p.f(u); };
    auto h = [&p](double u) { return p.h(u); };
    return interval_constants(g, f, h, iv.alpha, iv.beta, iv.h_positive, iv.k, grid);
}

SpeedBracket speed_bracket(const Problem& p, const model::Decomposition& d, int grid) {
    SpeedBracket out;
    out.lower = -std::numeric_limits<double>::infinity();
    out.upper = -std::numeric_limits<double>::infinity();

    for (const auto& iv : d.intervals) {
        const auto c = interval_constants(p, iv, grid);
        if (!(c.g_anchor > 0.0) || !(c.G > 0.0))
            throw NumericalError("speed bracket needs positive accumulation means (k=" +
                                 std::to_string(iv.k) + "); validate the hypotheses first");
        // tiny negative slopes at the anchor are numerical zeros
        double hd = c.hdot_anchor;
        double Hc = c.H;
        if (hd < 0.0 && hd > -1e-9) hd = 0.0;
        if (Hc < 0.0 && Hc > -1e-9) Hc = 0.0;
        if (hd < 0.0 || Hc < 0.0)
            throw NumericalError("negative mean of h against its declared sign (k=" +
                                 std::to_string(iv.k) + ")");

        SpeedBracket::PerInterval pi;
        pi.k = iv.k;
        pi.lower_k = (2.0 * std::sqrt(hd) + c.f_anchor) / c.g_anchor;
        pi.upper_k = (2.0 * std::sqrt(Hc) + c.F) / c.G;
        out.per_interval.push_back(pi);
        out.lower = std::max(out.lower, pi.lower_k);
        out.upper = std::max(out.upper, pi.upper_k);
    }

    for (int k : d.K0_minus) {
        const auto& iv = d.interval(k);
        const double term = p.f(iv.alpha) / p.g(iv.alpha);
        out.k0_term = out.k0_term ? std::max(*out.k0_term, term) : term;
    }
    if (out.k0_term) {
        out.lower = std::max(out.lower, *out.k0_term);
        out.upper = std::max(out.upper, *out.k0_term);
    }
    return out;
}

}  // namespace wavekit::bounds
