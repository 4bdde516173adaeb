#include "wavekit/numeric.hpp"

#include <cmath>
#include <cstddef>

namespace wavekit::numeric {

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const Fn& f, double a, double b, double fa, double fm,
                     double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const Fn& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_step(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol,
                         max_depth);
}

std::vector<double> cosine_grid(double a, double b, int n) {
    std::vector<double> x(static_cast<std::size_t>(n) + 1);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i <= n; ++i)
        x[static_cast<std::size_t>(i)] =
            a + (b - a) * 0.5 * (1.0 - std::cos(pi * i / n));
    x.front() = a;
    x.back() = b;
    return x;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& y) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return out;
}

double bisect_root(const Fn& f, double lo, double hi, double xtol) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > xtol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((flo < 0.0) == (fmid < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double golden_min(const Fn& f, double lo, double hi, double xtol) {
    const double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

double lagrange5_derivative(const double x[5], const double y[5]) {
    // d/dx of the interpolating quartic, evaluated at x[2].
    const double xc = x[2];
    double d = 0.0;
    for (int i = 0; i < 5; ++i) {
        double denom = 1.0;
        for (int j = 0; j < 5; ++j)
            if (j != i) denom *= x[i] - x[j];
        // derivative of prod_{j != i} (x - x[j]) at xc
        double dnum = 0.0;
        for (int k = 0; k < 5; ++k) {
            if (k == i) continue;
            double term = 1.0;
            for (int j = 0; j < 5; ++j)
                if (j != i && j != k) term *= xc - x[j];
            dnum += term;
        }
        d += y[i] * dnum / denom;
    }
    return d;
}

}  // namespace wavekit::numeric
