#pragma once

#include <cmath>
#include <functional>

// One-dimensional quadrature utilities used throughout the library.
//
// The integrators are built on runtime-generated Gauss-Legendre rules
// (nodes from Newton iteration on the Legendre recurrence), so there are
// no tabulated constants to mistype.  Error estimates come from comparing
// a panel against its two halves; oscillatory integrands are handled by
// pre-splitting into panels no wider than the oscillation half-period.

namespace curvelet {

struct QuadResult {
    double value = 0.0;
    double abs_err = 0.0;   // estimated absolute error
    long evals = 0;         // integrand evaluations
};

using Integrand = std::function<double(double)>;

// Nodes/weights of the k-point Gauss-Legendre rule on [-1, 1].
// Cached per k; thread-compatible after first use of a given k.
void gauss_legendre(int k, const double*& nodes, const double*& weights);

// Fixed k-point Gauss-Legendre estimate on [a, b].
double gauss_panel(const Integrand& f, double a, double b, int k = 15);

// Globally adaptive quadrature on [a, b]: bisect panels until the
// whole-vs-halves discrepancy meets the tolerance.  Suitable for smooth
// or mildly-peaked integrands.
QuadResult integrate_adaptive(const Integrand& f, double a, double b,
                              double abs_tol = 1e-12, double rel_tol = 1e-10,
                              int max_depth = 48);

// Quadrature for integrands with a known oscillation scale: [a, b] is cut
// into uniform panels no wider than half_period (at least min_panels of
// them), each refined adaptively.  Compensated summation across panels.
QuadResult integrate_oscillatory(const Integrand& f, double a, double b,
                                 double half_period,
                                 double abs_tol = 1e-12, double rel_tol = 1e-10,
                                 int min_panels = 8);

// Kahan-Neumaier compensated accumulator.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

// Least-squares line fit y = slope*x + intercept.
struct LineFit {
    double slope = 0.0, intercept = 0.0;
};
LineFit fit_line(const double* x, const double* y, int m);

// Wilson score interval for a binomial proportion (z = 1.96 -> 95%).
struct WilsonInterval {
    double lo = 0.0, hi = 1.0;
};
WilsonInterval wilson_interval(long successes, long trials, double z = 1.96);

// Regularized upper incomplete gamma Q(a, x); used for chi-square p-values.
double gamma_q(double a, double x);

}  // namespace curvelet
