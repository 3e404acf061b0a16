#pragma once

#include <vector>

// Bessel functions of the first and second kind for orders of the form
// m/2 (m a nonnegative integer), which is the only family of orders the
// rest of the library ever needs: cylindrical orders arise as n/2 - 1,
// n/2, n/2 + 1 for ambient dimension n >= 2.
//
// Evaluation strategy by regime (x >= 0):
//   * power series for x <= 12, and up to x <= 2 nu for orders nu <= 12,
//     accumulated in long double (beyond that the alternating series loses
//     too many digits to cancellation, so larger orders at moderate x go
//     to the recurrence instead);
//   * Miller-style backward recurrence for intermediate x, normalized by
//     the even-order sum rule (integer nu) or the closed-form J_{1/2}
//     (half-integer nu);
//   * modulus-phase (Hankel) asymptotic expansions only once x >= 4 nu^2.
// Half-integer Y uses the exact trigonometric forms via upward recurrence,
// which is the growing (stable) direction.

namespace curvelet {

// Order nu = twice/2.  Keeping the doubled numerator makes the
// integer/half-integer dispatch exact.
struct BesselOrder {
    int twice = 0;
    constexpr double value() const { return 0.5 * twice; }
    constexpr bool half_integer() const { return twice % 2 != 0; }
    static constexpr BesselOrder of_int(int m) { return {2 * m}; }
    static constexpr BesselOrder halves(int m) { return {m}; }
};

double bessel_j(BesselOrder nu, double x);
double bessel_y(BesselOrder nu, double x);

// J_{nu+j}(x) for j = 0 .. count-1, from one backward-recurrence sweep.
std::vector<double> bessel_j_orders(BesselOrder nu, int count, double x);

// Squared modulus M_nu(x)^2 = J_nu(x)^2 + Y_nu(x)^2.  Satisfies
//   2/(pi x) < M_nu(x)^2 < 2/(pi sqrt(x^2 - nu^2))   for x > nu >= 1/2,
// with the lower bound attained identically at nu = 1/2.
double modulus_sq(BesselOrder nu, double x);

// min of the two standard small-argument bounds on |J_nu(t)|:
//   (t/2)^nu / nu!   and   (2 pi nu)^{-1/2} (t e / (2 nu))^nu  (nu > 0).
double small_arg_envelope(BesselOrder nu, double t);

// Exact tail integral  T(z) = int_z^inf J_nu(t)^2 / t dt,  nu >= 1.
// Integer orders use the finite recurrence identity
//   T(z) = (1/(2m)) (J_0^2 + J_m^2 + 2 sum_{k=1}^{m-1} J_k^2)(z);
// general orders use the convergent order-sum form
//   T(z) = (1/(2 nu)) (1 - J_nu^2 - 2 sum_{j>=1} J_{nu+j}^2)(z).
double j_squared_tail_over_t(BesselOrder nu, double z);

// Certified bounds on int_z^inf t^{-k} J_nu(t)^2 dt.
// Lower bound (k = 1 only): (1 - 1/(2 nu)) / (7 (z + 5.20)),
// valid for nu >= 1 of the form m or m + 1/2, z >= 2 nu.
double tail_integral_lower_bound(BesselOrder nu, double z);
// Upper bound: (4 / (pi sqrt(3) k)) z^{-k}, valid for
// k >= 1, nu >= 1/2, z >= 2 nu.
double tail_integral_upper_bound(BesselOrder nu, int k, double z);

}  // namespace curvelet
