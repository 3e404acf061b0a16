#pragma once

// The two window families.
//
// Continuous side: a radial window W supported on [1/e, 1], an angular
// window V supported on [0, pi/2], and the scale-dependent normalization
// Lambda_a, combining into the frequency-domain profile
//     chi_{a,theta}(k) = W(lambda*a*|k|) * V(phi1/sqrt(a)) * Lambda_a(phi1),
// phi1 the angle between k and theta.  The normalizations make
//     int W(r)^2 dr/r = 1   and   int_{S^{n-1}} V(phi1)^2 dsigma = 1,
// which yields the scale/angle partition property the samplers rely on.
//
// Discrete side: a cosine step profile c, dyadic radial windows w_s whose
// squares sum to one, nested spherical grids G_s, and per-register angular
// bumps u whose products tile the sphere.

#include <optional>
#include <vector>

#include "curvelet/geometry.hpp"

namespace curvelet {

struct ContinuousWindowSpec {
    int n = 0;          // ambient dimension, >= 2
    double lambda = 0;  // radial scaling, > 0
    double C_w = 0;     // radial window amplitude, sqrt(8/3)
    double C_v = 0;     // angular window amplitude, sqrt(2(n+2)n / (3 S_0))
    double S_0 = 0;     // surface area of S^{n-1}

    static ContinuousWindowSpec make(int n, double lambda);
    // consistency of the recorded constants with n, to 1e-14 relative
    bool consistent() const;
};

// W(r) = C_w sin^2(pi log r) on [1/e, 1], zero outside
double radial_window_W(double r);

// W'(r) = C_w pi sin(2 pi log r) / r on [1/e, 1], zero outside
double radial_window_W_deriv(double r);

// V(t) = C_v(n) cos^2(t) on [0, pi/2], zero outside
double angular_window_V(double t, int n);

// V'(t) = -2 C_v(n) cos(t) sin(t) on [0, pi/2], zero outside
double angular_window_V_deriv(double t, int n);

// Lambda_a(phi1) = a^{(n+1)/4} (sin(phi1/sqrt(a)) sqrt(a) / sin(phi1))^{(n-2)/2};
// the removable singularity at phi1 = 0 evaluates to a^{(n+1)/4}
double lambda_factor(double a, double phi1, int n);

// d/dphi1 of lambda_factor, with series-stabilized evaluation near 0
// (where it vanishes); identically zero for n = 2
double lambda_factor_deriv(double a, double phi1, int n);

double chi_continuous(const ContinuousWindowSpec& spec, double a,
                      const std::vector<double>& theta,
                      const std::vector<double>& k);

// PlainCosine and Smoothed are the overlapping (smooth) family's two
// transition profiles; Indicator selects the disjoint-tile family, which
// assigns each frequency to exactly one sector (radial tiles
// [2^s, 2^{s+1}) and nearest grid direction) with 0/1 windows.
enum class CProfileKind { PlainCosine, Smoothed, Indicator };

// step-down profile on [0, pi/2]: 1 at 0, 0 from pi/2 on, and
// c(x)^2 + c(pi/2 - x)^2 = 1.  PlainCosine is cos x; Smoothed is
// cos((pi/2) sin^2 x), which is C^1 at both ends.  The indicator family
// has no transition profile; passing it here throws.
double c_profile(double x, CProfileKind kind);

struct ScaleIndex {
    enum class Kind { Coarse, Regular, Fine };
    Kind kind = Kind::Regular;
    int s = 0;  // meaningful only for Regular; scale a = 2^{-s}

    static ScaleIndex coarse() { return {Kind::Coarse, 0}; }
    static ScaleIndex regular(int s) { return {Kind::Regular, s}; }
    static ScaleIndex fine() { return {Kind::Fine, 0}; }
    bool operator==(const ScaleIndex&) const = default;
};

// dyadic radial window w_s(r).  Smooth family: regular s rises on
// [2^{s-1}, 2^s] and falls on [2^s, 2^{s+1}]; coarse is 1 below
// 2^{s_min-1} and falls to 2^{s_min}; fine rises on [2^{s_max}, 2^{s_max+1}]
// and is 1 above.  Sum of squares over all scales is exactly 1 at every
// r >= 0.  Indicator family: 1 on the half-open tile [2^s, 2^{s+1})
// (coarse below 2^{s_min}, fine from 2^{s_max+1}), 0 elsewhere.
double radial_window_discrete(const ScaleIndex& s, double r, int s_min,
                              int s_max, CProfileKind kind);

// grid spacing pi / 2^{ceil(s/2)}
double sphere_grid_spacing(int s);

// nested direction grid on S^{n-1}: the circle gets 2 * 2^{ceil(s/2)}
// equispaced points; each additional register takes the interior multiples
// of the spacing plus the two poles (which disengage all later registers).
// Ordering is lexicographic in angle index with poles last per level.
std::vector<SphericalDirection> sphere_grid(int s, int n);

// number of points sphere_grid(s, n) produces
long long sphere_grid_size(int s, int n);

// one register of the direction bump: c(2^{ceil(s/2)} |phi_j - theta_j| / 2),
// with shortest-path circle distance on the last register.  Omitted factors
// (either side undef) contribute 1.  Smooth family only; the indicator
// family assigns whole nearest-direction cells instead and throws here.
double angular_bump(int s, std::optional<double> theta_j,
                    std::optional<double> phi_j, bool is_last_coordinate,
                    CProfileKind kind = CProfileKind::PlainCosine);

// product of angular_bump over all registers
double angular_bump_product(int s, const SphericalDirection& theta,
                            const SphericalDirection& phi,
                            CProfileKind kind = CProfileKind::PlainCosine);

}  // namespace curvelet
