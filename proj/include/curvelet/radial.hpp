#pragma once

// Radial test functions and their radial Fourier transforms.
//
// A unit-L2 radial function f(x) = f_0(|x|) on R^n has radial transform
//     F_0(rho) = (2 pi / rho^{(n-2)/2}) int_0^inf J_{(n-2)/2}(2 pi rho r)
//                f_0(r) r^{n/2} dr,
// and Parseval reads S_0 int F_0^2 rho^{n-1} drho = 1.  Three families have
// closed forms (solid ball, thin shell with square cross-section, thin shell
// with Gaussian cross-section); arbitrary tabulated profiles fall back to
// quadrature.

#include <utility>
#include <vector>

namespace curvelet {

enum class ProfileKind { Ball, ShellSquare, ShellGaussian, Tabulated };

struct RadialProfile {
    ProfileKind kind = ProfileKind::Ball;
    int n = 0;
    double beta = 0;     // radius
    double delta = 0;    // shell thickness (shells only)
    double epsilon = 0;  // delta / beta
    // multiplicative constant making the L2 norm one (C for ball and square
    // shell, C_f for the Gaussian shell, table scale for tabulated)
    double normalization = 0;

    // tabulated profiles: monotone-cubic interpolation between log-spaced nodes
    std::vector<double> r_nodes;
    std::vector<double> f_samples;
    std::vector<double> f_slopes;

    static RadialProfile ball(int n, double beta);
    static RadialProfile shell_square(int n, double beta, double delta);
    // require_theorem_regime enforces the smallness conditions on epsilon
    // needed by the shell concentration bounds
    static RadialProfile shell_gaussian(int n, double beta, double delta,
                                        bool require_theorem_regime = false);
    static RadialProfile tabulated(int n, std::vector<double> r,
                                   std::vector<double> f);
};

// epsilon <= min(6/(n-2)^2, 1/(n+2), 1/(e n), 1/5)
bool gaussian_epsilon_ok(int n, double epsilon);

// physical-space radial profile f_0(r) (for the Gaussian shell this is the
// sphere-convolution integral, evaluated by quadrature)
double profile_f0(const RadialProfile& p, double r);

// effective radial support [lo, hi] of f_0
std::pair<double, double> profile_support(const RadialProfile& p);

// F_0(rho) by direct quadrature of the transform integral; the estimated
// absolute error is written to *abs_err when given, and a result whose
// error estimate exceeds the contract budget throws std::runtime_error
double hankel_transform(const RadialProfile& p, double rho,
                        double* abs_err = nullptr);

// closed forms
double ball_F0(int n, double beta, double rho);
double ball_F0_derivative(int n, double beta, double rho);
double shell_square_F0(int n, double beta, double delta, double rho);
double shell_square_F0_derivative(int n, double beta, double delta, double rho);
// Gaussian shell: F_0 = C_f delta^{n/2} e^{-pi delta^2 rho^2} Q_0(rho) with
// Q_0(rho) = (2 pi / rho^{n/2-1}) J_{n/2-1}(2 pi beta rho) beta^{n/2}
double shell_gaussian_F0(int n, double beta, double delta, double rho);
double shell_gaussian_F0_derivative(int n, double beta, double delta,
                                    double rho);
// the normalization constant C_f (cached per (n, beta, delta))
double gaussian_shell_Cf(int n, double beta, double delta);

// dispatch to the closed form (tabulated falls back to hankel_transform)
double profile_F0(const RadialProfile& p, double rho);
double profile_F0_derivative(const RadialProfile& p, double rho);

// S_0 int_0^{1/lambda} F_0^2 rho^{n-1} drho; for the ball this reduces
// exactly to a Bessel tail identity, otherwise quadrature
double low_frequency_mass(const RadialProfile& p, double lambda);

// S_0 int_{rho_cut}^inf F_0^2 rho^{n-1} drho (complement of the above for
// cutoff 1/lambda); exact for the ball
double high_frequency_mass(const RadialProfile& p, double rho_cut);

}  // namespace curvelet
