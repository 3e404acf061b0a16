#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "curvelet/bessel.hpp"
#include "curvelet/geometry.hpp"
#include "curvelet/quadrature.hpp"
#include "curvelet/radial.hpp"
#include "doctest.h"

using namespace curvelet;

TEST_CASE("ball closed form matches transform quadrature") {
    for (int n : {2, 3, 4, 6}) {
        for (double beta : {1.0, 2.0}) {
            const auto p = RadialProfile::ball(n, beta);
            for (double rho : {0.3, 1.0, 2.7}) {
                double err = 0.0;
                const double numeric = hankel_transform(p, rho, &err);
                const double closed = ball_F0(n, beta, rho);
                CHECK(std::fabs(numeric - closed) <=
                      1e-8 * std::max(1.0, std::fabs(closed)));
            }
        }
    }
}

TEST_CASE("ball transform: small-rho limit and normalization") {
    const int n = 4;
    const double beta = 1.3;
    // F_0(rho) rho^{n/2} / J_{n/2}(2 pi rho beta) is constant in rho
    auto ratio = [&](double rho) {
        return ball_F0(n, beta, rho) * std::pow(rho, 0.5 * n) /
               bessel_j(BesselOrder::halves(n), 2 * M_PI * rho * beta);
    };
    CHECK(ratio(1e-6) == doctest::Approx(ratio(0.7)).epsilon(1e-12));

    // Parseval, exactly via the tail identity and independently by quadrature
    for (int dim : {2, 4, 7}) {
        const auto p = RadialProfile::ball(dim, 0.8);
        CHECK(high_frequency_mass(p, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
    }
    const double S0 = sphere_surface_area(4);
    auto integrand = [&](double rho) {
        const double F = ball_F0(4, 1.0, rho);
        return F * F * rho * rho * rho;
    };
    const auto head = integrate_oscillatory(integrand, 1e-9, 40.0, 0.25, 1e-13, 1e-10);
    // tail certified by the exact identity
    const auto p4 = RadialProfile::ball(4, 1.0);
    const double tail = high_frequency_mass(p4, 40.0);
    CHECK(S0 * head.value + tail == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("ball derivative: finite differences and sign structure") {
    const int n = 4;
    const double beta = 1.0;
    for (double rho : {0.5, 1.0, 3.0}) {
        const double h = 1e-5;
        const double fd = (ball_F0(n, beta, rho + h) - ball_F0(n, beta, rho - h)) /
                          (2 * h);
        const double an = ball_F0_derivative(n, beta, rho);
        CHECK(an == doctest::Approx(fd).epsilon(1e-6));
    }

    // derivative flips sign exactly at zeros of J_{n/2+1}: first zero of J_3
    const double j3_zero = 6.3801618959239835;
    const double rho_flip = j3_zero / (2 * M_PI * beta);
    CHECK(ball_F0_derivative(n, beta, rho_flip * 0.995) *
              ball_F0_derivative(n, beta, rho_flip * 1.005) <
          0.0);

    // oscillatory regime: |F'| envelope exceeds |F| by about 2 pi beta
    // (the ratio approaches 2 pi beta from below as rho grows)
    double fmax = 0.0, dmax = 0.0;
    for (double rho = 16.0; rho < 17.0; rho += 0.0005) {
        fmax = std::max(fmax, std::fabs(ball_F0(n, beta, rho)));
        dmax = std::max(dmax, std::fabs(ball_F0_derivative(n, beta, rho)));
    }
    CHECK(dmax / fmax == doctest::Approx(2 * M_PI * beta).epsilon(0.05));
    double fmax_lo = 0.0, dmax_lo = 0.0;
    for (double rho = 4.0; rho < 5.0; rho += 0.0005) {
        fmax_lo = std::max(fmax_lo, std::fabs(ball_F0(n, beta, rho)));
        dmax_lo = std::max(dmax_lo, std::fabs(ball_F0_derivative(n, beta, rho)));
    }
    CHECK(dmax_lo / fmax_lo < dmax / fmax);
}

TEST_CASE("square shell: quadrature oracle, thin limit, band approximation") {
    const int n = 4;
    const double beta = 1.0, delta = 0.01;
    const auto p = RadialProfile::shell_square(n, beta, delta);
    for (double rho : {0.4, 1.0, 5.0, 11.0}) {
        const double numeric = hankel_transform(p, rho);
        const double closed = shell_square_F0(n, beta, delta, rho);
        CHECK(std::fabs(numeric - closed) <=
              1e-8 * std::max(1.0, std::fabs(closed)));
    }

    // delta -> 0: F_0 / (C delta) approaches the shell-measure transform
    for (double rho : {0.7, 2.3}) {
        auto limit_ratio = [&](double d) {
            const double C = RadialProfile::shell_square(n, beta, d).normalization;
            const double Kprime = 2 * M_PI * rho * std::pow(beta, 0.5 * n) *
                                  bessel_j(BesselOrder::halves(n - 2),
                                           2 * M_PI * rho * beta) /
                                  std::pow(rho, 0.5 * n);
            return shell_square_F0(n, beta, d, rho) / (C * d * Kprime);
        };
        CHECK(limit_ratio(1e-6) == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(std::fabs(limit_ratio(1e-7) - 1.0) <
              std::fabs(limit_ratio(1e-4) - 1.0));
    }

    // low-frequency approximation sqrt(beta delta / S_0) Q_0-form: the
    // relative deviation grows like pi rho delta times a phase factor, so
    // it is ~7% at rho = 2 and ~18% at rho = 5 (both in-band)
    auto band_rel = [&](double rho) {
        const double approx = std::sqrt(beta * delta / sphere_surface_area(n)) *
                              2 * M_PI * std::pow(rho, 1.0 - 0.5 * n) *
                              bessel_j(BesselOrder::halves(n - 2),
                                       2 * M_PI * beta * rho);
        const double exact = shell_square_F0(n, beta, delta, rho);
        return std::fabs(exact - approx) / std::fabs(approx);
    };
    CHECK(band_rel(2.0) <= 0.10);
    CHECK(band_rel(5.0) > 0.15);
    CHECK(band_rel(5.0) < 0.20);

    // derivative against finite differences
    for (double rho : {0.6, 2.0, 7.0}) {
        const double h = 1e-6;
        const double fd = (shell_square_F0(n, beta, delta, rho + h) -
                           shell_square_F0(n, beta, delta, rho - h)) /
                          (2 * h);
        CHECK(shell_square_F0_derivative(n, beta, delta, rho) ==
              doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("gaussian shell: normalization bracket and oracle agreement") {
    // C_f^2 within [ (1/4) sqrt(3/2), 4 ] / (S_0 eps^{n-1} beta^{2n-2})
    for (double beta : {1.0, 2.5}) {
        const int n = 4;
        const double eps = 1.0 / 20.0;
        const double delta = eps * beta;
        CHECK(gaussian_epsilon_ok(n, eps));
        const double cf = gaussian_shell_Cf(n, beta, delta);
        const double denom = sphere_surface_area(n) * std::pow(eps, n - 1) *
                             std::pow(beta, 2 * n - 2);
        const double lo = 0.25 * std::sqrt(1.5) / denom;
        const double hi = 4.0 / denom;
        CHECK(cf * cf >= lo);
        CHECK(cf * cf <= hi);
    }

    // Parseval by direct quadrature in rho (independent integration path)
    {
        const int n = 4;
        const double beta = 1.0, delta = 0.05;
        const double S0 = sphere_surface_area(n);
        auto integrand = [&](double rho) {
            const double F = shell_gaussian_F0(n, beta, delta, rho);
            return F * F * std::pow(rho, n - 1);
        };
        const double top = 7.0 / delta;
        const auto q = integrate_oscillatory(integrand, 1e-9, top, 0.25 / beta,
                                             1e-13, 1e-10);
        CHECK(S0 * q.value == doctest::Approx(1.0).epsilon(1e-8));
    }

    // transform of the physical convolution profile matches C_f g-hat Q_0
    {
        const int n = 4;
        const double beta = 1.0, delta = 0.05;
        const auto p = RadialProfile::shell_gaussian(n, beta, delta);
        for (double rho : {0.5, 1.7, 4.0}) {
            const double numeric = hankel_transform(p, rho);
            const double closed = shell_gaussian_F0(n, beta, delta, rho);
            CHECK(std::fabs(numeric - closed) <=
                  1e-8 * std::max(1.0, std::fabs(closed)));
        }
    }

    // Gaussian factor forces super-exponential decay
    {
        const int n = 4;
        const double beta = 1.0, delta = 0.05;
        const double near = std::fabs(shell_gaussian_F0(n, beta, delta, 0.5 / beta));
        const double far = std::fabs(shell_gaussian_F0(n, beta, delta, 4.0 / delta));
        CHECK(far <= 1e-20 * near);
    }

    // derivative against finite differences
    {
        const int n = 6;
        const double beta = 1.0, delta = 0.025;
        for (double rho : {0.8, 3.0, 9.0}) {
            const double h = 1e-6 * std::max(1.0, rho);
            const double fd = (shell_gaussian_F0(n, beta, delta, rho + h) -
                               shell_gaussian_F0(n, beta, delta, rho - h)) /
                              (2 * h);
            CHECK(shell_gaussian_F0_derivative(n, beta, delta, rho) ==
                  doctest::Approx(fd).epsilon(1e-5));
        }
    }

    // smallness-condition gate
    CHECK_FALSE(gaussian_epsilon_ok(4, 0.3));
    CHECK_THROWS_AS(RadialProfile::shell_gaussian(4, 1.0, 0.3, true),
                    std::domain_error);
    CHECK_NOTHROW(RadialProfile::shell_gaussian(4, 1.0, 0.3, false));
}

TEST_CASE("low-frequency mass: theorem-scale values and limits") {
    // ball in n = 4 at the standard radial scaling keeps low frequencies
    // below 1/(pi n)
    {
        const int n = 4;
        const double beta = 1.0;
        const auto p = RadialProfile::ball(n, beta);
        const double lambda = 2 * M_PI * beta * std::exp(1.0) / n;
        const double mass = low_frequency_mass(p, lambda);
        CHECK(mass > 0.0);
        CHECK(mass < 1.0 / (M_PI * n));
    }

    // gaussian shell at its scaling stays below eps/5
    {
        const int n = 6;
        const double beta = 1.0, eps = 1.0 / 30.0;
        const auto p = RadialProfile::shell_gaussian(n, beta, eps * beta, true);
        const double lambda = 2 * M_PI * beta * std::exp(1.0) / (n - 2);
        const double mass = low_frequency_mass(p, lambda);
        CHECK(mass > 0.0);
        CHECK(mass <= eps / 5.0);
    }

    // vanishing window
    {
        const auto p = RadialProfile::ball(4, 1.0);
        CHECK(low_frequency_mass(p, 1e9) < 1e-12);
        CHECK(low_frequency_mass(p, 1e9) >= 0.0);
    }

    // ball identity against direct quadrature
    {
        const auto p = RadialProfile::ball(5, 1.4);
        const double lambda = 3.0;
        const double exact = low_frequency_mass(p, lambda);
        const double S0 = sphere_surface_area(5);
        auto integrand = [&](double rho) {
            const double F = ball_F0(5, 1.4, rho);
            return F * F * std::pow(rho, 4);
        };
        const auto q = integrate_oscillatory(integrand, 1e-9, 1.0 / lambda,
                                             0.25 / 1.4, 1e-14, 1e-11);
        CHECK(exact == doctest::Approx(S0 * q.value).epsilon(1e-9));
    }
}

TEST_CASE("gaussian shell normalization approaches the spectral-density limit") {
    // The square profile spreads a sqrt(2) power factor into its slow
    // spectral tail, so the Gaussian shell's low-frequency amplitude runs
    // 2^{1/4} higher at matched norm: C_f^2 S_0 delta^{n-1} beta^{n-1}
    // converges to sqrt(2) as the shell thins.
    for (int n : {4, 6}) {
        double prev_gap = 1.0;
        for (double eps : {0.05, 0.02, 0.005}) {
            const double beta = 1.0, delta = eps * beta;
            const double cf = gaussian_shell_Cf(n, beta, delta);
            const double scaled = cf * cf * sphere_surface_area(n) *
                                  std::pow(delta, n - 1.0) *
                                  std::pow(beta, n - 1.0);
            const double gap = std::fabs(scaled - std::sqrt(2.0));
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
        CHECK(prev_gap <= 1e-4);
    }
}

TEST_CASE("square and gaussian shells agree at low frequency") {
    // Pointwise comparison after dividing out the inherent 2^{1/4}
    // amplitude offset, away from Bessel zero crossings (where relative
    // comparison of oscillatory functions degenerates), across the band
    // rho <= 1/(4 pi delta).  The residual deviation is the Taylor phase
    // error, which stays under 25% on this domain.
    const int n = 4;
    const double beta = 1.0;
    const double eps = 0.08;  // < 1/(e n) = 0.0920
    const double delta = eps * beta;
    int compared = 0;
    for (int i = 0; i <= 60; ++i) {
        const double rho =
            std::exp(std::log(0.3) +
                     (std::log(1.0 / (4 * M_PI * delta)) - std::log(0.3)) * i / 60.0);
        const double t = 2 * M_PI * beta * rho;
        const double J = bessel_j(BesselOrder::halves(n - 2), t);
        if (std::fabs(J) < 0.75 * std::sqrt(2.0 / (M_PI * std::max(t, 1.0))))
            continue;
        ++compared;
        const double sq = shell_square_F0(n, beta, delta, rho);
        const double ga = shell_gaussian_F0(n, beta, delta, rho) /
                          std::pow(2.0, 0.25);
        CHECK(std::fabs(sq - ga) <= 0.25 * std::fabs(ga));
    }
    CHECK(compared >= 10);
}

TEST_CASE("tabulated profiles: interpolation, normalization, transform") {
    // tabulate a smooth bump and check the machinery end to end
    const int n = 3;
    std::vector<double> r, f;
    for (int i = 0; i <= 80; ++i) {
        const double rr = 0.05 * std::exp(std::log(40.0) * i / 80.0);
        r.push_back(rr);
        f.push_back(std::exp(-(rr - 1.0) * (rr - 1.0) / 0.08));
    }
    const auto p = RadialProfile::tabulated(n, r, f);

    // unit norm after construction
    const double S0 = sphere_surface_area(n);
    auto density = [&](double rr) {
        const double v = profile_f0(p, rr);
        return v * v * rr * rr;
    };
    const auto q = integrate_adaptive(density, r.front(), r.back(), 1e-300, 1e-10);
    CHECK(S0 * q.value == doctest::Approx(1.0).epsilon(1e-9));

    // interpolation reproduces the samples and stays within data bounds
    CHECK(profile_f0(p, 1.0) ==
          doctest::Approx(p.normalization * std::exp(-0.0)).epsilon(1e-3));
    double fmax = 0.0;
    for (double x : f) fmax = std::max(fmax, x);
    for (double rr = 0.06; rr < 39.0; rr *= 1.37)
        CHECK(profile_f0(p, rr) <= p.normalization * fmax * (1 + 1e-12));

    // transform via quadrature approximates the analytic Gaussian-bump
    // transform of the underlying smooth function (interpolation-limited)
    const auto exact_profile = RadialProfile::tabulated(n, r, f);
    const double got = hankel_transform(exact_profile, 0.6);
    auto direct = [&](double rr) {
        return p.normalization * std::exp(-(rr - 1.0) * (rr - 1.0) / 0.08) *
               bessel_j(BesselOrder::halves(1), 2 * M_PI * 0.6 * rr) *
               std::pow(rr, 1.5);
    };
    const auto dq = integrate_adaptive(direct, 0.05, 4.0, 1e-300, 1e-11);
    const double want = 2 * M_PI / std::pow(0.6, 0.5) * dq.value;
    CHECK(got == doctest::Approx(want).epsilon(2e-4));

    CHECK_THROWS_AS(RadialProfile::tabulated(3, {1.0, 2.0}, {1.0, 1.0}),
                    std::domain_error);
}
