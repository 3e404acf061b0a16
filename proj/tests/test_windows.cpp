#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <vector>

#include "curvelet/geometry.hpp"
#include "curvelet/quadrature.hpp"
#include "curvelet/rng.hpp"
#include "curvelet/windows.hpp"
#include "doctest.h"

using namespace curvelet;

TEST_CASE("sphere surface areas match closed forms") {
    CHECK(sphere_surface_area(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sphere_surface_area(2) == doctest::Approx(2 * M_PI).epsilon(1e-14));
    CHECK(sphere_surface_area(3) == doctest::Approx(4 * M_PI).epsilon(1e-14));
    CHECK(sphere_surface_area(4) ==
          doctest::Approx(2 * M_PI * M_PI).epsilon(1e-14));
    CHECK(sphere_surface_area(6) ==
          doctest::Approx(M_PI * M_PI * M_PI).epsilon(1e-14));
}

TEST_CASE("direction angle conversions round-trip and handle poles") {
    Rng rng(1234);
    for (int n : {2, 3, 4, 6}) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto v = rng.unit_vector(n);
            const auto dir = direction_from_vector(v);
            CHECK(direction_valid(dir, n));
            const auto back = direction_to_vector(dir);
            for (int i = 0; i < n; ++i)
                CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12));
        }
    }

    // a vector with vanishing tail hits a pole and disengages the rest
    const auto mid = direction_from_vector({0.6, 0.8, 0.0, 0.0});
    CHECK(mid.size() == 3);
    CHECK(*mid[0] == doctest::Approx(std::atan2(0.8, 0.6)));
    CHECK(mid[1].has_value());
    CHECK(*mid[1] == 0.0);
    CHECK_FALSE(mid[2].has_value());

    // interior right angles are not poles
    const auto north = direction_from_vector({0.0, 0.0, 1.0, 0.0});
    CHECK(*north[0] == doctest::Approx(M_PI / 2));
    CHECK(*north[1] == doctest::Approx(M_PI / 2));
    CHECK(*north[2] == 0.0);

    const auto axis = direction_from_vector({-1.0, 0.0, 0.0});
    CHECK(*axis[0] == M_PI);
    CHECK_FALSE(axis[1].has_value());
    const auto va = direction_to_vector(axis);
    CHECK(va[0] == -1.0);
    CHECK(va[1] == 0.0);
    CHECK(va[2] == 0.0);

    CHECK_THROWS_AS(direction_from_vector({0.0, 0.0}), std::domain_error);
}

TEST_CASE("circle distance wraps shortest path") {
    CHECK(circle_distance(0.1, -0.1) == doctest::Approx(0.2));
    CHECK(circle_distance(M_PI - 0.05, -M_PI + 0.05) ==
          doctest::Approx(0.1).epsilon(1e-12));
    CHECK(circle_distance(2.0, 2.0) == 0.0);
    CHECK(circle_distance(M_PI / 2, -M_PI / 2) == doctest::Approx(M_PI));
}

TEST_CASE("radial window: support, peak, and admissibility") {
    CHECK(radial_window_W(0.2) == 0.0);
    CHECK(radial_window_W(1.0 / std::exp(1.0)) <= 1e-30);  // fp endpoint
    CHECK(radial_window_W(1.0) == 0.0);
    CHECK(radial_window_W(1.5) == 0.0);
    CHECK(radial_window_W(std::exp(-0.5)) ==
          doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-14));

    // int W(r)^2 dr/r = 1
    auto integrand = [](double r) {
        const double w = radial_window_W(r);
        return w * w / r;
    };
    const auto q = integrate_adaptive(integrand, std::exp(-1.0), 1.0, 1e-14, 1e-13);
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(radial_window_W(-0.1), std::domain_error);
}

TEST_CASE("angular window: support, amplitude, and sphere admissibility") {
    for (int n : {2, 3, 4, 6, 8}) {
        const double S0 = sphere_surface_area(n);
        const double Cv = std::sqrt(2.0 * (n + 2.0) * n / (3.0 * S0));
        CHECK(angular_window_V(0.0, n) == doctest::Approx(Cv).epsilon(1e-14));
        CHECK(angular_window_V(M_PI / 2, n) <= 1e-30);  // fp endpoint
        CHECK(angular_window_V(-0.3, n) == 0.0);
        CHECK(angular_window_V(2.0, n) == 0.0);

        // int_{S^{n-1}} V(phi1)^2 dsigma = S_{n-2} int_0^{pi/2} V^2 sin^{n-2}
        const double Ssub = sphere_surface_area(n - 1);
        auto integrand = [n](double phi) {
            const double v = angular_window_V(phi, n);
            return v * v * std::pow(std::sin(phi), n - 2);
        };
        const auto q = integrate_adaptive(integrand, 0.0, M_PI / 2, 1e-14, 1e-13);
        CHECK(Ssub * q.value == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("scale normalization factor: limits, exactness, oracle") {
    // n = 2 collapses to a^{3/4} for every angle
    for (double phi : {0.0, 0.2, 1.0, 2.5})
        CHECK(lambda_factor(0.1, phi, 2) ==
              doctest::Approx(std::pow(0.1, 0.75)).epsilon(1e-14));

    // removable singularity at phi1 = 0
    CHECK(lambda_factor(0.25, 0.0, 5) ==
          doctest::Approx(std::pow(0.25, 1.5)).epsilon(1e-14));
    for (int n : {3, 4, 6}) {
        const double at0 = lambda_factor(0.01, 0.0, n);
        CHECK(at0 == doctest::Approx(std::pow(0.01, 0.25 * (n + 1))).epsilon(1e-14));
        CHECK(lambda_factor(0.01, 1e-9, n) == doctest::Approx(at0).epsilon(1e-12));
    }

    // a = 1 would make the ratio collapse; just inside, the value is near 1
    CHECK(lambda_factor(1.0 - 1e-12, 0.7, 4) == doctest::Approx(1.0).epsilon(1e-9));

    // extended-precision direct evaluation
    {
        const long double a = 0.0625L, phi = 0.3L;
        const long double ref =
            std::pow(a, 1.25L) * (std::sin(phi / std::sqrt(a)) * std::sqrt(a) /
                                  std::sin(phi));
        CHECK(lambda_factor(0.0625, 0.3, 4) ==
              doctest::Approx(double(ref)).epsilon(1e-14));
    }
    {
        const long double a = 0.01L, phi = 0.12L;
        const long double base =
            std::sin(phi / std::sqrt(a)) * std::sqrt(a) / std::sin(phi);
        const long double ref = std::pow(a, 2.0L) * std::pow(base, 2.5L);
        CHECK(lambda_factor(0.01, 0.12, 7) ==
              doctest::Approx(double(ref)).epsilon(1e-13));
    }

    CHECK_THROWS_AS(lambda_factor(0.0, 0.1, 4), std::domain_error);
    CHECK_THROWS_AS(lambda_factor(1.0, 0.1, 4), std::domain_error);
}

TEST_CASE("scale normalization derivative: zero cases and finite differences") {
    CHECK(lambda_factor_deriv(0.3, 0.5, 2) == 0.0);
    CHECK(lambda_factor_deriv(0.3, 0.0, 5) == 0.0);

    for (int n : {3, 4, 5, 7}) {
        for (double a : {0.5, 0.25, 0.04, 0.01}) {
            // stay within the angular support used downstream
            const double top = 0.5 * M_PI * std::sqrt(a);
            for (double frac : {1e-7, 1e-3, 0.1, 0.5, 0.9}) {
                const double phi = frac * top;
                const double h = std::max(1e-7 * phi, 1e-12);
                const double fd = (lambda_factor(a, phi + h, n) -
                                   lambda_factor(a, phi - h, n)) /
                                  (2 * h);
                const double an = lambda_factor_deriv(a, phi, n);
                const double scale =
                    std::max(std::fabs(fd), std::pow(a, 0.25 * (n + 1)));
                CHECK(std::fabs(an - fd) <= 4e-5 * scale);
            }
        }
    }

    // derivative tends to zero linearly as phi1 -> 0
    const double tiny = lambda_factor_deriv(0.09, 1e-8, 6);
    CHECK(std::fabs(tiny) < 1e-7);
}

TEST_CASE("frequency profile chi: support geometry and on-axis value") {
    const int n = 4;
    const double lambda = 3.0, a = 0.09;
    const auto spec = ContinuousWindowSpec::make(n, lambda);
    CHECK(spec.consistent());

    std::vector<double> theta = {1.0, 0.0, 0.0, 0.0};

    // on-axis, mid-band: W(1/sqrt(e)) * V(0) * Lambda_a(0)
    const double rmid = 1.0 / (lambda * a * std::sqrt(std::exp(1.0)));
    std::vector<double> k = {rmid, 0.0, 0.0, 0.0};
    const double expect = std::sqrt(8.0 / 3.0) * angular_window_V(0.0, n) *
                          std::pow(a, 0.25 * (n + 1));
    CHECK(chi_continuous(spec, a, theta, k) ==
          doctest::Approx(expect).epsilon(1e-13));

    // outside the radial band
    std::vector<double> klow = {0.9 / (std::exp(1.0) * lambda * a), 0, 0, 0};
    std::vector<double> khigh = {1.1 / (lambda * a), 0, 0, 0};
    CHECK(chi_continuous(spec, a, theta, klow) == 0.0);
    CHECK(chi_continuous(spec, a, theta, khigh) == 0.0);

    // perpendicular directions die for a < 1/4 (angular support pi/2 sqrt(a))
    std::vector<double> kperp = {0.0, rmid, 0.0, 0.0};
    CHECK(chi_continuous(spec, a, theta, kperp) == 0.0);

    // angle just inside vs just outside the cone
    const double top = 0.5 * M_PI * std::sqrt(a);
    auto tilted = [&](double ang) {
        return std::vector<double>{rmid * std::cos(ang), rmid * std::sin(ang), 0.0,
                                   0.0};
    };
    CHECK(chi_continuous(spec, a, theta, tilted(0.99 * top)) > 0.0);
    CHECK(chi_continuous(spec, a, theta, tilted(1.01 * top)) == 0.0);

    std::vector<double> not_unit = {0.5, 0.5, 0.5, 0.0};
    CHECK_THROWS_AS(chi_continuous(spec, a, not_unit, k), std::domain_error);
}

// The theta-integral of V(phi1/sqrt(a))^2 Lambda_a(phi1)^2 over the sphere
// reduces to exactly a^n; combined with int W^2 dr/r = 1 this gives the
// full partition of unity over (a, theta).
TEST_CASE("sphere marginal of the squared profile equals a^n") {
    for (int n : {2, 3, 4, 6}) {
        const double Ssub = sphere_surface_area(n - 1);
        for (double a : {0.9, 0.3, 0.05, 0.01}) {
            auto integrand = [&](double phi) {
                const double v = angular_window_V(phi / std::sqrt(a), n);
                if (v == 0.0) return 0.0;
                const double lam = lambda_factor(a, phi, n);
                return v * v * lam * lam * std::pow(std::sin(phi), n - 2);
            };
            const double top = std::min(M_PI, 0.5 * M_PI * std::sqrt(a));
            const auto q = integrate_adaptive(integrand, 0.0, top, 1e-16, 1e-13);
            const double expect = std::pow(a, n);
            CHECK(Ssub * q.value == doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("full scale-and-direction partition for fixed frequency") {
    // int_0^1 [ int_{S^{n-1}} chi^2 dsigma ] da / a^{n+1}
    //   = int_0^1 W(lambda a r)^2 da / a  = 1 whenever r >= 1/lambda
    const double lambda = 2.5;
    for (double r : {1.0 / lambda, 2.0, 17.0}) {
        auto in_log = [&](double t) {
            const double w = radial_window_W(lambda * std::exp(t) * r);
            return w * w;
        };
        // support in log a: lambda a r in [1/e, 1]
        const double hi = std::min(0.0, -std::log(lambda * r));
        const double lo = -std::log(lambda * r) - 1.0;
        const auto q = integrate_adaptive(in_log, lo, hi, 1e-14, 1e-13);
        CHECK(q.value == doctest::Approx(1.0).epsilon(1e-12));
    }
    // below the cutoff frequency the mass falls short
    {
        const double r = 0.5 / lambda;
        auto in_log = [&](double t) {
            const double w = radial_window_W(lambda * std::exp(t) * r);
            return w * w;
        };
        const auto q = integrate_adaptive(in_log, -std::log(lambda * r) - 1.0, 0.0,
                                          1e-14, 1e-13);
        CHECK(q.value < 0.65);
    }
}

TEST_CASE("step profile: endpoints, symmetry point, partition identity") {
    for (auto kind : {CProfileKind::PlainCosine, CProfileKind::Smoothed}) {
        CHECK(c_profile(0.0, kind) == 1.0);
        CHECK(c_profile(-1.0, kind) == 1.0);
        CHECK(c_profile(M_PI / 2, kind) == 0.0);
        CHECK(c_profile(2.0, kind) == 0.0);
        CHECK(c_profile(M_PI / 4, kind) ==
              doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

        Rng rng(7);
        for (int i = 0; i < 1000; ++i) {
            const double x = rng.uniform(0.0, M_PI / 2);
            const double c1 = c_profile(x, kind);
            const double c2 = c_profile(M_PI / 2 - x, kind);
            CHECK(std::fabs(c1 * c1 + c2 * c2 - 1.0) <= 1e-14);
        }
    }

    // smoothed variant is C^1 at both ends: one-sided slopes vanish
    const double h = 1e-6;
    const double s0 =
        (c_profile(h, CProfileKind::Smoothed) - 1.0) / h;
    const double s1 = c_profile(M_PI / 2 - h, CProfileKind::Smoothed) / h;
    CHECK(std::fabs(s0) < 1e-5);
    CHECK(std::fabs(s1) < 1e-5);
    // while the plain cosine has slope -1 inside (kink at the edge)
    const double p1 = c_profile(M_PI / 2 - h, CProfileKind::PlainCosine) / h;
    CHECK(p1 == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("dyadic radial windows: plateaus, seams, partition, overlap") {
    const int s_min = 2, s_max = 5;
    for (auto kind : {CProfileKind::PlainCosine, CProfileKind::Smoothed}) {
        CHECK(radial_window_discrete(ScaleIndex::coarse(), 0.0, s_min, s_max,
                                     kind) == 1.0);
        CHECK(radial_window_discrete(ScaleIndex::coarse(), 2.0, s_min, s_max,
                                     kind) == 1.0);
        CHECK(radial_window_discrete(ScaleIndex::coarse(), 4.0, s_min, s_max,
                                     kind) == 0.0);
        CHECK(radial_window_discrete(ScaleIndex::regular(3), 8.0, s_min, s_max,
                                     kind) == 1.0);
        CHECK(radial_window_discrete(ScaleIndex::fine(), 64.0, s_min, s_max,
                                     kind) == 1.0);
        CHECK(radial_window_discrete(ScaleIndex::fine(), 32.0, s_min, s_max,
                                     kind) == 0.0);

        std::vector<ScaleIndex> scales = {ScaleIndex::coarse(), ScaleIndex::fine()};
        for (int s = s_min; s <= s_max; ++s) scales.push_back(ScaleIndex::regular(s));

        Rng rng(11);
        std::vector<double> rs = {0.0, 0.3, 2.0, 4.0, 8.0, 33.0, 320.0};
        for (int i = 0; i < 400; ++i) rs.push_back(std::exp(rng.uniform(-3.0, 7.0)));
        for (double r : rs) {
            double total = 0.0;
            int nonzero = 0;
            for (const auto& s : scales) {
                const double w = radial_window_discrete(s, r, s_min, s_max, kind);
                CHECK(w >= 0.0);
                CHECK(w <= 1.0);
                if (w != 0.0) ++nonzero;
                total += w * w;
            }
            CHECK(std::fabs(total - 1.0) <= 1e-14);
            CHECK(nonzero <= 2);
        }
    }

    CHECK_THROWS_AS(radial_window_discrete(ScaleIndex::regular(1), 1.0, 2, 5,
                                           CProfileKind::PlainCosine),
                    std::domain_error);
    CHECK_THROWS_AS(radial_window_discrete(ScaleIndex::coarse(), 1.0, 0, 5,
                                           CProfileKind::PlainCosine),
                    std::domain_error);
}

TEST_CASE("direction grids: counts, spacing, ordering, validity") {
    CHECK(sphere_grid_spacing(6) == doctest::Approx(M_PI / 8).epsilon(1e-15));
    CHECK(sphere_grid(2, 2).size() == 4);
    CHECK(sphere_grid(1, 2).size() == 4);   // ceil(1/2) = 1
    CHECK(sphere_grid(6, 3).size() == 114);
    CHECK(sphere_grid_size(6, 3) == 114);
    CHECK(sphere_grid_size(6, 2) == 16);
    CHECK(sphere_grid_size(4, 4) == (4 - 1) * ((4 - 1) * 8 + 2) + 2);

    for (int n : {2, 3, 4}) {
        for (int s : {1, 3, 6}) {
            const auto grid = sphere_grid(s, n);
            CHECK(static_cast<long long>(grid.size()) == sphere_grid_size(s, n));

            std::set<std::vector<double>> seen;
            for (const auto& dir : grid) {
                CHECK(direction_valid(dir, n));
                seen.insert(direction_to_vector(dir));
            }
            CHECK(seen.size() == grid.size());  // all unit vectors distinct
        }
    }

    // poles come last within a level and disengage their tails
    const auto g = sphere_grid(4, 3);
    const auto& north = g[g.size() - 2];
    const auto& south = g[g.size() - 1];
    CHECK(*north[0] == 0.0);
    CHECK_FALSE(north[1].has_value());
    CHECK(*south[0] == M_PI);
    CHECK_FALSE(south[1].has_value());
    // interior entries sweep lexicographically
    CHECK(*g[0][0] == doctest::Approx(M_PI / 4));
    CHECK(*g[0][1] == 0.0);
    CHECK(*g[1][0] == doctest::Approx(M_PI / 4));
    CHECK(*g[1][1] == doctest::Approx(M_PI / 4));
}

TEST_CASE("angular bumps: support radius and undef handling") {
    const int s = 4;  // spacing pi/4
    const double h = sphere_grid_spacing(s);
    CHECK(angular_bump(s, 0.5, 0.5, false) == 1.0);
    CHECK(angular_bump(s, 0.5, 0.5 + h, false) == 0.0);
    CHECK(angular_bump(s, 0.5, 0.5 + 0.5 * h, false) ==
          doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-14));
    // circle register wraps
    CHECK(angular_bump(s, M_PI - 0.1 * h, -M_PI + 0.1 * h, true) ==
          doctest::Approx(std::cos(0.1 * M_PI / 2 * 2)).epsilon(1e-12));
    // omitted factors
    CHECK(angular_bump(s, std::nullopt, 0.3, false) == 1.0);
    CHECK(angular_bump(s, 0.3, std::nullopt, false) == 1.0);
}

TEST_CASE("direction bump products tile the sphere") {
    Rng rng(99);
    for (auto kind : {CProfileKind::PlainCosine, CProfileKind::Smoothed}) {
        for (int n : {2, 3, 4}) {
            for (int s : {1, 2, 5}) {
                const auto grid = sphere_grid(s, n);
                for (int trial = 0; trial < 60; ++trial) {
                    const auto v = rng.unit_vector(n);
                    const auto phi = direction_from_vector(v);
                    double total = 0.0;
                    for (const auto& theta : grid) {
                        const double b = angular_bump_product(s, theta, phi, kind);
                        total += b * b;
                    }
                    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
                }
                // grid points themselves and poles
                for (std::size_t idx : {std::size_t(0), grid.size() - 1}) {
                    double total = 0.0;
                    for (const auto& theta : grid) {
                        const double b =
                            angular_bump_product(s, theta, grid[idx], kind);
                        total += b * b;
                    }
                    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
                }
            }
        }
    }
}

TEST_CASE("philox counter rng: reference vectors and stream independence") {
    const auto zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const auto ones = Philox4x32::block({0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu,
                                         0xFFFFFFFFu},
                                        {0xFFFFFFFFu, 0xFFFFFFFFu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    // same seed reproduces; different stream decorrelates
    Rng a(42, 0), b(42, 0), c(42, 1);
    bool all_equal = true, any_equal = false;
    for (int i = 0; i < 64; ++i) {
        const auto x = a.next_u32(), y = b.next_u32(), z = c.next_u32();
        all_equal = all_equal && (x == y);
        any_equal = any_equal || (x == z);
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal);

    // uniform moments at statistical tolerance
    Rng u(7);
    double mean = 0.0, var = 0.0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double x = u.uniform();
        mean += x;
        var += (x - 0.5) * (x - 0.5);
    }
    mean /= N;
    var /= N;
    CHECK(std::fabs(mean - 0.5) < 0.005);
    CHECK(std::fabs(var - 1.0 / 12.0) < 0.005);

    // gaussian moments
    Rng g(13);
    double gm = 0.0, gv = 0.0;
    for (int i = 0; i < N; ++i) {
        const double x = g.gaussian();
        gm += x;
        gv += x * x;
    }
    gm /= N;
    gv /= N;
    CHECK(std::fabs(gm) < 0.01);
    CHECK(std::fabs(gv - 1.0) < 0.02);
}
