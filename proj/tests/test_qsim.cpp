#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "curvelet/discrete.hpp"
#include "curvelet/qsim.hpp"
#include "curvelet/rng.hpp"
#include "doctest.h"

using namespace curvelet;

namespace {

QuantumState custom_state(const GridSpec& g,
                          const std::vector<std::pair<std::vector<int>, double>>&
                              amplitudes) {
    QuantumState st;
    st.field = AmplitudeField::zeros(g, FieldDomain::Spatial);
    for (const auto& [j, a] : amplitudes)
        st.field.values[static_cast<std::size_t>(g.flatten(j))] = a;
    return st;
}

QuantumState random_state(const GridSpec& g, std::uint64_t seed) {
    Rng rng(seed);
    QuantumState st;
    st.field = AmplitudeField::zeros(g, FieldDomain::Spatial);
    for (auto& v : st.field.values) v = {rng.gaussian(), rng.gaussian()};
    const double inv = 1.0 / std::sqrt(st.field.norm_sq());
    for (auto& v : st.field.values) v *= inv;
    return st;
}

}  // namespace

TEST_CASE("ball state enumerates the closed lattice ball") {
    const auto g = GridSpec::make(2, 0.5, 8);

    // radius under half the spacing around a lattice point: one-hot
    const auto one = prepare_ball_state(g, {0.5, -0.5}, 0.2);
    CHECK(one.provenance == StateProvenance::BallSample);
    CHECK(one.field.norm_sq() == doctest::Approx(1.0).epsilon(1e-14));
    for (std::int64_t p = 0; p < g.points(); ++p) {
        const double expect = (g.unflatten(p) == std::vector<int>{1, -1})
                                  ? 1.0
                                  : 0.0;
        CHECK(one.field.values[static_cast<std::size_t>(p)].real() == expect);
    }

    // generic ball against direct enumeration
    const std::vector<double> c{0.25, -0.25};
    const double beta = 0.9;
    int count = 0;
    for (int j0 = -4; j0 < 4; ++j0)
        for (int j1 = -4; j1 < 4; ++j1) {
            const double d0 = 0.5 * j0 - c[0], d1 = 0.5 * j1 - c[1];
            if (d0 * d0 + d1 * d1 <= beta * beta) ++count;
        }
    const auto st = prepare_ball_state(g, c, beta);
    const double amp = 1.0 / std::sqrt(static_cast<double>(count));
    int populated = 0;
    for (int j0 = -4; j0 < 4; ++j0)
        for (int j1 = -4; j1 < 4; ++j1) {
            const double d0 = 0.5 * j0 - c[0], d1 = 0.5 * j1 - c[1];
            const auto v =
                st.field.values[static_cast<std::size_t>(g.flatten({j0, j1}))];
            if (d0 * d0 + d1 * d1 <= beta * beta) {
                CHECK(v.real() == doctest::Approx(amp).epsilon(1e-15));
                ++populated;
            } else {
                CHECK(v == std::complex<double>(0.0));
            }
        }
    CHECK(populated == count);

    // translating the center by one lattice step permutes the amplitudes
    const auto shifted = prepare_ball_state(g, {c[0] + 0.5, c[1]}, beta);
    for (int j0 = -3; j0 < 4; ++j0)
        for (int j1 = -4; j1 < 4; ++j1)
            CHECK(shifted.field
                      .values[static_cast<std::size_t>(g.flatten({j0, j1}))] ==
                  st.field.values[static_cast<std::size_t>(
                      g.flatten({j0 - 1, j1}))]);

    CHECK_THROWS_WITH_AS(prepare_ball_state(g, {1.8, 0.0}, 0.9),
                         "prepare_ball_state: ball exits grid",
                         std::invalid_argument);
    CHECK_THROWS_AS(prepare_ball_state(g, {-1.5, 0.0}, 0.6),
                    std::invalid_argument);
    // no lattice point within reach of an off-lattice center
    CHECK_THROWS_AS(prepare_ball_state(g, {0.25, 0.25}, 0.2),
                    std::invalid_argument);
    CHECK_THROWS_AS(prepare_ball_state(g, {0.0}, 0.5), std::invalid_argument);
}

TEST_CASE("radial oracle shells and labels") {
    const auto identity = RadialOracle::identity({0.0, 0.0}, 0.25);
    CHECK(identity.shell_of({0.1, 0.0}) == 0);
    CHECK(identity.shell_of({0.25, 0.0}) == 1);
    CHECK(identity.shell_of({0.0, -0.75}) == 3);
    CHECK(identity.shell_of({0.3, 0.4}) == 2);  // |x| = 0.5
    for (std::int64_t k : {0, 1, 7, 100})
        CHECK(identity.label(k) == static_cast<std::uint64_t>(k));

    const auto a = RadialOracle::scrambled_labels({0.0, 0.0}, 0.25, 11);
    const auto b = RadialOracle::scrambled_labels({0.0, 0.0}, 0.25, 12);
    std::set<std::uint64_t> seen_a, seen_b;
    bool keys_differ = false;
    for (std::int64_t k = 0; k < 64; ++k) {
        seen_a.insert(a.label(k));
        seen_b.insert(b.label(k));
        if (a.label(k) != b.label(k)) keys_differ = true;
        CHECK(a.label(k) == a.label(k));
    }
    CHECK(seen_a.size() == 64);  // distinct shells, distinct labels
    CHECK(seen_b.size() == 64);
    CHECK(keys_differ);

    CHECK_THROWS_AS(RadialOracle::identity({0.0}, 0.0), std::domain_error);
    CHECK_THROWS_AS(identity.shell_of({0.1}), std::invalid_argument);
}

TEST_CASE("oracle collapse on a single-shell state is the identity") {
    const auto g = GridSpec::make(1, 0.25, 16);
    const double amp = 1.0 / std::sqrt(2.0);
    const auto st = custom_state(g, {{{4}, amp}, {{-4}, amp}});  // |x| = 1
    const auto oracle = RadialOracle::identity({0.0}, 0.25);

    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto [label, post] = oracle_collapse(st, oracle, rng);
        CHECK(label == 4);
        CHECK(post.provenance == StateProvenance::PostOracleShell);
        for (std::size_t i = 0; i < post.field.values.size(); ++i)
            CHECK(std::abs(post.field.values[i] - st.field.values[i]) <
                  1e-12);
    }
}

TEST_CASE("oracle collapse samples shells by mass") {
    const auto g = GridSpec::make(1, 0.25, 16);
    // four one-point shells with exactly equal mass
    const auto st = custom_state(
        g, {{{1}, 0.5}, {{2}, 0.5}, {{3}, 0.5}, {{5}, 0.5}});
    const auto oracle = RadialOracle::identity({0.0}, 0.25);

    const int draws = 100000;
    Rng rng(913);
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < draws; ++i) {
        auto [label, post] = oracle_collapse(st, oracle, rng);
        ++counts[label];
        // collapsed state is the one-hot at the sampled point
        CHECK(post.field.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
        const int j = static_cast<int>(label);
        CHECK(std::abs(post.field.values[static_cast<std::size_t>(
                           g.flatten({j}))] -
                       std::complex<double>(1.0)) < 1e-12);
    }
    CHECK(counts.size() == 4);
    std::vector<double> observed, expected;
    for (std::uint64_t lab : {1ull, 2ull, 3ull, 5ull}) {
        observed.push_back(counts[lab]);
        expected.push_back(0.25 * draws);
    }
    const double stat = chi_square_statistic(observed, expected);
    CHECK(chi_square_pvalue(stat, 3) > 0.01);

    // identical seed reproduces the label sequence
    Rng r1(42), r2(42);
    for (int i = 0; i < 20; ++i)
        CHECK(oracle_collapse(st, oracle, r1).first ==
              oracle_collapse(st, oracle, r2).first);

    CHECK_THROWS_AS(
        oracle_collapse(st, RadialOracle::identity({0.0, 0.0}, 0.25), rng),
        std::invalid_argument);
    auto bad = st;
    bad.field.values[0] = 5.0;
    CHECK_THROWS_AS(oracle_collapse(bad, oracle, rng),
                    std::invalid_argument);
}

TEST_CASE("chi-square tail against closed forms") {
    // dof 1: Q = erfc(sqrt(s/2)), exercising both evaluation branches
    for (double s : {0.25, 0.5, 1.0, 4.0, 9.0})
        CHECK(chi_square_pvalue(s, 1) ==
              doctest::Approx(std::erfc(std::sqrt(0.5 * s))).epsilon(1e-12));
    // dof 2: Q = exp(-s/2)
    CHECK(chi_square_pvalue(4.605170185988091, 2) ==
          doctest::Approx(0.1).epsilon(1e-12));
    // dof 4: Q = exp(-x)(1 + x) at x = s/2
    CHECK(chi_square_pvalue(6.0, 4) ==
          doctest::Approx(std::exp(-3.0) * 4.0).epsilon(1e-12));
    CHECK(chi_square_pvalue(0.0, 7) == 1.0);
    CHECK(chi_square_pvalue(18.307038053275146, 10) ==
          doctest::Approx(0.05).epsilon(1e-6));
    CHECK_THROWS_AS(chi_square_pvalue(1.0, 0), std::domain_error);

    CHECK(chi_square_statistic({10, 20, 30}, {1, 2, 3}) ==
          doctest::Approx(0.0));
    CHECK(chi_square_statistic({12, 18, 30}, {10, 20, 30}) ==
          doctest::Approx(0.6).epsilon(1e-14));
    CHECK(chi_square_statistic({5, 0}, {5, 0}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(chi_square_statistic({1.0, 1.0}, {0.0, 0.0}),
                    std::domain_error);
    CHECK_THROWS_AS(chi_square_statistic({1.0}, {0.0}), std::domain_error);
}

TEST_CASE("measurement outcomes carry exact coefficient probabilities") {
    const auto g = GridSpec::make(2, 0.5, 8);
    const auto params = CurveletParams::make(2, 8.0, 1, 2);
    const auto st = random_state(g, 31);
    CurveletSampler sampler(st, params);
    CHECK(sampler.coefficients().total_energy() ==
          doctest::Approx(1.0).epsilon(1e-10));

    Rng rng(7);
    for (int i = 0; i < 40; ++i) {
        const auto out = sampler.sample(rng);
        // locate the sector in the directory and recompute its field
        const auto& secs = sampler.coefficients().sectors;
        std::size_t idx = secs.size();
        for (std::size_t s = 0; s < secs.size(); ++s)
            if (secs[s].s == out.s && secs[s].theta_index == out.theta_index) {
                idx = s;
                break;
            }
        REQUIRE(idx < secs.size());
        const auto gamma = sampler.coefficients().sector_field(idx);
        const auto v =
            gamma.values[static_cast<std::size_t>(g.flatten(out.b))];
        CHECK(out.probability ==
              doctest::Approx(std::norm(v)).epsilon(1e-12));
        CHECK(out.probability > 0.0);
        CHECK(out.theta.size() == secs[idx].theta.size());
    }
}

TEST_CASE("identical seed reproduces the outcome sequence") {
    const auto g = GridSpec::make(2, 0.5, 8);
    const auto params = CurveletParams::make(2, 8.0, 1, 2);
    const auto st = random_state(g, 88);
    CurveletSampler a(st, params), b(st, params);
    Rng ra(123), rb(123);
    for (int i = 0; i < 50; ++i) {
        const auto oa = a.sample(ra);
        const auto ob = b.sample(rb);
        CHECK(oa.s == ob.s);
        CHECK(oa.theta_index == ob.theta_index);
        CHECK(oa.b == ob.b);
        CHECK(oa.probability == ob.probability);
    }
    // one uniform per draw: an interleaved generator stays in lockstep
    Rng rc(123);
    (void)a.sample(rc);
    (void)rc.uniform();
    const auto third = a.sample(rc);
    Rng rd(123);
    (void)rd.uniform();
    (void)rd.uniform();
    const auto third_direct = b.sample(rd);
    CHECK(third.b == third_direct.b);
    CHECK(third.probability == third_direct.probability);
}

TEST_CASE("indicator one-hot spectrum lands in one sector uniformly") {
    const auto g = GridSpec::make(2, 0.5, 8);
    const auto params =
        CurveletParams::make(2, 8.0, 1, 2, CProfileKind::Indicator);
    // plane wave: spectrum is a delta at dual index (3, 1)
    QuantumState st;
    st.field = AmplitudeField::zeros(g, FieldDomain::Spatial);
    const auto k0 = g.frequency_point({3, 1});
    const double norm = 1.0 / 8.0;  // M^{-n/2}
    for (std::int64_t p = 0; p < g.points(); ++p) {
        const auto x = g.spatial_point(g.unflatten(p));
        const double phase = 2.0 * M_PI * (k0[0] * x[0] + k0[1] * x[1]);
        st.field.values[static_cast<std::size_t>(p)] =
            norm * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    REQUIRE(st.field.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

    CurveletSampler sampler(st, params);
    // the whole energy sits in one sector of the directory
    std::size_t live = 0;
    ScaleIndex live_s = ScaleIndex::coarse();
    for (const auto& sec : sampler.coefficients().sectors)
        if (sec.energy > 1e-12) {
            ++live;
            live_s = sec.s;
        }
    CHECK(live == 1);
    CHECK(live_s == ScaleIndex::regular(2));  // lambda |k0| = 6.32

    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        const auto out = sampler.sample(rng);
        CHECK(out.s == live_s);
        // a one-point spectrum makes every location equally likely
        CHECK(out.probability == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
    }
}

TEST_CASE("sampled frequencies match the coefficient distribution") {
    const auto g = GridSpec::make(2, 0.5, 8);
    const auto params = CurveletParams::make(2, 8.0, 1, 2);
    const auto st = random_state(g, 2024);
    CurveletSampler sampler(st, params);
    const auto& secs = sampler.coefficients().sectors;

    const int draws = 100000;
    Rng rng(600);
    std::vector<int> counts(secs.size(), 0);
    for (int i = 0; i < draws; ++i) {
        const auto out = sampler.sample(rng);
        std::size_t idx = secs.size();
        for (std::size_t s = 0; s < secs.size(); ++s)
            if (secs[s].s == out.s && secs[s].theta_index == out.theta_index) {
                idx = s;
                break;
            }
        REQUIRE(idx < secs.size());
        ++counts[idx];
    }
    std::vector<double> observed, expected;
    for (std::size_t s = 0; s < secs.size(); ++s) {
        observed.push_back(counts[s]);
        expected.push_back(secs[s].energy * draws);
        CHECK(secs[s].energy * draws > 5.0);  // every sector is well fed
    }
    const double stat = chi_square_statistic(observed, expected);
    CHECK(chi_square_pvalue(stat, static_cast<int>(secs.size()) - 1) > 0.01);
}

TEST_CASE("scale marginal dominates the small-scale bound for a ball state") {
    // ball of radius 5 with the matched radial scaling 2 pi beta e / n:
    // the mass at scales a <= 1/8 must clear (e eta / 14)(1 - 1/n)
    const int n = 3;
    const double beta = 5.0;
    const double lambda = 2.0 * M_PI * beta * std::exp(1.0) / n;
    const auto g = GridSpec::make(n, 0.75, 16);
    const auto params = CurveletParams::make(n, lambda, 1, 4);
    const auto st = prepare_ball_state(g, {0.0, 0.0, 0.0}, beta);

    CurveletSampler sampler(st, params);
    const double eta = 0.125;
    const double bound = std::exp(1.0) * eta / 14.0 * (1.0 - 1.0 / n);
    double marginal = 0.0;
    for (const auto& sec : sampler.coefficients().sectors)
        if (params.scale_of(sec.s) <= eta) marginal += sec.energy;
    CHECK(marginal >= bound);

    const int draws = 5000;
    Rng rng(17);
    int hits = 0;
    for (int i = 0; i < draws; ++i)
        if (params.scale_of(sampler.sample(rng).s) <= eta) ++hits;
    const double freq = static_cast<double>(hits) / draws;
    const double sigma3 =
        3.0 * std::sqrt(marginal * (1.0 - marginal) / draws);
    CHECK(std::abs(freq - marginal) <= sigma3);
}

TEST_CASE("direction marginal of a radial state is lattice-symmetric") {
    // radial gaussian: the four-fold lattice rotation fixes the state, so
    // directions in the same rotation orbit carry equal probability
    const auto g = GridSpec::make(2, 0.5, 16);
    QuantumState st;
    st.field = AmplitudeField::zeros(g, FieldDomain::Spatial);
    for (std::int64_t p = 0; p < g.points(); ++p) {
        const auto x = g.spatial_point(g.unflatten(p));
        st.field.values[static_cast<std::size_t>(p)] =
            std::exp(-2.0 * (x[0] * x[0] + x[1] * x[1]));
    }
    const double inv = 1.0 / std::sqrt(st.field.norm_sq());
    for (auto& v : st.field.values) v *= inv;

    const auto params = CurveletParams::make(2, 8.0, 1, 3);
    CurveletSampler sampler(st, params);
    const auto& secs = sampler.coefficients().sectors;

    // directory energies agree within each 90-degree orbit
    // s = 2: four directions, one orbit; s = 3: eight directions, two orbits
    std::map<int, std::map<std::int64_t, double>> energy;
    for (const auto& sec : secs)
        if (sec.s.kind == ScaleIndex::Kind::Regular &&
            (sec.s.s == 2 || sec.s.s == 3))
            energy[sec.s.s][sec.theta_index] = sec.energy;
    REQUIRE(energy[2].size() == 4);
    REQUIRE(energy[3].size() == 8);
    for (int t = 0; t < 4; ++t)
        CHECK(energy[2][t] ==
              doctest::Approx(energy[2][0]).epsilon(1e-2));
    for (int t = 0; t < 8; t += 2)
        CHECK(energy[3][t] ==
              doctest::Approx(energy[3][0]).epsilon(1e-2));
    for (int t = 1; t < 8; t += 2)
        CHECK(energy[3][t] ==
              doctest::Approx(energy[3][1]).epsilon(1e-2));

    // empirical direction counts at s = 3 match the directory
    const int draws = 40000;
    Rng rng(909);
    std::map<std::int64_t, int> counts;
    for (int i = 0; i < draws; ++i) {
        const auto out = sampler.sample(rng);
        if (out.s == ScaleIndex::regular(3)) ++counts[out.theta_index];
    }
    std::vector<double> observed, expected;
    for (int t = 0; t < 8; ++t) {
        observed.push_back(counts[t]);
        expected.push_back(energy[3][t]);
    }
    const double stat = chi_square_statistic(observed, expected);
    CHECK(chi_square_pvalue(stat, 7) > 0.01);
}
