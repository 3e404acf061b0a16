#pragma once

// Classical simulation of the quantum measurement pipeline: grid states
// with amplitudes proportional to function values, collapse under a
// radial-oracle value measurement, and exact sampling of (scale,
// direction, location) outcomes from the squared transform coefficients.
//
// Sampling discipline: every draw consumes exactly one uniform variate
// from the caller's counter-based generator, so a fixed seed reproduces
// the full outcome sequence.

#include <cstdint>
#include <utility>
#include <vector>

#include "curvelet/discrete.hpp"
#include "curvelet/rng.hpp"

namespace curvelet {

enum class StateProvenance { BallSample, PostOracleShell, Custom };

struct QuantumState {
    AmplitudeField field;  // spatial domain, unit norm within 1e-12
    StateProvenance provenance = StateProvenance::Custom;
};

// black box constant on concentric shells {x : k delta <= |x-c| < (k+1) delta};
// values are opaque labels that never expose the center
struct RadialOracle {
    std::vector<double> center;
    double delta = 0.0;
    bool scrambled = false;
    std::uint64_t key = 0;

    static RadialOracle identity(std::vector<double> center, double delta);
    // labels drawn from a keyed bijective mix of the shell index, so
    // distinct shells get distinct but meaningless values
    static RadialOracle scrambled_labels(std::vector<double> center,
                                         double delta, std::uint64_t key);

    std::int64_t shell_of(const std::vector<double>& x) const;
    std::uint64_t label(std::int64_t shell) const;
};

struct MeasurementOutcome {
    ScaleIndex s;
    SphericalDirection theta;       // empty for coarse/fine
    std::int64_t theta_index = -1;  // index into sphere_grid(s, n), -1 if none
    std::vector<int> b;             // grid coordinates of the location register
    double probability = 0.0;       // |Gamma(s, b, theta)|^2 of the state
};

// uniform superposition over the grid points inside the closed ball
// |x - center| <= beta; throws if the ball exits [-L, L)^n or contains
// no grid point
QuantumState prepare_ball_state(const GridSpec& grid,
                                const std::vector<double>& center,
                                double beta);

// measures the oracle value register: samples a shell with probability
// equal to the state's mass on it (one uniform draw), returns the opaque
// label and the renormalized restriction to that shell
std::pair<std::uint64_t, QuantumState> oracle_collapse(
    const QuantumState& state, const RadialOracle& oracle, Rng& rng);

// Exact categorical sampler over measurement outcomes, with probabilities
// |Gamma(s, b, theta)|^2 from the discrete transform.  Construction runs
// the forward transform once; per-sector location tables are cached on
// first use, so repeated draws are cheap.
class CurveletSampler {
   public:
    CurveletSampler(const QuantumState& state, const CurveletParams& params);

    const CurveletCoefficientSet& coefficients() const { return coeffs_; }
    // one uniform draw against cumulative sector energies, then the
    // within-sector cumulative over locations
    MeasurementOutcome sample(Rng& rng);

   private:
    const std::vector<double>& sector_probs(std::size_t sector);

    CurveletCoefficientSet coeffs_;
    double total_ = 0.0;
    std::vector<double> sector_cum_;
    std::vector<std::vector<double>> probs_;   // lazily filled per sector
    std::vector<std::vector<double>> blocks_;  // per-sector block sums
};

// single-draw convenience wrapper around CurveletSampler
MeasurementOutcome measure_curvelet(const QuantumState& state,
                                    const CurveletParams& params, Rng& rng);

// upper tail of the chi-square distribution: the p-value of a goodness of
// fit statistic with the given degrees of freedom
double chi_square_pvalue(double statistic, int dof);

// chi-square statistic for observed counts against expected counts
// (expected need not be normalized; bins with expected <= 0 must have
// zero observations)
double chi_square_statistic(const std::vector<double>& observed,
                            const std::vector<double>& expected);

}  // namespace curvelet
