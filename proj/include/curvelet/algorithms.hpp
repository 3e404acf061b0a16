#pragma once
// Center-finding from curvelet measurements.  A radial function (a ball
// indicator, or the shell selected by one oracle evaluation) concentrates
// its curvelet transform near lines through its center; measuring (a, b,
// theta) and intersecting one or two such lines recovers the center.
//
// Three drivers are provided.  The single-measurement driver guesses a
// point on the measured line at a uniformly placed offset.  The
// two-measurement driver triangulates the closest point between two
// measured lines obtained from independent shell collapses.  The
// iterative driver repeats the two-line round with a shrinking radius
// until the target accuracy is met.
//
// Measurements can be drawn either from a grid-state simulation
// (quantum_sim machinery) or from the continuous model, where (a, b,
// theta) follows the exact transform-squared density of the radial
// profile: the scale marginal by quadrature of the scale density, and
// b given (a, theta) by inverse-CDF tables over the two resolved
// coordinates (along theta and the transverse radius).
//
// Classical counterparts for comparison: the k-sample averaging
// baseline, the exact query-count threshold ell_min with its failure
// certificate, and an empirical decision-tree strategy run against the
// scrambled-label adversary.

#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <vector>

#include "curvelet/qsim.hpp"
#include "curvelet/radial.hpp"
#include "curvelet/rng.hpp"

namespace curvelet {

struct BallInstance {
    std::vector<double> center;
    double beta = 0;  // ball radius
};

// Shared knobs for the three drivers.  Derived quantities (eta, lambda,
// the guess half-width Q3) follow fixed formulas from these fields
// unless an explicit override is set.
struct AlgorithmConfig {
    int n = 4;
    double R = 1.0;           // promised bound on |center|
    double mu = 0.0;          // target accuracy; success means distance <= mu
    double delta = 0.0;       // oracle shell resolution (shell drivers)
    double beta_tilde = 0.0;  // promised upper bound on the ball radius
    double Q1 = 0.0;          // slack added to the perp variance constant
    double Q2 = 0.0;          // slack added to the para variance constant
    double Q3 = 0.0;          // guess half-width; 0 -> sqrt(3 (242 + Q2/n))
    int s_min = 1;            // grid-state transform scales
    int s_max = 0;            // 0 -> ceil(lg(1/eta)) + 3
    std::uint64_t seed = 0;
    int trials = 1;
    double eta_override = 0.0;    // 0 -> the driver's scale-cutoff formula
    double sigma_override = 0.0;  // grid-state spacing; 0 -> delta / 400
    double regime_slack = 1.0;    // >= 1 widens the parameter-regime checks
    bool sample_conditional = false;  // continuous mode: draw a <= eta only,
                                      // report the answer probability exactly
};

struct MeasurementRecord {
    double a = 0.0;
    std::vector<double> b;
    std::vector<double> theta;
    std::int64_t shell = -1;     // shell drivers: measured oracle shell index
    bool shell_complete = true;  // annulus fully inside the sampled ball
    bool answered = false;
};

struct RunResult {
    bool answered = false;
    std::vector<double> point;
    double distance = std::numeric_limits<double>::quiet_NaN();
    bool success = false;  // answered and distance <= mu
    std::int64_t queries = 0;
    int iterations = 0;              // iterative driver only
    double answer_probability = 0;   // exact Pr[a <= eta] when known
    std::vector<MeasurementRecord> rounds;
};

// Derived driver parameters (exposed for tests and reports).
double single_line_eta(const AlgorithmConfig& cfg);    // mu^2/(6 bt^2 (14300 + Q1/n))
double single_line_lambda(const AlgorithmConfig& cfg); // 2 pi bt e / n
double guess_halfwidth(const AlgorithmConfig& cfg);    // Q3 or its formula
double two_line_eta(double delta, double beta_tilde, int n);   // (delta/bt)(n-2)/e
double two_line_lambda(double beta_tilde, int n);              // 2 pi bt e/(n-2)
int scale_cap(double eta);                             // ceil(lg(1/eta)) + 3

// Closest point to the first line among points nearest the second:
// with r = t1.t2, s = t1.(b1-b2), t = t2.(b1-b2), the returned point is
// b1 + ((-s + r t)/(1 - r^2)) t1.  Throws std::domain_error when the
// directions are parallel (|r| too close to 1).
std::vector<double> closest_point_between_lines(const std::vector<double>& b1,
                                                const std::vector<double>& t1,
                                                const std::vector<double>& b2,
                                                const std::vector<double>& t2);

// Continuous-model sampler for (a, b) given a radial profile: a is drawn
// from the exact scale marginal restricted to (0, eta], then (b.theta,
// |b_perp|) from a quadrature-built table of the reduced transform
// density at a quantized representative scale.  Tables are built lazily
// per scale cell and reused across draws; each carries the fraction of
// conditional mass its window captured.
class RadialMeasurementSampler {
  public:
    struct Options {
        int a_cells = 5;              // geometric cells [eta/2^k, eta/2^{k-1}]
        int b_par_cells = 40;
        int b_perp_cells = 20;
        double par_halfwidth = 0.0;   // 0 -> auto from the profile support
        double perp_halfwidth = 0.0;  // 0 -> auto from the conditional moment
        double points_per_period = 10.0;
        double capture_floor = 0.85;  // rebuild wider until this is met
    };

    RadialMeasurementSampler(RadialProfile profile, double lambda, double eta);
    RadialMeasurementSampler(RadialProfile profile, double lambda, double eta,
                             Options opt);

    double accept_probability() const { return accept_; }  // Pr[a <= eta]
    double eta() const { return eta_; }
    double lambda() const { return lambda_; }
    const RadialProfile& profile() const { return profile_; }

    // Draws (a, b) with a <= eta; b is assembled around `center` along
    // the supplied unit direction.  Consumes a variable number of
    // uniforms.  The record's `answered` is always true.
    MeasurementRecord draw_conditional(const std::vector<double>& center,
                                       const std::vector<double>& theta,
                                       Rng& rng);
    // Unconditional draw: answers with probability accept_probability().
    bool draw(const std::vector<double>& center,
              const std::vector<double>& theta, Rng& rng,
              MeasurementRecord& out);

    // Diagnostics / test hooks: the piecewise-constant density of
    // (b.theta, |b_perp|) in the given scale cell (transverse sphere
    // integrated out), the cell's representative scale, per-cell
    // conditional mass, and the smallest capture fraction seen so far.
    int cell_count() const { return int(cells_.size()); }
    int cell_of_scale(double a) const;
    double cell_representative(int cell) const;
    double cell_mass(int cell) const;
    double table_density(int cell, double b_par, double b_perp);
    double captured_fraction_min() const;

  private:
    struct Table {
        bool built = false;
        double rep_a = 0;
        double par_lo = 0, dpar = 0;
        double perp_hi = 0, dperp = 0;
        int npar = 0, nperp = 0;
        std::vector<double> prob;  // row-major [par][perp], sums to 1
        std::vector<double> cum;
        double captured = 0;
    };
    struct Cell {
        double lo = 0, hi = 0;
        double mass = 0;  // Pr[lo < a <= hi]
        Table table;
    };

    void build_table(Cell& cell);

    RadialProfile profile_;
    double lambda_ = 0;
    double eta_ = 0;
    Options opt_;
    double accept_ = 0;
    double perp_scale_ = 0;  // sqrt E(|b_perp|^2 | a <= eta)
    std::vector<Cell> cells_;
};

// ---- single-line driver ------------------------------------------------

// Reusable runner: one ball shape, many centers.  The measurement tables
// are shared across calls; the center only translates the drawn b.
class BallCenterRunner {
  public:
    BallCenterRunner(double beta, const AlgorithmConfig& cfg);
    RunResult run(const std::vector<double>& center, Rng& rng);
    double answer_probability() const { return sampler_->accept_probability(); }
    RadialMeasurementSampler& sampler() { return *sampler_; }

  private:
    AlgorithmConfig cfg_;
    double eta_ = 0;
    std::unique_ptr<RadialMeasurementSampler> sampler_;
};

// One-shot continuous run (builds a fresh runner; prefer BallCenterRunner
// for repeated trials).
RunResult algorithm1(const BallInstance& instance, const AlgorithmConfig& cfg,
                     Rng& rng);
// Grid-state run: measures the supplied state directly.  true_center is
// simulation plumbing for scoring only.
RunResult algorithm1(const QuantumState& state,
                     const std::vector<double>& true_center,
                     const AlgorithmConfig& cfg, Rng& rng);

// ---- two-line and iterative drivers -------------------------------------

// Shell-collapse engine in the continuous model.  One instance caches
// per-shell acceptance probabilities and quantized measurement tables
// across trials and rounds.  The oracle resolution delta and the config
// are fixed at construction; the center varies per call.
class ShellAlgorithmEngine {
  public:
    ShellAlgorithmEngine(double delta, const AlgorithmConfig& cfg);

    // Two-line triangulation at sampling radius R' = n R.
    RunResult two_line_run(const std::vector<double>& center, Rng& rng);
    // One recentered round at sampling radius R' = n S R around p.
    RunResult one_round(double R, const std::vector<double>& p, double S,
                        const std::vector<double>& center, Rng& rng);
    // Iterative refinement; stops when the working radius drops below mu.
    RunResult iterate(const std::vector<double>& center, Rng& rng);

    static int iteration_bound(double R, double mu);  // ceil(lg lg (2R/mu))

  private:
    struct LineDraw {
        bool answered = false;
        MeasurementRecord rec;
    };
    LineDraw measure_line(double Rprime, const std::vector<double>& eff_center,
                          double beta_tilde, Rng& rng);
    RadialMeasurementSampler& sampler_for(double beta_q, double beta_tilde);

    double delta_ = 0;
    AlgorithmConfig cfg_;
    std::map<std::pair<long long, long long>, double> shell_accept_;
    std::map<std::pair<long long, long long>,
             std::unique_ptr<RadialMeasurementSampler>>
        samplers_;
};

// One-shot wrappers around a fresh engine (oracle carries center+delta).
RunResult algorithm2(const RadialOracle& oracle, const AlgorithmConfig& cfg,
                     Rng& rng);
RunResult one_round(double R, const std::vector<double>& p, double S,
                    const RadialOracle& oracle, const AlgorithmConfig& cfg,
                    Rng& rng);
RunResult algorithm3(const RadialOracle& oracle, const AlgorithmConfig& cfg,
                     Rng& rng);

// Grid-state two-line run: prepares the uniform ball state on an actual
// grid, collapses it through the oracle, and measures the discrete
// transform.  Requires sigma_override (the formula spacing delta/400 is
// far below any tractable grid); throws when the grid would exceed 2^21
// points.
RunResult algorithm2_grid(const RadialOracle& oracle,
                          const AlgorithmConfig& cfg, Rng& rng);

// ---- classical comparisons ----------------------------------------------

// Mean of k uniform samples from the ball.
std::vector<double> classical_average_baseline(const BallInstance& instance,
                                               int k, Rng& rng);

struct LowerBoundReport {
    int ell_min = 0;           // smallest ell with ell! >= (R/mu)^n
    double m = 0;              // lg(R/mu)
    double query_budget = 0;   // (n m / 2) / lg(n m / 2)
    double failure_exponent = 0;  // n m / 2
    double failure_bound = 0;     // 1 - 2^{-n m / 2}
};

// Exact factorial-vs-power threshold (log comparison with an integer
// fallback when the margin is ambiguous) plus the matching failure
// certificate for query budgets below it.
LowerBoundReport classical_query_lower_bound(int n, double R, double mu);

// Empirical failure rate of a collision-exploiting decision-tree
// strategy allowed `queries` oracle evaluations against the hard
// distribution: center uniform in the ball of radius R, shell labels
// scrambled per trial.  Guesses the collision midpoint when two queries
// land in the same shell, the center of mass of the prior otherwise.
double decision_tree_failure_rate(int n, double R, double mu, double delta,
                                  int queries, int trials, Rng& rng);

}  // namespace curvelet
