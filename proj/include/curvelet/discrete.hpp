#pragma once

// Discrete curvelet transform on a periodic grid.
//
// Spatial grid Z = (sigma Z)^n cut to [-L, L)^n, M = 2L/sigma points per
// axis; the dual grid has spacing 1/(2L) and lives in [-1/(2 sigma),
// 1/(2 sigma))^n.  A unitary DFT carries fields between the two.
// Frequency space is tiled by dyadic radial windows and direction bumps
// on nested spherical grids; the squared windows sum to one at every
// frequency, so the transform is an isometry and the adjoint inverts it.

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "curvelet/radial.hpp"
#include "curvelet/windows.hpp"

namespace curvelet {

struct CurveletParams {
    int n = 0;
    double lambda = 1.0;  // radial scaling: band s covers lambda*|k| ~ 2^s
    int s_min = 1;
    int s_max = 1;
    CProfileKind profile = CProfileKind::PlainCosine;

    static CurveletParams make(int n, double lambda, int s_min, int s_max,
                               CProfileKind kind = CProfileKind::PlainCosine);
    // a = 2^{-s}; the coarse and fine catch-alls map to the dyadic scale
    // just outside the regular range
    double scale_of(const ScaleIndex& s) const;
    std::vector<ScaleIndex> all_scales() const;
};

enum class FieldDomain { Spatial, Frequency };

struct GridSpec {
    int n = 0;
    double sigma = 1.0;  // spatial spacing
    double L = 0.0;      // half-extent; M = 2L/sigma exactly
    int M = 0;           // points per axis, even

    static GridSpec make(int n, double sigma, int M);
    std::int64_t points() const;  // M^n

    // axis-major flat layout, last axis fastest; per-axis integer
    // coordinates j run over [-M/2, M/2)
    std::int64_t flatten(const std::vector<int>& j) const;
    std::vector<int> unflatten(std::int64_t flat) const;
    std::vector<double> spatial_point(const std::vector<int>& j) const;    // sigma j
    std::vector<double> frequency_point(const std::vector<int>& j) const;  // j/(2L)

    bool operator==(const GridSpec&) const = default;
};

struct AmplitudeField {
    GridSpec grid;
    FieldDomain domain = FieldDomain::Spatial;
    std::vector<std::complex<double>> values;  // grid.points() entries

    static AmplitudeField zeros(const GridSpec& grid, FieldDomain domain);
    double norm_sq() const;  // compensated summation
};

// unitary centered DFT: forward takes spatial to frequency with kernel
// e^{-2 pi i k.x} and normalization M^{-n/2}; inverse is its adjoint
AmplitudeField dft_forward(const AmplitudeField& field);
AmplitudeField dft_inverse(const AmplitudeField& field);

// one (scale, direction) term of the frequency-space tiling at a point.
// theta is empty for the coarse and fine scales (no direction resolved).
struct FrequencyComponent {
    ScaleIndex s;
    SphericalDirection theta;
    double weight = 0.0;
};

// expands a frequency-space point into the window terms covering it.
// Smooth family: radial weight times the per-register direction bumps,
// at most two branches per register, so at most 2^n terms; squared
// weights sum to 1.  Coincidences (the point exactly on a seam or a grid
// direction) snap to a single branch of weight 1, with relative
// tolerance 1e-12.  Indicator family: always a single term of weight 1,
// the tile containing the point.
std::vector<FrequencyComponent> decompose_frequency(
    const std::vector<double>& k, const CurveletParams& params);

// direct evaluation of the window for one sector; agrees with the weight
// decompose_frequency assigns that sector to within 1e-12 (exactly zero
// when the sector is absent from the decomposition)
double chi_discrete(const ScaleIndex& s, const SphericalDirection& theta,
                    const std::vector<double>& k,
                    const CurveletParams& params);

struct SectorInfo {
    ScaleIndex s;
    SphericalDirection theta;      // empty for coarse/fine
    std::int64_t theta_index = -1; // position in sphere_grid(s, n); -1 if none
    double energy = 0.0;           // sum over b of |coefficient|^2
    std::int64_t support = 0;      // dual grid points with nonzero weight
};

// Coefficients of the discrete transform.  The set keeps the input's
// frequency side plus a sector directory; individual coefficient fields
// (dense over all b on the same grid) are materialized on demand, which
// keeps memory linear in the grid size rather than in sector count.
struct CurveletCoefficientSet {
    GridSpec grid;
    CurveletParams params;
    AmplitudeField spectrum;  // frequency domain
    std::vector<SectorInfo> sectors;

    double total_energy() const;
    // Gamma(s, ., theta) for one sector: inverse DFT of spectrum * window
    AmplitudeField sector_field(std::size_t sector_index) const;
};

CurveletCoefficientSet curvelet_forward(const AmplitudeField& field,
                                        const CurveletParams& params);

// adjoint of the forward map; reconstructs the input exactly (up to
// roundoff) because the squared windows sum to one
AmplitudeField curvelet_adjoint(const CurveletCoefficientSet& coeffs);

struct AdequacyReport {
    bool contained = false;     // spatial support fits inside the box
    bool bandwidth_ok = false;  // required resolution below the Nyquist limit
    double spatial_radius = 0;  // support radius of f, with decay margin
    double center_radius = 0;   // center displacement that was checked
    double required_bandwidth = 0;
    double nyquist = 0;         // 1/(2 sigma)
    double captured_mass = 0;   // certified lower bound, dual-box spectral mass
    double mass_deficit = 0;
    bool ok() const { return contained && bandwidth_ok; }
};

// checks that a grid is fine and wide enough for a profile: containment
// of the spatial support (allowing the center anywhere within
// center_radius of the origin) and the bandwidth condition.  When eta is
// finite the bandwidth requirement is 100/(lambda eta); otherwise shells
// require 100/delta and other profiles the top of the finest band.
AdequacyReport discretization_adequacy(
    const RadialProfile& p, const GridSpec& grid, const CurveletParams& params,
    double center_radius = 0.0,
    double eta = std::numeric_limits<double>::quiet_NaN());

}  // namespace curvelet
