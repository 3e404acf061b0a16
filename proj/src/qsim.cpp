#include "curvelet/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "curvelet/quadrature.hpp"

namespace curvelet {

namespace {

constexpr std::size_t kBlock = 512;

// bijective 64-bit mixer (splitmix64 finalizer)
std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

void require_unit_norm(const QuantumState& state) {
    if (state.field.domain != FieldDomain::Spatial)
        throw std::invalid_argument("quantum state must live on the spatial grid");
    if (std::fabs(state.field.norm_sq() - 1.0) > 1e-9)
        throw std::invalid_argument("quantum state is not unit norm");
}

}  // namespace

RadialOracle RadialOracle::identity(std::vector<double> center, double delta) {
    if (!(delta > 0.0))
        throw std::domain_error("radial oracle: delta must be positive");
    return {std::move(center), delta, false, 0};
}

RadialOracle RadialOracle::scrambled_labels(std::vector<double> center,
                                            double delta, std::uint64_t key) {
    if (!(delta > 0.0))
        throw std::domain_error("radial oracle: delta must be positive");
    return {std::move(center), delta, true, key};
}

std::int64_t RadialOracle::shell_of(const std::vector<double>& x) const {
    if (x.size() != center.size())
        throw std::invalid_argument("radial oracle: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = x[i] - center[i];
        d2 += t * t;
    }
    return static_cast<std::int64_t>(std::floor(std::sqrt(d2) / delta));
}

std::uint64_t RadialOracle::label(std::int64_t shell) const {
    if (!scrambled) return static_cast<std::uint64_t>(shell);
    return mix64(mix64(key) ^ static_cast<std::uint64_t>(shell));
}

QuantumState prepare_ball_state(const GridSpec& grid,
                                const std::vector<double>& center,
                                double beta) {
    if (static_cast<int>(center.size()) != grid.n)
        throw std::invalid_argument("prepare_ball_state: dimension mismatch");
    if (!(beta > 0.0))
        throw std::domain_error("prepare_ball_state: beta must be positive");
    for (double c : center)
        if (c - beta < -grid.L || c + beta >= grid.L)
            throw std::invalid_argument("prepare_ball_state: ball exits grid");

    QuantumState state;
    state.field = AmplitudeField::zeros(grid, FieldDomain::Spatial);
    state.provenance = StateProvenance::BallSample;

    const std::int64_t N = grid.points();
    std::int64_t count = 0;
    const double beta2 = beta * beta;
    for (std::int64_t p = 0; p < N; ++p) {
        const auto x = grid.spatial_point(grid.unflatten(p));
        double d2 = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const double t = x[i] - center[i];
            d2 += t * t;
        }
        if (d2 <= beta2) {
            state.field.values[static_cast<std::size_t>(p)] = 1.0;
            ++count;
        }
    }
    if (count == 0)
        throw std::invalid_argument(
            "prepare_ball_state: ball contains no grid point");
    const double amp = 1.0 / std::sqrt(static_cast<double>(count));
    for (auto& v : state.field.values)
        if (v.real() != 0.0) v = amp;
    return state;
}

std::pair<std::uint64_t, QuantumState> oracle_collapse(
    const QuantumState& state, const RadialOracle& oracle, Rng& rng) {
    require_unit_norm(state);
    const GridSpec& grid = state.field.grid;
    if (static_cast<int>(oracle.center.size()) != grid.n)
        throw std::invalid_argument("oracle_collapse: dimension mismatch");

    const std::int64_t N = grid.points();
    std::map<std::int64_t, KahanSum> mass;
    std::vector<std::int64_t> shell_of_point(static_cast<std::size_t>(N), -1);
    for (std::int64_t p = 0; p < N; ++p) {
        const auto& v = state.field.values[static_cast<std::size_t>(p)];
        const double m = std::norm(v);
        if (m == 0.0) continue;
        const std::int64_t k =
            oracle.shell_of(grid.spatial_point(grid.unflatten(p)));
        shell_of_point[static_cast<std::size_t>(p)] = k;
        mass[k].add(m);
    }

    KahanSum total;
    for (const auto& [k, m] : mass) total.add(m.value());
    const double u = rng.uniform() * total.value();

    std::int64_t chosen = mass.rbegin()->first;
    double chosen_mass = mass.rbegin()->second.value();
    double acc = 0.0;
    for (const auto& [k, m] : mass) {
        acc += m.value();
        if (u < acc) {
            chosen = k;
            chosen_mass = m.value();
            break;
        }
    }

    QuantumState out;
    out.field = AmplitudeField::zeros(grid, FieldDomain::Spatial);
    out.provenance = StateProvenance::PostOracleShell;
    const double scale = 1.0 / std::sqrt(chosen_mass);
    for (std::int64_t p = 0; p < N; ++p)
        if (shell_of_point[static_cast<std::size_t>(p)] == chosen)
            out.field.values[static_cast<std::size_t>(p)] =
                state.field.values[static_cast<std::size_t>(p)] * scale;
    return {oracle.label(chosen), std::move(out)};
}

CurveletSampler::CurveletSampler(const QuantumState& state,
                                 const CurveletParams& params) {
    require_unit_norm(state);
    coeffs_ = curvelet_forward(state.field, params);
    sector_cum_.reserve(coeffs_.sectors.size());
    KahanSum cum;
    for (const auto& sec : coeffs_.sectors) {
        cum.add(sec.energy);
        sector_cum_.push_back(cum.value());
    }
    total_ = cum.value();
    if (!(total_ > 0.0))
        throw std::invalid_argument("sampler: state has no coefficient mass");
    probs_.resize(coeffs_.sectors.size());
    blocks_.resize(coeffs_.sectors.size());
}

const std::vector<double>& CurveletSampler::sector_probs(std::size_t sector) {
    auto& probs = probs_[sector];
    if (!probs.empty()) return probs;
    const AmplitudeField gamma = coeffs_.sector_field(sector);
    probs.resize(gamma.values.size());
    auto& blocks = blocks_[sector];
    blocks.assign((probs.size() + kBlock - 1) / kBlock, 0.0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = std::norm(gamma.values[i]);
        blocks[i / kBlock] += probs[i];
    }
    return probs;
}

MeasurementOutcome CurveletSampler::sample(Rng& rng) {
    const double u = rng.uniform() * total_;

    std::size_t sector =
        std::upper_bound(sector_cum_.begin(), sector_cum_.end(), u) -
        sector_cum_.begin();
    if (sector >= coeffs_.sectors.size()) {
        sector = coeffs_.sectors.size() - 1;
        while (sector > 0 && coeffs_.sectors[sector].energy <= 0.0) --sector;
    }
    double local = u - (sector > 0 ? sector_cum_[sector - 1] : 0.0);

    const auto& probs = sector_probs(sector);
    const auto& blocks = blocks_[sector];
    std::size_t block = 0;
    while (block + 1 < blocks.size() && local >= blocks[block]) {
        local -= blocks[block];
        ++block;
    }
    std::size_t j = block * kBlock;
    const std::size_t end = std::min(probs.size(), j + kBlock);
    double acc = 0.0;
    std::size_t last_positive = probs.size();
    for (std::size_t i = j; i < end; ++i) {
        if (probs[i] > 0.0) last_positive = i;
        acc += probs[i];
        if (local < acc) {
            j = i;
            break;
        }
        j = end;
    }
    if (j >= end) {
        // fell off the cumulative tail by roundoff; take the last live bin
        if (last_positive >= probs.size()) {
            std::size_t i = end;
            while (i > 0 && probs[i - 1] <= 0.0) --i;
            last_positive = (i > 0) ? i - 1 : 0;
        }
        j = last_positive;
    }

    const SectorInfo& sec = coeffs_.sectors[sector];
    MeasurementOutcome out;
    out.s = sec.s;
    out.theta = sec.theta;
    out.theta_index = sec.theta_index;
    out.b = coeffs_.grid.unflatten(static_cast<std::int64_t>(j));
    out.probability = probs[j];
    return out;
}

MeasurementOutcome measure_curvelet(const QuantumState& state,
                                    const CurveletParams& params, Rng& rng) {
    CurveletSampler sampler(state, params);
    return sampler.sample(rng);
}

namespace {

// regularized incomplete gamma P(a, x) by series, Q(a, x) by Lentz
// continued fraction
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_pvalue(double statistic, int dof) {
    if (dof <= 0) throw std::domain_error("chi_square_pvalue: dof must be > 0");
    if (!(statistic > 0.0)) return 1.0;
    const double a = 0.5 * dof;
    const double x = 0.5 * statistic;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double chi_square_statistic(const std::vector<double>& observed,
                            const std::vector<double>& expected) {
    if (observed.size() != expected.size())
        throw std::invalid_argument("chi_square_statistic: size mismatch");
    double n_obs = 0.0, n_exp = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        n_obs += observed[i];
        n_exp += expected[i];
    }
    if (!(n_exp > 0.0))
        throw std::domain_error("chi_square_statistic: expected sums to zero");
    const double scale = n_obs / n_exp;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected[i] * scale;
        if (e <= 0.0) {
            if (observed[i] != 0.0)
                throw std::domain_error(
                    "chi_square_statistic: observation in a zero-mass bin");
            continue;
        }
        const double d = observed[i] - e;
        stat += d * d / e;
    }
    return stat;
}

}  // namespace curvelet
