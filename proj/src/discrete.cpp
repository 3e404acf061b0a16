#include "curvelet/discrete.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "curvelet/geometry.hpp"
#include "curvelet/quadrature.hpp"

namespace curvelet {

namespace {

constexpr double kSnapTol = 1e-12;

int half_count(int s) { return 1 << ((s + 1) / 2); }  // 2^{ceil(s/2)}

// grid angle for integer step t, bitwise identical to sphere_grid's values;
// on the circle t is taken mod 2g and wrapped into (-pi, pi]
double grid_angle(int t, int g, bool circle) {
    const double h = M_PI / g;  // exact: g is a power of two
    if (!circle) return t * h;
    t %= 2 * g;
    if (t < 0) t += 2 * g;
    double ang = t * h;
    if (ang > M_PI) ang -= 2.0 * M_PI;
    return ang;
}

// nearest-integer snap with the tolerance the decomposition promises
bool snap_integer(double t, int& out) {
    const double r = std::round(t);
    if (std::fabs(t - r) <= kSnapTol * std::max(1.0, std::fabs(t))) {
        out = static_cast<int>(r);
        return true;
    }
    return false;
}

struct AngularBranch {
    SphericalDirection dir;
    std::vector<int> key;  // integer steps, -1 for undef registers
    double weight = 1.0;
};

// walk the direction registers, splitting into the (at most two) grid
// neighbors per register; a pole ends the walk with the tail undef
std::vector<AngularBranch> angular_branches(int s,
                                            const SphericalDirection& phi,
                                            CProfileKind kind) {
    const int g = half_count(s);
    const int regs = static_cast<int>(phi.size());
    std::vector<AngularBranch> acc = {
        {SphericalDirection{}, std::vector<int>{}, 1.0}};
    acc.front().dir.reserve(regs);
    acc.front().key.reserve(regs);

    for (int j = 0; j < regs; ++j) {
        const bool last = (j + 1 == regs);
        std::vector<AngularBranch> next;
        next.reserve(2 * acc.size());
        for (auto& br : acc) {
            const bool engaged =
                br.dir.empty() ||
                (br.dir.back().has_value() && *br.dir.back() != 0.0 &&
                 *br.dir.back() != M_PI);
            if (!engaged || !phi[j].has_value()) {
                br.dir.push_back(std::nullopt);
                br.key.push_back(-1);
                next.push_back(std::move(br));
                continue;
            }
            const double t = *phi[j] * g / M_PI;
            int tc = 0;
            if (snap_integer(t, tc)) {
                AngularBranch b = br;
                b.dir.push_back(grid_angle(tc, g, last));
                b.key.push_back(last ? ((tc % (2 * g)) + 2 * g) % (2 * g)
                                     : tc);
                next.push_back(std::move(b));
                continue;
            }
            const int t1 = static_cast<int>(std::floor(t));
            for (int tt : {t1, t1 + 1}) {
                const double tau = grid_angle(tt, g, last);
                const double u = angular_bump(s, tau, *phi[j], last, kind);
                if (u == 0.0) continue;
                AngularBranch b = br;
                b.dir.push_back(tau);
                b.key.push_back(last ? ((tt % (2 * g)) + 2 * g) % (2 * g)
                                     : tt);
                b.weight *= u;
                next.push_back(std::move(b));
            }
        }
        acc = std::move(next);
    }
    return acc;
}

// spherical coordinates of a dual grid point: poles detected by exact
// zeros (grid coordinates are exact multiples of the dual spacing)
SphericalDirection direction_of_point(const std::vector<double>& k) {
    return direction_from_vector(k, kSnapTol);
}

// indicator-family direction cells: each point goes to the grid direction
// with maximal cosine, earliest grid index winning ties
struct DirectionTable {
    std::vector<SphericalDirection> dirs;
    std::vector<std::vector<double>> vecs;
};

const DirectionTable& direction_table(int s, int n) {
    thread_local std::map<std::pair<int, int>, DirectionTable> cache;
    auto [it, fresh] = cache.try_emplace({s, n});
    if (fresh) {
        it->second.dirs = sphere_grid(s, n);
        it->second.vecs.reserve(it->second.dirs.size());
        for (const auto& d : it->second.dirs)
            it->second.vecs.push_back(direction_to_vector(d));
    }
    return it->second;
}

std::size_t nearest_direction(const DirectionTable& table,
                              const std::vector<double>& k) {
    std::size_t best = 0;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.vecs.size(); ++i) {
        const double d = dot(table.vecs[i], k);
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    return best;
}

// scale tile of the indicator family: floor(lg r) clamped to the regular
// range with coarse/fine overflow
ScaleIndex indicator_scale(double r, int s_min, int s_max) {
    if (r == 0.0) return ScaleIndex::coarse();
    int e = 0;
    std::frexp(r, &e);
    const int band = e - 1;
    if (band < s_min) return ScaleIndex::coarse();
    if (band > s_max) return ScaleIndex::fine();
    return ScaleIndex::regular(band);
}

struct SectorKey {
    int rank = 0;  // 0 coarse, 1 regular, 2 fine
    int s = 0;
    std::vector<int> steps;
    auto operator<=>(const SectorKey&) const = default;
};

SectorKey key_of(const ScaleIndex& si, const std::vector<int>& steps) {
    switch (si.kind) {
        case ScaleIndex::Kind::Coarse: return {0, 0, {}};
        case ScaleIndex::Kind::Regular: return {1, si.s, steps};
        case ScaleIndex::Kind::Fine: return {2, 0, {}};
    }
    return {};
}

std::vector<int> steps_of_direction(const SphericalDirection& dir, int s) {
    const int g = half_count(s);
    std::vector<int> steps;
    steps.reserve(dir.size());
    for (std::size_t j = 0; j < dir.size(); ++j) {
        if (!dir[j].has_value()) {
            steps.push_back(-1);
            continue;
        }
        const bool last = (j + 1 == dir.size());
        int t = static_cast<int>(std::lround(*dir[j] * g / M_PI));
        if (last) t = ((t % (2 * g)) + 2 * g) % (2 * g);
        steps.push_back(t);
    }
    return steps;
}

void validate_params(const CurveletParams& p) {
    if (p.n < 2) throw std::domain_error("curvelet params: need n >= 2");
    if (!(p.lambda > 0.0))
        throw std::domain_error("curvelet params: lambda must be positive");
    if (p.s_min < 1 || p.s_min > p.s_max)
        throw std::domain_error("curvelet params: need 1 <= s_min <= s_max");
}

// centered <-> FFTW index remap: shift every axis by M/2 (its own inverse
// for even M)
std::int64_t shifted_flat(const GridSpec& g, std::int64_t flat) {
    std::int64_t out = 0;
    std::int64_t rem = flat;
    std::int64_t scale = 1;
    for (int axis = 0; axis < g.n; ++axis) scale *= g.M;
    scale /= g.M;
    for (int axis = 0; axis < g.n; ++axis) {
        const std::int64_t digit = rem / scale;
        rem %= scale;
        out += ((digit + g.M / 2) % g.M) * scale;
        scale /= g.M;
    }
    return out;
}

AmplitudeField run_dft(const AmplitudeField& field, int sign,
                       FieldDomain out_domain) {
    const GridSpec& g = field.grid;
    const std::int64_t N = g.points();
    std::vector<int> dims(g.n, g.M);

    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(N));
    if (!buf) throw std::bad_alloc();
    fftw_plan plan = fftw_plan_dft(g.n, dims.data(), buf, buf, sign,
                                   FFTW_ESTIMATE);
    for (std::int64_t p = 0; p < N; ++p) {
        const std::int64_t q = shifted_flat(g, p);
        buf[q][0] = field.values[static_cast<std::size_t>(p)].real();
        buf[q][1] = field.values[static_cast<std::size_t>(p)].imag();
    }
    fftw_execute(plan);

    AmplitudeField out;
    out.grid = g;
    out.domain = out_domain;
    out.values.resize(static_cast<std::size_t>(N));
    const double norm = std::pow(static_cast<double>(g.M), -0.5 * g.n);
    for (std::int64_t p = 0; p < N; ++p) {
        const std::int64_t q = shifted_flat(g, p);
        out.values[static_cast<std::size_t>(p)] = {buf[q][0] * norm,
                                                   buf[q][1] * norm};
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
    return out;
}

}  // namespace

CurveletParams CurveletParams::make(int n, double lambda, int s_min,
                                    int s_max, CProfileKind kind) {
    CurveletParams p{n, lambda, s_min, s_max, kind};
    validate_params(p);
    return p;
}

double CurveletParams::scale_of(const ScaleIndex& si) const {
    switch (si.kind) {
        case ScaleIndex::Kind::Coarse: return std::ldexp(1.0, -(s_min - 1));
        case ScaleIndex::Kind::Regular: return std::ldexp(1.0, -si.s);
        case ScaleIndex::Kind::Fine: return std::ldexp(1.0, -(s_max + 1));
    }
    return 0.0;
}

std::vector<ScaleIndex> CurveletParams::all_scales() const {
    std::vector<ScaleIndex> out;
    out.push_back(ScaleIndex::coarse());
    for (int s = s_min; s <= s_max; ++s) out.push_back(ScaleIndex::regular(s));
    out.push_back(ScaleIndex::fine());
    return out;
}

GridSpec GridSpec::make(int n, double sigma, int M) {
    if (n < 1) throw std::domain_error("grid: need n >= 1");
    if (!(sigma > 0)) throw std::domain_error("grid: sigma must be positive");
    if (M < 2 || M % 2 != 0)
        throw std::domain_error("grid: M must be an even integer >= 2");
    return {n, sigma, 0.5 * sigma * M, M};
}

std::int64_t GridSpec::points() const {
    std::int64_t p = 1;
    for (int i = 0; i < n; ++i) p *= M;
    return p;
}

std::int64_t GridSpec::flatten(const std::vector<int>& j) const {
    if (static_cast<int>(j.size()) != n)
        throw std::invalid_argument("grid: coordinate count mismatch");
    std::int64_t flat = 0;
    for (int axis = 0; axis < n; ++axis) {
        if (j[axis] < -M / 2 || j[axis] >= M / 2)
            throw std::out_of_range("grid: coordinate outside [-M/2, M/2)");
        flat = flat * M + (j[axis] + M / 2);
    }
    return flat;
}

std::vector<int> GridSpec::unflatten(std::int64_t flat) const {
    std::vector<int> j(n);
    for (int axis = n - 1; axis >= 0; --axis) {
        j[axis] = static_cast<int>(flat % M) - M / 2;
        flat /= M;
    }
    return j;
}

std::vector<double> GridSpec::spatial_point(const std::vector<int>& j) const {
    std::vector<double> x(n);
    for (int axis = 0; axis < n; ++axis) x[axis] = sigma * j[axis];
    return x;
}

std::vector<double> GridSpec::frequency_point(
    const std::vector<int>& j) const {
    std::vector<double> k(n);
    for (int axis = 0; axis < n; ++axis) k[axis] = j[axis] / (2.0 * L);
    return k;
}

AmplitudeField AmplitudeField::zeros(const GridSpec& grid,
                                     FieldDomain domain) {
    AmplitudeField f;
    f.grid = grid;
    f.domain = domain;
    f.values.assign(static_cast<std::size_t>(grid.points()), {0.0, 0.0});
    return f;
}

double AmplitudeField::norm_sq() const {
    KahanSum s;
    for (const auto& v : values) s.add(std::norm(v));
    return s.value();
}

AmplitudeField dft_forward(const AmplitudeField& field) {
    if (field.domain != FieldDomain::Spatial)
        throw std::invalid_argument("dft_forward: field must be spatial");
    return run_dft(field, FFTW_FORWARD, FieldDomain::Frequency);
}

AmplitudeField dft_inverse(const AmplitudeField& field) {
    if (field.domain != FieldDomain::Frequency)
        throw std::invalid_argument("dft_inverse: field must be frequency");
    return run_dft(field, FFTW_BACKWARD, FieldDomain::Spatial);
}

std::vector<FrequencyComponent> decompose_frequency(
    const std::vector<double>& k, const CurveletParams& prm) {
    validate_params(prm);
    if (static_cast<int>(k.size()) != prm.n)
        throw std::invalid_argument("decompose_frequency: dimension mismatch");

    const double lr = prm.lambda * norm(k);

    if (prm.profile == CProfileKind::Indicator) {
        const ScaleIndex si = indicator_scale(lr, prm.s_min, prm.s_max);
        if (si.kind != ScaleIndex::Kind::Regular)
            return {{si, SphericalDirection{}, 1.0}};
        const auto& table = direction_table(si.s, prm.n);
        return {{si, table.dirs[nearest_direction(table, k)], 1.0}};
    }

    struct RadialBranch {
        ScaleIndex s;
        double w;
    };
    std::vector<RadialBranch> radial;
    auto push_radial = [&](const ScaleIndex& si) {
        const double w = radial_window_discrete(si, lr, prm.s_min, prm.s_max,
                                                prm.profile);
        if (w != 0.0) radial.push_back({si, w});
    };
    const double lo_seam = std::ldexp(1.0, prm.s_min);
    const double hi_seam = std::ldexp(1.0, prm.s_max);
    if (lr < lo_seam) {
        push_radial(ScaleIndex::coarse());
        push_radial(ScaleIndex::regular(prm.s_min));
    } else if (lr > hi_seam) {
        push_radial(ScaleIndex::regular(prm.s_max));
        push_radial(ScaleIndex::fine());
    } else {
        const double t = std::log2(lr);
        int tc = 0;
        if (snap_integer(t, tc)) {
            radial.push_back({ScaleIndex::regular(tc), 1.0});
        } else {
            push_radial(ScaleIndex::regular(static_cast<int>(std::floor(t))));
            push_radial(ScaleIndex::regular(static_cast<int>(std::ceil(t))));
        }
    }

    std::vector<FrequencyComponent> out;
    SphericalDirection phi;
    bool have_phi = false;
    for (const auto& rb : radial) {
        if (rb.s.kind != ScaleIndex::Kind::Regular) {
            out.push_back({rb.s, SphericalDirection{}, rb.w});
            continue;
        }
        if (!have_phi) {
            phi = direction_of_point(k);  // k != 0 here: lr > 0
            have_phi = true;
        }
        for (auto& ab : angular_branches(rb.s.s, phi, prm.profile)) {
            const double w = rb.w * ab.weight;
            if (w != 0.0) out.push_back({rb.s, std::move(ab.dir), w});
        }
    }
    return out;
}

double chi_discrete(const ScaleIndex& s, const SphericalDirection& theta,
                    const std::vector<double>& k,
                    const CurveletParams& prm) {
    validate_params(prm);
    if (static_cast<int>(k.size()) != prm.n)
        throw std::invalid_argument("chi_discrete: dimension mismatch");
    const double lr = prm.lambda * norm(k);

    if (prm.profile == CProfileKind::Indicator) {
        const ScaleIndex si = indicator_scale(lr, prm.s_min, prm.s_max);
        if (!(si == s)) return 0.0;
        if (si.kind != ScaleIndex::Kind::Regular) return 1.0;
        if (theta.size() != static_cast<std::size_t>(prm.n - 1))
            throw std::invalid_argument(
                "chi_discrete: direction register count mismatch");
        const auto& table = direction_table(si.s, prm.n);
        const auto& assigned = table.dirs[nearest_direction(table, k)];
        return steps_of_direction(theta, si.s) ==
                       steps_of_direction(assigned, si.s)
                   ? 1.0
                   : 0.0;
    }

    const double w =
        radial_window_discrete(s, lr, prm.s_min, prm.s_max, prm.profile);
    if (w == 0.0) return 0.0;
    if (s.kind != ScaleIndex::Kind::Regular) return w;
    if (theta.size() != static_cast<std::size_t>(prm.n - 1))
        throw std::invalid_argument(
            "chi_discrete: direction register count mismatch");
    if (lr == 0.0) return 0.0;
    return w * angular_bump_product(s.s, theta, direction_of_point(k),
                                    prm.profile);
}

double CurveletCoefficientSet::total_energy() const {
    KahanSum s;
    for (const auto& sec : sectors) s.add(sec.energy);
    return s.value();
}

AmplitudeField CurveletCoefficientSet::sector_field(
    std::size_t sector_index) const {
    const SectorInfo& sec = sectors.at(sector_index);
    AmplitudeField masked = AmplitudeField::zeros(grid, FieldDomain::Frequency);
    const std::int64_t N = grid.points();
    for (std::int64_t p = 0; p < N; ++p) {
        const auto v = spectrum.values[static_cast<std::size_t>(p)];
        if (v == std::complex<double>{0.0, 0.0}) continue;
        const double chi = chi_discrete(
            sec.s, sec.theta, grid.frequency_point(grid.unflatten(p)), params);
        if (chi != 0.0)
            masked.values[static_cast<std::size_t>(p)] = v * chi;
    }
    return dft_inverse(masked);
}

CurveletCoefficientSet curvelet_forward(const AmplitudeField& field,
                                        const CurveletParams& prm) {
    validate_params(prm);
    if (field.grid.n != prm.n)
        throw std::invalid_argument("curvelet_forward: dimension mismatch");
    if (field.domain != FieldDomain::Spatial)
        throw std::invalid_argument("curvelet_forward: field must be spatial");

    CurveletCoefficientSet out;
    out.grid = field.grid;
    out.params = prm;
    out.spectrum = dft_forward(field);

    struct Accum {
        ScaleIndex s;
        SphericalDirection theta;
        KahanSum energy;
        std::int64_t support = 0;
    };
    std::map<SectorKey, Accum> acc;

    const std::int64_t N = field.grid.points();
    for (std::int64_t p = 0; p < N; ++p) {
        const double e2 =
            std::norm(out.spectrum.values[static_cast<std::size_t>(p)]);
        const auto k = field.grid.frequency_point(field.grid.unflatten(p));
        for (auto& term : decompose_frequency(k, prm)) {
            std::vector<int> steps;
            if (term.s.kind == ScaleIndex::Kind::Regular)
                steps = steps_of_direction(term.theta, term.s.s);
            auto [it, fresh] = acc.try_emplace(key_of(term.s, steps));
            if (fresh) {
                it->second.s = term.s;
                it->second.theta = std::move(term.theta);
            }
            it->second.energy.add(e2 * term.weight * term.weight);
            it->second.support += 1;
        }
    }

    // direction indices follow the sphere_grid ordering for each scale
    std::map<int, std::map<std::vector<int>, std::int64_t>> index_of;
    for (auto& [key, a] : acc) {
        SectorInfo info;
        info.s = a.s;
        info.theta = a.theta;
        info.energy = a.energy.value();
        info.support = a.support;
        if (a.s.kind == ScaleIndex::Kind::Regular) {
            auto& table = index_of[a.s.s];
            if (table.empty()) {
                const auto pts = sphere_grid(a.s.s, prm.n);
                for (std::size_t i = 0; i < pts.size(); ++i)
                    table[steps_of_direction(pts[i], a.s.s)] =
                        static_cast<std::int64_t>(i);
            }
            info.theta_index = table.at(key.steps);
        }
        out.sectors.push_back(std::move(info));
    }
    return out;
}

AmplitudeField curvelet_adjoint(const CurveletCoefficientSet& coeffs) {
    AmplitudeField rec =
        AmplitudeField::zeros(coeffs.grid, FieldDomain::Frequency);
    const std::int64_t N = coeffs.grid.points();
    for (std::size_t i = 0; i < coeffs.sectors.size(); ++i) {
        const AmplitudeField gamma = coeffs.sector_field(i);
        const AmplitudeField back = dft_forward(gamma);
        const SectorInfo& sec = coeffs.sectors[i];
        for (std::int64_t p = 0; p < N; ++p) {
            const auto v = back.values[static_cast<std::size_t>(p)];
            if (v == std::complex<double>{0.0, 0.0}) continue;
            const double chi = chi_discrete(
                sec.s, sec.theta,
                coeffs.grid.frequency_point(coeffs.grid.unflatten(p)),
                coeffs.params);
            if (chi != 0.0)
                rec.values[static_cast<std::size_t>(p)] += v * chi;
        }
    }
    return dft_inverse(rec);
}

AdequacyReport discretization_adequacy(const RadialProfile& p,
                                       const GridSpec& grid,
                                       const CurveletParams& params,
                                       double center_radius, double eta) {
    if (grid.n != p.n || params.n != p.n)
        throw std::invalid_argument(
            "discretization_adequacy: dimension mismatch");
    AdequacyReport rep;
    rep.center_radius = center_radius;
    rep.nyquist = 0.5 / grid.sigma;

    double margin = p.delta;
    if (p.kind == ProfileKind::ShellGaussian) margin += 5.0 * p.delta;
    rep.spatial_radius = p.beta + margin;
    rep.contained = center_radius + rep.spatial_radius <= grid.L;

    if (std::isfinite(eta)) {
        rep.required_bandwidth = 100.0 / (params.lambda * eta);
    } else if (p.kind == ProfileKind::ShellSquare ||
               p.kind == ProfileKind::ShellGaussian) {
        rep.required_bandwidth = 100.0 / p.delta;
    } else {
        rep.required_bandwidth =
            std::ldexp(1.0, params.s_max + 1) / params.lambda;
    }
    rep.bandwidth_ok =
        rep.required_bandwidth <= rep.nyquist * (1.0 + 1e-12);

    rep.mass_deficit = std::max(0.0, high_frequency_mass(p, rep.nyquist));
    rep.captured_mass = 1.0 - rep.mass_deficit;
    return rep;
}

}  // namespace curvelet
