#include "curvelet/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>

#include "curvelet/analysis.hpp"
#include "curvelet/bessel.hpp"
#include "curvelet/discrete.hpp"
#include "curvelet/geometry.hpp"
#include "curvelet/quadrature.hpp"
#include "curvelet/windows.hpp"

namespace curvelet {

namespace {

double dist2(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double ipow(double x, int k) {
    double r = 1;
    while (k > 0) {
        if (k & 1) r *= x;
        x *= x;
        k >>= 1;
    }
    return r;
}

void require_dim(const std::vector<double>& v, int n, const char* what) {
    if (int(v.size()) != n)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// mean of exp(i z w.e) over unit vectors w in R^{n-1}; equals 1 at z = 0
double transverse_kernel(int n, double z) {
    const double az = std::abs(z);
    if (n == 4) {
        if (az < 1e-6) return 1.0 - z * z / 6.0;
        return std::sin(z) / z;
    }
    if (n == 6) {
        if (az < 1e-2) {
            const double z2 = z * z;
            return 1.0 - z2 / 10.0 + z2 * z2 / 280.0;
        }
        return 3.0 * (std::sin(z) - z * std::cos(z)) / (z * z * z);
    }
    if (az < 1e-6) return 1.0 - z * z / (2.0 * (n - 1));
    return std::tgamma(0.5 * (n - 1)) * std::pow(0.5 * az, -0.5 * (n - 3)) *
           bessel_j(BesselOrder::halves(n - 3), az);
}

double outer_support_radius(const RadialProfile& p) {
    switch (p.kind) {
        case ProfileKind::Ball:
            return p.beta;
        case ProfileKind::ShellSquare:
            return p.beta + p.delta;
        case ProfileKind::ShellGaussian:
            return p.beta + 6.0 * p.delta;
        case ProfileKind::Tabulated:
            return p.beta > 0 ? p.beta : 1.0;
    }
    return 1.0;
}

std::vector<double> zeros(int n) { return std::vector<double>(n, 0.0); }

// uniform point in the ball of the given radius
std::vector<double> uniform_in_ball(int n, double radius, Rng& rng) {
    std::vector<double> x = rng.unit_vector(n);
    const double r = radius * std::pow(rng.uniform(), 1.0 / n);
    for (double& xi : x) xi *= r;
    return x;
}

// unit vector orthogonal to theta, isotropic within that hyperplane
std::vector<double> transverse_direction(const std::vector<double>& theta,
                                         Rng& rng) {
    const int n = int(theta.size());
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<double> g = rng.unit_vector(n);
        const double c = dot(g, theta);
        double s = 0;
        for (int i = 0; i < n; ++i) {
            g[i] -= c * theta[i];
            s += g[i] * g[i];
        }
        s = std::sqrt(s);
        if (s > 1e-7) {
            for (double& gi : g) gi /= s;
            return g;
        }
    }
    throw std::runtime_error("transverse_direction: degenerate draws");
}

void score(RunResult& r, const std::vector<double>& point,
           const std::vector<double>& center, double target) {
    r.answered = true;
    r.point = point;
    r.distance = dist2(point, center);
    r.success = r.distance <= target;
}

}  // namespace

// ---- derived parameters ---------------------------------------------------

double single_line_eta(const AlgorithmConfig& cfg) {
    const double ratio = cfg.mu / cfg.beta_tilde;
    return ratio * ratio / (6.0 * (14300.0 + cfg.Q1 / cfg.n));
}

double single_line_lambda(const AlgorithmConfig& cfg) {
    return 2.0 * M_PI * cfg.beta_tilde * M_E / cfg.n;
}

double guess_halfwidth(const AlgorithmConfig& cfg) {
    if (cfg.Q3 > 0) return cfg.Q3;
    return std::sqrt(3.0 * (242.0 + cfg.Q2 / cfg.n));
}

double two_line_eta(double delta, double beta_tilde, int n) {
    return (delta / beta_tilde) * (n - 2) / M_E;
}

double two_line_lambda(double beta_tilde, int n) {
    return 2.0 * M_PI * beta_tilde * M_E / (n - 2);
}

int scale_cap(double eta) {
    if (!(eta > 0) || !(eta < 1))
        throw std::domain_error("scale_cap: eta must lie in (0,1)");
    return int(std::ceil(std::log2(1.0 / eta))) + 3;
}

// ---- line geometry ----------------------------------------------------------

std::vector<double> closest_point_between_lines(const std::vector<double>& b1,
                                                const std::vector<double>& t1,
                                                const std::vector<double>& b2,
                                                const std::vector<double>& t2) {
    if (b1.size() != t1.size() || b1.size() != b2.size() ||
        b1.size() != t2.size())
        throw std::invalid_argument("closest_point_between_lines: dimensions");
    const double r = dot(t1, t2);
    if (!(std::abs(r) < 1.0 - 1e-12))
        throw std::domain_error("closest_point_between_lines: parallel lines");
    std::vector<double> d(b1.size());
    for (std::size_t i = 0; i < b1.size(); ++i) d[i] = b1[i] - b2[i];
    const double s = dot(t1, d);
    const double t = dot(t2, d);
    const double alpha = (-s + r * t) / (1.0 - r * r);
    std::vector<double> q(b1.size());
    for (std::size_t i = 0; i < b1.size(); ++i) q[i] = b1[i] + alpha * t1[i];
    return q;
}

// ---- continuous-model measurement sampler -----------------------------------

RadialMeasurementSampler::RadialMeasurementSampler(RadialProfile profile,
                                                   double lambda, double eta)
    : RadialMeasurementSampler(std::move(profile), lambda, eta, Options{}) {}

RadialMeasurementSampler::RadialMeasurementSampler(RadialProfile profile,
                                                   double lambda, double eta,
                                                   Options opt)
    : profile_(std::move(profile)), lambda_(lambda), eta_(eta), opt_(opt) {
    if (!(lambda_ > 0)) throw std::domain_error("sampler: lambda must be > 0");
    if (!(eta_ > 0 && eta_ < 1))
        throw std::domain_error("sampler: eta must lie in (0,1)");
    if (profile_.n < 3)
        throw std::domain_error("sampler: needs n >= 3 (transverse sphere)");
    if (opt_.a_cells < 1 || opt_.b_par_cells < 4 || opt_.b_perp_cells < 4)
        throw std::domain_error("sampler: degenerate table options");

    accept_ = prob_scale_exact(profile_, lambda_, eta_);
    if (!(accept_ > 1e-12))
        throw std::domain_error(
            "sampler: no transform mass below the scale cutoff");
    perp_scale_ = std::sqrt(
        conditional_variance(profile_, lambda_, eta_, VarianceFamily::Perp));

    // geometric scale cells [eta/2^k, eta/2^{k-1}] with a tail cell at the
    // bottom; each keeps its exact conditional mass
    cells_.resize(opt_.a_cells);
    double hi = eta_;
    double p_hi = accept_;
    for (int k = 0; k < opt_.a_cells; ++k) {
        const bool tail = (k == opt_.a_cells - 1);
        const double lo = tail ? 0.0 : hi / 2.0;
        const double p_lo = tail ? 0.0 : prob_scale_exact(profile_, lambda_, lo);
        cells_[k].lo = lo;
        cells_[k].hi = hi;
        cells_[k].mass = std::max(0.0, p_hi - p_lo);
        cells_[k].table.rep_a = tail ? 0.75 * hi : 0.5 * (lo + hi);
        hi = lo;
        p_hi = p_lo;
    }
}

int RadialMeasurementSampler::cell_of_scale(double a) const {
    for (int k = 0; k < int(cells_.size()); ++k)
        if (a > cells_[k].lo && a <= cells_[k].hi) return k;
    return -1;
}

double RadialMeasurementSampler::cell_representative(int cell) const {
    return cells_.at(cell).table.rep_a;
}

double RadialMeasurementSampler::cell_mass(int cell) const {
    return cells_.at(cell).mass;
}

double RadialMeasurementSampler::captured_fraction_min() const {
    double worst = 1.0;
    bool any = false;
    for (const Cell& c : cells_)
        if (c.table.built && !c.table.prob.empty()) {
            worst = std::min(worst, c.table.captured);
            any = true;
        }
    return any ? worst : 0.0;
}

void RadialMeasurementSampler::build_table(Cell& cell) {
    Table& T = cell.table;
    T.built = true;
    const int n = profile_.n;
    const double a = T.rep_a;
    const double S0 = sphere_surface_area(n);
    const double Sn2 = sphere_surface_area(n - 1);
    const double rmin = 1.0 / (lambda_ * a * M_E);
    const double rmax = 1.0 / (lambda_ * a);
    const double phimax = std::sqrt(a) * M_PI / 2.0;
    const double sqa = std::sqrt(a);
    const double outer = outer_support_radius(profile_);

    const double expect =
        std::pow(a, n + 1) * scale_density(profile_, lambda_, a) / S0;
    if (!(expect > 0) || !(cell.mass > 0)) {
        T.prob.clear();
        T.cum.clear();
        T.captured = 0;
        return;
    }

    double par_hw = opt_.par_halfwidth;
    if (par_hw <= 0) par_hw = 1.35 * outer + 8.0 / (rmax - rmin);
    double perp_hw = opt_.perp_halfwidth;
    if (perp_hw <= 0) {
        const double sfac =
            std::clamp(std::sqrt(a / (0.75 * eta_)), 0.35, 1.25);
        perp_hw = 4.5 * perp_scale_ * sfac + 2.0 / (rmax * std::sin(phimax));
    }

    // parallel resolution must resolve the profile's radial features
    // (shell thickness), transverse resolution the conditional spread
    auto choose_npar = [&](double hw) {
        int cells = opt_.b_par_cells;
        if (profile_.kind == ProfileKind::ShellSquare ||
            profile_.kind == ProfileKind::ShellGaussian)
            cells = std::max(cells, int(2.0 * hw / (0.4 * profile_.delta)));
        return std::min(cells, 700);
    };

    const double ppp = opt_.points_per_period;
    for (int attempt = 0; attempt < 3; ++attempt) {
        const int npar = choose_npar(par_hw);
        const int nperp = opt_.b_perp_cells;
        const double ulo = rmin * std::cos(phimax);
        const double uhi = rmax;
        const double vhi = rmax * std::sin(phimax);
        const int Nu =
            std::max(256, int(ppp * (outer + par_hw) * (uhi - ulo)) + 8);
        const int Nv = std::max(
            48, int(ppp * (outer * std::sin(phimax) + perp_hw) * vhi) + 8);
        const int Nr =
            std::max(256, int(ppp * (outer + par_hw) * (rmax - rmin)) + 8);
        int Np = std::max(48, int(double(Nv) * (rmax * phimax) / vhi) + 8);
        Np = std::max(
            Np, int(double(Nu) * vhi * phimax / (uhi - ulo)) + 8);

        // accumulate the reduced transform integrand on a regular
        // (u, v) = (rho cos phi, rho sin phi) grid by bilinear spreading
        const double du = (uhi - ulo) / Nu;
        const double dv = vhi / Nv;
        std::vector<double> B(std::size_t(Nv) * Nu, 0.0);
        const double drho = (rmax - rmin) / Nr;
        const double dphi = phimax / Np;
        for (int i = 0; i < Nr; ++i) {
            const double rho = rmin + (i + 0.5) * drho;
            const double Fw = profile_F0(profile_, rho) *
                              radial_window_W(lambda_ * a * rho) *
                              ipow(rho, n - 1) * drho * dphi;
            if (Fw == 0.0) continue;
            for (int j = 0; j < Np; ++j) {
                const double phi = (j + 0.5) * dphi;
                const double ang = angular_window_V(phi / sqa, n) *
                                   lambda_factor(a, phi, n) *
                                   ipow(std::sin(phi), n - 2);
                if (ang == 0.0) continue;
                const double w = Fw * ang;
                const double u = rho * std::cos(phi);
                const double v = rho * std::sin(phi);
                double fu = (u - ulo) / du - 0.5;
                double fv = v / dv - 0.5;
                const int iu = int(std::floor(fu));
                const int iv = int(std::floor(fv));
                const double au = fu - iu;
                const double av = fv - iv;
                for (int bu = 0; bu < 2; ++bu) {
                    const int ku = iu + bu;
                    if (ku < 0 || ku >= Nu) continue;
                    const double wu = bu ? au : 1.0 - au;
                    for (int bv = 0; bv < 2; ++bv) {
                        const int kv = iv + bv;
                        if (kv < 0 || kv >= Nv) continue;
                        const double wv = bv ? av : 1.0 - av;
                        B[std::size_t(kv) * Nu + ku] += w * wu * wv;
                    }
                }
            }
        }

        const double dpar = 2.0 * par_hw / npar;
        const double dperp = perp_hw / nperp;

        // Fourier factor along theta: C[k][v] = sum_u B e^{2 pi i u bpar}
        std::vector<std::complex<double>> C(std::size_t(npar) * Nv);
        for (int v = 0; v < Nv; ++v) {
            const double* row = &B[std::size_t(v) * Nu];
            for (int k = 0; k < npar; ++k) {
                const double bpar = -par_hw + (k + 0.5) * dpar;
                const std::complex<double> step =
                    std::polar(1.0, 2.0 * M_PI * du * bpar);
                std::complex<double> ph =
                    std::polar(1.0, 2.0 * M_PI * (ulo + 0.5 * du) * bpar);
                std::complex<double> acc = 0.0;
                for (int u = 0; u < Nu; ++u) {
                    acc += row[u] * ph;
                    ph *= step;
                }
                C[std::size_t(k) * Nv + v] = acc;
            }
        }

        // transverse factor: Gamma(k,l) = S_{n-2} sum_v C K(2 pi v bperp)
        T.npar = npar;
        T.nperp = nperp;
        T.par_lo = -par_hw;
        T.dpar = dpar;
        T.perp_hi = perp_hw;
        T.dperp = dperp;
        T.prob.assign(std::size_t(npar) * nperp, 0.0);
        KahanSum mass;
        for (int k = 0; k < npar; ++k) {
            for (int l = 0; l < nperp; ++l) {
                const double bperp = (l + 0.5) * dperp;
                std::complex<double> g = 0.0;
                const std::complex<double>* crow = &C[std::size_t(k) * Nv];
                for (int v = 0; v < Nv; ++v) {
                    const double vv = (v + 0.5) * dv;
                    g += crow[v] *
                         transverse_kernel(n, 2.0 * M_PI * vv * bperp);
                }
                g *= Sn2;
                const double dens =
                    std::norm(g) * Sn2 * ipow(bperp, n - 2) * dpar * dperp;
                T.prob[std::size_t(k) * nperp + l] = dens;
                mass.add(dens);
            }
        }
        T.captured = mass.value() / expect;
        if (T.captured > 1.08)
            throw std::runtime_error(
                "sampler: table mass exceeds the scale marginal");
        if (T.captured >= opt_.capture_floor || attempt == 2) break;
        par_hw *= 1.3;
        perp_hw *= 1.5;
    }

    // normalize and build the sampling CDF
    double total = 0;
    for (double p : T.prob) total += p;
    if (!(total > 0)) {
        T.prob.clear();
        T.cum.clear();
        T.captured = 0;
        return;
    }
    T.cum.resize(T.prob.size());
    KahanSum run;
    for (std::size_t i = 0; i < T.prob.size(); ++i) {
        T.prob[i] /= total;
        run.add(T.prob[i]);
        T.cum[i] = run.value();
    }
    T.cum.back() = 1.0;
}

double RadialMeasurementSampler::table_density(int cell, double b_par,
                                               double b_perp) {
    Cell& c = cells_.at(cell);
    if (!c.table.built) build_table(c);
    const Table& T = c.table;
    if (T.prob.empty()) return 0.0;
    const int k = int(std::floor((b_par - T.par_lo) / T.dpar));
    const int l = int(std::floor(b_perp / T.dperp));
    if (k < 0 || k >= T.npar || l < 0 || l >= T.nperp) return 0.0;
    return T.prob[std::size_t(k) * T.nperp + l] / (T.dpar * T.dperp);
}

MeasurementRecord RadialMeasurementSampler::draw_conditional(
    const std::vector<double>& center, const std::vector<double>& theta,
    Rng& rng) {
    const int n = profile_.n;
    require_dim(center, n, "draw_conditional center");
    require_dim(theta, n, "draw_conditional theta");

    double u = rng.uniform() * accept_;
    int sel = int(cells_.size()) - 1;
    double acc = 0;
    for (int k = 0; k < int(cells_.size()); ++k) {
        acc += cells_[k].mass;
        if (u < acc) {
            sel = k;
            break;
        }
    }
    while (sel > 0 && cells_[sel].mass <= 0) --sel;
    Cell& cell = cells_[sel];
    if (!cell.table.built) build_table(cell);
    const Table& T = cell.table;
    if (T.prob.empty())
        throw std::runtime_error("sampler: selected an empty scale cell");

    const double u2 = rng.uniform();
    const std::size_t flat =
        std::upper_bound(T.cum.begin(), T.cum.end(), u2) - T.cum.begin();
    const std::size_t idx = std::min(flat, T.prob.size() - 1);
    const int k = int(idx / T.nperp);
    const int l = int(idx % T.nperp);
    const double b_par = T.par_lo + (k + rng.uniform()) * T.dpar;
    const double b_perp = (l + rng.uniform()) * T.dperp;

    MeasurementRecord rec;
    rec.answered = true;
    rec.a = cell.lo + rng.uniform() * (cell.hi - cell.lo);
    rec.theta = theta;
    std::vector<double> omega = transverse_direction(theta, rng);
    rec.b.resize(n);
    for (int i = 0; i < n; ++i)
        rec.b[i] = center[i] + b_par * theta[i] + b_perp * omega[i];
    return rec;
}

bool RadialMeasurementSampler::draw(const std::vector<double>& center,
                                    const std::vector<double>& theta, Rng& rng,
                                    MeasurementRecord& out) {
    if (rng.uniform() >= accept_) {
        out = MeasurementRecord{};
        out.a = std::numeric_limits<double>::quiet_NaN();
        out.theta = theta;
        out.answered = false;
        return false;
    }
    out = draw_conditional(center, theta, rng);
    return true;
}

// ---- single-line driver -----------------------------------------------------

BallCenterRunner::BallCenterRunner(double beta, const AlgorithmConfig& cfg)
    : cfg_(cfg) {
    if (cfg.n < 3) throw std::domain_error("single-line driver: needs n >= 3");
    if (!(cfg.beta_tilde > 0) || !(cfg.mu > 0) || !(cfg.R > 0))
        throw std::domain_error("single-line driver: positive R, mu, beta_tilde");
    const double slack = std::max(1.0, cfg.regime_slack);
    if (!(beta >= cfg.beta_tilde / (2.0 * slack) - 1e-12 &&
          beta <= cfg.beta_tilde * slack + 1e-12))
        throw std::domain_error(
            "single-line driver: beta outside the promised bracket");
    eta_ = cfg.eta_override > 0 ? cfg.eta_override : single_line_eta(cfg);
    if (!(eta_ > 0 && eta_ <= 0.5))
        throw std::domain_error("single-line driver: eta outside (0, 1/2]");
    sampler_ = std::make_unique<RadialMeasurementSampler>(
        RadialProfile::ball(cfg.n, beta), single_line_lambda(cfg), eta_);
}

RunResult BallCenterRunner::run(const std::vector<double>& center, Rng& rng) {
    require_dim(center, cfg_.n, "single-line run center");
    const double slack = std::max(1.0, cfg_.regime_slack);
    if (norm(center) > cfg_.R * slack + 1e-12)
        throw std::domain_error("single-line run: center outside the promise");

    RunResult res;
    res.queries = 1;
    res.answer_probability = sampler_->accept_probability();
    const std::vector<double> theta = rng.unit_vector(cfg_.n);
    MeasurementRecord rec;
    if (cfg_.sample_conditional) {
        rec = sampler_->draw_conditional(center, theta, rng);
    } else if (!sampler_->draw(center, theta, rng, rec)) {
        res.rounds.push_back(rec);
        return res;
    }
    res.rounds.push_back(rec);
    const double u = rng.uniform(-1.0, 1.0);
    const double off = u * guess_halfwidth(cfg_) * cfg_.beta_tilde;
    std::vector<double> point(cfg_.n);
    for (int i = 0; i < cfg_.n; ++i) point[i] = rec.b[i] + off * theta[i];
    score(res, point, center, cfg_.mu);
    return res;
}

RunResult algorithm1(const BallInstance& instance, const AlgorithmConfig& cfg,
                     Rng& rng) {
    BallCenterRunner runner(instance.beta, cfg);
    return runner.run(instance.center, rng);
}

RunResult algorithm1(const QuantumState& state,
                     const std::vector<double>& true_center,
                     const AlgorithmConfig& cfg, Rng& rng) {
    const int n = state.field.grid.n;
    if (n != cfg.n)
        throw std::invalid_argument("single-line grid run: dimension mismatch");
    const double eta =
        cfg.eta_override > 0 ? cfg.eta_override : single_line_eta(cfg);
    const int s_max = cfg.s_max > 0 ? cfg.s_max : scale_cap(eta);
    const CurveletParams params =
        CurveletParams::make(n, single_line_lambda(cfg), cfg.s_min, s_max);

    RunResult res;
    res.queries = 1;
    const MeasurementOutcome out = measure_curvelet(state, params, rng);
    MeasurementRecord rec;
    rec.a = params.scale_of(out.s);
    res.rounds.push_back(rec);
    // unresolved direction (catch-all scales) or too-coarse scale: no answer
    if (rec.a > eta || out.theta.empty()) return res;
    const std::vector<double> theta = direction_to_vector(out.theta);
    const std::vector<double> b = state.field.grid.spatial_point(out.b);
    res.rounds.back().answered = true;
    res.rounds.back().theta = theta;
    res.rounds.back().b = b;
    const double off =
        rng.uniform(-1.0, 1.0) * guess_halfwidth(cfg) * cfg.beta_tilde;
    std::vector<double> point(n);
    for (int i = 0; i < n; ++i) point[i] = b[i] + off * theta[i];
    score(res, point, true_center, cfg.mu);
    return res;
}

// ---- two-line and iterative drivers ------------------------------------------

ShellAlgorithmEngine::ShellAlgorithmEngine(double delta,
                                           const AlgorithmConfig& cfg)
    : delta_(delta), cfg_(cfg) {
    if (!(delta_ > 0))
        throw std::domain_error("shell driver: delta must be > 0");
    if (cfg.n < 3) throw std::domain_error("shell driver: needs n >= 3");
    if (!(cfg.R > 0) || !(cfg.mu > 0))
        throw std::domain_error("shell driver: positive R and mu");
}

ShellAlgorithmEngine::LineDraw ShellAlgorithmEngine::measure_line(
    double Rprime, const std::vector<double>& eff_center, double beta_tilde,
    Rng& rng) {
    const int n = cfg_.n;
    const double eta = cfg_.eta_override > 0
                           ? cfg_.eta_override
                           : two_line_eta(delta_, beta_tilde, n);
    const double lambda = two_line_lambda(beta_tilde, n);

    LineDraw ld;
    const std::vector<double> x = uniform_in_ball(n, Rprime, rng);
    const double rho = dist2(x, eff_center);
    const long long k = (long long)std::floor(rho / delta_);
    ld.rec.shell = k;
    ld.rec.a = std::numeric_limits<double>::quiet_NaN();
    ld.rec.shell_complete =
        k >= 1 && norm(eff_center) + double(k + 1) * delta_ <= Rprime;
    if (!ld.rec.shell_complete) return ld;

    const double beta_k = double(k) * delta_;
    const auto pkey = std::make_pair(k, llround(beta_tilde * 4096.0 / delta_));
    auto pit = shell_accept_.find(pkey);
    if (pit == shell_accept_.end()) {
        const double P = prob_scale_exact(
            RadialProfile::shell_square(n, beta_k, delta_), lambda, eta);
        pit = shell_accept_.emplace(pkey, P).first;
    }
    if (rng.uniform() >= pit->second) return ld;  // measured scale above eta

    // shared table at the quantized shell radius
    const double qstep = std::max(delta_, beta_tilde / 10.0);
    const double beta_q =
        qstep * std::max<long long>(1, llround(beta_k / qstep));
    RadialMeasurementSampler& smp = sampler_for(beta_q, beta_tilde);
    const std::vector<double> theta = rng.unit_vector(n);
    MeasurementRecord rec = smp.draw_conditional(eff_center, theta, rng);
    rec.shell = k;
    rec.shell_complete = true;
    ld.rec = rec;
    ld.answered = true;
    return ld;
}

RadialMeasurementSampler& ShellAlgorithmEngine::sampler_for(
    double beta_q, double beta_tilde) {
    const auto key = std::make_pair(llround(beta_q * 4096.0 / delta_),
                                    llround(beta_tilde * 4096.0 / delta_));
    auto it = samplers_.find(key);
    if (it == samplers_.end()) {
        const double eta = cfg_.eta_override > 0
                               ? cfg_.eta_override
                               : two_line_eta(delta_, beta_tilde, cfg_.n);
        it = samplers_
                 .emplace(key, std::make_unique<RadialMeasurementSampler>(
                                   RadialProfile::shell_square(cfg_.n, beta_q,
                                                               delta_),
                                   two_line_lambda(beta_tilde, cfg_.n), eta))
                 .first;
    }
    return *it->second;
}

RunResult ShellAlgorithmEngine::two_line_run(const std::vector<double>& center,
                                             Rng& rng) {
    const int n = cfg_.n;
    require_dim(center, n, "two-line run center");
    const double slack = std::max(1.0, cfg_.regime_slack);
    if (norm(center) > cfg_.R * slack + 1e-12)
        throw std::domain_error("two-line run: center outside the promise");
    const double bound = slack * cfg_.mu * cfg_.mu /
                         (192.0 * (n - 1) * (n - 1) * cfg_.R *
                          (761.0 + cfg_.Q1 / n));
    if (delta_ > bound)
        throw std::domain_error("two-line run: delta above the regime bound");

    const double Rp = double(n) * cfg_.R;
    const double bt = Rp - cfg_.R;
    RunResult res;
    LineDraw lines[2];
    for (int i = 0; i < 2; ++i) {
        ++res.queries;
        lines[i] = measure_line(Rp, center, bt, rng);
        res.rounds.push_back(lines[i].rec);
        if (!lines[i].answered) return res;
    }
    const double r = dot(lines[0].rec.theta, lines[1].rec.theta);
    if (std::abs(r) > 0.75) return res;  // nearly parallel directions
    const std::vector<double> q = closest_point_between_lines(
        lines[0].rec.b, lines[0].rec.theta, lines[1].rec.b,
        lines[1].rec.theta);
    score(res, q, center, cfg_.mu);
    return res;
}

RunResult ShellAlgorithmEngine::one_round(double R, const std::vector<double>& p,
                                          double S,
                                          const std::vector<double>& center,
                                          Rng& rng) {
    const int n = cfg_.n;
    require_dim(p, n, "one-round recentering point");
    require_dim(center, n, "one-round center");
    const double Rp = double(n) * S * R;
    const double bt = Rp - R;
    std::vector<double> eff(n);
    for (int i = 0; i < n; ++i) eff[i] = center[i] - p[i];

    RunResult res;
    LineDraw lines[2];
    for (int i = 0; i < 2; ++i) {
        ++res.queries;
        lines[i] = measure_line(Rp, eff, bt, rng);
        res.rounds.push_back(lines[i].rec);
        if (!lines[i].answered) return res;
    }
    const double r = dot(lines[0].rec.theta, lines[1].rec.theta);
    if (std::abs(r) > 0.75) return res;
    std::vector<double> q = closest_point_between_lines(
        lines[0].rec.b, lines[0].rec.theta, lines[1].rec.b,
        lines[1].rec.theta);
    for (int i = 0; i < n; ++i) q[i] += p[i];
    score(res, q, center, std::sqrt(R * cfg_.mu / 2.0));
    return res;
}

int ShellAlgorithmEngine::iteration_bound(double R, double mu) {
    if (!(R > mu)) return 0;
    const double x = std::log2(std::log2(2.0 * R / mu));
    return std::max(1, int(std::ceil(x - 1e-9)));
}

RunResult ShellAlgorithmEngine::iterate(const std::vector<double>& center,
                                        Rng& rng) {
    const int n = cfg_.n;
    require_dim(center, n, "iterative run center");
    RunResult res;
    if (cfg_.R <= cfg_.mu) {  // already accurate at the promise radius
        score(res, zeros(n), center, cfg_.mu);
        return res;
    }
    const int n_iter = iteration_bound(cfg_.R, cfg_.mu);
    const double S = 9.4 * n_iter;
    const int n_tries = int(std::ceil(910.0 * std::log(S)));
    const double slack = std::max(1.0, cfg_.regime_slack);
    const double lglg = std::log2(std::log2(2.0 * cfg_.R / cfg_.mu));
    const double bound = slack * cfg_.mu /
                         (128.0 * ipow(10.0 * lglg, 3) * double(n) * n *
                          (507.0 + cfg_.Q1 / n));
    if (delta_ >= bound)
        throw std::domain_error("iterative run: delta above the regime bound");

    double R_cur = cfg_.R;
    std::vector<double> p_cur = zeros(n);
    while (R_cur > cfg_.mu) {
        bool advanced = false;
        for (int t = 0; t < n_tries; ++t) {
            RunResult rr = one_round(R_cur, p_cur, S, center, rng);
            res.queries += rr.queries;
            if (rr.answered) {
                p_cur = rr.point;
                for (auto& rec : rr.rounds)
                    if (rec.answered) res.rounds.push_back(rec);
                advanced = true;
                break;
            }
        }
        if (!advanced) return res;  // every try came back empty
        R_cur = std::sqrt(R_cur * cfg_.mu / 2.0);
        ++res.iterations;
    }
    score(res, p_cur, center, cfg_.mu);
    return res;
}

RunResult algorithm2(const RadialOracle& oracle, const AlgorithmConfig& cfg,
                     Rng& rng) {
    ShellAlgorithmEngine engine(oracle.delta, cfg);
    return engine.two_line_run(oracle.center, rng);
}

RunResult one_round(double R, const std::vector<double>& p, double S,
                    const RadialOracle& oracle, const AlgorithmConfig& cfg,
                    Rng& rng) {
    ShellAlgorithmEngine engine(oracle.delta, cfg);
    return engine.one_round(R, p, S, oracle.center, rng);
}

RunResult algorithm3(const RadialOracle& oracle, const AlgorithmConfig& cfg,
                     Rng& rng) {
    ShellAlgorithmEngine engine(oracle.delta, cfg);
    return engine.iterate(oracle.center, rng);
}

RunResult algorithm2_grid(const RadialOracle& oracle,
                          const AlgorithmConfig& cfg, Rng& rng) {
    const int n = cfg.n;
    if (int(oracle.center.size()) != n)
        throw std::invalid_argument("two-line grid run: dimension mismatch");
    const double sigma =
        cfg.sigma_override > 0 ? cfg.sigma_override : oracle.delta / 400.0;
    const double Rp = double(n) * cfg.R;
    const double bt = Rp - cfg.R;
    const double eta = cfg.eta_override > 0
                           ? cfg.eta_override
                           : two_line_eta(oracle.delta, bt, n);
    const int M = 2 * int(std::ceil((Rp + 2.0 * sigma) / sigma));
    double pts = 1;
    for (int i = 0; i < n; ++i) pts *= M;
    if (pts > double(1 << 21))
        throw std::invalid_argument(
            "two-line grid run: grid too large for direct simulation");
    const GridSpec grid = GridSpec::make(n, sigma, M);
    const int s_max = cfg.s_max > 0 ? cfg.s_max : scale_cap(eta);
    const CurveletParams params =
        CurveletParams::make(n, two_line_lambda(bt, n), cfg.s_min, s_max);

    RunResult res;
    MeasurementRecord recs[2];
    for (int i = 0; i < 2; ++i) {
        ++res.queries;
        QuantumState state = prepare_ball_state(grid, zeros(n), Rp);
        auto collapsed = oracle_collapse(state, oracle, rng);
        const MeasurementOutcome out =
            measure_curvelet(collapsed.second, params, rng);
        MeasurementRecord rec;
        rec.a = params.scale_of(out.s);
        if (rec.a > eta || out.theta.empty()) {
            res.rounds.push_back(rec);
            return res;
        }
        rec.answered = true;
        rec.theta = direction_to_vector(out.theta);
        rec.b = grid.spatial_point(out.b);
        res.rounds.push_back(rec);
        recs[i] = rec;
    }
    const double r = dot(recs[0].theta, recs[1].theta);
    if (std::abs(r) > 0.75) return res;
    const std::vector<double> q = closest_point_between_lines(
        recs[0].b, recs[0].theta, recs[1].b, recs[1].theta);
    score(res, q, oracle.center, cfg.mu);
    return res;
}

// ---- classical comparisons ----------------------------------------------------

std::vector<double> classical_average_baseline(const BallInstance& instance,
                                               int k, Rng& rng) {
    const int n = int(instance.center.size());
    if (k < 1)
        throw std::domain_error("classical_average_baseline: k must be >= 1");
    if (!(instance.beta > 0))
        throw std::domain_error("classical_average_baseline: beta must be > 0");
    std::vector<double> mean(n, 0.0);
    for (int j = 0; j < k; ++j) {
        const std::vector<double> x = uniform_in_ball(n, instance.beta, rng);
        for (int i = 0; i < n; ++i) mean[i] += instance.center[i] + x[i];
    }
    for (double& m : mean) m /= k;
    return mean;
}

namespace {

using u128 = unsigned __int128;

// saturating multiply capped just above any comparison target
bool mul_sat(u128& acc, u128 factor, u128 cap) {
    if (acc > cap / factor) {
        acc = cap;
        return true;
    }
    acc *= factor;
    return false;
}

}  // namespace

LowerBoundReport classical_query_lower_bound(int n, double R, double mu) {
    if (n < 1)
        throw std::domain_error("classical_query_lower_bound: n must be >= 1");
    if (!(mu > 0) || !(R > mu))
        throw std::domain_error("classical_query_lower_bound: needs R > mu > 0");
    LowerBoundReport rep;
    rep.m = std::log2(R / mu);

    const double ratio = R / mu;
    const double rr = std::nearbyint(ratio);
    const bool integral = std::abs(ratio - rr) <= 1e-9 * ratio;
    if (integral && n * std::log2(rr) <= 126.0) {
        // exact integer comparison of ell! against (R/mu)^n
        const u128 cap = u128(1) << 127;
        u128 target = 1;
        for (int i = 0; i < n; ++i) mul_sat(target, u128(rr), cap);
        u128 fact = 1;
        int ell = 0;
        while (fact < target) {
            ++ell;
            if (mul_sat(fact, u128(ell), cap)) break;
        }
        rep.ell_min = std::max(ell, 1);
    } else {
        const long double target = (long double)n * std::log((long double)R / mu);
        long double lf = 0.0L;
        int ell = 0;
        while (lf < target) {
            ++ell;
            lf += std::log((long double)ell);
        }
        rep.ell_min = std::max(ell, 1);
    }

    const double half_nm = 0.5 * n * rep.m;
    rep.failure_exponent = half_nm;
    rep.failure_bound = -std::expm1(-half_nm * M_LN2);
    rep.query_budget = half_nm >= 2.0 ? half_nm / std::log2(half_nm) : 0.0;
    return rep;
}

double decision_tree_failure_rate(int n, double R, double mu, double delta,
                                  int queries, int trials, Rng& rng) {
    if (trials < 1)
        throw std::domain_error("decision_tree_failure_rate: trials >= 1");
    if (!(delta > 0) || !(R > 0) || !(mu > 0))
        throw std::domain_error("decision_tree_failure_rate: bad geometry");
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        const std::vector<double> c = uniform_in_ball(n, R, rng);
        const RadialOracle oracle =
            RadialOracle::scrambled_labels(c, delta, rng.below(~0ull));
        std::vector<std::vector<double>> xs;
        std::vector<std::uint64_t> labels;
        for (int q = 0; q < queries; ++q) {
            xs.push_back(uniform_in_ball(n, R, rng));
            labels.push_back(oracle.label(oracle.shell_of(xs.back())));
        }
        // exploit the only usable signal: two queries in the same shell
        std::vector<double> guess = zeros(n);
        bool found = false;
        for (std::size_t i = 0; i < xs.size() && !found; ++i)
            for (std::size_t j = i + 1; j < xs.size() && !found; ++j)
                if (labels[i] == labels[j]) {
                    for (int d = 0; d < n; ++d)
                        guess[d] = 0.5 * (xs[i][d] + xs[j][d]);
                    found = true;
                }
        if (dist2(guess, c) > mu) ++failures;
    }
    return double(failures) / trials;
}

}  // namespace curvelet
