#include "curvelet/radial.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "curvelet/bessel.hpp"
#include "curvelet/geometry.hpp"
#include "curvelet/quadrature.hpp"

namespace curvelet {

namespace {

// Fritsch-Carlson monotone slopes for cubic Hermite interpolation
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
    const int m = int(x.size());
    std::vector<double> d(m, 0.0);
    if (m == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return d;
    }
    std::vector<double> h(m - 1), s(m - 1);
    for (int i = 0; i + 1 < m; ++i) {
        h[i] = x[i + 1] - x[i];
        s[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (int i = 1; i + 1 < m; ++i) {
        if (s[i - 1] == 0.0 || s[i] == 0.0 || (s[i - 1] > 0) != (s[i] > 0)) {
            d[i] = 0.0;
        } else {
            const double w1 = 2 * h[i] + h[i - 1];
            const double w2 = h[i] + 2 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
    }
    auto endpoint = [&](double h0, double h1, double s0, double s1) {
        double de = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if ((de > 0) != (s0 > 0))
            de = 0.0;
        else if ((s0 > 0) != (s1 > 0) && std::fabs(de) > 3 * std::fabs(s0))
            de = 3 * s0;
        return de;
    };
    d[0] = endpoint(h[0], h[1], s[0], s[1]);
    d[m - 1] = endpoint(h[m - 2], h[m - 3], s[m - 2], s[m - 3]);
    return d;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& d, double t) {
    if (t <= x.front()) return (t == x.front()) ? y.front() : 0.0;
    if (t >= x.back()) return (t == x.back()) ? y.back() : 0.0;
    int lo = 0, hi = int(x.size()) - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (x[mid] <= t ? lo : hi) = mid;
    }
    const double h = x[lo + 1] - x[lo];
    const double u = (t - x[lo]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return y[lo] * (2 * u3 - 3 * u2 + 1) + h * d[lo] * (u3 - 2 * u2 + u) +
           y[lo + 1] * (-2 * u3 + 3 * u2) + h * d[lo + 1] * (u3 - u2);
}

void require_dim(int n, const char* who) {
    if (n < 2) {
        std::ostringstream msg;
        msg << who << ": dimension must be >= 2";
        throw std::domain_error(msg.str());
    }
}

// sphere-convolution profile of the Gaussian shell, without C_f:
// (g * q)(r) with g(x) = delta^{-n/2} exp(-pi |x|^2 / delta^2) and q the
// surface measure of the radius-beta sphere
double gaussian_shell_raw_f0(int n, double beta, double delta, double r) {
    const double Ssub = sphere_surface_area(n - 1);
    auto integrand = [&](double phi) {
        const double c = std::cos(phi);
        const double dist2 = r * r - 2 * r * beta * c + beta * beta;
        return std::exp(-M_PI * dist2 / (delta * delta)) *
               std::pow(std::sin(phi), n - 2);
    };
    const auto q = integrate_adaptive(integrand, 0.0, M_PI, 1e-300, 1e-11);
    return std::pow(delta, -0.5 * n) * std::pow(beta, n - 1) * Ssub * q.value;
}

// without the C_f factor
double gaussian_F0_raw(int n, double beta, double delta, double rho) {
    const double nu_arg = 2 * M_PI * beta * rho;
    const double J = bessel_j(BesselOrder::halves(n - 2), nu_arg);
    return std::pow(delta, 0.5 * n) * std::exp(-M_PI * delta * delta * rho * rho) *
           2 * M_PI * std::pow(beta, 0.5 * n) * std::pow(rho, 1.0 - 0.5 * n) * J;
}

std::map<std::tuple<int, double, double>, double> cf_cache;
std::mutex cf_mutex;

}  // namespace

bool gaussian_epsilon_ok(int n, double epsilon) {
    if (n < 3) return false;
    const double cap = std::min(
        std::min(6.0 / ((n - 2.0) * (n - 2.0)), 1.0 / (n + 2.0)),
        std::min(1.0 / (std::exp(1.0) * n), 0.2));
    return epsilon > 0 && epsilon <= cap;
}

double gaussian_shell_Cf(int n, double beta, double delta) {
    require_dim(n, "gaussian_shell_Cf");
    if (!(beta > 0) || !(delta > 0))
        throw std::domain_error("gaussian_shell_Cf: need beta > 0, delta > 0");
    {
        std::lock_guard<std::mutex> lock(cf_mutex);
        auto it = cf_cache.find({n, beta, delta});
        if (it != cf_cache.end()) return it->second;
    }
    // Parseval in the substituted variable t = 2 pi beta rho:
    //   S_0 beta^{n-2} delta^n int_0^inf e^{-p^2 t^2} J_{n/2-1}(t)^2 t dt,
    // p^2 = delta^2 / (2 pi beta^2)
    const double p2 = delta * delta / (2 * M_PI * beta * beta);
    const BesselOrder nu = BesselOrder::halves(n - 2);
    auto integrand = [&](double t) {
        const double J = bessel_j(nu, t);
        return std::exp(-p2 * t * t) * J * J * t;
    };
    const double T = 7.0 / std::sqrt(p2);
    const auto q = integrate_oscillatory(integrand, 0.0, T, M_PI, 1e-13, 1e-11);
    const double I = sphere_surface_area(n) * std::pow(beta, n - 2) *
                     std::pow(delta, double(n)) * q.value;
    const double cf = 1.0 / std::sqrt(I);
    std::lock_guard<std::mutex> lock(cf_mutex);
    cf_cache[{n, beta, delta}] = cf;
    return cf;
}

RadialProfile RadialProfile::ball(int n, double beta) {
    require_dim(n, "RadialProfile::ball");
    if (!(beta > 0)) throw std::domain_error("RadialProfile::ball: beta > 0");
    RadialProfile p;
    p.kind = ProfileKind::Ball;
    p.n = n;
    p.beta = beta;
    p.normalization =
        1.0 / std::sqrt(sphere_surface_area(n) * std::pow(beta, double(n)) / n);
    return p;
}

RadialProfile RadialProfile::shell_square(int n, double beta, double delta) {
    require_dim(n, "RadialProfile::shell_square");
    if (!(beta > 0) || !(delta > 0))
        throw std::domain_error("RadialProfile::shell_square: beta, delta > 0");
    RadialProfile p;
    p.kind = ProfileKind::ShellSquare;
    p.n = n;
    p.beta = beta;
    p.delta = delta;
    p.epsilon = delta / beta;
    const double vol = sphere_surface_area(n) *
                       (std::pow(beta + delta, double(n)) - std::pow(beta, double(n))) /
                       n;
    p.normalization = 1.0 / std::sqrt(vol);
    return p;
}

RadialProfile RadialProfile::shell_gaussian(int n, double beta, double delta,
                                            bool require_theorem_regime) {
    require_dim(n, "RadialProfile::shell_gaussian");
    if (!(beta > 0) || !(delta > 0))
        throw std::domain_error("RadialProfile::shell_gaussian: beta, delta > 0");
    RadialProfile p;
    p.kind = ProfileKind::ShellGaussian;
    p.n = n;
    p.beta = beta;
    p.delta = delta;
    p.epsilon = delta / beta;
    if (require_theorem_regime && !gaussian_epsilon_ok(n, p.epsilon)) {
        std::ostringstream msg;
        msg << "RadialProfile::shell_gaussian: epsilon = " << p.epsilon
            << " violates the smallness conditions for n = " << n;
        throw std::domain_error(msg.str());
    }
    p.normalization = gaussian_shell_Cf(n, beta, delta);
    return p;
}

RadialProfile RadialProfile::tabulated(int n, std::vector<double> r,
                                       std::vector<double> f) {
    require_dim(n, "RadialProfile::tabulated");
    if (r.size() < 4 || r.size() != f.size())
        throw std::domain_error("RadialProfile::tabulated: need >= 4 nodes");
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        if (!(r[i] < r[i + 1]) || !(r[i] > 0))
            throw std::domain_error(
                "RadialProfile::tabulated: nodes must be positive increasing");
    RadialProfile p;
    p.kind = ProfileKind::Tabulated;
    p.n = n;
    p.beta = r.back();
    p.r_nodes = std::move(r);
    p.f_samples = std::move(f);
    p.f_slopes = pchip_slopes(p.r_nodes, p.f_samples);
    // scale to unit L2 norm
    auto density = [&](double rr) {
        const double v = pchip_eval(p.r_nodes, p.f_samples, p.f_slopes, rr);
        return v * v * std::pow(rr, n - 1);
    };
    const auto q = integrate_adaptive(density, p.r_nodes.front(),
                                      p.r_nodes.back(), 1e-300, 1e-12);
    const double norm2 = sphere_surface_area(n) * q.value;
    if (!(norm2 > 0))
        throw std::domain_error("RadialProfile::tabulated: zero profile");
    p.normalization = 1.0 / std::sqrt(norm2);
    return p;
}

double profile_f0(const RadialProfile& p, double r) {
    if (r < 0) throw std::domain_error("profile_f0: r must be >= 0");
    switch (p.kind) {
        case ProfileKind::Ball:
            return (r <= p.beta) ? p.normalization : 0.0;
        case ProfileKind::ShellSquare:
            return (r >= p.beta && r <= p.beta + p.delta) ? p.normalization : 0.0;
        case ProfileKind::ShellGaussian:
            return p.normalization * gaussian_shell_raw_f0(p.n, p.beta, p.delta, r);
        case ProfileKind::Tabulated:
            return p.normalization *
                   pchip_eval(p.r_nodes, p.f_samples, p.f_slopes, r);
    }
    return 0.0;
}

std::pair<double, double> profile_support(const RadialProfile& p) {
    switch (p.kind) {
        case ProfileKind::Ball:
            return {0.0, p.beta};
        case ProfileKind::ShellSquare:
            return {p.beta, p.beta + p.delta};
        case ProfileKind::ShellGaussian:
            return {std::max(0.0, p.beta - 9 * p.delta), p.beta + 9 * p.delta};
        case ProfileKind::Tabulated:
            return {p.r_nodes.front(), p.r_nodes.back()};
    }
    return {0.0, 0.0};
}

double hankel_transform(const RadialProfile& p, double rho, double* abs_err) {
    if (!(rho > 0)) throw std::domain_error("hankel_transform: rho must be > 0");
    const auto [lo, hi] = profile_support(p);
    const BesselOrder nu = BesselOrder::halves(p.n - 2);
    auto integrand = [&](double r) {
        const double f = profile_f0(p, r);
        if (f == 0.0) return 0.0;
        return f * bessel_j(nu, 2 * M_PI * rho * r) * std::pow(r, 0.5 * p.n);
    };
    const auto q =
        integrate_oscillatory(integrand, lo, hi, 0.5 / rho, 1e-13, 1e-11);
    const double scale = 2 * M_PI * std::pow(rho, -0.5 * (p.n - 2));
    const double value = scale * q.value;
    const double err = scale * q.abs_err;
    if (abs_err) *abs_err = err;
    if (err > 1e-8 * std::max(std::fabs(value), 1e-6)) {
        std::ostringstream msg;
        msg << "hankel_transform: quadrature error bound " << err
            << " exceeds budget at rho = " << rho;
        throw std::runtime_error(msg.str());
    }
    return value;
}

double ball_F0(int n, double beta, double rho) {
    require_dim(n, "ball_F0");
    if (!(rho > 0)) throw std::domain_error("ball_F0: rho must be > 0");
    const double S0 = sphere_surface_area(n);
    return std::sqrt(n / S0) * std::pow(rho, -0.5 * n) *
           bessel_j(BesselOrder::halves(n), 2 * M_PI * beta * rho);
}

double ball_F0_derivative(int n, double beta, double rho) {
    require_dim(n, "ball_F0_derivative");
    if (!(rho > 0)) throw std::domain_error("ball_F0_derivative: rho must be > 0");
    const double S0 = sphere_surface_area(n);
    return -std::sqrt(n / S0) * std::pow(rho, -0.5 * n) *
           bessel_j(BesselOrder::halves(n + 2), 2 * M_PI * beta * rho) * 2 * M_PI *
           beta;
}

double shell_square_F0(int n, double beta, double delta, double rho) {
    require_dim(n, "shell_square_F0");
    if (!(rho > 0)) throw std::domain_error("shell_square_F0: rho must be > 0");
    const double C = RadialProfile::shell_square(n, beta, delta).normalization;
    const BesselOrder nu = BesselOrder::halves(n);
    const double outer = std::pow(beta + delta, 0.5 * n) *
                         bessel_j(nu, 2 * M_PI * (beta + delta) * rho);
    const double inner =
        std::pow(beta, 0.5 * n) * bessel_j(nu, 2 * M_PI * beta * rho);
    return C * std::pow(rho, -0.5 * n) * (outer - inner);
}

double shell_square_F0_derivative(int n, double beta, double delta, double rho) {
    require_dim(n, "shell_square_F0_derivative");
    if (!(rho > 0))
        throw std::domain_error("shell_square_F0_derivative: rho must be > 0");
    const double C = RadialProfile::shell_square(n, beta, delta).normalization;
    const BesselOrder nu = BesselOrder::halves(n + 2);
    const double outer = std::pow(beta + delta, 0.5 * n + 1) *
                         bessel_j(nu, 2 * M_PI * (beta + delta) * rho);
    const double inner =
        std::pow(beta, 0.5 * n + 1) * bessel_j(nu, 2 * M_PI * beta * rho);
    return -2 * M_PI * C * std::pow(rho, -0.5 * n) * (outer - inner);
}

double shell_gaussian_F0(int n, double beta, double delta, double rho) {
    require_dim(n, "shell_gaussian_F0");
    if (!(rho > 0)) throw std::domain_error("shell_gaussian_F0: rho must be > 0");
    return gaussian_shell_Cf(n, beta, delta) * gaussian_F0_raw(n, beta, delta, rho);
}

double shell_gaussian_F0_derivative(int n, double beta, double delta,
                                    double rho) {
    require_dim(n, "shell_gaussian_F0_derivative");
    if (!(rho > 0))
        throw std::domain_error("shell_gaussian_F0_derivative: rho must be > 0");
    const double cf = gaussian_shell_Cf(n, beta, delta);
    const double F = cf * gaussian_F0_raw(n, beta, delta, rho);
    const double envelope =
        cf * std::pow(delta, 0.5 * n) *
        std::exp(-M_PI * delta * delta * rho * rho) * 2 * M_PI *
        std::pow(beta, 0.5 * n) * std::pow(rho, 1.0 - 0.5 * n);
    const double Jnext = bessel_j(BesselOrder::halves(n), 2 * M_PI * beta * rho);
    return -2 * M_PI * delta * delta * rho * F -
           envelope * 2 * M_PI * beta * Jnext;
}

double profile_F0(const RadialProfile& p, double rho) {
    switch (p.kind) {
        case ProfileKind::Ball:
            return ball_F0(p.n, p.beta, rho);
        case ProfileKind::ShellSquare:
            return shell_square_F0(p.n, p.beta, p.delta, rho);
        case ProfileKind::ShellGaussian:
            return shell_gaussian_F0(p.n, p.beta, p.delta, rho);
        case ProfileKind::Tabulated:
            return hankel_transform(p, rho);
    }
    return 0.0;
}

double profile_F0_derivative(const RadialProfile& p, double rho) {
    switch (p.kind) {
        case ProfileKind::Ball:
            return ball_F0_derivative(p.n, p.beta, rho);
        case ProfileKind::ShellSquare:
            return shell_square_F0_derivative(p.n, p.beta, p.delta, rho);
        case ProfileKind::ShellGaussian:
            return shell_gaussian_F0_derivative(p.n, p.beta, p.delta, rho);
        case ProfileKind::Tabulated: {
            const double h = 1e-6 * std::max(1.0, rho);
            return (hankel_transform(p, rho + h) - hankel_transform(p, rho - h)) /
                   (2 * h);
        }
    }
    return 0.0;
}

namespace {

// S_0 int_0^{rho_cut} F_0^2 rho^{n-1} drho by quadrature
double mass_below_quadrature(const RadialProfile& p, double rho_cut) {
    auto integrand = [&](double rho) {
        const double F = profile_F0(p, rho);
        return F * F * std::pow(rho, p.n - 1);
    };
    // fastest oscillation scale in F_0^2 is ~ 1/(2 (beta + delta))
    const double half_period = 0.25 / (p.beta + p.delta);
    const auto q =
        integrate_oscillatory(integrand, 0.0, rho_cut, half_period, 1e-13, 1e-10);
    return sphere_surface_area(p.n) * q.value;
}

}  // namespace

double high_frequency_mass(const RadialProfile& p, double rho_cut) {
    if (!(rho_cut >= 0))
        throw std::domain_error("high_frequency_mass: rho_cut must be >= 0");
    if (p.kind == ProfileKind::Ball) {
        // S_0 int F_0^2 rho^{n-1} = n int J_{n/2}(2 pi beta rho)^2 drho/rho,
        // an exact Bessel tail identity
        return p.n * j_squared_tail_over_t(BesselOrder::halves(p.n),
                                           2 * M_PI * p.beta * rho_cut);
    }
    if (rho_cut == 0.0) return 1.0;
    return 1.0 - mass_below_quadrature(p, rho_cut);
}

double low_frequency_mass(const RadialProfile& p, double lambda) {
    if (!(lambda > 0))
        throw std::domain_error("low_frequency_mass: lambda must be > 0");
    const double rho_cut = 1.0 / lambda;
    if (p.kind == ProfileKind::Ball)
        return 1.0 - high_frequency_mass(p, rho_cut);
    return mass_below_quadrature(p, rho_cut);
}

}  // namespace curvelet
