#include "curvelet/windows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curvelet/geometry.hpp"

namespace curvelet {

double sphere_surface_area(int n) {
    if (n < 1) throw std::domain_error("sphere_surface_area: n must be >= 1");
    return std::exp(std::log(2.0) + 0.5 * n * std::log(M_PI) -
                    std::lgamma(0.5 * n));
}

bool direction_valid(const SphericalDirection& dir, int n) {
    if (n < 2 || dir.size() != std::size_t(n - 1)) return false;
    bool tail_undef = false;
    for (std::size_t j = 0; j < dir.size(); ++j) {
        if (!dir[j].has_value()) {
            if (j == 0) return false;  // the first register is always set
            tail_undef = true;
            continue;
        }
        if (tail_undef) return false;  // value after an undef register
        const double phi = *dir[j];
        const bool last = (j + 1 == dir.size());
        if (last) {
            if (!(phi > -M_PI - 1e-15 && phi <= M_PI + 1e-15)) return false;
        } else {
            if (!(phi >= 0.0 && phi <= M_PI)) return false;
            if (phi == 0.0 || phi == M_PI) tail_undef = true;
        }
    }
    return true;
}

namespace {

// exact zeros at the poles so pole directions map to exact axis vectors
void cos_sin(double phi, double& c, double& s) {
    if (phi == 0.0) {
        c = 1.0;
        s = 0.0;
    } else if (phi == M_PI) {
        c = -1.0;
        s = 0.0;
    } else {
        c = std::cos(phi);
        s = std::sin(phi);
    }
}

}  // namespace

std::vector<double> direction_to_vector(const SphericalDirection& dir) {
    const int n = int(dir.size()) + 1;
    std::vector<double> v(n, 0.0);
    double prod = 1.0;
    for (int j = 0; j < n - 1; ++j) {
        if (!dir[j].has_value()) return v;  // disengaged tail: coords stay 0
        double c, s;
        cos_sin(*dir[j], c, s);
        v[j] = prod * c;
        prod *= s;
    }
    v[n - 1] = prod;
    return v;
}

SphericalDirection direction_from_vector(const std::vector<double>& v,
                                         double pole_tol) {
    const int n = int(v.size());
    if (n < 2) throw std::domain_error("direction_from_vector: need n >= 2");
    const double total = norm(v);
    if (total == 0.0)
        throw std::domain_error("direction_from_vector: zero vector");

    SphericalDirection dir(n - 1, std::nullopt);
    double tail2 = 0.0;
    std::vector<double> rest(n);  // rest[j] = |(v_j, ..., v_{n-1})|
    for (int j = n - 1; j >= 0; --j) {
        tail2 += v[j] * v[j];
        rest[j] = std::sqrt(tail2);
    }
    for (int j = 0; j < n - 2; ++j) {
        if (rest[j + 1] <= pole_tol * total) {
            dir[j] = (v[j] >= 0.0) ? 0.0 : M_PI;
            return dir;
        }
        dir[j] = std::atan2(rest[j + 1], v[j]);
    }
    dir[n - 2] = std::atan2(v[n - 1], v[n - 2]);
    return dir;
}

double circle_distance(double alpha, double beta) {
    double d = std::fmod(std::fabs(alpha - beta), 2.0 * M_PI);
    return (d > M_PI) ? 2.0 * M_PI - d : d;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::domain_error("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

double angle_between(const std::vector<double>& a,
                     const std::vector<double>& b) {
    const double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0)
        throw std::domain_error("angle_between: zero vector");
    const double c = dot(a, b) / (na * nb);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// continuous family

ContinuousWindowSpec ContinuousWindowSpec::make(int n, double lambda) {
    if (n < 2) throw std::domain_error("ContinuousWindowSpec: n must be >= 2");
    if (!(lambda > 0))
        throw std::domain_error("ContinuousWindowSpec: lambda must be > 0");
    ContinuousWindowSpec spec;
    spec.n = n;
    spec.lambda = lambda;
    spec.S_0 = sphere_surface_area(n);
    spec.C_w = std::sqrt(8.0 / 3.0);
    spec.C_v = std::sqrt(2.0 * (n + 2.0) * n / (3.0 * spec.S_0));
    return spec;
}

bool ContinuousWindowSpec::consistent() const {
    if (n < 2 || !(lambda > 0)) return false;
    const auto ref = make(n, lambda);
    auto close = [](double x, double y) {
        return std::fabs(x - y) <= 1e-14 * std::max(std::fabs(x), std::fabs(y));
    };
    return close(C_w, ref.C_w) && close(C_v, ref.C_v) && close(S_0, ref.S_0);
}

double radial_window_W(double r) {
    if (r < 0) throw std::domain_error("radial_window_W: r must be >= 0");
    if (r < std::exp(-1.0) || r > 1.0) return 0.0;
    const double s = std::sin(M_PI * std::log(r));
    return std::sqrt(8.0 / 3.0) * s * s;
}

double radial_window_W_deriv(double r) {
    if (r < 0) throw std::domain_error("radial_window_W_deriv: r must be >= 0");
    if (r < std::exp(-1.0) || r > 1.0) return 0.0;
    return std::sqrt(8.0 / 3.0) * M_PI * std::sin(2.0 * M_PI * std::log(r)) / r;
}

double angular_window_V(double t, int n) {
    if (n < 2) throw std::domain_error("angular_window_V: n must be >= 2");
    if (t < 0.0 || t > M_PI / 2) return 0.0;
    const double S0 = sphere_surface_area(n);
    const double Cv = std::sqrt(2.0 * (n + 2.0) * n / (3.0 * S0));
    const double c = std::cos(t);
    return Cv * c * c;
}

double angular_window_V_deriv(double t, int n) {
    if (n < 2) throw std::domain_error("angular_window_V_deriv: n must be >= 2");
    if (t < 0.0 || t > M_PI / 2) return 0.0;
    const double S0 = sphere_surface_area(n);
    const double Cv = std::sqrt(2.0 * (n + 2.0) * n / (3.0 * S0));
    return -2.0 * Cv * std::cos(t) * std::sin(t);
}

namespace {

double sinc(double x) {
    const double x2 = x * x;
    if (std::fabs(x) < 1e-4) return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    return std::sin(x) / x;
}

// cos(x) - sin(x)/x, series-stabilized (both terms -> 1 as x -> 0)
double cos_minus_sinc(double x) {
    const double x2 = x * x;
    if (std::fabs(x) < 0.35) {
        return -x2 / 3.0 *
               (1.0 -
                x2 / 10.0 *
                    (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0 * (1.0 - x2 / 88.0))));
    }
    return std::cos(x) - std::sin(x) / x;
}

// 1 - x*cot(x), series-stabilized
double one_minus_xcotx(double x) {
    const double x2 = x * x;
    if (std::fabs(x) < 0.35) {
        const double x4 = x2 * x2;
        return x2 / 3.0 + x4 / 45.0 + 2.0 * x4 * x2 / 945.0 + x4 * x4 / 4725.0 +
               2.0 * x4 * x4 * x2 / 93555.0;
    }
    return 1.0 - x * std::cos(x) / std::sin(x);
}

}  // namespace

double lambda_factor(double a, double phi1, int n) {
    if (!(a > 0.0 && a < 1.0))
        throw std::domain_error("lambda_factor: a must lie in (0,1)");
    if (n < 2) throw std::domain_error("lambda_factor: n must be >= 2");
    const double head = std::pow(a, 0.25 * (n + 1));
    if (n == 2) return head;
    const double u = phi1 / std::sqrt(a);
    // sin(u)*sqrt(a)/sin(phi1) == sinc(u)/sinc(phi1), removing the 0/0 at 0
    const double ratio = sinc(u) / sinc(phi1);
    return head * std::pow(ratio, 0.5 * (n - 2));
}

double lambda_factor_deriv(double a, double phi1, int n) {
    if (!(a > 0.0 && a < 1.0))
        throw std::domain_error("lambda_factor_deriv: a must lie in (0,1)");
    if (n < 2) throw std::domain_error("lambda_factor_deriv: n must be >= 2");
    if (n == 2 || phi1 == 0.0) return 0.0;
    const double sa = std::sqrt(a);
    const double u = phi1 / sa;
    const double ratio = sinc(u) / (sa * sinc(phi1));  // sin(u)/sin(phi1)
    // d/dphi of sin(u)/sin(phi), written so the two O(phi^2) pieces are
    // evaluated by series instead of cancelling
    const double inner = cos_minus_sinc(u) + sinc(u) * one_minus_xcotx(phi1);
    const double bracket = inner / (sa * std::sin(phi1));
    return std::pow(a, 0.25 * (2 * n - 1)) * 0.5 * (n - 2) *
           std::pow(ratio, 0.5 * (n - 4)) * bracket;
}

double chi_continuous(const ContinuousWindowSpec& spec, double a,
                      const std::vector<double>& theta,
                      const std::vector<double>& k) {
    if (!spec.consistent())
        throw std::domain_error("chi_continuous: inconsistent window spec");
    if (!(a > 0.0 && a < 1.0))
        throw std::domain_error("chi_continuous: a must lie in (0,1)");
    if (theta.size() != std::size_t(spec.n) || k.size() != std::size_t(spec.n))
        throw std::domain_error("chi_continuous: dimension mismatch");
    if (std::fabs(norm(theta) - 1.0) > 1e-12)
        throw std::domain_error("chi_continuous: theta must be a unit vector");

    const double r = norm(k);
    if (r == 0.0) return 0.0;
    const double Wv = radial_window_W(spec.lambda * a * r);
    if (Wv == 0.0) return 0.0;
    const double phi1 = angle_between(k, theta);
    const double Vv = angular_window_V(phi1 / std::sqrt(a), spec.n);
    if (Vv == 0.0) return 0.0;
    return Wv * Vv * lambda_factor(a, phi1, spec.n);
}

// ---------------------------------------------------------------------------
// discrete family

double c_profile(double x, CProfileKind kind) {
    if (kind == CProfileKind::Indicator)
        throw std::invalid_argument(
            "c_profile: the indicator family has no transition profile");
    if (x <= 0.0) return 1.0;
    if (x >= M_PI / 2) return 0.0;
    if (kind == CProfileKind::PlainCosine) return std::cos(x);
    const double s = std::sin(x);
    return std::cos(M_PI / 2 * s * s);
}

namespace {

// floor(lg r) read off the exponent bits, exact at dyadic boundaries
int floor_log2(double r) {
    int e = 0;
    std::frexp(r, &e);
    return e - 1;
}

double indicator_radial(const ScaleIndex& s, double r, int s_min, int s_max) {
    ScaleIndex::Kind assigned = ScaleIndex::Kind::Regular;
    int band = 0;
    if (r == 0.0) {
        assigned = ScaleIndex::Kind::Coarse;
    } else {
        band = floor_log2(r);
        if (band < s_min) assigned = ScaleIndex::Kind::Coarse;
        if (band > s_max) assigned = ScaleIndex::Kind::Fine;
    }
    if (s.kind != assigned) return 0.0;
    return (assigned != ScaleIndex::Kind::Regular || s.s == band) ? 1.0 : 0.0;
}

}  // namespace

double radial_window_discrete(const ScaleIndex& s, double r, int s_min,
                              int s_max, CProfileKind kind) {
    if (s_min < 1 || s_min > s_max)
        throw std::domain_error("radial_window_discrete: need 1 <= s_min <= s_max");
    if (r < 0) throw std::domain_error("radial_window_discrete: r must be >= 0");
    if (s.kind == ScaleIndex::Kind::Regular && (s.s < s_min || s.s > s_max))
        throw std::domain_error(
            "radial_window_discrete: scale outside [s_min, s_max]");
    if (kind == CProfileKind::Indicator)
        return indicator_radial(s, r, s_min, s_max);

    switch (s.kind) {
        case ScaleIndex::Kind::Coarse: {
            const double lo = std::ldexp(1.0, s_min - 1);
            if (r <= lo) return 1.0;
            if (r >= 2 * lo) return 0.0;
            return c_profile(M_PI / 2 * (r - lo) / lo, kind);
        }
        case ScaleIndex::Kind::Fine: {
            const double lo = std::ldexp(1.0, s_max);
            if (r <= lo) return 0.0;
            if (r >= 2 * lo) return 1.0;
            return c_profile(M_PI / 2 * (2 * lo - r) / lo, kind);
        }
        case ScaleIndex::Kind::Regular: {
            const double mid = std::ldexp(1.0, s.s);
            if (r <= mid / 2 || r >= 2 * mid) return 0.0;
            if (r < mid) return c_profile(M_PI / 2 * (mid - r) / (mid / 2), kind);
            return c_profile(M_PI / 2 * (r - mid) / mid, kind);
        }
    }
    return 0.0;
}

namespace {

int half_count(int s) { return 1 << ((s + 1) / 2); }  // 2^{ceil(s/2)}

std::vector<SphericalDirection> grid_recursive(int registers, int hprime) {
    const double h = M_PI / hprime;
    std::vector<SphericalDirection> out;
    if (registers == 1) {
        // the circle: 2*hprime points, wrapped into (-pi, pi]
        out.reserve(2 * hprime);
        for (int t = 0; t < 2 * hprime; ++t) {
            double ang = t * h;
            if (ang > M_PI) ang -= 2.0 * M_PI;
            out.push_back({ang});
        }
        return out;
    }
    const auto sub = grid_recursive(registers - 1, hprime);
    out.reserve(std::size_t(hprime - 1) * sub.size() + 2);
    for (int t = 1; t < hprime; ++t) {
        for (const auto& tail : sub) {
            SphericalDirection dir;
            dir.reserve(registers);
            dir.push_back(t * h);
            dir.insert(dir.end(), tail.begin(), tail.end());
            out.push_back(std::move(dir));
        }
    }
    SphericalDirection north(registers, std::nullopt), south(registers, std::nullopt);
    north[0] = 0.0;
    south[0] = M_PI;
    out.push_back(std::move(north));
    out.push_back(std::move(south));
    return out;
}

}  // namespace

double sphere_grid_spacing(int s) {
    if (s < 1) throw std::domain_error("sphere_grid_spacing: s must be >= 1");
    return M_PI / half_count(s);
}

std::vector<SphericalDirection> sphere_grid(int s, int n) {
    if (s < 1) throw std::domain_error("sphere_grid: s must be >= 1");
    if (n < 2) throw std::domain_error("sphere_grid: n must be >= 2");
    return grid_recursive(n - 1, half_count(s));
}

long long sphere_grid_size(int s, int n) {
    if (s < 1) throw std::domain_error("sphere_grid_size: s must be >= 1");
    if (n < 2) throw std::domain_error("sphere_grid_size: n must be >= 2");
    const long long hprime = half_count(s);
    long long count = 2 * hprime;
    for (int k = 2; k < n; ++k) count = (hprime - 1) * count + 2;
    return count;
}

double angular_bump(int s, std::optional<double> theta_j,
                    std::optional<double> phi_j, bool is_last_coordinate,
                    CProfileKind kind) {
    if (s < 1) throw std::domain_error("angular_bump: s must be >= 1");
    if (kind == CProfileKind::Indicator)
        throw std::invalid_argument(
            "angular_bump: the indicator family assigns whole direction cells");
    if (!theta_j.has_value() || !phi_j.has_value()) return 1.0;
    const double d = is_last_coordinate ? circle_distance(*theta_j, *phi_j)
                                        : std::fabs(*theta_j - *phi_j);
    return c_profile(0.5 * half_count(s) * d, kind);
}

double angular_bump_product(int s, const SphericalDirection& theta,
                            const SphericalDirection& phi, CProfileKind kind) {
    if (theta.size() != phi.size())
        throw std::domain_error("angular_bump_product: register count mismatch");
    double prod = 1.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        prod *= angular_bump(s, theta[j], phi[j], j + 1 == theta.size(), kind);
        if (prod == 0.0) return 0.0;
    }
    return prod;
}

}  // namespace curvelet
