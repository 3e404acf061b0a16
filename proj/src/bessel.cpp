#include "curvelet/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curvelet {

namespace {

constexpr long double PI_L = 3.141592653589793238462643383279502884L;

void check_order(BesselOrder nu) {
    if (nu.twice < 0) throw std::domain_error("bessel: order must be >= 0");
}

// Ascending series about x = 0; long double keeps the alternating-series
// cancellation near the x ~ 12 handover below ~1e-15 relative.
long double series_j(long double v, long double x) {
    if (x == 0.0L) return v == 0.0L ? 1.0L : 0.0L;
    const long double q = 0.25L * x * x;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 500; ++k) {
        term *= -q / (static_cast<long double>(k) * (v + k));
        sum += term;
        if (std::abs(term) <= 1e-21L * std::abs(sum)) break;
    }
    const long double ln_lead = v * std::log(0.5L * x) - std::lgamma(v + 1.0L);
    return std::exp(ln_lead) * sum;
}

// Hankel modulus-phase expansion:
//   J = sqrt(2/(pi x)) (P cos chi - Q sin chi)
//   Y = sqrt(2/(pi x)) (P sin chi + Q cos chi),   chi = x - (2 nu + 1) pi/4.
// Terms t_k = t_{k-1} (mu - (2k-1)^2) / (8 k x); truncated at the first
// non-decreasing term.
void hankel_pq(long double v, long double x, long double& P, long double& Q) {
    const long double mu = 4.0L * v * v;
    P = 1.0L;
    Q = 0.0L;
    long double t = 1.0L;
    long double prev_mag = 1e4932L;
    for (int k = 1; k <= 80; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        t *= (mu - odd * odd) / (8.0L * k * x);
        const long double mag = std::abs(t);
        if (mag >= prev_mag || mag < 1e-22L) break;
        prev_mag = mag;
        const int r = k % 4;  // sign cycle: +Q, -P, -Q, +P
        if (r == 1) Q += t;
        else if (r == 2) P -= t;
        else if (r == 3) Q -= t;
        else P += t;
    }
}

long double hankel_j(long double v, long double x) {
    long double P, Q;
    hankel_pq(v, x, P, Q);
    const long double chi = x - (0.5L * v + 0.25L) * PI_L;
    return std::sqrt(2.0L / (PI_L * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

long double hankel_y(long double v, long double x) {
    long double P, Q;
    hankel_pq(v, x, P, Q);
    const long double chi = x - (0.5L * v + 0.25L) * PI_L;
    return std::sqrt(2.0L / (PI_L * x)) * (P * std::sin(chi) + Q * std::cos(chi));
}

long double closed_j_half(long double x) {  // J_{1/2}
    return std::sqrt(2.0L / (PI_L * x)) * std::sin(x);
}
long double closed_j_mhalf(long double x) {  // J_{-1/2}
    return std::sqrt(2.0L / (PI_L * x)) * std::cos(x);
}

// Upward recurrence J_{w+1} = (2w/x) J_w - J_{w-1} from the half-integer
// closed forms.  Only used with x >= 2 * (target order), where all
// intermediate orders sit in the oscillatory regime and the error growth
// is linear, not exponential.
long double upward_j_half(int twice_nu, long double x) {
    long double jm = closed_j_mhalf(x);  // order -1/2
    long double j = closed_j_half(x);    // order +1/2
    if (twice_nu == 1) return j;
    long double w = 0.5L;
    for (int t = 1; t < twice_nu; t += 2) {
        const long double jn = (2.0L * w / x) * j - jm;
        jm = j;
        j = jn;
        w += 1.0L;
    }
    return j;
}

// Backward (Miller) recurrence.  Computes unnormalized values down to
// order parity_base (0 or 1/2), normalizes by the even-order sum rule
// (integer) or by the larger of the closed-form J_{1/2}, J_{3/2}
// (half-integer).  Returns orders base .. base+count-1 where
// base = twice_lo/2.
std::vector<double> miller_run(int twice_lo, int count, long double x) {
    const bool half = (twice_lo % 2) != 0;
    const int twice_hi = twice_lo + 2 * (count - 1);
    const long double vhi = 0.5L * twice_hi;
    // Start far enough above both the largest requested order and the
    // Airy transition at order ~ x.
    const long double cbrtx = std::cbrt(x);
    long double start_v =
        std::max<long double>(vhi, x) + 14.0L * std::max<long double>(1.0L, cbrtx) + 24.0L;
    int twice_start = 2 * static_cast<int>(start_v) + (half ? 1 : 0) + 2;

    std::vector<long double> out(count, 0.0L);
    long double jp = 0.0L;   // order w + 1
    long double jc = 1e-310L;  // order w  (arbitrary seed scale)
    long double sum = 0.0L;  // integer parity: J_0 + 2 sum J_{2k}
    const long double rescale_at = 1e4000L;
    for (int tw = twice_start; tw >= (half ? 1 : 0); tw -= 2) {
        // jc currently holds order tw/2; record if requested
        if (tw >= twice_lo && tw <= twice_hi && ((tw - twice_lo) % 2 == 0)) {
            out[(tw - twice_lo) / 2] = jc;
        }
        if (!half && tw % 4 == 0) sum += (tw == 0 ? 1.0L : 2.0L) * jc;
        if (tw == (half ? 1 : 0)) {
            if (half) {
                // normalize by the better-conditioned closed form
                const long double j12 = closed_j_half(x);
                const long double j32 =
                    std::sqrt(2.0L / (PI_L * x)) * (std::sin(x) / x - std::cos(x));
                long double ratio;
                if (std::abs(j12) >= std::abs(j32)) {
                    ratio = j12 / jc;
                } else {
                    ratio = j32 / jp;
                }
                std::vector<double> res(count);
                for (int i = 0; i < count; ++i)
                    res[i] = static_cast<double>(out[i] * ratio);
                return res;
            }
            break;
        }
        const long double w = 0.5L * tw;
        long double jm = (2.0L * w / x) * jc - jp;
        jp = jc;
        jc = jm;
        if (std::abs(jc) > rescale_at) {
            const long double inv = 1.0L / rescale_at;
            jc *= inv;
            jp *= inv;
            sum *= inv;
            for (auto& o : out) o *= inv;
        }
    }
    std::vector<double> res(count);
    for (int i = 0; i < count; ++i)
        res[i] = static_cast<double>(out[i] / sum);
    return res;
}

long double eval_j(BesselOrder nu, long double x) {
    const long double v = nu.value();
    if (x == 0.0L) return v == 0.0L ? 1.0L : 0.0L;
    // The series below 2v is cancellation-safe (in long double) only up to
    // v ~ 12; larger orders at x < 2v are the minimal solution and belong
    // to backward recurrence.
    if (x <= 12.0L || (v <= 12.0L && x <= 2.0L * v)) return series_j(v, x);
    if (x >= 4.0L * v * v) {
        // half-integer closed forms are exact; prefer them to asymptotics
        if (nu.half_integer()) return upward_j_half(nu.twice, x);
        return hankel_j(v, x);
    }
    // Intermediate regime: x in (max(12, 2v), 4 v^2).
    if (nu.half_integer() && x >= 2.0L * v) return upward_j_half(nu.twice, x);
    return miller_run(nu.twice, 1, x)[0];
}

// Y_0 / Y_1 ascending series (long double), standard log form.
long double series_y01(int n, long double x) {
    const long double gamma_e = 0.5772156649015328606065120900824024L;
    const long double lnx2 = std::log(0.5L * x);
    const long double q = -0.25L * x * x;  // (-x^2/4)
    if (n == 0) {
        // Y_0 = (2/pi) [ (ln(x/2)+gamma) J_0 + sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2 ]
        long double term = 1.0L;  // (-q)^k / (k!)^2 with sign handled below
        long double hk = 0.0L;
        long double sum = 0.0L;
        long double pow = 1.0L;
        for (int k = 1; k < 400; ++k) {
            pow *= q / (static_cast<long double>(k) * k);
            hk += 1.0L / k;
            const long double t = -pow * hk;  // (-1)^{k+1} (x^2/4)^k H_k/(k!)^2
            sum += t;
            if (std::abs(t) <= 1e-21L * (std::abs(sum) + 1.0L)) break;
        }
        (void)term;
        return (2.0L / PI_L) * ((lnx2 + gamma_e) * series_j(0.0L, x) + sum);
    }
    // Y_1 = (2/pi) ln(x/2) J_1 - (2/(pi x))
    //       - (x/(2 pi)) sum_{k>=0} (psi(k+1)+psi(k+2)) q^k / (k!(k+1)!)
    long double psi1 = -gamma_e;         // psi(k+1)
    long double psi2 = -gamma_e + 1.0L;  // psi(k+2)
    long double pow = 1.0L;              // q^k / (k!(k+1)!)
    long double sum = psi1 + psi2;
    for (int k = 1; k < 400; ++k) {
        pow *= q / (static_cast<long double>(k) * (k + 1));
        psi1 += 1.0L / k;
        psi2 += 1.0L / (k + 1);
        const long double t = (psi1 + psi2) * pow;
        sum += t;
        if (std::abs(t) <= 1e-21L * (std::abs(sum) + 1.0L)) break;
    }
    return (2.0L / PI_L) * lnx2 * series_j(1.0L, x) - 2.0L / (PI_L * x) -
           (x / (2.0L * PI_L)) * sum;
}

long double eval_y(BesselOrder nu, long double x) {
    const long double v = nu.value();
    if (x <= 0.0L) throw std::domain_error("bessel_y: x must be positive");
    if (x >= std::max<long double>(12.0L, 4.0L * v * v) && !nu.half_integer())
        return hankel_y(v, x);
    if (nu.half_integer()) {
        // exact forms, upward recurrence (the growing direction for Y)
        long double ym = std::sqrt(2.0L / (PI_L * x)) * std::sin(x);   // -1/2
        long double y = -std::sqrt(2.0L / (PI_L * x)) * std::cos(x);   // +1/2
        long double w = 0.5L;
        for (int t = 1; t < nu.twice; t += 2) {
            const long double yn = (2.0L * w / x) * y - ym;
            ym = y;
            y = yn;
            w += 1.0L;
        }
        return y;
    }
    // Integer order: seeds Y_0, Y_1, then upward.
    long double y0 = (x <= 12.0L) ? series_y01(0, x) : hankel_y(0.0L, x);
    if (nu.twice == 0) return y0;
    long double y1 = (x <= 12.0L) ? series_y01(1, x) : hankel_y(1.0L, x);
    long double ym = y0, y = y1;
    for (int m = 1; 2 * m < nu.twice; ++m) {
        const long double yn = (2.0L * m / x) * y - ym;
        ym = y;
        y = yn;
    }
    return y;
}

}  // namespace

double bessel_j(BesselOrder nu, double x) {
    check_order(nu);
    if (x < 0.0) throw std::domain_error("bessel_j: x must be >= 0");
    return static_cast<double>(eval_j(nu, x));
}

double bessel_y(BesselOrder nu, double x) {
    check_order(nu);
    return static_cast<double>(eval_y(nu, x));
}

std::vector<double> bessel_j_orders(BesselOrder nu, int count, double x) {
    check_order(nu);
    if (count <= 0) return {};
    if (x < 0.0) throw std::domain_error("bessel_j_orders: x must be >= 0");
    // The series is only safe for every order in the run when x is small;
    // past that the low orders would cancel catastrophically, so sweep
    // backward instead.
    if (x <= 12.0) {
        std::vector<double> out(count);
        for (int i = 0; i < count; ++i)
            out[i] = static_cast<double>(
                series_j(nu.value() + i, static_cast<long double>(x)));
        return out;
    }
    return miller_run(nu.twice, count, static_cast<long double>(x));
}

double modulus_sq(BesselOrder nu, double x) {
    const double j = bessel_j(nu, x);
    const double y = bessel_y(nu, x);
    return j * j + y * y;
}

double small_arg_envelope(BesselOrder nu, double t) {
    check_order(nu);
    if (t < 0.0) throw std::domain_error("small_arg_envelope: t must be >= 0");
    const double v = nu.value();
    if (t == 0.0) return v == 0.0 ? 1.0 : 0.0;
    const double b1 = std::exp(v * std::log(0.5 * t) - std::lgamma(v + 1.0));
    if (v <= 0.0) return b1;
    const double b2 = std::exp(-0.5 * std::log(2.0 * M_PI * v) +
                               v * std::log(t * M_E / (2.0 * v)));
    return std::min(b1, b2);
}

double j_squared_tail_over_t(BesselOrder nu, double z) {
    check_order(nu);
    const double v = nu.value();
    if (v < 1.0) throw std::domain_error("j_squared_tail_over_t: order must be >= 1");
    if (z < 0.0) throw std::domain_error("j_squared_tail_over_t: z must be >= 0");
    if (z == 0.0) return 1.0 / (2.0 * v);
    if (!nu.half_integer()) {
        const int m = nu.twice / 2;
        const std::vector<double> j = bessel_j_orders(BesselOrder::of_int(0), m + 1, z);
        long double s = j[0] * (long double)j[0] + j[m] * (long double)j[m];
        for (int k = 1; k < m; ++k) s += 2.0L * j[k] * (long double)j[k];
        return static_cast<double>(s / (2.0L * m));
    }
    // General (half-integer) order: 1 - J_nu^2 - 2 sum_{j>=1} J_{nu+j}^2,
    // truncated past the Airy transition where the terms collapse.
    const int extra = static_cast<int>(14.0 * std::max(1.0, std::cbrt(z)) + 30.0);
    const int count = std::max(2, static_cast<int>(std::ceil(z - v)) + extra);
    const std::vector<double> j = bessel_j_orders(nu, count, z);
    long double s = j[0] * (long double)j[0];
    for (int i = 1; i < count; ++i) s += 2.0L * j[i] * (long double)j[i];
    return static_cast<double>((1.0L - s) / (2.0L * v));
}

double tail_integral_lower_bound(BesselOrder nu, double z) {
    check_order(nu);
    const double v = nu.value();
    if (v < 1.0) throw std::domain_error("tail_integral_lower_bound: order must be >= 1");
    if (z < 2.0 * v)
        throw std::domain_error("tail_integral_lower_bound: requires z >= 2 nu");
    return (1.0 - 1.0 / (2.0 * v)) / (7.0 * (z + 5.20));
}

double tail_integral_upper_bound(BesselOrder nu, int k, double z) {
    check_order(nu);
    const double v = nu.value();
    if (k < 1) throw std::domain_error("tail_integral_upper_bound: k must be >= 1");
    if (v < 0.5 || z < 2.0 * v)
        throw std::domain_error("tail_integral_upper_bound: requires z >= 2 nu >= 1");
    return 4.0 / (M_PI * std::sqrt(3.0) * k) * std::pow(z, -k);
}

}  // namespace curvelet
