#include "udw/specfun.hpp"

#include <cmath>
#include <limits>

#include "udw/errors.hpp"

namespace udw::sf {

namespace {

constexpr double kTwoOverSqrtPi = 1.12837916709551257390;
constexpr double kSqrtPi = 1.77245385090551602730;
constexpr double kMaxExp = 708.0;

// w(z) for Im z >= 0 (Poppe & Wijers region scheme: power series near the
// origin, Laplace continued fraction far out, Taylor expansion in between)
cplx faddeeva_upper(double xi, double yi) {
    const double xabs = std::fabs(xi);
    const double yabs = yi;
    const double xs = xabs / 6.3;
    const double ys = yabs / 4.4;
    double qrho = xs * xs + ys * ys;
    const double xquad = xabs * xabs - yabs * yabs;
    const double yquad = 2.0 * xabs * yabs;
    double u, v;
    if (qrho < 0.085264) {
        qrho = (1.0 - 0.85 * ys) * std::sqrt(qrho);
        const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
        int j = 2 * n + 1;
        double xsum = 1.0 / j;
        double ysum = 0.0;
        for (int i = n; i >= 1; --i) {
            j -= 2;
            const double xaux = (xsum * xquad - ysum * yquad) / i;
            ysum = (xsum * yquad + ysum * xquad) / i;
            xsum = xaux + 1.0 / j;
        }
        const double u1 = -kTwoOverSqrtPi * (xsum * yabs + ysum * xabs) + 1.0;
        const double v1 = kTwoOverSqrtPi * (xsum * xabs - ysum * yabs);
        const double daux = std::exp(-xquad);
        const double u2 = daux * std::cos(yquad);
        const double v2 = -daux * std::sin(yquad);
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        double h = 0.0, h2 = 0.0, qlambda = 0.0;
        int kapn = 0, nu;
        if (qrho > 1.0) {
            qrho = std::sqrt(qrho);
            nu = static_cast<int>(3.0 + 1442.0 / (26.0 * qrho + 77.0));
        } else {
            qrho = (1.0 - ys) * std::sqrt(1.0 - qrho);
            h = 1.88 * qrho;
            h2 = 2.0 * h;
            kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
            nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
        }
        const bool taylor = h > 0.0;
        if (taylor) qlambda = std::pow(h2, kapn);
        double rx = 0.0, ry = 0.0, sx = 0.0, sy = 0.0;
        for (int n = nu; n >= 0; --n) {
            const double np1 = n + 1.0;
            double tx = yabs + h + np1 * rx;
            const double ty = xabs - np1 * ry;
            const double c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if (taylor && n <= kapn) {
                tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if (taylor) {
            u = kTwoOverSqrtPi * sx;
            v = kTwoOverSqrtPi * sy;
        } else {
            u = kTwoOverSqrtPi * rx;
            v = kTwoOverSqrtPi * ry;
        }
        if (yabs == 0.0) u = std::exp(-xabs * xabs);
    }
    if (xi < 0.0) v = -v;
    return {u, v};
}

cplx erf_series(cplx z) {
    // erf(z) = 2/sqrt(pi) sum (-1)^n z^(2n+1) / (n! (2n+1))
    const cplx z2 = z * z;
    cplx term = z;
    cplx sum = z;
    for (int n = 1; n < 200; ++n) {
        term *= -z2 / static_cast<double>(n);
        const cplx add = term / static_cast<double>(2 * n + 1);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return kTwoOverSqrtPi * sum;
}

}  // namespace

cplx faddeeva(cplx z) {
    const double x = z.real(), y = z.imag();
    if (!std::isfinite(x) || !std::isfinite(y)) throw OverflowError("faddeeva: non-finite argument");
    if (y >= 0.0) return faddeeva_upper(x, y);
    // w(z) = 2 exp(-z^2) - w(-z)
    const cplx mz2 = -z * z;
    if (mz2.real() > kMaxExp) throw OverflowError("faddeeva: exp(-z^2) overflows in the lower half plane");
    return 2.0 * std::exp(mz2) - faddeeva_upper(-x, -y);
}

cplx faddeeva_deriv(cplx z) { return -2.0 * z * faddeeva(z) + cplx(0.0, kTwoOverSqrtPi); }

cplx erfc_scaled(cplx z) { return exp_erfc_scaled(0.0, z); }

cplx exp_erfc_scaled(cplx c, cplx z) {
    // erfc_scaled(z) = w(iz); for Re z < 0 use w(iz) = 2 exp(z^2) - w(-iz)
    const cplx iz(-z.imag(), z.real());
    if (z.real() >= 0.0) return std::exp(c) * faddeeva_upper(iz.real(), iz.imag());
    const cplx e = c + z * z;
    if (e.real() > kMaxExp) throw OverflowError("exp_erfc_scaled: result not representable");
    return 2.0 * std::exp(e) - std::exp(c) * faddeeva_upper(-iz.real(), -iz.imag());
}

cplx erf(cplx z) {
    if (std::abs(z) >= 1e8) {
        if (std::fabs(z.real()) >= std::fabs(z.imag())) return z.real() > 0 ? 1.0 : -1.0;
        throw OverflowError("erf: argument too large off the real axis");
    }
    if (z.real() < 0.0) return -erf(-z);
    if (std::abs(z) < 2.0) return erf_series(z);
    // erf(z) = 1 - exp(-z^2) w(iz), Re z >= 0 so w(iz) is in the upper half plane
    const cplx mz2 = -z * z;
    if (mz2.real() > kMaxExp) throw OverflowError("erf: exp(-z^2) overflows");
    return 1.0 - std::exp(mz2) * faddeeva_upper(-z.imag(), z.real());
}

cplx erfc(cplx z) {
    if (z.real() < 0.0) return 2.0 - erfc(-z);
    if (std::abs(z) < 0.5) return 1.0 - erf_series(z);
    const cplx mz2 = -z * z;
    if (mz2.real() > kMaxExp) throw OverflowError("erfc: exp(-z^2) overflows");
    if (mz2.real() < -745.0) return 0.0;
    return std::exp(mz2) * faddeeva_upper(-z.imag(), z.real());
}

double erfi(double x) {
    if (std::fabs(x) < 2.0) return erf_series(cplx(0.0, x)).imag();
    if (x * x > kMaxExp) throw OverflowError("erfi: |x| too large for the unscaled value");
    return std::exp(x * x) * faddeeva_upper(x, 0.0).imag();
}

double gauss_damped_erfi(double x) {
    if (!std::isfinite(x)) throw OverflowError("gauss_damped_erfi: non-finite argument");
    // Im w(x) = exp(-x^2) erfi(x) on the real axis
    return faddeeva_upper(x, 0.0).imag();
}

double erfcx(double x) {
    if (x >= 0.0) return faddeeva_upper(0.0, x).real();
    if (x * x > kMaxExp) throw OverflowError("erfcx: result not representable");
    return 2.0 * std::exp(x * x) - faddeeva_upper(0.0, -x).real();
}

double one_minus_sqrtpi_x_erfcx(double x) {
    if (x < 5.0) return 1.0 - kSqrtPi * x * erfcx(x);
    // sqrt(pi) erfcx(x) = 1/(x + R), R = (1/2)/(x + 1/(x + (3/2)/(x + ...)))
    double r = 0.0;
    for (int n = 120; n >= 1; --n) r = 0.5 * n / (x + r);
    return r / (x + r);
}

}  // namespace udw::sf
