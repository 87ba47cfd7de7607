#include "udw/wightman.hpp"

#include <cmath>

#include "udw/errors.hpp"
#include "udw/specfun.hpp"

namespace udw {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInv4Pi2 = 1.0 / (4.0 * kPi * kPi);
const cplx I(0.0, 1.0);

SpacetimeEvent event_of(const DetectorParams& d, double t) {
    return {t, d.position[0], d.position[1], d.position[2]};
}

double spatial_distance(const DetectorParams& a, const DetectorParams& b) {
    const double dx = a.position[0] - b.position[0];
    const double dy = a.position[1] - b.position[1];
    const double dz = a.position[2] - b.position[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

double heaviside_half(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return 0.0;
    return 0.5;
}

cplx wightman_minkowski(const SpacetimeEvent& x, const SpacetimeEvent& y, double eps) {
    const double dx = x.x - y.x, dy = x.y - y.y, dz = x.z - y.z;
    const cplx dt(x.t - y.t, -eps);
    return -kInv4Pi2 / (dt * dt - (dx * dx + dy * dy + dz * dz));
}

cplx wightman_minkowski_smeared(double dt, double L, double sigma) {
    if (!(sigma > 0.0)) throw Error("wightman_minkowski_smeared: sigma must be positive");
    // (1/(4 pi^2 L)) int_0^inf dk exp(-k^2 sigma^2/2) exp(-i k dt) sin(k L)
    // with int_0^inf exp(-b^2 k^2 + i c k) dk = sqrt(pi)/(2b) w(c/(2b)), b = sigma/sqrt(2)
    const double b = sigma / std::sqrt(2.0);
    const double pref = std::sqrt(kPi) / (2.0 * b);
    const cplx z0(-dt / (2.0 * b), 0.0);
    const double h = L / (2.0 * b);
    if (h < 1e-4) {
        // symmetric difference of w about z0 divided by 2h, expanded to O(h^2)
        const cplx w = sf::faddeeva(z0);
        const cplx w1 = -2.0 * z0 * w + 2.0 * I / std::sqrt(kPi);
        const cplx w2 = -2.0 * (w + z0 * w1);
        const cplx w3 = -2.0 * (2.0 * w1 + z0 * w2);
        const cplx d = w1 + h * h * w3 / 6.0;
        // [w(z0+h) - w(z0-h)] / (2i L) = d * 2h / (2i L) = d / (2 i b)
        return kInv4Pi2 * pref * d / (2.0 * I * b);
    }
    const cplx diff = sf::faddeeva(z0 + h) - sf::faddeeva(z0 - h);
    return kInv4Pi2 / L * pref * diff / (2.0 * I);
}

cplx wightman_shockwave(const SpacetimeEvent& x, const SpacetimeEvent& y, const ShockwaveParams& p, double eps,
                        bool* near_pole) {
    const double du = x.u() - y.u();
    const double dv = x.v() - y.v();
    const double dth = heaviside_half(x.u() - p.u0) - heaviside_half(y.u() - p.u0);
    const double dxt = x.x - y.x, dyt = x.y - y.y;
    const cplx dU(du, -eps), dV(dv, -eps);
    const cplx A(x.u() - p.u0, -eps), B(y.u() - p.u0, eps);
    const double ad = p.a * dth;

    cplx main = dV * dU - (dxt * dxt + dyt * dyt);
    cplx pref = 1.0;
    bool close = std::abs(dU) < 1e-12;
    if (ad != 0.0) {
        const cplx den = dU + ad * A * B;
        close = close || std::abs(den) < 1e-12;
        const double xi[2] = {x.x, x.y};
        const double Xi[2] = {y.x, y.y};
        cplx sq = 1.0;
        for (int i = 0; i < 2; ++i) {
            const cplx F = 1.0 + ad * A * B / dU;
            sq *= std::sqrt(F);
            const cplx m = B * xi[i] - A * Xi[i];
            main += ad * m * m / den;
        }
        pref = 1.0 / sq;
    }
    close = close || std::abs(main) < 1e-12;
    if (near_pole) *near_pole = close;
    return -kInv4Pi2 * pref / main;
}

cplx wightman_shockwave_onaxis(const SpacetimeEvent& x, const SpacetimeEvent& y, const ShockwaveParams& p,
                               double eps) {
    const double u = x.u() - p.u0, U = y.u() - p.u0;
    const double dth = heaviside_half(u) - heaviside_half(U);
    const cplx dU(u - U, -eps), dV(x.v() - y.v(), -eps);
    const cplx factor = 1.0 + p.a * dth * cplx(u, -eps) * cplx(U, eps) / dU;
    return -kInv4Pi2 / factor / (dV * dU);
}

cplx wightman_shockwave_excess(const SpacetimeEvent& x, const SpacetimeEvent& y, const ShockwaveParams& p,
                               double eps) {
    if (x.x != 0.0 || x.y != 0.0 || y.x != 0.0 || y.y != 0.0)
        return wightman_shockwave(x, y, p, eps) - wightman_minkowski(x, y, eps);
    const double u = x.u() - p.u0, U = y.u() - p.u0;
    const double dth = heaviside_half(u) - heaviside_half(U);
    if (dth == 0.0 || p.a == 0.0) return 0.0;
    const cplx dU(u - U, -eps), dV(x.v() - y.v(), -eps);
    const cplx ab = p.a * dth * cplx(u, -eps) * cplx(U, eps);
    return kInv4Pi2 * ab / (dV * dU * (dU + ab));
}

void WightmanBackend::inner_breaks(const DetectorParams&, double, const DetectorParams&, std::vector<double>&) const {}

void WightmanBackend::outer_breaks(const DetectorParams&, const DetectorParams&, std::vector<double>&) const {}

bool WightmanBackend::vanishes(const DetectorParams&, const DetectorParams&, double) const { return false; }

cplx MinkowskiPointlike::pullback(const DetectorParams& j, double t1, const DetectorParams& k, double t2,
                                  double eps) const {
    return wightman_minkowski(event_of(j, t1), event_of(k, t2), eps);
}

void MinkowskiPointlike::inner_breaks(const DetectorParams& j, double t1, const DetectorParams& k,
                                      std::vector<double>& out) const {
    const double L = spatial_distance(j, k);
    out.push_back(t1 - L);
    if (L > 0.0) out.push_back(t1 + L);
}

MinkowskiSmeared::MinkowskiSmeared(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0)) throw Error("MinkowskiSmeared: sigma must be positive");
}

cplx MinkowskiSmeared::pullback(const DetectorParams& j, double t1, const DetectorParams& k, double t2,
                                double) const {
    return wightman_minkowski_smeared(t1 - t2, spatial_distance(j, k), sigma_);
}

void MinkowskiSmeared::inner_breaks(const DetectorParams& j, double t1, const DetectorParams& k,
                                    std::vector<double>& out) const {
    const double L = spatial_distance(j, k);
    out.push_back(t1 - L);
    if (L > 0.0) out.push_back(t1 + L);
}

ShockwaveBackend::ShockwaveBackend(ShockwaveParams p, Form f) : p_(p), form_(f) {
    if (!(p.a >= 0.0)) throw Error("shockwave: a must be non-negative");
}

const char* ShockwaveBackend::name() const {
    switch (form_) {
        case Form::General: return "shockwave_general";
        case Form::OnAxis: return "shockwave_onaxis";
        case Form::Excess: return "shockwave_excess";
    }
    return "shockwave";
}

cplx ShockwaveBackend::pullback(const DetectorParams& j, double t1, const DetectorParams& k, double t2,
                                double eps) const {
    const SpacetimeEvent x = event_of(j, t1), y = event_of(k, t2);
    switch (form_) {
        case Form::General: return wightman_shockwave(x, y, p_, eps);
        case Form::OnAxis: return wightman_shockwave_onaxis(x, y, p_, eps);
        case Form::Excess: return wightman_shockwave_excess(x, y, p_, eps);
    }
    return 0.0;
}

void ShockwaveBackend::inner_breaks(const DetectorParams& j, double t1, const DetectorParams& k,
                                    std::vector<double>& out) const {
    const double zj = j.position[2], zk = k.position[2];
    out.push_back(t1 + zj - zk);     // dv = 0
    out.push_back(t1 - zj + zk);     // du = 0
    out.push_back(p_.u0 + zk);       // k crosses the wavefront
    const double ub = t1 - zj - p_.u0;
    if (p_.a > 0.0) {
        // refocusing pole du + a dTheta u U = 0, i.e. U = u / (1 - a dTheta u)
        if (p_.a * ub > 1.0) out.push_back(ub / (1.0 - p_.a * ub) + p_.u0 + zk);
        if (p_.a * ub < -1.0) out.push_back(ub / (1.0 + p_.a * ub) + p_.u0 + zk);
    }
}

void ShockwaveBackend::outer_breaks(const DetectorParams& j, const DetectorParams& k, std::vector<double>& out) const {
    const double zj = j.position[2], zk = k.position[2];
    out.push_back(p_.u0 + zj);
    out.push_back(p_.u0 + 2.0 * zk - zj);
    if (p_.a > 0.0) {
        out.push_back(p_.u0 + zj + 1.0 / p_.a);
        out.push_back(p_.u0 + zj - 1.0 / p_.a);
        // refocusing pole meeting the diagonal t2 = t1
        const double d = zj - zk, a = p_.a;
        for (double s : {1.0, -1.0}) {
            // u > 0: a u^2 + a d u - d = 0 ; u < 0: a u^2 + a d u + d = 0
            const double c = s > 0 ? -d : d;
            const double disc = a * a * d * d - 4.0 * a * c;
            if (disc < 0.0) continue;
            for (double r : {(-a * d + std::sqrt(disc)) / (2 * a), (-a * d - std::sqrt(disc)) / (2 * a)}) {
                if ((s > 0 && a * r > 1.0) || (s < 0 && a * r < -1.0)) out.push_back(r + p_.u0 + zj);
            }
        }
    }
}

bool ShockwaveBackend::vanishes(const DetectorParams& j, const DetectorParams& k, double half_width) const {
    if (form_ != Form::Excess) return false;
    if (p_.a == 0.0) return true;
    auto side = [&](const DetectorParams& d) {
        const double lo = d.tau0 - half_width - d.position[2] - p_.u0;
        const double hi = d.tau0 + half_width - d.position[2] - p_.u0;
        if (lo > 0.0) return 1;
        if (hi < 0.0) return -1;
        return 0;
    };
    const int sj = side(j), sk = side(k);
    return sj != 0 && sj == sk;
}

}  // namespace udw
