#include "udw/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "udw/errors.hpp"

namespace udw::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

double dist(const DetectorParams& a, const DetectorParams& b) {
    const double dx = a.position[0] - b.position[0], dy = a.position[1] - b.position[1],
                 dz = a.position[2] - b.position[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double sinc(double x) { return std::fabs(x) < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// composite Simpson weight of node i out of n (n odd), times h/3
double simpson_w(int i, int n) {
    if (i == 0 || i == n - 1) return 1.0;
    return (i % 2) ? 4.0 : 2.0;
}

// I: both switching transforms are Gaussian in k. J: the time-ordered transform only
// falls off like a power, so the smearing factor alone sets the cutoff.
double auto_kmax(const DetectorParams& j, const OracleConfig& cfg, bool ordered) {
    if (cfg.k_max > 0.0) return cfg.k_max;
    if (ordered) return std::fabs(j.Omega) + 9.0 / j.sigma;
    double kmax = std::fabs(j.Omega) + 12.0 / j.T;
    if (j.sigma > 0.0) kmax = std::min(kmax, std::fabs(j.Omega) + 9.0 / j.sigma);
    return kmax;
}

// A(omega) = int chi(t) e^{i omega t} dt on a Simpson grid
cplx switching_transform(const DetectorParams& d, double omega, int n, double R) {
    const double a = d.tau0 - R * d.T, h = 2.0 * R * d.T / (n - 1);
    const cplx step = std::polar(1.0, omega * h);
    cplx ph = std::polar(1.0, omega * a);
    cplx s = 0.0;
    for (int i = 0; i < n; ++i) {
        s += simpson_w(i, n) * d.chi(a + i * h) * ph;
        ph *= step;
        if ((i & 63) == 63) ph = std::polar(1.0, omega * (a + (i + 1) * h));
    }
    return s * (h / 3.0);
}

cplx brute_I_at(const DetectorParams& j, const DetectorParams& k, int p, int q, int n, const OracleConfig& cfg) {
    const double L = dist(j, k), s = j.sigma;
    const double kmax = auto_kmax(j, cfg, false);
    const double hk = kmax / (n - 1);
    cplx sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double kk = i * hk;
        if (kk == 0.0) continue;
        const cplx aj = switching_transform(j, p * j.Omega - kk, n, cfg.truncation_radius);
        const cplx ak = switching_transform(k, q * k.Omega + kk, n, cfg.truncation_radius);
        sum += simpson_w(i, n) * kk * sinc(kk * L) * std::exp(-0.5 * kk * kk * s * s) * aj * ak;
    }
    return j.lambda * k.lambda / (4.0 * kPi * kPi) * sum * (hk / 3.0);
}

// B(k) = int dt1 chi_j e^{i w1 t1} int_{-inf}^{t1} dt2 chi_k e^{i w2 t2}
cplx ordered_transform(const DetectorParams& j, const DetectorParams& k, double w1, double w2, int n, double R) {
    const double lo = std::min(j.tau0, k.tau0) - R * j.T, hi = std::max(j.tau0, k.tau0) + R * j.T;
    const double h = (hi - lo) / (n - 1);
    static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    auto f2 = [&](double t) { return k.chi(t) * std::polar(1.0, w2 * t); };
    cplx G = 0.0, out = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = lo + i * h;
        if (i > 0) {
            const double c = t - 0.5 * h;
            cplx cell = 0.0;
            for (int m = 0; m < 3; ++m) cell += gw[m] * f2(c + 0.5 * h * gx[m]);
            G += 0.5 * h * cell;
        }
        out += simpson_w(i, n) * j.chi(t) * std::polar(1.0, w1 * t) * G;
    }
    return out * (h / 3.0);
}

cplx brute_J_at(const DetectorParams& j, const DetectorParams& k, int p, int q, int n, const OracleConfig& cfg) {
    const double L = dist(j, k), s = j.sigma;
    const double kmax = auto_kmax(j, cfg, true);
    const double hk = kmax / (n - 1);
    cplx sum = 0.0;
    for (int i = 1; i < n; ++i) {
        const double kk = i * hk;
        const cplx b = ordered_transform(j, k, p * j.Omega - kk, q * k.Omega + kk, n, cfg.truncation_radius);
        sum += simpson_w(i, n) * kk * sinc(kk * L) * std::exp(-0.5 * kk * kk * s * s) * b;
    }
    return -j.lambda * k.lambda / (4.0 * kPi * kPi) * sum * (hk / 3.0);
}

template <class F>
OracleValue refine(F&& at, int n) {
    if (n < 21 || n % 2 == 0) throw Error("oracle: grid_points_per_dim must be odd and at least 21");
    // n, (n+1)/2, (n+3)/4 keep the coarse grids nested in the fine one
    const int n1 = (n + 1) / 2, n2 = (n1 + 1) / 2 + ((n1 + 1) / 2 % 2 == 0 ? 1 : 0);
    const cplx v0 = at(n), v1 = at(n1), v2 = at(n2);
    OracleValue r;
    r.value = v0;
    r.error_estimate = std::abs(v0 - v1);
    const double e1 = std::abs(v1 - v2);
    if (r.error_estimate > 0.0 && e1 > 0.0) r.observed_order = std::log2(e1 / r.error_estimate);
    return r;
}

void check_pair(const DetectorParams& j, const DetectorParams& k) {
    j.validate();
    k.validate();
    if (j.T != k.T || j.sigma != k.sigma) throw MismatchError("oracle: detectors must share T and sigma");
}

}  // namespace

OracleValue brute_I(const DetectorParams& j, const DetectorParams& k, int p, int q, const OracleConfig& cfg) {
    check_pair(j, k);
    return refine([&](int n) { return brute_I_at(j, k, p, q, n, cfg); }, cfg.grid_points_per_dim);
}

OracleValue brute_J(const DetectorParams& j, const DetectorParams& k, int p, int q, const OracleConfig& cfg) {
    check_pair(j, k);
    if (!(j.sigma > 0.0)) throw Error("oracle: brute_J needs sigma > 0");
    return refine([&](int n) { return brute_J_at(j, k, p, q, n, cfg); }, cfg.grid_points_per_dim);
}

OracleY brute_Y(const DetectorParams& d, const OracleConfig& cfg) {
    OracleY y;
    if (d.sigma > 0.0) {
        const OracleValue mp = brute_J(d, d, -1, 1, cfg), pm = brute_J(d, d, 1, -1, cfg);
        const cplx v = mp.value + std::conj(pm.value);
        const double e = mp.error_estimate + pm.error_estimate;
        y.re = {cplx(v.real(), 0.0), e, std::min(mp.observed_order, pm.observed_order)};
        y.im = OracleValue{cplx(v.imag(), 0.0), e, y.re.observed_order};
        return y;
    }
    const OracleValue mp = brute_I(d, d, -1, 1, cfg), pm = brute_I(d, d, 1, -1, cfg);
    y.re = {cplx(-0.5 * (mp.value.real() + pm.value.real()), 0.0), 0.5 * (mp.error_estimate + pm.error_estimate),
            std::min(mp.observed_order, pm.observed_order)};
    return y;
}

// ---------------------------------------------------------------------------

namespace {

struct GoldenPoint {
    double OmegaT, sigma, L, dt;
};

void pair_for(const GoldenPoint& g, DetectorParams& a, DetectorParams& b) {
    a = DetectorParams{};
    a.Omega = g.OmegaT;
    a.sigma = g.sigma;
    b = a;
    b.position = {0.0, 0.0, g.L};
    b.tau0 = g.dt;
}

}  // namespace

std::vector<GoldenRecord> golden_corpus(const OracleConfig& cfg) {
    const std::vector<GoldenPoint> pts{
        {2.0, 0.5, 1.0, 0.0}, {5.0, 0.0, 7.0, 0.0}, {2.0, 1.0, 1.0, 0.0},
        {2.0, 0.3, 1.0, 0.5}, {1.5, 0.5, 3.0, -1.0}, {4.0, 0.2, 6.0, 2.0},
    };
    std::vector<GoldenRecord> out;
    for (const auto& g : pts) {
        DetectorParams A, B;
        pair_for(g, A, B);
        auto add = [&](const std::string& name, const OracleValue& v) {
            out.push_back({g.OmegaT, g.sigma, g.L, g.dt, A.lambda, name, v.value, v.error_estimate});
        };
        add("I_AA_mp", brute_I(A, A, -1, 1, cfg));
        add("I_AA_pm", brute_I(A, A, 1, -1, cfg));
        add("I_AB_pp", brute_I(A, B, 1, 1, cfg));
        add("I_AB_mp", brute_I(A, B, -1, 1, cfg));
        const OracleY y = brute_Y(A, cfg);
        add("ReY_A", y.re);
        if (y.im) add("ImY_A", *y.im);
        if (g.sigma > 0.0) {
            add("J_AB_mm", brute_J(A, B, -1, -1, cfg));
            add("J_AB_pp", brute_J(A, B, 1, 1, cfg));
        }
    }
    return out;
}

void write_golden(std::ostream& os, const std::vector<GoldenRecord>& recs) {
    os << kGoldenHeader << "\n";
    os << "# OmegaT sigma_over_T L_over_T dt_over_T lambda element re im error\n";
    char buf[512];
    for (const auto& r : recs) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %s %.17g %.17g %.3g\n", r.OmegaT, r.sigma_over_T,
                      r.L_over_T, r.dt_over_T, r.lambda, r.element.c_str(), r.value.real(), r.value.imag(), r.error);
        os << buf;
    }
}

std::vector<GoldenRecord> read_golden(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kGoldenHeader) throw Error("golden table: missing or unknown version header");
    std::vector<GoldenRecord> out;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        GoldenRecord r;
        double re, im;
        if (!(ss >> r.OmegaT >> r.sigma_over_T >> r.L_over_T >> r.dt_over_T >> r.lambda >> r.element >> re >> im >>
              r.error))
            throw Error("golden table: malformed line: " + line);
        r.value = {re, im};
        out.push_back(r);
    }
    return out;
}

}  // namespace udw::oracle
