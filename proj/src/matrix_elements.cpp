#include "udw/matrix_elements.hpp"

#include <cmath>
#include <cstdio>

#include "udw/errors.hpp"
#include "udw/specfun.hpp"

namespace udw {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx I(0.0, 1.0);

double q_of(const DetectorParams& d) {
    const double s = d.sigma / d.T;
    return 1.0 + s * s;
}

double distance(const DetectorParams& a, const DetectorParams& b) {
    const double dx = a.position[0] - b.position[0];
    const double dy = a.position[1] - b.position[1];
    const double dz = a.position[2] - b.position[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void check_identical(const DetectorParams& j, const DetectorParams& k) {
    if (j.T != k.T) throw MismatchError("detectors must share the switching width T");
    if (j.sigma != k.sigma) throw MismatchError("detectors must share the smearing width sigma");
    if (j.Omega != k.Omega) throw MismatchError("closed forms assume a common gap Omega");
}

bool same_worldline(const DetectorParams& j, const DetectorParams& k) {
    return j.position == k.position && j.tau0 == k.tau0 && j.T == k.T;
}

// e^{c} w(z) without overflow of either factor
cplx exp_w(cplx c, cplx z) { return sf::exp_erfc_scaled(c, cplx(z.imag(), -z.real())); }

}  // namespace

cplx LocalY::value() const { return {re, im.value_or(0.0)}; }

double Ikk_mp_closed(const DetectorParams& d) {
    d.validate();
    const double q = q_of(d), sq = std::sqrt(q);
    const double TO = d.T * d.Omega;
    const double x = TO / std::sqrt(2.0 * q);
    const double g = -0.5 * TO * TO;
    double bracket;
    if (x >= 0.0) {
        bracket = std::exp(g) * 2.0 * sq * sf::one_minus_sqrtpi_x_erfcx(x);
    } else {
        const double e = 2.0 * std::exp(g + x * x) - std::exp(g) * sf::erfcx(-x);
        bracket = std::exp(g) * 2.0 * sq - std::sqrt(2.0 * kPi) * TO * e;
    }
    return d.lambda * d.lambda / (8.0 * kPi * q * sq) * bracket;
}

double Ikk_pm_closed(const DetectorParams& d) {
    DetectorParams m = d;
    m.Omega = -d.Omega;
    return Ikk_mp_closed(m);
}

double ReY_closed(const DetectorParams& d) {
    d.validate();
    const double q = q_of(d), sq = std::sqrt(q);
    const double TO = d.T * d.Omega;
    const double x = TO / std::sqrt(2.0 * q);
    const double g = -0.5 * TO * TO;
    const double bracket = 2.0 * sq * std::exp(g) + std::exp(g + x * x) * std::sqrt(2.0 * kPi) * TO * std::erf(x);
    return -d.lambda * d.lambda / (8.0 * kPi * q * sq) * bracket;
}

LocalY Y_closed(const DetectorParams& d, double k_tol) {
    LocalY y;
    y.re = ReY_closed(d);
    if (d.Omega == 0.0) {
        y.im = 0.0;
        return y;
    }
    if (d.sigma == 0.0)
        throw DivergenceError("Im Y diverges logarithmically for pointlike detectors");
    const double T = d.T, W = d.Omega, s = d.sigma;
    const double r2 = std::sqrt(2.0);
    auto f = [&](double k) -> cplx {
        return k * std::exp(-0.5 * k * k * s * s) *
               (sf::gauss_damped_erfi(T * (k - W) / r2) - sf::gauss_damped_erfi(T * (k + W) / r2));
    };
    quad::SemiInfiniteOptions o;
    const double aw = std::fabs(W);
    o.breakpoints = {aw, aw + 2.0 / T, std::max(0.0, aw - 2.0 / T)};
    o.abs_tol = k_tol * 1e-4;
    const auto r = quad::integrate_semi_infinite(f, 1.0 / s, k_tol, o);
    y.im = -d.lambda * d.lambda * T * T / (8.0 * kPi) * r.value.real();
    return y;
}

cplx I_closed(const DetectorParams& j, const DetectorParams& k, int p, int q) {
    check_identical(j, k);
    const double T = j.T, s = j.sigma, W = j.Omega;
    const double L = distance(j, k);
    const double dt = k.tau0 - j.tau0;
    const double b = std::sqrt(0.5 * (T * T + s * s));
    const cplx phase = std::exp(I * (W * (p * j.tau0 + q * k.tau0)));
    const double lp = -0.5 * T * T * W * W;
    const cplx pre = j.lambda * k.lambda * T * T / (4.0 * kPi) / (2.0 * I) * (std::sqrt(kPi) / (2.0 * b));
    const cplx z0 = cplx(dt, 0.5 * T * T * W * (q - p)) / (2.0 * b);
    const double h = L / (2.0 * b);
    if (h < 1e-4) {
        if (L == 0.0 && s == 0.0 && &j != &k && !same_worldline(j, k))
            throw DegenerateSeparationError("I_closed: coincident pointlike detectors");
        const cplx w0 = exp_w(lp, z0);
        const cplx w1 = -2.0 * z0 * w0 + 2.0 * I / std::sqrt(kPi) * std::exp(lp);
        const cplx w2 = -2.0 * (w0 + z0 * w1);
        const cplx w3 = -2.0 * (2.0 * w1 + z0 * w2);
        return pre * phase * (w1 + h * h * w3 / 6.0) / b;
    }
    return pre * phase * (exp_w(lp, z0 + h) - exp_w(lp, z0 - h)) / L;
}

cplx IAB_pp_closed(const Scenario& s) {
    const auto& A = s.detector_a;
    const auto& B = s.detector_b;
    check_identical(A, B);
    const Geometry g = derived_geometry(s);
    if (g.L == 0.0) throw DegenerateSeparationError("IAB_pp_closed: L = 0");
    const double T = A.T, W = A.Omega;
    const double q = q_of(A);
    const cplx pre = I * A.lambda * B.lambda * T * std::exp(I * (W * (A.tau0 + B.tau0))) /
                     (8.0 * kPi * g.L * std::sqrt(q)) * std::sqrt(kPi / 2.0);
    const double lp = -0.5 * T * T * W * W;
    // e^{-G-^2} erfc(i G-) = w(-G-), e^{-G+^2} erfc(-i G+) = w(G+)
    const cplx bracket = exp_w(lp, -g.gamma_minus) - exp_w(lp, g.gamma_plus);
    return pre * bracket;
}

cplx K_over_L(double L, double dt, double sigma, double T, double k_tol) {
    if (!(L >= 0.0)) throw Error("K_over_L: negative separation");
    if (sigma > 0.0) {
        const double r2T = std::sqrt(2.0) * T;
        const double c = -dt * dt / (2.0 * T * T);
        auto f = [&](double k) -> cplx {
            const double kL = k * L;
            const double sinc_k = std::fabs(kL) < 1e-4 ? k * (1.0 - kL * kL / 6.0) : std::sin(kL) / L;
            return std::exp(-0.5 * k * k * sigma * sigma) * sf::exp_erfc_scaled(c, cplx(dt, T * T * k) / r2T) * sinc_k;
        };
        quad::SemiInfiniteOptions o;
        o.oscillation_period = L > 0.0 ? 2.0 * kPi / L : 0.0;
        o.abs_tol = k_tol * 1e-4 / T;
        o.breakpoints = {1.0 / T, 2.0 / T, 4.0 / T};
        return quad::integrate_semi_infinite(f, 1.0 / sigma, k_tol, o).value;
    }
    if (L == 0.0) throw DegenerateSeparationError("pointlike detectors at zero separation");
    // K = -1/(sqrt(2 pi) T) [PV int_0^inf g/(s-L) - int_0^inf g/(s+L)] - i sqrt(pi/2)/T g(L),
    // g(s) = exp(-(s + dt)^2/(2 T^2))
    auto g = [&](double s) {
        const double x = (s + dt) / T;
        return std::exp(-0.5 * x * x);
    };
    const double gL = g(L);
    const double peak = std::max(0.0, -dt);
    const double smax = std::max(2.0 * L, quad::gaussian_cutoff(peak, T, std::min(k_tol, 1e-12)));
    auto f = [&](double s) -> cplx {
        if (s < 2.0 * L) return (g(s) - gL) / (s - L) - g(s) / (s + L);
        return g(s) * 2.0 * L / ((s - L) * (s + L));
    };
    std::vector<double> br{L, 2.0 * L, peak, peak + T, std::max(0.0, peak - T)};
    quad::QuadOptions qo;
    qo.rel_tol = k_tol;
    qo.abs_tol = k_tol * 1e-4;
    const auto r = quad::integrate(f, 0.0, smax, std::span<const double>(br), qo);
    const double pv = r.value.real();
    const cplx K = -pv / (std::sqrt(2.0 * kPi) * T) - I * std::sqrt(kPi / 2.0) / T * gL;
    return K / L;
}

cplx J_mm_closed(const DetectorParams& j, const DetectorParams& k, double k_tol) {
    check_identical(j, k);
    const double T = j.T, W = j.Omega;
    const double L = distance(j, k);
    const cplx kl = K_over_L(L, k.tau0 - j.tau0, j.sigma, T, k_tol);
    return -j.lambda * k.lambda * T * T / (8.0 * kPi) * std::exp(-I * W * (j.tau0 + k.tau0)) *
           std::exp(-0.5 * T * T * W * W) * kl;
}

cplx J_pp_closed(const DetectorParams& j, const DetectorParams& k, double k_tol) {
    DetectorParams a = j, b = k;
    a.Omega = -j.Omega;
    b.Omega = -k.Omega;
    return J_mm_closed(a, b, k_tol);
}

cplx JAB_mm_closed(const Scenario& s, double k_tol) { return J_mm_closed(s.detector_a, s.detector_b, k_tol); }

// ---------------------------------------------------------------------------

int sign_index(int p, int q) {
    for (int i = 0; i < 4; ++i)
        if (kSignOrder[i][0] == p && kSignOrder[i][1] == q) return i;
    throw Error("sign_index: signs must be +-1");
}

namespace {

struct RawTables {
    std::vector<double> eps;
    std::array<std::vector<cplx>, 4> values;
    std::array<double, 4> quad_err{};
    bool zero = false;
};

RawTables generic_tables(const DetectorParams& j, const DetectorParams& k, const WightmanBackend& W,
                         const GenericOptions& opt, bool ordered) {
    if (j.T != k.T) throw MismatchError("generic integrals assume a common T");
    RawTables out;
    const double hw = 6.0 * j.T;
    if (W.vanishes(j, k, hw)) {
        out.zero = true;
        out.eps = {0.0};
        for (auto& v : out.values) v = {cplx{}};
        return out;
    }
    const quad::Box2D box = quad::truncation_box(j.tau0, k.tau0, j.T);
    std::vector<double> ob{j.tau0};
    W.outer_breaks(j, k, ob);
    auto inner = [&](double t1, std::vector<double>& v) {
        v.push_back(k.tau0);
        W.inner_breaks(j, t1, k, v);
    };
    const double lam = j.lambda * k.lambda;
    quad::QuadOptions qo;
    qo.rel_tol = opt.rel_tol;
    qo.abs_tol = lam > 0.0 ? opt.abs_tol / lam : opt.abs_tol;
    qo.initial_split = opt.initial_split;
    qo.max_evals = opt.max_evals;
    const double Wj = j.Omega, Wk = k.Omega;

    std::vector<double> eps_list = W.needs_eps() ? opt.schedule.eps_values : std::vector<double>{0.0};
    for (double eps : eps_list) {
        auto g = [&](double t1, double t2) -> quad::CVec<4> {
            const cplx w = W.pullback(j, t1, k, t2, eps) * (j.chi(t1) * k.chi(t2));
            const cplx e1 = std::polar(1.0, Wj * t1), e2 = std::polar(1.0, Wk * t2);
            const cplx c1 = std::conj(e1), c2 = std::conj(e2);
            return {w * c1 * e2, w * e1 * c2, w * e1 * e2, w * c1 * c2};
        };
        const auto r = quad::integrate_2d_n<4>(g, box, ordered, inner, std::span<const double>(ob), qo);
        out.eps.push_back(eps);
        for (int i = 0; i < 4; ++i) {
            const double sgn = ordered ? -1.0 : 1.0;
            out.values[i].push_back(sgn * lam * r.value[i]);
            out.quad_err[i] = std::max(out.quad_err[i], lam * r.abs_error[i]);
        }
    }
    return out;
}

std::array<GenericValue, 4> finish(const RawTables& t, const GenericOptions& opt) {
    std::array<GenericValue, 4> res;
    for (int i = 0; i < 4; ++i) {
        if (t.eps.size() == 1) {
            res[i].value = t.values[i][0];
            res[i].abs_error = t.quad_err[i];
            continue;
        }
        const auto ex = quad::extrapolate_table(t.eps, t.values[i], opt.schedule.extrapolation_order,
                                                std::max(opt.abs_tol, 4.0 * t.quad_err[i]), opt.rel_tol);
        res[i].value = ex.value;
        res[i].residual = ex.residual;
        res[i].ok = ex.ok;
        // cubic extrapolation from a ratio-2 geometric schedule amplifies noise by about 4
        res[i].abs_error = 4.0 * t.quad_err[i] + ex.residual;
    }
    return res;
}

}  // namespace

std::array<GenericValue, 4> I_generic_all(const DetectorParams& j, const DetectorParams& k, const WightmanBackend& W,
                                          const GenericOptions& opt) {
    return finish(generic_tables(j, k, W, opt, false), opt);
}

std::array<GenericValue, 4> J_generic_all(const DetectorParams& j, const DetectorParams& k, const WightmanBackend& W,
                                          const GenericOptions& opt) {
    if (W.needs_eps() && same_worldline(j, k))
        throw DivergenceError("single pointlike J_kk has a divergent imaginary part; use Y_generic");
    return finish(generic_tables(j, k, W, opt, true), opt);
}

GenericValue I_generic(const DetectorParams& j, const DetectorParams& k, int p, int q, const WightmanBackend& W,
                       const GenericOptions& opt) {
    return I_generic_all(j, k, W, opt)[sign_index(p, q)];
}

GenericValue J_generic(const DetectorParams& j, const DetectorParams& k, int p, int q, const WightmanBackend& W,
                       const GenericOptions& opt) {
    return J_generic_all(j, k, W, opt)[sign_index(p, q)];
}

LocalY Y_generic(const DetectorParams& d, const WightmanBackend& W, const GenericOptions& opt) {
    const RawTables t = generic_tables(d, d, W, opt, true);
    const int mp = sign_index(-1, 1), pm = sign_index(1, -1);
    std::vector<cplx> re_tab, im_tab;
    for (size_t e = 0; e < t.eps.size(); ++e) {
        const cplx c = t.values[mp][e] + std::conj(t.values[pm][e]);
        re_tab.emplace_back(c.real(), 0.0);
        im_tab.emplace_back(c.imag(), 0.0);
    }
    LocalY y;
    if (t.eps.size() == 1) {
        y.re = re_tab[0].real();
        y.im = im_tab[0].real();
        return y;
    }
    const double qe = t.quad_err[mp] + t.quad_err[pm];
    y.re = quad::extrapolate_table(t.eps, re_tab, opt.schedule.extrapolation_order, std::max(opt.abs_tol, 4 * qe),
                                   opt.rel_tol)
               .value.real();
    return y;
}

// ---------------------------------------------------------------------------

std::vector<cplx> ElementCache::get_or_compute(const std::string& key, const std::function<std::vector<cplx>()>& fn) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
    }
    std::vector<cplx> v = fn();
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, inserted] = map_.emplace(key, std::move(v));
    return it->second;
}

size_t ElementCache::size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return map_.size();
}

std::string cache_key(const std::string& kind, std::initializer_list<double> params) {
    std::string k = kind;
    char buf[40];
    for (double p : params) {
        std::snprintf(buf, sizeof buf, "|%a", p);
        k += buf;
    }
    return k;
}

namespace {

std::vector<cplx> cached(ElementCache* cache, const std::string& key, const std::function<std::vector<cplx>()>& fn) {
    return cache ? cache->get_or_compute(key, fn) : fn();
}

std::vector<cplx> pack(const std::array<GenericValue, 4>& v) {
    std::vector<cplx> out;
    for (const auto& x : v) out.push_back(x.value);
    for (const auto& x : v) out.emplace_back(x.abs_error, x.ok ? 0.0 : 1.0);
    return out;
}

}  // namespace

MatrixElements compute_elements(const Scenario& s, const ElementOptions& opt, ElementCache* cache) {
    s.validate();
    const DetectorParams& A = s.detector_a;
    const DetectorParams& B = s.detector_b;
    check_identical(A, B);
    const Geometry g = derived_geometry(s);
    if (g.L == 0.0 && A.sigma == 0.0) throw DegenerateSeparationError("pointlike detectors at zero separation");
    const double T = A.T, W = A.Omega, sg = A.sigma;
    MatrixElements me;

    auto local = [&](const DetectorParams& d) {
        return cached(cache, cache_key("Ikk", {d.lambda, W, T, sg}), [&] {
            return std::vector<cplx>{Ikk_mp_closed(d), Ikk_pm_closed(d), ReY_closed(d)};
        });
    };
    const auto la = local(A), lb = local(B);
    me.I_AA_mp = la[0];
    me.I_AA_pm = la[1];
    me.I_BB_mp = lb[0];
    me.I_BB_pm = lb[1];
    me.I_AA_mm = I_closed(A, A, -1, -1);
    me.I_BB_pp = I_closed(B, B, 1, 1);
    me.I_AB_pp = g.L > 0.0 ? IAB_pp_closed(s) : I_closed(A, B, 1, 1);
    me.I_AB_mm = I_closed(A, B, -1, -1);
    me.I_AB_mp = I_closed(A, B, -1, 1);
    me.I_BA_pm = I_closed(B, A, 1, -1);

    LocalY ya{la[2].real(), std::nullopt}, yb{lb[2].real(), std::nullopt};
    if (opt.want_im_y && sg > 0.0) {
        auto im = [&](const DetectorParams& d) {
            return cached(cache, cache_key("ImY", {d.lambda, W, T, sg, opt.k_tol}), [&] {
                return std::vector<cplx>{Y_closed(d, opt.k_tol).im.value()};
            })[0].real();
        };
        ya.im = im(A);
        yb.im = im(B);
    }

    const auto kk = cached(cache, cache_key("K", {g.L, g.dt, sg, T, opt.k_tol}), [&] {
        return std::vector<cplx>{K_over_L(g.L, g.dt, sg, T, opt.k_tol), K_over_L(g.L, -g.dt, sg, T, opt.k_tol)};
    });
    const cplx pre = -A.lambda * B.lambda * T * T / (8.0 * kPi) * std::exp(-I * W * (A.tau0 + B.tau0)) *
                     std::exp(-0.5 * T * T * W * W);
    me.X_AB_pos = pre * (kk[0] + kk[1]);
    me.X_AB_neg_conj = pre * std::conj(kk[0] + kk[1]);

    if (const auto* sw = std::get_if<Shockwave>(&s.spacetime)) {
        const ShockwaveBackend back({sw->a, sw->u0}, ShockwaveBackend::Form::Excess);
        const auto& go = opt.generic;
        auto key = [&](const char* kind, const DetectorParams& j, const DetectorParams& k) {
            return cache_key(kind, {sw->a, sw->u0, W, T, j.lambda, k.lambda, j.tau0, k.tau0, j.position[0],
                                    j.position[1], j.position[2], k.position[0], k.position[1], k.position[2],
                                    go.rel_tol, go.abs_tol, go.schedule.eps_values.front(),
                                    static_cast<double>(go.initial_split)});
        };
        const auto iaa = cached(cache, key("xIAA", A, A), [&] { return pack(I_generic_all(A, A, back, go)); });
        const auto ibb = cached(cache, key("xIBB", B, B), [&] { return pack(I_generic_all(B, B, back, go)); });
        const auto iab = cached(cache, key("xIAB", A, B), [&] { return pack(I_generic_all(A, B, back, go)); });
        const auto jab = cached(cache, key("xJAB", A, B), [&] { return pack(J_generic_all(A, B, back, go)); });
        const auto jba = cached(cache, key("xJBA", B, A), [&] { return pack(J_generic_all(B, A, back, go)); });
        const int mp = sign_index(-1, 1), pm = sign_index(1, -1), pp = sign_index(1, 1), mm = sign_index(-1, -1);
        *me.I_AA_mp += iaa[mp];
        *me.I_AA_pm += iaa[pm];
        *me.I_AA_mm += iaa[mm];
        *me.I_BB_mp += ibb[mp];
        *me.I_BB_pm += ibb[pm];
        *me.I_BB_pp += ibb[pp];
        *me.I_AB_pp += iab[pp];
        *me.I_AB_mm += iab[mm];
        *me.I_AB_mp += iab[mp];
        *me.I_BA_pm += std::conj(iab[pm]);
        *me.X_AB_pos += jab[mm] + jba[mm];
        *me.X_AB_neg_conj += std::conj(jab[pp] + jba[pp]);
        // Re Y from the identity lambda^2 Re Y = -(I^(-+) + I^(+-))/2, valid for any Hermitian W
        ya.re = -0.5 * (me.I_AA_mp->real() + me.I_AA_pm->real());
        yb.re = -0.5 * (me.I_BB_mp->real() + me.I_BB_pm->real());
        auto err = [&](const std::vector<cplx>& v, int i) { return v[4 + i].real(); };
        auto bad = [&](const std::vector<cplx>& v) {
            for (int i = 0; i < 4; ++i)
                if (v[4 + i].imag() != 0.0) return true;
            return false;
        };
        me.abs_error["I_AA_mp"] = err(iaa, mp);
        me.abs_error["I_AA_pm"] = err(iaa, pm);
        me.abs_error["I_AB_pp"] = err(iab, pp);
        me.abs_error["I_AB_mm"] = err(iab, mm);
        me.abs_error["X_AB_pos"] = err(jab, mm) + err(jba, mm);
        me.abs_error["X_AB_neg_conj"] = err(jab, pp) + err(jba, pp);
        if (bad(iaa) || bad(ibb) || bad(iab) || bad(jab) || bad(jba)) me.abs_error["extrapolation_flag"] = 1.0;
    }
    me.Y_A = ya;
    me.Y_B = yb;
    return me;
}

std::vector<std::string> required_elements(Regime r) {
    std::vector<std::string> v{"I_AA_mp", "I_BB_mp", "I_AA_pm", "I_BB_pm", "I_AB_pp", "I_AB_mm", "I_AB_mp",
                               "I_BA_pm", "I_AA_mm", "I_BB_pp", "Y_A",     "Y_B",     "X_AB_pos", "X_AB_neg_conj"};
    if (r == Regime::ExactSmeared) {
        v.push_back("Im Y_A");
        v.push_back("Im Y_B");
    }
    return v;
}

std::vector<std::string> missing_elements(const MatrixElements& me, Regime r) {
    std::vector<std::string> miss;
    auto chk = [&](const char* n, bool present) {
        if (!present) miss.push_back(n);
    };
    for (const auto& n : required_elements(r)) {
        if (n == "I_AA_mp") chk("I_AA_mp", me.I_AA_mp.has_value());
        else if (n == "I_BB_mp") chk("I_BB_mp", me.I_BB_mp.has_value());
        else if (n == "I_AA_pm") chk("I_AA_pm", me.I_AA_pm.has_value());
        else if (n == "I_BB_pm") chk("I_BB_pm", me.I_BB_pm.has_value());
        else if (n == "I_AB_pp") chk("I_AB_pp", me.I_AB_pp.has_value());
        else if (n == "I_AB_mm") chk("I_AB_mm", me.I_AB_mm.has_value());
        else if (n == "I_AB_mp") chk("I_AB_mp", me.I_AB_mp.has_value());
        else if (n == "I_BA_pm") chk("I_BA_pm", me.I_BA_pm.has_value());
        else if (n == "I_AA_mm") chk("I_AA_mm", me.I_AA_mm.has_value());
        else if (n == "I_BB_pp") chk("I_BB_pp", me.I_BB_pp.has_value());
        else if (n == "Y_A") chk("Y_A", me.Y_A.has_value());
        else if (n == "Y_B") chk("Y_B", me.Y_B.has_value());
        else if (n == "X_AB_pos") chk("X_AB_pos", me.X_AB_pos.has_value());
        else if (n == "X_AB_neg_conj") chk("X_AB_neg_conj", me.X_AB_neg_conj.has_value());
        else if (n == "Im Y_A") chk("Im Y_A", me.Y_A && me.Y_A->im.has_value());
        else if (n == "Im Y_B") chk("Im Y_B", me.Y_B && me.Y_B->im.has_value());
    }
    return miss;
}

DensityMatrix assemble(const Scenario& s, const MatrixElements& me) {
    if (s.regime == Regime::Auto) throw RegimeError("assemble: regime must be resolved before assembly");
    const auto miss = missing_elements(me, s.regime);
    if (!miss.empty()) {
        std::string m = "assemble: missing elements for regime " + std::string(regime_name(s.regime)) + ":";
        for (const auto& n : miss) m += " " + n;
        throw MissingElementError(m);
    }
    const double a = s.initial.alpha(), b = s.initial.beta(), th = s.initial.theta();
    const cplx eth = std::polar(1.0, th);
    const double ab = a * b;
    DensityMatrix dm;
    // 2 Re[J_kk^(-+)] = -I_kk^(-+) and likewise for (+-)
    dm.r11 = a * a - a * a * (me.I_AA_mp->real() + me.I_BB_mp->real()) + 2.0 * ab * (eth * *me.X_AB_pos).real();
    dm.r44 = b * b - b * b * (me.I_AA_pm->real() + me.I_BB_pm->real()) +
             2.0 * ab * (eth * *me.X_AB_neg_conj).real();
    dm.r22 = b * b * me.I_AA_pm->real() + 2.0 * ab * (std::conj(eth) * *me.I_AB_pp).real() +
             a * a * me.I_BB_mp->real();
    dm.r33 = a * a * me.I_AA_mp->real() + 2.0 * ab * (eth * *me.I_AB_mm).real() + b * b * me.I_BB_pm->real();
    dm.r23 = ab * eth * *me.I_AA_mm + b * b * *me.I_BA_pm + a * a * *me.I_AB_mp + ab * std::conj(eth) * *me.I_BB_pp;
    if (me.Y_A->im && me.Y_B->im) {
        dm.r14 = ab * std::conj(eth) * (1.0 + me.Y_A->value() + me.Y_B->value()) + a * a * *me.X_AB_neg_conj +
                 b * b * *me.X_AB_pos;
        dm.has_r14 = true;
    }
    return dm;
}

}  // namespace udw
