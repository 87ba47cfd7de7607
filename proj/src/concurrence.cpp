#include "udw/concurrence.hpp"

#include <algorithm>
#include <cmath>

#include "udw/errors.hpp"

namespace udw {

namespace {

double clamp_small(double x) { return (x < 0.0 && x > -1e-14) ? 0.0 : x; }

double re_y_sum(const MatrixElements& me) {
    if (!me.Y_A || !me.Y_B) throw MissingElementError("Y_A and Y_B are required");
    return me.Y_A->re + me.Y_B->re;
}

cplx need(const std::optional<cplx>& v, const char* name) {
    if (!v) throw MissingElementError(std::string(name) + " is required");
    return *v;
}

void warn(std::vector<std::string>* w, std::string msg) {
    if (w) w->push_back(std::move(msg));
}

double concurrence_from(double r14_abs, double r22, double r33) {
    const double s = std::sqrt(std::max(0.0, clamp_small(r22)) * std::max(0.0, clamp_small(r33)));
    return std::min(1.0, 2.0 * std::max(0.0, r14_abs - s));
}

}  // namespace

double r23_margin(const DensityMatrix& dm, const MatrixElements& me, const InitialState& st) {
    const double a = st.alpha(), b = st.beta();
    const double flip_up = std::norm(need(me.X_AB_neg_conj, "X_AB_neg_conj")) +
                           need(me.I_AA_mp, "I_AA_mp").real() * need(me.I_BB_mp, "I_BB_mp").real() +
                           std::norm(need(me.I_AB_mp, "I_AB_mp"));
    const double flip_down = std::norm(need(me.X_AB_pos, "X_AB_pos")) +
                             need(me.I_AA_pm, "I_AA_pm").real() * need(me.I_BB_pm, "I_BB_pm").real() +
                             std::norm(need(me.I_BA_pm, "I_BA_pm"));
    return (dm.r11 + b * b * flip_down) * (dm.r44 + a * a * flip_up) - std::norm(dm.r23);
}

R14Parts r14sq_weak_alpha0(const MatrixElements& me, const InitialState& st, std::vector<std::string>* warnings,
                           const RegimeThresholds& th) {
    const double a = st.alpha(), b = st.beta();
    if (a > th.weak) warn(warnings, "weak_alpha0 used with alpha = " + std::to_string(a));
    const cplx X = need(me.X_AB_pos, "X_AB_pos");
    const cplx e = std::polar(1.0, st.theta());
    R14Parts p;
    p.initial = a * a * b * b;
    p.neutral = 2.0 * a * (X * e).real();
    p.harvesting = std::norm(X);
    p.degradation = 2.0 * a * a * re_y_sum(me);
    return p;
}

R14Parts r14sq_weak_beta0(const MatrixElements& me, const InitialState& st, std::vector<std::string>* warnings,
                          const RegimeThresholds& th) {
    const double a = st.alpha(), b = st.beta();
    if (b > th.weak) warn(warnings, "weak_beta0 used with beta = " + std::to_string(b));
    const cplx Xn = need(me.X_AB_neg_conj, "X_AB_neg_conj");
    const cplx e = std::polar(1.0, st.theta());
    R14Parts p;
    p.initial = a * a * b * b;
    p.neutral = 2.0 * b * (Xn * e).real();
    p.harvesting = std::norm(Xn);
    p.degradation = 2.0 * b * b * re_y_sum(me);
    return p;
}

R14Parts r14sq_sufficient(const MatrixElements& me, const InitialState& st, std::vector<std::string>* warnings) {
    const double a = st.alpha(), b = st.beta();
    const cplx X = need(me.X_AB_pos, "X_AB_pos");
    const cplx Xn = need(me.X_AB_neg_conj, "X_AB_neg_conj");
    if (a * b < 10.0 * std::max(std::abs(X), std::abs(Xn)))
        warn(warnings, "sufficient regime used with alpha*beta below 10 lambda^2 |X|");
    const cplx e = std::polar(1.0, st.theta());
    R14Parts p;
    p.initial = a * a * b * b;
    // the X terms carry either sign here, so they are reported as the neutral part
    p.neutral = 2.0 * a * b * (a * a * (Xn * e).real() + b * b * (X * e).real());
    p.harvesting = 0.0;
    p.degradation = 2.0 * a * a * b * b * re_y_sum(me);
    return p;
}

ConcurrenceReport concurrence_exact(const DensityMatrix& dm, const InitialState& st) {
    if (!dm.has_r14) throw MissingElementError("concurrence_exact needs r14 (Im Y is required)");
    ConcurrenceReport r;
    r.regime = Regime::ExactSmeared;
    r.dm = dm;
    r.c_initial = initial_concurrence(st);
    r.r14_abs = std::abs(dm.r14);
    r.r14_sq_parts.initial = std::norm(dm.r14);
    r.r22r33_sqrt = std::sqrt(std::max(0.0, clamp_small(dm.r22)) * std::max(0.0, clamp_small(dm.r33)));
    r.c_final = concurrence_from(r.r14_abs, dm.r22, dm.r33);
    r.delta = r.c_final - r.c_initial;
    r.r23_condition_margin = dm.r11 * dm.r44 - std::norm(dm.r23);
    return r;
}

Regime select_regime(const Scenario& s, std::vector<std::string>* warnings, const RegimeThresholds& th) {
    const double a = s.initial.alpha(), b = s.initial.beta();
    const double lam = std::max(s.detector_a.lambda, s.detector_b.lambda);
    if (s.regime != Regime::Auto) {
        switch (s.regime) {
            case Regime::WeakAlpha0:
                if (a > th.weak) warn(warnings, "weak_alpha0 selected outside alpha <= threshold");
                break;
            case Regime::WeakBeta0:
                if (b > th.weak) warn(warnings, "weak_beta0 selected outside beta <= threshold");
                break;
            case Regime::Sufficient:
                if (std::min(a, b) < th.sufficient_factor * lam)
                    warn(warnings, "sufficient selected with min(alpha, beta) < 10 lambda");
                break;
            default:
                break;
        }
        return s.regime;
    }
    if (a <= th.weak) return Regime::WeakAlpha0;
    if (b <= th.weak) return Regime::WeakBeta0;
    if (std::min(a, b) >= th.sufficient_factor * lam) return Regime::Sufficient;
    warn(warnings, "no approximation regime covers alpha = " + std::to_string(a) + ", beta = " + std::to_string(b));
    throw RegimeError("initial state lies between the weak and sufficient regimes; choose a regime explicitly");
}

ConcurrenceReport evaluate(const Scenario& s, const ElementOptions& opt, ElementCache* cache,
                           const RegimeThresholds& th) {
    std::vector<std::string> warnings;
    Scenario sc = s;
    sc.regime = select_regime(s, &warnings, th);
    sc.validate();
    ElementOptions eo = opt;
    eo.want_im_y = sc.regime == Regime::ExactSmeared;
    MatrixElements me = compute_elements(sc, eo, cache);
    const DensityMatrix dm = assemble(sc, me);

    ConcurrenceReport r;
    if (sc.regime == Regime::ExactSmeared) {
        r = concurrence_exact(dm, sc.initial);
    } else {
        r.regime = sc.regime;
        r.dm = dm;
        r.c_initial = initial_concurrence(sc.initial);
        if (sc.regime == Regime::WeakAlpha0)
            r.r14_sq_parts = r14sq_weak_alpha0(me, sc.initial, &warnings, th);
        else if (sc.regime == Regime::WeakBeta0)
            r.r14_sq_parts = r14sq_weak_beta0(me, sc.initial, &warnings, th);
        else
            r.r14_sq_parts = r14sq_sufficient(me, sc.initial, &warnings);
        r.r14_abs = std::sqrt(std::max(0.0, r.r14_sq_parts.total()));
        r.r22r33_sqrt = std::sqrt(std::max(0.0, clamp_small(dm.r22)) * std::max(0.0, clamp_small(dm.r33)));
        r.c_final = concurrence_from(r.r14_abs, dm.r22, dm.r33);
        r.delta = r.c_final - r.c_initial;
    }
    r.r23_condition_margin = r23_margin(dm, me, sc.initial);
    r.warnings = std::move(warnings);
    r.elements = std::move(me);
    return r;
}

}  // namespace udw
