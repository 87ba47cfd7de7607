#include "udw/detector_model.hpp"

#include <cmath>

#include "udw/errors.hpp"

namespace udw {

void DetectorParams::validate() const {
    if (!(T > 0.0)) throw Error("detector: switching width T must be positive");
    if (!(sigma >= 0.0)) throw Error("detector: smearing width must be non-negative");
    if (!(lambda >= 0.0)) throw Error("detector: coupling must be non-negative");
    for (double x : {Omega, tau0, position[0], position[1], position[2]})
        if (!std::isfinite(x)) throw Error("detector: non-finite parameter");
}

double DetectorParams::chi(double t) const {
    const double x = (t - tau0) / T;
    return std::exp(-x * x);
}

InitialState InitialState::from_alpha(double alpha, double theta) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("initial state: alpha must lie in [0,1]");
    return {alpha, std::sqrt((1.0 - alpha) * (1.0 + alpha)), theta};
}

InitialState InitialState::from_beta(double beta, double theta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw Error("initial state: beta must lie in [0,1]");
    return {std::sqrt((1.0 - beta) * (1.0 + beta)), beta, theta};
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Auto: return "auto";
        case Regime::WeakAlpha0: return "weak_alpha0";
        case Regime::WeakBeta0: return "weak_beta0";
        case Regime::Sufficient: return "sufficient";
        case Regime::ExactSmeared: return "exact_smeared";
    }
    return "?";
}

Regime parse_regime(const std::string& s) {
    for (Regime r : {Regime::Auto, Regime::WeakAlpha0, Regime::WeakBeta0, Regime::Sufficient, Regime::ExactSmeared})
        if (s == regime_name(r)) return r;
    throw Error("unknown regime '" + s + "'");
}

void Scenario::validate() const {
    detector_a.validate();
    detector_b.validate();
    if (regime == Regime::ExactSmeared && !(detector_a.sigma > 0.0 && detector_b.sigma > 0.0))
        throw RegimeError("exact_smeared requires sigma > 0 for both detectors");
    if (const auto* sw = std::get_if<Shockwave>(&spacetime)) {
        if (!(sw->a >= 0.0)) throw Error("shockwave: a must be non-negative");
        if (detector_a.sigma != 0.0 || detector_b.sigma != 0.0)
            throw RegimeError("shockwave scenarios use pointlike detectors (sigma = 0)");
        if (regime == Regime::ExactSmeared) throw RegimeError("exact_smeared is not available in the shockwave");
    }
}

Geometry derived_geometry(const DetectorParams& a, const DetectorParams& b) {
    if (a.T != b.T) throw MismatchError("detectors must share the switching width T");
    if (a.sigma != b.sigma) throw MismatchError("detectors must share the smearing width sigma");
    const double dx = b.position[0] - a.position[0];
    const double dy = b.position[1] - a.position[1];
    const double dz = b.position[2] - a.position[2];
    Geometry g;
    g.L = std::sqrt(dx * dx + dy * dy + dz * dz);
    g.dt = b.tau0 - a.tau0;
    const double q = 1.0 + (a.sigma / a.T) * (a.sigma / a.T);
    const double den = a.T * std::sqrt(2.0 * q);
    g.gamma_plus = (g.L + g.dt) / den;
    g.gamma_minus = (g.L - g.dt) / den;
    return g;
}

Geometry derived_geometry(const Scenario& s) { return derived_geometry(s.detector_a, s.detector_b); }

double initial_concurrence(const InitialState& s) { return 2.0 * s.alpha() * s.beta(); }

}  // namespace udw
