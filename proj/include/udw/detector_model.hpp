#pragma once

#include <array>
#include <string>
#include <variant>

namespace udw {

using Vec3 = std::array<double, 3>;

// All dimensional quantities are in units of the switching width T.
struct DetectorParams {
    double lambda = 0.1;
    double Omega = 0.0;
    double tau0 = 0.0;
    double T = 1.0;
    double sigma = 0.0;
    Vec3 position{0.0, 0.0, 0.0};

    void validate() const;
    // Gaussian switching exp(-(t - tau0)^2 / T^2)
    double chi(double t) const;
};

// alpha|gg> + beta e^{i theta}|ee>. Built from one amplitude; the other is
// derived from it at construction, which keeps beta exact when alpha rounds to 1.
class InitialState {
public:
    static InitialState from_alpha(double alpha, double theta = 0.0);
    static InitialState from_beta(double beta, double theta = 0.0);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double theta() const { return theta_; }

private:
    InitialState(double a, double b, double th) : alpha_(a), beta_(b), theta_(th) {}
    double alpha_ = 1.0;
    double beta_ = 0.0;
    double theta_ = 0.0;
};

struct Minkowski {};

struct Shockwave {
    double a = 1.0;   // profile eigenvalue a_x = a_y, units 1/T
    double u0 = 0.0;  // wavefront position in u = t - z
};

using Spacetime = std::variant<Minkowski, Shockwave>;

enum class Regime { Auto, WeakAlpha0, WeakBeta0, Sufficient, ExactSmeared };

const char* regime_name(Regime r);
Regime parse_regime(const std::string& s);

struct Scenario {
    DetectorParams detector_a;
    DetectorParams detector_b;
    InitialState initial = InitialState::from_alpha(1.0);
    Spacetime spacetime = Minkowski{};
    Regime regime = Regime::Auto;

    bool is_shockwave() const { return std::holds_alternative<Shockwave>(spacetime); }
    void validate() const;
};

struct Geometry {
    double L;
    double dt;
    double gamma_plus;
    double gamma_minus;
};

Geometry derived_geometry(const DetectorParams& a, const DetectorParams& b);
Geometry derived_geometry(const Scenario& s);

double initial_concurrence(const InitialState& s);

}  // namespace udw
