#pragma once

#include <string>
#include <vector>

#include "udw/matrix_elements.hpp"

namespace udw {

// Contributions to |r14|^2. Their sum is the regime's approximation of |r14|^2.
struct R14Parts {
    double initial = 0.0;
    double neutral = 0.0;
    double harvesting = 0.0;
    double degradation = 0.0;
    double total() const { return initial + neutral + harvesting + degradation; }
};

struct ConcurrenceReport {
    double c_initial = 0.0;
    double c_final = 0.0;
    double delta = 0.0;
    Regime regime = Regime::Auto;
    R14Parts r14_sq_parts;
    double r14_abs = 0.0;
    double r22r33_sqrt = 0.0;
    double r23_condition_margin = 0.0;  // r11 r44 - |r23|^2
    std::vector<std::string> warnings;
    DensityMatrix dm;
    MatrixElements elements;
};

// Regime validity thresholds used by auto-selection and by the warnings.
struct RegimeThresholds {
    double weak = 1e-2;               // alpha (or beta) at or below this is "weak"
    double sufficient_factor = 10.0;  // min(alpha, beta) >= factor * lambda
};

R14Parts r14sq_weak_alpha0(const MatrixElements& me, const InitialState& st,
                           std::vector<std::string>* warnings = nullptr, const RegimeThresholds& th = {});
R14Parts r14sq_weak_beta0(const MatrixElements& me, const InitialState& st,
                          std::vector<std::string>* warnings = nullptr, const RegimeThresholds& th = {});
R14Parts r14sq_sufficient(const MatrixElements& me, const InitialState& st,
                          std::vector<std::string>* warnings = nullptr);

// Full-formula concurrence from an assembled density matrix (needs r14, so sigma > 0).
ConcurrenceReport concurrence_exact(const DensityMatrix& dm, const InitialState& st);

// r11 r44 - |r23|^2 with the O(lambda^4) double-flip probabilities restored in r11
// and r44: |<ee|..|gg>|^2 = |X|^2 + I_AA I_BB + |I_AB|^2 by Wick's theorem. Without
// them the printed entries lose positivity whenever the weak amplitude is below lambda^2.
double r23_margin(const DensityMatrix& dm, const MatrixElements& me, const InitialState& st);

// Resolves Regime::Auto; explicit choices outside their validity range only add a warning.
Regime select_regime(const Scenario& s, std::vector<std::string>* warnings = nullptr,
                     const RegimeThresholds& th = {});

ConcurrenceReport evaluate(const Scenario& s, const ElementOptions& opt = {}, ElementCache* cache = nullptr,
                           const RegimeThresholds& th = {});

}  // namespace udw
