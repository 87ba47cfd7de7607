#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "udw/detector_model.hpp"
#include "udw/quadrature.hpp"
#include "udw/wightman.hpp"

namespace udw {

// Y_k with lambda^2 included. The imaginary part is absent for pointlike detectors.
struct LocalY {
    double re = 0.0;
    std::optional<double> im;
    cplx value() const;
};

// Every ingredient of the density matrix; all values carry their lambda factors.
struct MatrixElements {
    std::optional<cplx> I_AA_mp, I_BB_mp, I_AA_pm, I_BB_pm;
    std::optional<cplx> I_AB_pp, I_AB_mm, I_AB_mp, I_BA_pm, I_AA_mm, I_BB_pp;
    std::optional<LocalY> Y_A, Y_B;
    std::optional<cplx> X_AB_pos;       // lambda^2 X_AB(Omega)
    std::optional<cplx> X_AB_neg_conj;  // lambda^2 X*_AB(-Omega)
    std::map<std::string, double> abs_error;
};

struct DensityMatrix {
    double r11 = 0, r22 = 0, r33 = 0, r44 = 0;
    cplx r14{}, r23{};
    bool has_r14 = false;
};

// ---- closed forms (Minkowski, static Gaussian detectors) ----

double Ikk_mp_closed(const DetectorParams& d);
double Ikk_pm_closed(const DetectorParams& d);
double ReY_closed(const DetectorParams& d);
// Full Y_k; the imaginary part integral diverges logarithmically for sigma = 0, Omega != 0
LocalY Y_closed(const DetectorParams& d, double k_tol = 1e-10);

// I_jk^(pq) for any signs, including j == k (L = 0 limit taken analytically)
cplx I_closed(const DetectorParams& j, const DetectorParams& k, int p, int q);

// Printed Gamma-form of I_AB^(++)
cplx IAB_pp_closed(const Scenario& s);

// K(L, dt, sigma)/L = int_0^inf dk e^{-k^2 sigma^2/2} e^{-k^2T^2/2} e^{i dt k} erfc((dt + i T^2 k)/(sqrt2 T)) k sinc(kL)
// for sigma > 0 and the time-domain principal-value form for sigma = 0.
cplx K_over_L(double L, double dt, double sigma, double T, double k_tol = 1e-10);

// J_jk^(--) between distinct static detectors j (outer time) and k
cplx J_mm_closed(const DetectorParams& j, const DetectorParams& k, double k_tol = 1e-10);
cplx J_pp_closed(const DetectorParams& j, const DetectorParams& k, double k_tol = 1e-10);
cplx JAB_mm_closed(const Scenario& s, double k_tol = 1e-10);

// ---- generic integrals against a Wightman backend ----

struct GenericOptions {
    quad::EpsSchedule schedule;
    double abs_tol = 1e-12;
    double rel_tol = 1e-6;
    int initial_split = 1;
    long max_evals = 400'000'000;
};

struct GenericValue {
    cplx value{};
    double abs_error = 0.0;
    double residual = 0.0;
    bool ok = true;
};

// sign pairs in the order used by the vector-valued integrals
inline constexpr std::array<std::array<int, 2>, 4> kSignOrder{{{-1, 1}, {1, -1}, {1, 1}, {-1, -1}}};
int sign_index(int p, int q);

std::array<GenericValue, 4> I_generic_all(const DetectorParams& j, const DetectorParams& k, const WightmanBackend& W,
                                          const GenericOptions& opt = {});
std::array<GenericValue, 4> J_generic_all(const DetectorParams& j, const DetectorParams& k, const WightmanBackend& W,
                                          const GenericOptions& opt = {});

GenericValue I_generic(const DetectorParams& j, const DetectorParams& k, int p, int q, const WightmanBackend& W,
                       const GenericOptions& opt = {});
// Raises DivergenceError for pointlike j == k (the single J has a divergent imaginary part)
GenericValue J_generic(const DetectorParams& j, const DetectorParams& k, int p, int q, const WightmanBackend& W,
                       const GenericOptions& opt = {});
// J_kk^(-+) + J_kk^(+-)*; imaginary part only when the backend needs no regulator
LocalY Y_generic(const DetectorParams& d, const WightmanBackend& W, const GenericOptions& opt = {});

// ---- memoization shared by sweep workers ----

class ElementCache {
public:
    // Returns the cached vector for key, computing it with fn on a miss.
    // Concurrent misses may compute twice; the first insertion wins.
    std::vector<cplx> get_or_compute(const std::string& key, const std::function<std::vector<cplx>()>& fn);
    size_t size() const;

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::vector<cplx>> map_;
};

std::string cache_key(const std::string& kind, std::initializer_list<double> params);

struct ElementOptions {
    double k_tol = 1e-10;
    bool want_im_y = false;
    GenericOptions generic;
};

// All elements for the scenario: closed forms in Minkowski, closed Minkowski
// part plus generic integral of the shockwave excess otherwise.
MatrixElements compute_elements(const Scenario& s, const ElementOptions& opt = {}, ElementCache* cache = nullptr);

// Elements each regime reads; used by assemble to report what is missing.
std::vector<std::string> required_elements(Regime r);
std::vector<std::string> missing_elements(const MatrixElements& me, Regime r);

DensityMatrix assemble(const Scenario& s, const MatrixElements& me);

}  // namespace udw
