#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "udw/detector_model.hpp"

namespace udw::oracle {

using cplx = std::complex<double>;

// Brute-force evaluation through the plane-wave mode sum: the time integrals are
// done on a fixed composite grid for every wavenumber, then the wavenumber
// integral by composite Simpson. Shares no code with the adaptive engine.
struct OracleConfig {
    int grid_points_per_dim = 4001;  // odd; time and wavenumber grids
    double truncation_radius = 7.0;  // time window half-width, units of T
    double k_max = 0.0;              // 0 picks a cutoff from sigma, Omega and T
};

struct OracleValue {
    cplx value{};
    double error_estimate = 0.0;  // |value - value at half resolution|
    double observed_order = 0.0;  // log2 of successive error ratios over three resolutions
};

OracleValue brute_I(const DetectorParams& j, const DetectorParams& k, int p, int q, const OracleConfig& cfg = {});

// Needs sigma > 0: the pointlike mode sum for a time-ordered integral does not converge.
OracleValue brute_J(const DetectorParams& j, const DetectorParams& k, int p, int q, const OracleConfig& cfg = {});

// lambda^2 Y = J^(-+) + J^(+-)*. For sigma = 0 only the real part is returned,
// taken from the I elements.
struct OracleY {
    OracleValue re;
    std::optional<OracleValue> im;
};
OracleY brute_Y(const DetectorParams& d, const OracleConfig& cfg = {});

// ---- golden-value corpus ----

struct GoldenRecord {
    double OmegaT = 0, sigma_over_T = 0, L_over_T = 0, dt_over_T = 0, lambda = 0.1;
    std::string element;
    cplx value{};
    double error = 0.0;
};

inline constexpr const char* kGoldenHeader = "# udw-golden v1";

// parameter sets frozen into the corpus
std::vector<GoldenRecord> golden_corpus(const OracleConfig& cfg = {});
void write_golden(std::ostream& os, const std::vector<GoldenRecord>& recs);
std::vector<GoldenRecord> read_golden(std::istream& is);

}  // namespace udw::oracle
