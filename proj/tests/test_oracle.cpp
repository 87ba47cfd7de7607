#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "udw/errors.hpp"
#include "udw/matrix_elements.hpp"
#include "udw/oracle.hpp"

using namespace udw;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

void pair_of(const oracle::GoldenRecord& r, DetectorParams& a, DetectorParams& b) {
    a = DetectorParams{};
    a.Omega = r.OmegaT;
    a.sigma = r.sigma_over_T;
    a.lambda = r.lambda;
    b = a;
    b.position = {0.0, 0.0, r.L_over_T};
    b.tau0 = r.dt_over_T;
}

cplx closed_for(const oracle::GoldenRecord& r) {
    DetectorParams a, b;
    pair_of(r, a, b);
    if (r.element == "I_AA_mp") return Ikk_mp_closed(a);
    if (r.element == "I_AA_pm") return Ikk_pm_closed(a);
    if (r.element == "I_AB_pp") return I_closed(a, b, 1, 1);
    if (r.element == "I_AB_mp") return I_closed(a, b, -1, 1);
    if (r.element == "ReY_A") return ReY_closed(a);
    if (r.element == "ImY_A") return Y_closed(a).im.value();
    if (r.element == "J_AB_mm") return J_mm_closed(a, b);
    if (r.element == "J_AB_pp") return J_pp_closed(a, b);
    throw Error("unknown golden element " + r.element);
}

}  // namespace

TEST_CASE("closed forms reproduce the frozen oracle table") {
    std::ifstream in(UDW_TEST_DATA "/golden.txt");
    REQUIRE(in.good());
    const auto recs = oracle::read_golden(in);
    REQUIRE(recs.size() >= 40);
    for (const auto& r : recs) {
        const cplx c = closed_for(r);
        INFO(r.element << " at OmegaT=" << r.OmegaT << " sigma=" << r.sigma_over_T << " L=" << r.L_over_T
                       << " dt=" << r.dt_over_T);
        // tiny imaginary parts of real quantities are oracle noise
        const double scale = std::max(std::abs(c), std::abs(r.value));
        CHECK(std::abs(c - r.value) <= std::max(1e-6 * scale, 10.0 * r.error));
        // suppressed J elements sit near 1e-10, where the oracle error has an absolute floor
        CHECK(r.error <= std::max(1e-6 * scale, 1e-15));
    }
}

TEST_CASE("oracle converges at a fixed order") {
    DetectorParams a;
    a.Omega = 2.0;
    a.sigma = 0.5;
    const auto v = oracle::brute_I(a, a, -1, 1);
    CHECK(rel(v.value, Ikk_mp_closed(a)) < 1e-6);
    CHECK(v.observed_order >= 2.0);

    oracle::OracleConfig coarse;
    coarse.grid_points_per_dim = 201;
    const auto c = oracle::brute_I(a, a, -1, 1, coarse);
    CHECK(std::abs(c.value - v.value) > std::abs(v.value - Ikk_mp_closed(a)));
}

TEST_CASE("oracle time-ordered integral for smeared detectors") {
    DetectorParams a, b;
    a.Omega = b.Omega = 2.0;
    a.sigma = b.sigma = 0.5;
    b.position = {0.0, 0.0, 1.0};
    b.tau0 = 0.5;
    oracle::OracleConfig cfg;
    cfg.grid_points_per_dim = 2001;
    const auto j = oracle::brute_J(a, b, -1, -1, cfg);
    CHECK(rel(j.value, J_mm_closed(a, b)) < 1e-5);

    const auto y = oracle::brute_Y(a, cfg);
    REQUIRE(y.im.has_value());
    const auto yc = Y_closed(a);
    CHECK(y.re.value.real() == doctest::Approx(yc.re).epsilon(1e-5));
    CHECK(y.im->value.real() == doctest::Approx(*yc.im).epsilon(1e-5));
}

TEST_CASE("oracle preconditions") {
    DetectorParams a, b;
    a.Omega = b.Omega = 1.0;
    b.position = {0.0, 0.0, 2.0};
    CHECK_THROWS(oracle::brute_J(a, b, -1, -1));
    const auto y = oracle::brute_Y(a);
    CHECK_FALSE(y.im.has_value());
    oracle::OracleConfig even;
    even.grid_points_per_dim = 1000;
    CHECK_THROWS(oracle::brute_I(a, b, 1, 1, even));
    b.sigma = 0.3;
    CHECK_THROWS_AS(oracle::brute_I(a, b, 1, 1), MismatchError);
}

TEST_CASE("golden table round trip") {
    std::vector<oracle::GoldenRecord> recs{
        {2.0, 0.5, 1.0, 0.0, 0.1, "I_AB_pp", cplx(1.0 / 3.0, -2e-300), 1e-14},
        {5.0, 0.0, 7.0, -1.5, 0.1, "ReY_A", cplx(-0.1, 0.0), 0.0},
    };
    std::stringstream ss;
    oracle::write_golden(ss, recs);
    const auto back = oracle::read_golden(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].value == recs[0].value);
    CHECK(back[1].dt_over_T == -1.5);
    CHECK(back[1].element == "ReY_A");

    std::stringstream bad("# something else\n");
    CHECK_THROWS(oracle::read_golden(bad));
    std::stringstream broken(std::string(oracle::kGoldenHeader) + "\n1 2 3\n");
    CHECK_THROWS(oracle::read_golden(broken));
}
