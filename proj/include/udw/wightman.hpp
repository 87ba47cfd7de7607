#pragma once

#include <complex>
#include <vector>

#include "udw/detector_model.hpp"

namespace udw {

using cplx = std::complex<double>;

struct SpacetimeEvent {
    double t = 0.0, x = 0.0, y = 0.0, z = 0.0;
    double u() const { return t - z; }
    double v() const { return t + z; }
};

struct ShockwaveParams {
    double a = 1.0;
    double u0 = 0.0;
};

// Theta(u - u0) with Theta(0) = 1/2
double heaviside_half(double x);

// -1/(4 pi^2) / ((dt - i eps)^2 - |dx|^2)
cplx wightman_minkowski(const SpacetimeEvent& x, const SpacetimeEvent& y, double eps);

// Gaussian-smeared pullback between static detectors with common width sigma > 0,
// as a function of dt = t_x - t_y and spatial separation L (no regulator needed)
cplx wightman_minkowski_smeared(double dt, double L, double sigma);

// General D = 4 quadratic-profile shockwave formula with transverse positions.
// near_pole, if given, is set when a denominator modulus drops below 1e-12.
cplx wightman_shockwave(const SpacetimeEvent& x, const SpacetimeEvent& y, const ShockwaveParams& p, double eps,
                        bool* near_pole = nullptr);

// On-axis reduction (x, y on the z axis): separate code path used as a cross-check
cplx wightman_shockwave_onaxis(const SpacetimeEvent& x, const SpacetimeEvent& y, const ShockwaveParams& p,
                               double eps);

// W_shockwave - W_minkowski on axis, written without the cancellation of the difference
cplx wightman_shockwave_excess(const SpacetimeEvent& x, const SpacetimeEvent& y, const ShockwaveParams& p,
                               double eps);

// Pullback of a Wightman function onto two static detectors, in the form the
// generic integrators need: W(x_j(t1), x_k(t2)) plus the t2 locations where
// it is singular or non-smooth.
class WightmanBackend {
public:
    virtual ~WightmanBackend() = default;
    virtual cplx pullback(const DetectorParams& j, double t1, const DetectorParams& k, double t2, double eps) const = 0;
    // whether the pullback depends on the regulator eps at all
    virtual bool needs_eps() const = 0;
    virtual void inner_breaks(const DetectorParams& j, double t1, const DetectorParams& k,
                              std::vector<double>& out) const;
    virtual void outer_breaks(const DetectorParams& j, const DetectorParams& k, std::vector<double>& out) const;
    // true when the pullback is identically zero on the truncation box
    virtual bool vanishes(const DetectorParams& j, const DetectorParams& k, double half_width) const;
    virtual const char* name() const = 0;
};

class MinkowskiPointlike : public WightmanBackend {
public:
    cplx pullback(const DetectorParams& j, double t1, const DetectorParams& k, double t2, double eps) const override;
    bool needs_eps() const override { return true; }
    void inner_breaks(const DetectorParams& j, double t1, const DetectorParams& k,
                      std::vector<double>& out) const override;
    const char* name() const override { return "minkowski"; }
};

class MinkowskiSmeared : public WightmanBackend {
public:
    explicit MinkowskiSmeared(double sigma);
    cplx pullback(const DetectorParams& j, double t1, const DetectorParams& k, double t2, double eps) const override;
    bool needs_eps() const override { return false; }
    void inner_breaks(const DetectorParams& j, double t1, const DetectorParams& k,
                      std::vector<double>& out) const override;
    const char* name() const override { return "minkowski_smeared"; }

private:
    double sigma_;
};

class ShockwaveBackend : public WightmanBackend {
public:
    enum class Form { General, OnAxis, Excess };
    ShockwaveBackend(ShockwaveParams p, Form f);
    cplx pullback(const DetectorParams& j, double t1, const DetectorParams& k, double t2, double eps) const override;
    bool needs_eps() const override { return true; }
    void inner_breaks(const DetectorParams& j, double t1, const DetectorParams& k,
                      std::vector<double>& out) const override;
    void outer_breaks(const DetectorParams& j, const DetectorParams& k, std::vector<double>& out) const override;
    bool vanishes(const DetectorParams& j, const DetectorParams& k, double half_width) const override;
    const char* name() const override;
    const ShockwaveParams& params() const { return p_; }

private:
    ShockwaveParams p_;
    Form form_;
};

}  // namespace udw
