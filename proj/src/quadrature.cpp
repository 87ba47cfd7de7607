#include "udw/quadrature.hpp"

#include <cmath>

namespace udw::quad {

double gaussian_cutoff(double center, double decay_scale, double tol) {
    const double t = std::clamp(tol, 1e-300, 0.5);
    return center + decay_scale * (std::sqrt(2.0 * std::log(1.0 / t)) + 3.0);
}

std::vector<double> oscillation_breaks(double a, double b, double period, int max_panels) {
    std::vector<double> out;
    if (!(period > 0.0) || !(b > a)) return out;
    double step = 0.5 * period;
    const double n = (b - a) / step;
    if (n > max_panels) step = (b - a) / max_panels;
    const double first = std::ceil(a / step) * step;
    for (double x = first; x < b; x += step)
        if (x > a) out.push_back(x);
    return out;
}

QuadResult integrate_semi_infinite(const std::function<cplx(double)>& f, double decay_scale, double tol,
                                   const SemiInfiniteOptions& opt) {
    if (!(tol > 0.0)) throw Error("integrate_semi_infinite: tol must be positive");
    if (!(decay_scale > 0.0)) throw Error("integrate_semi_infinite: decay_scale must be positive");
    const double kmax = gaussian_cutoff(std::max(0.0, opt.center), decay_scale, tol);
    std::vector<double> br = oscillation_breaks(0.0, kmax, opt.oscillation_period);
    for (double x : opt.breakpoints) br.push_back(x);
    if (opt.center > 0.0) br.push_back(opt.center);
    // the Gaussian bulk gets its own panels so the tail is never sampled coarsely
    for (int m = 1; m <= 8; ++m) br.push_back(std::max(0.0, opt.center) + m * decay_scale);
    QuadOptions q;
    q.rel_tol = tol;
    q.abs_tol = opt.abs_tol >= 0.0 ? opt.abs_tol : tol * 1e-3;
    q.max_evals = opt.max_evals;
    return integrate(f, 0.0, kmax, std::span<const double>(br), q);
}

QuadResult integrate_time_ordered_2d(const std::function<cplx(double, double)>& g, double c1, double c2,
                                     double width, double tol) {
    QuadOptions q;
    q.rel_tol = tol;
    q.abs_tol = tol * 1e-3;
    std::vector<double> ob{c1, c2};
    auto r = integrate_2d_n<1>([&](double a, double b) { return CVec<1>{g(a, b)}; },
                               truncation_box(c1, c2, width), true, [](double, std::vector<double>&) {},
                               std::span<const double>(ob), q);
    return {r.value[0], r.abs_error[0], r.evaluations};
}

QuadResult integrate_box_2d(const std::function<cplx(double, double)>& g, double c1, double c2, double width,
                            double tol) {
    QuadOptions q;
    q.rel_tol = tol;
    q.abs_tol = tol * 1e-3;
    std::vector<double> ob{c1};
    auto r = integrate_2d_n<1>([&](double a, double b) { return CVec<1>{g(a, b)}; },
                               truncation_box(c1, c2, width), false,
                               [c2](double, std::vector<double>& v) { v.push_back(c2); },
                               std::span<const double>(ob), q);
    return {r.value[0], r.abs_error[0], r.evaluations};
}

void EpsSchedule::validate() const {
    if (eps_values.empty()) throw Error("EpsSchedule: empty");
    for (size_t i = 0; i < eps_values.size(); ++i) {
        if (!(eps_values[i] > 0.0)) throw Error("EpsSchedule: values must be positive");
        if (i > 0 && !(eps_values[i] < eps_values[i - 1])) throw Error("EpsSchedule: values must decrease");
    }
    if (extrapolation_order < 0 || extrapolation_order >= static_cast<int>(eps_values.size()))
        throw Error("EpsSchedule: order must be below the number of points");
}

EpsSchedule EpsSchedule::scaled(double factor) const {
    EpsSchedule s = *this;
    for (double& e : s.eps_values) e *= factor;
    return s;
}

namespace {

// Neville evaluation at eps = 0 of the interpolant through the given points
cplx neville_at_zero(std::span<const double> x, std::span<const cplx> y) {
    std::vector<cplx> p(y.begin(), y.end());
    const size_t n = p.size();
    for (size_t m = 1; m < n; ++m)
        for (size_t i = 0; i + m < n; ++i) p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
    return p[0];
}

}  // namespace

Extrapolation extrapolate_table(std::span<const double> eps, std::span<const cplx> values, int order,
                                double abs_tol, double rel_tol) {
    const size_t n = eps.size();
    if (n == 0 || values.size() != n) throw Error("extrapolate_table: size mismatch");
    for (const auto& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error("extrapolate_table: non-finite F(eps)");
    Extrapolation out;
    if (n == 1 || order == 0) {
        out.value = values[n - 1];
        return out;
    }
    double d_first = 0.0, d_last = 0.0;
    if (n >= 3) {
        d_first = std::abs(values[0] - values[1]);
        d_last = std::abs(values[n - 2] - values[n - 1]);
        if (d_first > 0.0 && d_last > 0.0)
            out.growth_exponent = std::log(d_last / d_first) / std::log(eps[n - 2] / eps[0]);
        // the first difference can be small by accident when leading terms cancel at large eps,
        // so the last pair alone also gets a say
        const double d_prev = std::abs(values[n - 3] - values[n - 2]);
        if (n >= 4 && d_prev > 0.0 && d_last > 0.0)
            out.growth_exponent =
                std::max(out.growth_exponent, std::log(d_last / d_prev) / std::log(eps[n - 2] / eps[n - 3]));
    }
    const size_t m = std::min<size_t>(order + 1, n);
    // highest-order extrapolant from the m smallest eps, and one order lower for the residual
    out.value = neville_at_zero(eps.subspan(n - m, m), values.subspan(n - m, m));
    const cplx lower = neville_at_zero(eps.subspan(n - m + 1, m - 1), values.subspan(n - m + 1, m - 1));
    out.residual = std::abs(out.value - lower);
    const double tol = std::max(abs_tol, rel_tol * std::abs(out.value));
    // successive differences that fail to shrink, well above the noise floor
    if (n >= 3 && out.growth_exponent <= 0.25 && d_last > std::max(abs_tol, 10.0 * rel_tol * std::abs(values[n - 1])))
        throw DivergenceError("eps_extrapolate: F(eps) does not settle (difference exponent " +
                              std::to_string(out.growth_exponent) + ")");
    out.ok = out.residual <= 10.0 * tol;
    return out;
}

Extrapolation eps_extrapolate(const std::function<cplx(double)>& F, const EpsSchedule& schedule, double abs_tol,
                              double rel_tol) {
    schedule.validate();
    std::vector<cplx> v;
    v.reserve(schedule.eps_values.size());
    for (double e : schedule.eps_values) v.push_back(F(e));
    return extrapolate_table(schedule.eps_values, v, schedule.extrapolation_order, abs_tol, rel_tol);
}

}  // namespace udw::quad
