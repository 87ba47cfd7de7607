#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "udw/errors.hpp"

namespace udw::quad {

using cplx = std::complex<double>;

template <int N>
using CVec = std::array<cplx, N>;

struct QuadResult {
    cplx value{};
    double abs_error_estimate = 0.0;
    long evaluations = 0;
};

template <int N>
struct QuadResultN {
    CVec<N> value{};
    std::array<double, N> abs_error{};
    long evaluations = 0;
};

struct QuadOptions {
    double abs_tol = 0.0;
    double rel_tol = 1e-8;
    long max_evals = 4'000'000;
    // every initial panel is split into this many equal pieces before refinement
    int initial_split = 1;
};

// thrown with the best available estimate attached
struct BudgetExhausted : ConvergenceError {
    BudgetExhausted(const std::string& msg, double err) : ConvergenceError(msg), error_estimate(err) {}
    double error_estimate;
};

namespace detail {

// 21-point Kronrod rule with its embedded 10-point Gauss rule (QUADPACK qk21 constants)
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208169853690, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <int N, class F>
inline CVec<N> call_vec(F& f, double x) {
    if constexpr (N == 1) {
        if constexpr (std::is_convertible_v<decltype(f(x)), cplx>)
            return CVec<1>{cplx(f(x))};
        else
            return f(x);
    } else {
        return f(x);
    }
}

template <int N>
struct Panel {
    double a, b;
    CVec<N> value;
    std::array<double, N> err;
    std::array<double, N> resabs;
};

template <int N, class F>
Panel<N> qk21(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    CVec<N> fc = call_vec<N>(f, c);
    CVec<N> rk, rg{};
    std::array<double, N> rabs{}, rasc{};
    for (int i = 0; i < N; ++i) {
        rk[i] = kWgk[10] * fc[i];
        rabs[i] = kWgk[10] * std::abs(fc[i]);
    }
    std::array<CVec<N>, 10> f1, f2;
    for (int j = 0; j < 10; ++j) {
        const double dx = h * kXgk[j];
        f1[j] = call_vec<N>(f, c - dx);
        f2[j] = call_vec<N>(f, c + dx);
        for (int i = 0; i < N; ++i) {
            rk[i] += kWgk[j] * (f1[j][i] + f2[j][i]);
            rabs[i] += kWgk[j] * (std::abs(f1[j][i]) + std::abs(f2[j][i]));
            if (j % 2 == 1) rg[i] += kWg[j / 2] * (f1[j][i] + f2[j][i]);
        }
    }
    Panel<N> p{a, b, {}, {}, {}};
    for (int i = 0; i < N; ++i) {
        const cplx mean = 0.5 * rk[i];
        double asc = kWgk[10] * std::abs(fc[i] - mean);
        for (int j = 0; j < 10; ++j) asc += kWgk[j] * (std::abs(f1[j][i] - mean) + std::abs(f2[j][i] - mean));
        rasc[i] = asc * std::fabs(h);
        double err = std::abs((rk[i] - rg[i]) * h);
        if (rasc[i] != 0.0 && err != 0.0) err = rasc[i] * std::min(1.0, std::pow(200.0 * err / rasc[i], 1.5));
        const double rabs_h = rabs[i] * std::fabs(h);
        const double round = 50.0 * std::numeric_limits<double>::epsilon() * rabs_h;
        if (round > err) err = round;
        p.value[i] = rk[i] * h;
        p.err[i] = err;
        p.resabs[i] = rabs_h;
    }
    return p;
}

}  // namespace detail

// Global adaptive Gauss-Kronrod on [a,b] with forced breakpoints. Panels are
// bisected in order of decreasing scaled error; the final sum is accumulated in
// panel-position order, so the result is a deterministic function of the inputs.
template <int N, class F>
QuadResultN<N> integrate_n(F&& f, double a, double b, std::span<const double> breaks, const QuadOptions& opt) {
    QuadResultN<N> out;
    if (!(b > a)) return out;
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const int split = std::max(1, opt.initial_split);

    std::vector<detail::Panel<N>> panels;
    panels.reserve(64);
    for (size_t s = 0; s + 1 < pts.size(); ++s) {
        for (int m = 0; m < split; ++m) {
            const double lo = pts[s] + (pts[s + 1] - pts[s]) * m / split;
            const double hi = m + 1 == split ? pts[s + 1] : pts[s] + (pts[s + 1] - pts[s]) * (m + 1) / split;
            if (hi > lo) panels.push_back(detail::qk21<N>(f, lo, hi));
        }
    }
    long evals = 21L * static_cast<long>(panels.size());

    std::array<double, N> absint{};
    auto totals = [&](CVec<N>& val, std::array<double, N>& err) {
        val.fill(0.0);
        err.fill(0.0);
        absint.fill(0.0);
        for (const auto& p : panels)
            for (int i = 0; i < N; ++i) {
                val[i] += p.value[i];
                err[i] += p.err[i];
                absint[i] += p.resabs[i];
            }
    };
    CVec<N> val;
    std::array<double, N> err;
    totals(val, err);

    // the per-panel error never drops below 50 eps resabs, so neither may the target
    constexpr double kRound = 100.0 * std::numeric_limits<double>::epsilon();
    auto tol_of = [&](int i) {
        return std::max({opt.abs_tol, opt.rel_tol * std::abs(val[i]), kRound * absint[i]});
    };
    auto converged = [&]() {
        for (int i = 0; i < N; ++i)
            if (err[i] > tol_of(i)) return false;
        return true;
    };
    auto badness = [&](const detail::Panel<N>& p) {
        double m = 0.0;
        for (int i = 0; i < N; ++i) {
            const double t = tol_of(i);
            m = std::max(m, t > 0.0 ? p.err[i] / t : p.err[i] * 1e300);
        }
        return m;
    };

    using Item = std::pair<double, size_t>;
    auto cmp = [](const Item& x, const Item& y) {
        return x.first < y.first || (x.first == y.first && x.second > y.second);
    };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
    for (size_t i = 0; i < panels.size(); ++i) heap.push({badness(panels[i]), i});

    int since_resum = 0;
    while (!converged()) {
        if (heap.empty()) break;
        if (evals + 42 > opt.max_evals) {
            double e = 0.0;
            for (int i = 0; i < N; ++i) e = std::max(e, err[i]);
            throw BudgetExhausted("adaptive quadrature exceeded its evaluation budget", e);
        }
        const size_t idx = heap.top().second;
        heap.pop();
        const detail::Panel<N> p = panels[idx];
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b) || (p.b - p.a) < 1e-15 * std::max({1.0, std::fabs(p.a), std::fabs(p.b)})) {
            continue;  // cannot refine further; keep as is
        }
        auto left = detail::qk21<N>(f, p.a, mid);
        auto right = detail::qk21<N>(f, mid, p.b);
        evals += 42;
        for (int i = 0; i < N; ++i) {
            val[i] += left.value[i] + right.value[i] - p.value[i];
            err[i] += left.err[i] + right.err[i] - p.err[i];
            absint[i] += left.resabs[i] + right.resabs[i] - p.resabs[i];
        }
        panels[idx] = left;
        panels.push_back(right);
        heap.push({badness(panels[idx]), idx});
        heap.push({badness(panels.back()), panels.size() - 1});
        if (++since_resum == 64) {
            since_resum = 0;
            totals(val, err);
        }
    }
    std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    totals(val, err);
    out.value = val;
    out.abs_error = err;
    out.evaluations = evals;
    if (!converged()) {
        double e = 0.0;
        for (int i = 0; i < N; ++i) e = std::max(e, err[i]);
        throw BudgetExhausted("adaptive quadrature could not reach the requested tolerance", e);
    }
    return out;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, std::span<const double> breaks, const QuadOptions& opt) {
    auto r = integrate_n<1>(f, a, b, breaks, opt);
    return {r.value[0], r.abs_error[0], r.evaluations};
}

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt) {
    return integrate(f, a, b, std::span<const double>{}, opt);
}

struct SemiInfiniteOptions {
    // location of the bulk of the integrand; truncation is measured from here
    double center = 0.0;
    // sin(kL)-type oscillation period; panels are split at its half-periods
    double oscillation_period = 0.0;
    std::vector<double> breakpoints;
    double abs_tol = -1.0;  // default tol*1e-3
    long max_evals = 4'000'000;
};

// truncation point for a Gaussian envelope exp(-(k-center)^2/(2 d^2))
double gaussian_cutoff(double center, double decay_scale, double tol);

QuadResult integrate_semi_infinite(const std::function<cplx(double)>& f, double decay_scale, double tol,
                                   const SemiInfiniteOptions& opt = {});

// panels at half-periods of the oscillation on [a,b], capped in number
std::vector<double> oscillation_breaks(double a, double b, double period, int max_panels = 600);

struct Box2D {
    double t1_lo, t1_hi, t2_lo, t2_hi;
};

inline Box2D truncation_box(double c1, double c2, double width) {
    return {c1 - 6.0 * width, c1 + 6.0 * width, c2 - 6.0 * width, c2 + 6.0 * width};
}

// Nested adaptive integration over a box, optionally restricted to t2 <= t1.
// inner_breaks(t1, out) adds singular t2 locations for the inner integral;
// outer_breaks lists t1 values where the inner integral is non-smooth.
template <int N, class G, class IB>
QuadResultN<N> integrate_2d_n(G&& g, const Box2D& box, bool time_ordered, IB&& inner_breaks,
                              std::span<const double> outer_breaks, const QuadOptions& opt) {
    const double len1 = box.t1_hi - box.t1_lo;
    QuadOptions inner = opt;
    inner.abs_tol = 0.1 * opt.abs_tol / std::max(len1, 1e-300);
    inner.rel_tol = 0.1 * opt.rel_tol;
    long evals = 0;
    std::vector<double> ib;
    auto outer_f = [&](double t1) -> CVec<N> {
        const double hi = time_ordered ? std::min(t1, box.t2_hi) : box.t2_hi;
        if (!(hi > box.t2_lo)) return CVec<N>{};
        ib.clear();
        inner_breaks(t1, ib);
        if (time_ordered) ib.push_back(hi);
        auto r = integrate_n<N>([&](double t2) -> CVec<N> { return g(t1, t2); }, box.t2_lo, hi,
                                std::span<const double>(ib), inner);
        evals += r.evaluations;
        return r.value;
    };
    std::vector<double> ob(outer_breaks.begin(), outer_breaks.end());
    if (time_ordered) {
        ob.push_back(box.t2_lo);
        ob.push_back(box.t2_hi);
    }
    QuadOptions o = opt;
    auto r = integrate_n<N>(outer_f, box.t1_lo, box.t1_hi, std::span<const double>(ob), o);
    r.evaluations = evals;
    return r;
}

// Scalar wrapper: half-plane t2 <= t1 inside the box centers +- 6T.
QuadResult integrate_time_ordered_2d(const std::function<cplx(double, double)>& g, double c1, double c2,
                                     double width, double tol);

// Scalar wrapper: full box centers +- 6T.
QuadResult integrate_box_2d(const std::function<cplx(double, double)>& g, double c1, double c2, double width,
                            double tol);

struct EpsSchedule {
    std::vector<double> eps_values{1e-2, 5e-3, 2.5e-3, 1.25e-3};
    int extrapolation_order = 3;
    void validate() const;
    EpsSchedule scaled(double factor) const;
};

struct Extrapolation {
    cplx value{};
    double residual = 0.0;
    bool ok = true;
    // exponent p in |F(eps) - F(eps')| ~ eps^p, the larger of the whole-schedule and
    // last-pair estimates; p <= 0 means the table is not settling (log or power divergence)
    double growth_exponent = 0.0;
};

// Polynomial (Richardson/Neville) extrapolation of tabulated F(eps) to eps = 0.
// Throws DivergenceError when successive differences stop shrinking above the noise floor.
Extrapolation extrapolate_table(std::span<const double> eps, std::span<const cplx> values, int order,
                                double abs_tol, double rel_tol);

Extrapolation eps_extrapolate(const std::function<cplx(double)>& F, const EpsSchedule& schedule,
                              double abs_tol = 1e-10, double rel_tol = 1e-6);

}  // namespace udw::quad
