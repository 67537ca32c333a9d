#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "sae/errors.hpp"

namespace sae {

// ---------------------------------------------------------------------------
// Gamma function
// ---------------------------------------------------------------------------

/// Gamma(x) for x > 0 via the Lanczos rational approximation
/// (Godfrey coefficient set, g = 607/128). Relative error is a few 1e-15
/// over the range used here; no reflection formula is provided.
inline double gamma_fn(double x) {
    if (!(x > 0.0))
        throw DomainError("gamma_fn: argument must be positive");
    static constexpr std::array<double, 14> cof = {
        57.1562356658629235,     -59.5979603554754912,
        14.1360979747417471,     -0.491913816097620199,
        0.339946499848118887e-4, 0.465236289270485756e-4,
        -0.983744753048795646e-4, 0.158088703224912494e-3,
        -0.210264441724104883e-3, 0.217439618115212643e-3,
        -0.164318106536763890e-3, 0.844182239838527433e-4,
        -0.261908384015814087e-4, 0.368991826595316234e-5};
    double ser = 0.999999999999997092;
    double y = x;
    for (double c : cof)
        ser += c / ++y;
    const double tmp = x + 5.2421875;
    return std::exp((x + 0.5) * std::log(tmp) - tmp) *
           2.5066282746310005 * ser / x;
}

// ---------------------------------------------------------------------------
// Adaptive quadrature
// ---------------------------------------------------------------------------

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
    enum class Tail { none, reciprocal };
    Tail tail_substitution = Tail::reciprocal;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw DomainError("QuadratureSpec: tolerances must be positive");
        if (max_subdivisions < 1)
            throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
    }
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> gk_xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk_wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
    double value;
    double error;
};

// One 15-point Kronrod panel with the QUADPACK-style error estimate.
template <class F>
PanelResult kronrod15(F&& f, double a, double b) {
    const double hw = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);

    std::array<double, 15> fv{};
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(mid - hw * gk_xgk[i]);
        fv[14 - i] = f(mid + hw * gk_xgk[i]);
    }
    fv[7] = f(mid);

    double resk = gk_wgk[7] * fv[7];
    double resabs = std::abs(resk);
    for (int i = 0; i < 7; ++i) {
        resk += gk_wgk[i] * (fv[i] + fv[14 - i]);
        resabs += gk_wgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    double resg = gk_wg[3] * fv[7];
    for (int i = 0; i < 3; ++i)
        resg += gk_wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);

    const double reskh = resk * 0.5;
    double resasc = gk_wgk[7] * std::abs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += gk_wgk[i] *
                  (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));

    resasc *= std::abs(hw);
    resabs *= std::abs(hw);
    double err = std::abs((resk - resg) * hw);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    err = std::max(err, 50.0 * eps * resabs);
    return {resk * hw, err};
}

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// Probe |f| at three points approaching an endpoint; a sustained growth
// ratio above ~1.8 per factor-4 approach indicates an algebraic endpoint
// singularity of strength s >= 0.42 which plain bisection cannot resolve
// to tight tolerances.
template <class F>
bool endpoint_singular(F&& f, double endpoint, double toward, double span) {
    const double dir = (toward > endpoint) ? 1.0 : -1.0;
    const double h = 1e-3 * span;
    const double p1 = std::abs(f(endpoint + dir * h));
    const double p2 = std::abs(f(endpoint + dir * h * 0.25));
    const double p3 = std::abs(f(endpoint + dir * h * 0.0625));
    if (!std::isfinite(p1) || !std::isfinite(p2) || !std::isfinite(p3))
        return true;
    return p2 > 1.8 * p1 && p3 > 1.8 * p2 && p3 > 0.0;
}

template <class F>
double integrate_finite(F&& f, double a, double b, const QuadratureSpec& spec,
                        int sub_depth);

// Map an endpoint singularity away: x = a + u^2 (left) or x = b - u^2
// (right). The Jacobian factor 2u tames any (x - endpoint)^{-s} with
// s <= 1/2 completely and weakens stronger ones; recursion handles those.
template <class F>
double integrate_singular_left(F&& f, double a, double b,
                               const QuadratureSpec& spec, int sub_depth) {
    auto g = [&f, a](double u) { return 2.0 * u * f(a + u * u); };
    return integrate_finite(g, 0.0, std::sqrt(b - a), spec, sub_depth);
}

template <class F>
double integrate_singular_right(F&& f, double a, double b,
                                const QuadratureSpec& spec, int sub_depth) {
    auto g = [&f, b](double u) { return 2.0 * u * f(b - u * u); };
    return integrate_finite(g, 0.0, std::sqrt(b - a), spec, sub_depth);
}

template <class F>
double integrate_finite(F&& f, double a, double b, const QuadratureSpec& spec,
                        int sub_depth) {
    if (a == b)
        return 0.0;
    if (b < a)
        return -integrate_finite(f, b, a, spec, sub_depth);

    if (sub_depth > 0) {
        const double span = b - a;
        const bool sing_left = endpoint_singular(f, a, b, span);
        const bool sing_right = endpoint_singular(f, b, a, span);
        if (sing_left && sing_right) {
            const double mid = 0.5 * (a + b);
            return integrate_singular_left(f, a, mid, spec, sub_depth - 1) +
                   integrate_singular_right(f, mid, b, spec, sub_depth - 1);
        }
        if (sing_left)
            return integrate_singular_left(f, a, b, spec, sub_depth - 1);
        if (sing_right)
            return integrate_singular_right(f, a, b, spec, sub_depth - 1);
    }

    std::vector<Segment> heap;
    auto push = [&heap](Segment s) {
        heap.push_back(s);
        std::push_heap(heap.begin(), heap.end());
    };
    auto initial = kronrod15(f, a, b);
    push({a, b, initial.value, initial.error});
    double total = initial.value;
    double total_err = initial.error;

    for (int n = 0; n < spec.max_subdivisions; ++n) {
        if (total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)))
            return total;
        std::pop_heap(heap.begin(), heap.end());
        Segment worst = heap.back();
        heap.pop_back();

        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval at machine resolution; keep its estimate as is.
            total_err -= worst.error;
            worst.error = 0.0;
            push(worst);
            continue;
        }
        auto left = kronrod15(f, worst.a, mid);
        auto right = kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        push({worst.a, mid, left.value, left.error});
        push({mid, worst.b, right.value, right.error});
    }
    if (total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)))
        return total;
    throw ConvergenceError("integrate: tolerance not reached after max "
                           "subdivisions",
                           total, total_err);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b]; b may be +infinity,
/// in which case the reciprocal substitution x = a + t/(1-t) maps the tail
/// onto [0, 1). Integrable endpoint singularities (x-a)^{-s}, s < 1 are
/// handled by automatic u^2 endpoint substitutions.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    spec.validate();
    if (std::isinf(b)) {
        if (spec.tail_substitution != QuadratureSpec::Tail::reciprocal)
            throw DomainError("integrate: infinite upper bound requires the "
                              "reciprocal tail substitution");
        auto g = [&f, a](double t) {
            const double w = 1.0 - t;
            if (w <= 0.0)
                return 0.0;
            return f(a + t / w) / (w * w);
        };
        return detail::integrate_finite(g, 0.0, 1.0, spec, 8);
    }
    return detail::integrate_finite(f, a, b, spec, 8);
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Brent's method: bisection-safeguarded inverse quadratic interpolation.
/// Requires a sign change on [lo, hi]; returns x with bracket width <= tol.
template <class F>
double find_root(F&& f, double lo, double hi, double tol) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if (fa * fb > 0.0)
        throw BracketError("find_root: no sign change on the bracket");

    double c = a, fc = fa;
    double d = b - a, e = d;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0)
            return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::abs(d) > tol1)
            b += d;
        else
            b += (xm >= 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

// ---------------------------------------------------------------------------
// Schrodinger propagation:  psi'' = Q(x) psi
// ---------------------------------------------------------------------------

struct OdeState {
    double x = 0.0;
    std::complex<double> psi{0.0, 0.0};
    std::complex<double> dpsi{0.0, 0.0};

    bool finite() const {
        return std::isfinite(x) && std::isfinite(psi.real()) &&
               std::isfinite(psi.imag()) && std::isfinite(dpsi.real()) &&
               std::isfinite(dpsi.imag());
    }
};

namespace detail {

using C2 = std::array<std::complex<double>, 2>;

inline C2 axpy(const C2& y, double h, const C2& k) {
    return {y[0] + h * k[0], y[1] + h * k[1]};
}

} // namespace detail

/// Propagate psi'' = Q(x) psi from `from` to x = to_x with a Dormand-Prince
/// 5(4) embedded pair. Local error per unit step is kept below tol; in
/// oscillatory regions (Q < 0) the step is additionally capped at
/// osc_fraction of the local oscillation scale 2*pi/sqrt(-Q).
template <class QFn>
OdeState propagate_schrodinger(QFn&& Q, OdeState from, double to_x, double tol,
                               double osc_fraction = 0.1) {
    if (!from.finite() || !std::isfinite(to_x))
        throw DomainError("propagate_schrodinger: non-finite input state");
    if (to_x == from.x)
        return from;

    using detail::C2;
    const double dir = (to_x > from.x) ? 1.0 : -1.0;
    const double eps = std::numeric_limits<double>::epsilon();

    auto rhs = [&Q](double x, const C2& y) -> C2 {
        return {y[1], Q(x) * y[0]};
    };

    double x = from.x;
    C2 y = {from.psi, from.dpsi};
    C2 k1 = rhs(x, y);
    double qx = Q(x);

    auto osc_cap = [osc_fraction](double q) {
        if (q < 0.0)
            return osc_fraction * 2.0 * M_PI / std::sqrt(-q);
        return std::numeric_limits<double>::infinity();
    };

    double h = dir * std::min({std::abs(to_x - x), 0.01 * (1.0 + std::abs(x)),
                               osc_cap(qx)});

    const long max_steps = 200'000'000L;
    for (long step = 0; step < max_steps; ++step) {
        if (dir * (to_x - x) <= 0.0)
            break;
        h = dir * std::min(std::abs(h), std::abs(to_x - x));
        h = dir * std::min(std::abs(h), osc_cap(qx));
        if (std::abs(h) < 16.0 * eps * std::max(1.0, std::abs(x)))
            throw StiffnessError("propagate_schrodinger: step underflow", x);

        // Dormand-Prince 5(4) stages.
        const C2 k2 = rhs(x + 0.2 * h, detail::axpy(y, 0.2 * h, k1));
        C2 t = {y[0] + h * (3.0 / 40 * k1[0] + 9.0 / 40 * k2[0]),
                y[1] + h * (3.0 / 40 * k1[1] + 9.0 / 40 * k2[1])};
        const C2 k3 = rhs(x + 0.3 * h, t);
        t = {y[0] + h * (44.0 / 45 * k1[0] - 56.0 / 15 * k2[0] + 32.0 / 9 * k3[0]),
             y[1] + h * (44.0 / 45 * k1[1] - 56.0 / 15 * k2[1] + 32.0 / 9 * k3[1])};
        const C2 k4 = rhs(x + 0.8 * h, t);
        t = {y[0] + h * (19372.0 / 6561 * k1[0] - 25360.0 / 2187 * k2[0] +
                         64448.0 / 6561 * k3[0] - 212.0 / 729 * k4[0]),
             y[1] + h * (19372.0 / 6561 * k1[1] - 25360.0 / 2187 * k2[1] +
                         64448.0 / 6561 * k3[1] - 212.0 / 729 * k4[1])};
        const C2 k5 = rhs(x + 8.0 / 9 * h, t);
        t = {y[0] + h * (9017.0 / 3168 * k1[0] - 355.0 / 33 * k2[0] +
                         46732.0 / 5247 * k3[0] + 49.0 / 176 * k4[0] -
                         5103.0 / 18656 * k5[0]),
             y[1] + h * (9017.0 / 3168 * k1[1] - 355.0 / 33 * k2[1] +
                         46732.0 / 5247 * k3[1] + 49.0 / 176 * k4[1] -
                         5103.0 / 18656 * k5[1])};
        const C2 k6 = rhs(x + h, t);
        const C2 y5 = {y[0] + h * (35.0 / 384 * k1[0] + 500.0 / 1113 * k3[0] +
                                   125.0 / 192 * k4[0] - 2187.0 / 6784 * k5[0] +
                                   11.0 / 84 * k6[0]),
                       y[1] + h * (35.0 / 384 * k1[1] + 500.0 / 1113 * k3[1] +
                                   125.0 / 192 * k4[1] - 2187.0 / 6784 * k5[1] +
                                   11.0 / 84 * k6[1])};
        const C2 k7 = rhs(x + h, y5);
        const C2 y4 = {y[0] + h * (5179.0 / 57600 * k1[0] + 7571.0 / 16695 * k3[0] +
                                   393.0 / 640 * k4[0] - 92097.0 / 339200 * k5[0] +
                                   187.0 / 2100 * k6[0] + 1.0 / 40 * k7[0]),
                       y[1] + h * (5179.0 / 57600 * k1[1] + 7571.0 / 16695 * k3[1] +
                                   393.0 / 640 * k4[1] - 92097.0 / 339200 * k5[1] +
                                   187.0 / 2100 * k6[1] + 1.0 / 40 * k7[1])};

        const double wq = std::max(std::abs(qx), 1.0);
        const double err = std::sqrt(std::norm(y5[0] - y4[0]) +
                                     std::norm(y5[1] - y4[1]) / wq);
        const double mag_old = std::sqrt(std::norm(y[0]) + std::norm(y[1]) / wq);
        const double mag_new = std::sqrt(std::norm(y5[0]) + std::norm(y5[1]) / wq);
        const double scale = std::max({mag_old, mag_new, 1e-300});
        const double target = tol * std::abs(h) * scale;

        if (err <= target) {
            x += h;
            y = y5;
            k1 = k7; // first-same-as-last
            qx = Q(x);
        }
        const double grow = (err > 0.0)
                                ? 0.9 * std::pow(target / err, 0.2)
                                : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
    }

    OdeState out{to_x, y[0], y[1]};
    if (!out.finite())
        throw StiffnessError("propagate_schrodinger: solution overflowed", x);
    return out;
}

// ---------------------------------------------------------------------------
// Small angle helpers shared by the phase machinery
// ---------------------------------------------------------------------------

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI)
        a += 2.0 * M_PI;
    return a;
}

/// Wrap an angle into (-pi/2, pi/2] (mod-pi identities).
inline double wrap_half(double a) {
    a = std::remainder(a, M_PI);
    if (a <= -0.5 * M_PI)
        a += M_PI;
    return a;
}

} // namespace sae
