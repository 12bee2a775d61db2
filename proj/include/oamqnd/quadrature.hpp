#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "oamqnd/errors.hpp"

namespace oamqnd {

// Adaptive Gauss-Kronrod 15(7) on a finite interval. The integrands here are
// smooth polynomial-times-Gaussian profiles, so bisection converges quickly.
namespace gk {

// Kronrod-15 abscissae (positive half) and weights; Gauss-7 weights for the
// embedded rule. Standard QUADPACK constants.
inline constexpr std::array<double, 8> kronrod_x = {
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr std::array<double, 8> kronrod_w = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

// Gauss-7 lives on kronrod_x indices {0, 2, 4, 6}.
inline constexpr std::array<double, 4> gauss_w = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

template <typename F>
inline void rule15(const F& f, double a, double b, double& k15, double& g7) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    k15 = 0.0;
    g7 = 0.0;
    const double f0 = f(c);
    k15 += kronrod_w[0] * f0;
    g7 += gauss_w[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double fp = f(c + h * kronrod_x[i]);
        const double fm = f(c - h * kronrod_x[i]);
        k15 += kronrod_w[i] * (fp + fm);
        if (i % 2 == 0) g7 += gauss_w[i / 2] * (fp + fm);
    }
    k15 *= h;
    g7 *= h;
}

}  // namespace gk

// Integrate f over [a, b] to absolute tolerance abs_tol. Throws NumericError
// when the interval budget is exhausted before the tolerance is met.
template <typename F>
inline double adaptive_integrate(const F& f, double a, double b, double abs_tol = 1e-12,
                                 int max_intervals = 4000) {
    struct Segment {
        double a, b, tol;
    };
    std::vector<Segment> stack{{a, b, abs_tol}};
    double total = 0.0;
    int used = 0;
    while (!stack.empty()) {
        Segment s = stack.back();
        stack.pop_back();
        if (++used > max_intervals)
            throw NumericError("adaptive_integrate: interval budget exhausted");
        double k15 = 0.0, g7 = 0.0;
        gk::rule15(f, s.a, s.b, k15, g7);
        const double err = std::abs(k15 - g7);
        if (err <= s.tol || (s.b - s.a) < 1e-14 * (b - a)) {
            total += k15;
        } else {
            const double mid = 0.5 * (s.a + s.b);
            stack.push_back({s.a, mid, 0.5 * s.tol});
            stack.push_back({mid, s.b, 0.5 * s.tol});
        }
    }
    return total;
}

}  // namespace oamqnd
