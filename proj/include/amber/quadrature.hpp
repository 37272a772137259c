#ifndef AMBER_QUADRATURE_HPP
#define AMBER_QUADRATURE_HPP

#include "amber/errors.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace amber {

// Gauss-Legendre nodes and weights on [-1, 1]. Rules are computed once per
// order (Newton iteration on the Legendre recurrence) and cached.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussRule& gauss_legendre(int order);

struct QuadConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_depth = 50;
    int order = 12;
};

template <typename F>
double gauss_panel(const F& f, double a, double b, const GaussRule& rule) {
    const double m = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
        s += rule.w[i] * f(m + h * rule.x[i]);
    return h * s;
}

namespace detail {

template <typename F>
double integrate_rec(const F& f, double a, double b, double whole,
                     const GaussRule& rule, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss_panel(f, a, m, rule);
    const double right = gauss_panel(f, m, b, rule);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= tol || b - a < 1e-14 * (std::fabs(a) + std::fabs(b)))
        return left + right;
    if (depth <= 0)
        throw convergence_error("integrate: max subdivision depth reached");
    // tol shrinks by sqrt(2), not 2: near integrable singularities the panel
    // error only halves per split, so a strict halving never terminates
    const double child_tol = 0.7071067811865476 * tol;
    return integrate_rec(f, a, m, left, rule, child_tol, depth - 1) +
           integrate_rec(f, m, b, right, rule, child_tol, depth - 1);
}

} // namespace detail

// Adaptive bisected Gauss-Legendre integration of f over [a, b].
template <typename F>
double integrate(const F& f, double a, double b, const QuadConfig& cfg = {}) {
    if (!(b > a)) return 0.0;
    const GaussRule& rule = gauss_legendre(cfg.order);
    const double whole = gauss_panel(f, a, b, rule);
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(whole));
    return detail::integrate_rec(f, a, b, whole, rule, tol, cfg.max_depth);
}

// Composite fixed-order rule over explicit panel edges.
template <typename F>
double integrate_panels(const F& f, const std::vector<double>& edges, int order) {
    const GaussRule& rule = gauss_legendre(order);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        s += gauss_panel(f, edges[i], edges[i + 1], rule);
    return s;
}

} // namespace amber

#endif
