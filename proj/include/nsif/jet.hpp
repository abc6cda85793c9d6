#pragma once

#include <cmath>

namespace nsif {

/// Value with first three derivatives of a 1D function; arithmetic propagates
/// derivatives so piecewise profiles stay exact to roundoff.
struct Jet3 {
    double f = 0, d1 = 0, d2 = 0, d3 = 0;

    static Jet3 var(double x) { return {x, 1, 0, 0}; }
    static Jet3 constant(double c) { return {c, 0, 0, 0}; }

    Jet3 operator+(const Jet3& o) const { return {f + o.f, d1 + o.d1, d2 + o.d2, d3 + o.d3}; }
    Jet3 operator-(const Jet3& o) const { return {f - o.f, d1 - o.d1, d2 - o.d2, d3 - o.d3}; }
    Jet3 operator*(double s) const { return {f * s, d1 * s, d2 * s, d3 * s}; }
    Jet3 operator*(const Jet3& o) const {
        return {f * o.f,
                d1 * o.f + f * o.d1,
                d2 * o.f + 2 * d1 * o.d1 + f * o.d2,
                d3 * o.f + 3 * d2 * o.d1 + 3 * d1 * o.d2 + f * o.d3};
    }
    Jet3 operator/(const Jet3& o) const { return *this * o.recip(); }

    Jet3 recip() const {
        double i = 1.0 / f;
        double r1 = -d1 * i * i;
        double r2 = (2 * d1 * d1 * i - d2) * i * i;
        double r3 = (-6 * d1 * d1 * d1 * i * i + 6 * d1 * d2 * i - d3) * i * i;
        return {i, r1, r2, r3};
    }

    /// Composition (this ∘ inner): Faa di Bruno to third order.
    Jet3 compose(const Jet3& in) const {
        return {f,
                d1 * in.d1,
                d2 * in.d1 * in.d1 + d1 * in.d2,
                d3 * in.d1 * in.d1 * in.d1 + 3 * d2 * in.d1 * in.d2 + d1 * in.d3};
    }
};

inline Jet3 operator*(double s, const Jet3& j) { return j * s; }

inline Jet3 jet_exp(const Jet3& g) {
    double e = std::exp(g.f);
    Jet3 outer{e, e, e, e};
    return outer.compose(g);
}

inline Jet3 jet_sqrt(const Jet3& g) {
    double r = std::sqrt(g.f);
    double r1 = 0.5 / r;
    double r2 = -0.25 / (r * g.f);
    double r3 = 0.375 / (r * g.f * g.f);
    Jet3 outer{r, r1, r2, r3};
    return outer.compose(g);
}

}  // namespace nsif
