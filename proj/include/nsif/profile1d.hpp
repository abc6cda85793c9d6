#pragma once

#include <cmath>
#include <stdexcept>

#include "nsif/common.hpp"
#include "nsif/jet.hpp"

namespace nsif {

/// E(s) = exp(-1/s^2) for s > 0, zero jet otherwise. E''' > 0 on (0, ~0.52).
inline Jet3 edge_bump(double s) {
    if (s <= 0) return {};
    double is2 = 1.0 / (s * s);
    if (is2 > 700.0) return {};  // below double range
    Jet3 g{-is2, 2 * is2 / s, -6 * is2 / (s * s), 24 * is2 / (s * s * s)};
    return jet_exp(g);
}

/// psi(u) = exp(-1/u) for u > 0, zero jet otherwise; flat to all orders at 0.
inline Jet3 psi_flat(double u) {
    if (u <= 0) return {};
    double iu = 1.0 / u;
    if (iu > 700.0) return {};
    Jet3 g{-iu, iu * iu, -2 * iu * iu * iu, 6 * iu * iu * iu * iu};
    return jet_exp(g);
}

/// Smoothstep psi(u)/(psi(u)+psi(1-u)): 0 at u<=0 and 1 at u>=1, flat at both ends.
inline Jet3 smoothstep(double u) {
    if (u <= 0) return {};
    if (u >= 1) return Jet3::constant(1);
    Jet3 a = psi_flat(u);
    Jet3 b = psi_flat(1 - u);
    b = Jet3{b.f, -b.d1, b.d2, -b.d3};  // chain through (1-u)
    if (a.f == 0) return {};
    if (b.f == 0) return Jet3::constant(1);
    return a / (a + b);
}

/// Monotone C-infinity rise 0 -> 1 over [0,w].
///
/// An exp(-1/s^2)-type piece occupies [0, edge_width]; there the third
/// derivative is positive, which is what the cutoff corner estimates use.
/// The remaining interval joins to the plateau via f = E + S*(1-E) with a
/// two-sided-flat smoothstep S, so both junctions are C-infinity.
/// `grid_hint` caps the bump scale so values near 0 stay representable at
/// that sampling distance.
class RiseProfile {
  public:
    RiseProfile() = default;
    RiseProfile(double w, double grid_hint) : w_(w) {
        if (w <= 0) throw ConfigError("RiseProfile: width must be positive");
        lambda_ = std::min(w / 3.0, 24.0 * grid_hint);
        edge_ = 0.45 * lambda_;
    }
    double width() const { return w_; }
    double edge_width() const { return edge_; }

    Jet3 at(double t) const {
        if (t <= 0) return {};
        if (t >= w_) return Jet3::constant(1);
        Jet3 s{t / lambda_, 1.0 / lambda_, 0, 0};
        Jet3 E = edge_bump(s.f).compose(s);
        if (t <= edge_) return E;
        double jw = w_ - edge_;
        Jet3 u{(t - edge_) / jw, 1.0 / jw, 0, 0};
        Jet3 S = smoothstep(u.f).compose(u);
        return E + S * (Jet3::constant(1) - E);
    }

  private:
    double w_ = 1, lambda_ = 1 / 3.0, edge_ = 0.15;
};

/// 1D factor of a rectangle cutoff: supp = [a,b], 1 on [a+w, b-w],
/// symmetric about (a+b)/2.
class PlateauProfile {
  public:
    PlateauProfile() = default;
    PlateauProfile(double a, double b, double w, double grid_hint)
        : a_(a), b_(b), ramp_(w, grid_hint) {
        if (b - a <= 2 * w) throw ConfigError("PlateauProfile: ramp width exceeds half side");
    }

    Jet3 at(double x) const {
        double mid = (a_ + b_) / 2;
        if (x <= mid) return ramp_.at(x - a_);
        Jet3 j = ramp_.at(b_ - x);
        return {j.f, -j.d1, j.d2, -j.d3};
    }

    double lo() const { return a_; }
    double hi() const { return b_; }
    double ramp_width() const { return ramp_.width(); }
    double edge_width() const { return ramp_.edge_width(); }

  private:
    double a_ = 0, b_ = 1;
    RiseProfile ramp_;
};

/// 1D factor of the inner mask of a ring cutoff: 0 on [a,b], 1 outside
/// (a-w, b+w), rising over the flanking intervals.
class WellProfile {
  public:
    WellProfile() = default;
    WellProfile(double a, double b, double w, double grid_hint)
        : a_(a), b_(b), ramp_(w, grid_hint) {}

    Jet3 at(double x) const {
        if (x >= a_ && x <= b_) return {};
        if (x < a_) {
            Jet3 j = ramp_.at(a_ - x);
            return {j.f, -j.d1, j.d2, -j.d3};
        }
        return ramp_.at(x - b_);
    }

    double edge_width() const { return ramp_.edge_width(); }

  private:
    double a_ = 0, b_ = 1;
    RiseProfile ramp_;
};

}  // namespace nsif
