#pragma once

#include <memory>
#include <vector>

#include "nsif/field2d.hpp"
#include "nsif/profile1d.hpp"
#include "nsif/report.hpp"

namespace nsif {

namespace detail {

struct RectCutoffImpl : ScalarImpl {
    PlateauProfile px, py;
    double mu;
    RectCutoffImpl(PlateauProfile a, PlateauProfile b, double m) : px(a), py(b), mu(m) {}
    Sample eval(Vec2 p) const override { return tensor_sample(px.at(p.x), py.at(p.y)) * mu; }
};

/// Ring cutoff: outer rectangle profile times the inner mask
/// 1 - (1-m1(x))(1-m2(y)).  Mask ramps use width eta/sqrt(2) so the mask is
/// one everywhere at (euclidean) distance >= eta from the inner rectangle.
struct RingCutoffImpl : ScalarImpl {
    PlateauProfile px, py;
    WellProfile mx, my;
    double mu;
    RingCutoffImpl(PlateauProfile a, PlateauProfile b, WellProfile c, WellProfile d, double m)
        : px(a), py(b), mx(c), my(d), mu(m) {}
    Sample eval(Vec2 p) const override {
        Sample outer = tensor_sample(px.at(p.x), py.at(p.y));
        Jet3 m1 = mx.at(p.x), m2 = my.at(p.y);
        // mask = m1 + m2 (1 - m1): exact at the plateau and free of the
        // cancellation the complementary-product form has for tiny values
        Sample M1{m1.f, m1.d1, 0, m1.d2, 0, 0};
        Sample mask = M1 + tensor_sample(Jet3::constant(1) - m1, m2);
        return outer * mask * mu;
    }
};

}  // namespace detail

struct CutoffOptions {
    double grid_hint = 0;     // finest sampling distance the field must survive; 0 = width/8
    int cert_along = 160;     // samples along each boundary edge
    int cert_depth = 20;      // samples across the band
    int max_halvings = 24;    // dyadic descent of the delta ladder
    double safety = 0.5;      // delta is shrunk by this factor once certified
    bool certify = true;      // false skips the band certificate (plateau masks)
};

struct CutoffResult {
    ScalarField2 f;
    double delta = 0;
    double eta = 0;
    VerificationReport cert;
    // piecewise-smooth joints of the profile, useful as quadrature panel cuts
    std::vector<double> xbreaks, ybreaks;
};

namespace detail {

/// Sample points of the band {x in U : dist(x, dU) in (floor, depth)}.
/// Depths below `floor` are skipped: there the edge bump is below double
/// range and evaluates to exact zero.
inline std::vector<Vec2> band_points(const Region& U, double depth, double floor, int n_along,
                                     int n_depth) {
    std::vector<Vec2> pts;
    double dmin = std::max(floor, depth / 256);
    if (dmin >= depth) dmin = depth / 2;
    auto add_rect_band = [&](const Box2& b, bool outside_of_inner) {
        // walks the four edges; depth measured inward for the outer rectangle,
        // outward for a ring's inner rectangle; along-range is extended past
        // the edge ends so diagonal corner zones are sampled too
        for (int e = 0; e < 4; ++e) {
            for (int i = 0; i <= n_along; ++i) {
                double s = -0.05 + 1.1 * double(i) / n_along;
                for (int j = 1; j <= n_depth; ++j) {
                    double t = double(j - 1) / (n_depth - 1);
                    double d = dmin * std::pow(depth / dmin, t);
                    double sign = outside_of_inner ? -1.0 : 1.0;
                    Vec2 p;
                    if (e == 0) p = {b.lo.x + s * b.width(), b.lo.y + sign * d};
                    if (e == 1) p = {b.lo.x + s * b.width(), b.hi.y - sign * d};
                    if (e == 2) p = {b.lo.x + sign * d, b.lo.y + s * b.height()};
                    if (e == 3) p = {b.hi.x - sign * d, b.lo.y + s * b.height()};
                    if (!U.contains(p)) continue;
                    double bd = U.boundary_distance(p);
                    if (bd >= dmin * 0.999 && bd <= depth * 1.001) pts.push_back(p);
                }
            }
        }
    };
    add_rect_band(U.outer, false);
    if (U.kind == Region::Kind::RectangularRing) add_rect_band(U.inner, true);
    return pts;
}

}  // namespace detail

/// Appendix-style cutoff on a rectangle or rectangular ring: supp f = closure(U),
/// f = mu on the eta-subset, and a certified delta with Lf > 0 on the band
/// U minus its delta-subset.
inline CutoffResult build_cutoff(const Region& U, double eta, double mu,
                                 CutoffOptions opt = {}) {
    U.validate();
    if (eta <= 0 || eta >= U.min_halfside())
        throw ConfigError("build_cutoff: eta must be positive and below half the smallest side");

    double hint = opt.grid_hint > 0 ? opt.grid_hint : eta / 8;
    ScalarField2 f;
    double edge = 0, edge_max = 0;
    if (U.kind == Region::Kind::Rectangle) {
        PlateauProfile px(U.outer.lo.x, U.outer.hi.x, eta, hint);
        PlateauProfile py(U.outer.lo.y, U.outer.hi.y, eta, hint);
        edge = std::min(px.edge_width(), py.edge_width());
        edge_max = std::max(px.edge_width(), py.edge_width());
        f = ScalarField2(std::make_shared<detail::RectCutoffImpl>(px, py, mu), U.outer);
    } else {
        PlateauProfile px(U.outer.lo.x, U.outer.hi.x, eta, hint);
        PlateauProfile py(U.outer.lo.y, U.outer.hi.y, eta, hint);
        double wm = eta / std::sqrt(2.0);
        WellProfile mx(U.inner.lo.x, U.inner.hi.x, wm, hint);
        WellProfile my(U.inner.lo.y, U.inner.hi.y, wm, hint);
        edge = std::min({px.edge_width(), py.edge_width(), mx.edge_width(), my.edge_width()});
        edge_max = std::max({px.edge_width(), py.edge_width(), mx.edge_width(), my.edge_width()});
        f = ScalarField2(std::make_shared<detail::RingCutoffImpl>(px, py, mx, my, mu), U.outer);
    }

    if (!opt.certify) {
        CutoffResult res;
        res.f = f;
        res.eta = eta;
        res.delta = 0;
        res.cert.title = "cutoff-uncertified";
        return res;
    }

    // dyadic descent: largest delta (from well past the bump piece, where the
    // ramp concavity eventually defeats L) whose band certifies Lf > 0
    double delta = 0.6 * eta;
    double alive_floor = 0.09 * edge_max;  // below this some bump is under double range
    double worst = 0;
    Vec2 worst_at{};
    bool ok = false;
    for (int h = 0; h <= opt.max_halvings && delta > 1.5 * alive_floor; ++h) {
        auto pts = detail::band_points(U, delta, alive_floor, opt.cert_along, opt.cert_depth);
        worst = std::numeric_limits<double>::infinity();
        bool positive = true;
        for (Vec2 p : pts) {
            Sample s = f.at(p);
            if (s.v <= 0) {
                positive = false;
                worst = std::min(worst, 0.0);
                worst_at = p;
                break;
            }
            double L = apply_L(s, p.y);
            if (L < worst) {
                worst = L;
                worst_at = p;
            }
        }
        if (positive && worst > 0) {
            ok = true;
            break;
        }
        delta /= 2;
    }
    if (!ok)
        throw NumericError("build_cutoff: no delta on the ladder certifies Lf > 0; worst at (" +
                           std::to_string(worst_at.x) + "," + std::to_string(worst_at.y) + ")");

    CutoffResult res;
    res.f = f;
    res.delta = delta * opt.safety;
    res.eta = eta;
    auto edge_cuts = [&](double lo2, double hi2, std::vector<double>& out) {
        out = {lo2, lo2 + edge, lo2 + eta, hi2 - eta, hi2 - edge, hi2};
    };
    (void)edge;
    edge_cuts(U.outer.lo.x, U.outer.hi.x, res.xbreaks);
    edge_cuts(U.outer.lo.y, U.outer.hi.y, res.ybreaks);
    if (U.kind == Region::Kind::RectangularRing) {
        double wm = eta / std::sqrt(2.0);
        for (double c : {U.inner.lo.x - wm, U.inner.lo.x, U.inner.hi.x, U.inner.hi.x + wm})
            res.xbreaks.push_back(c);
        for (double c : {U.inner.lo.y - wm, U.inner.lo.y, U.inner.hi.y, U.inner.hi.y + wm})
            res.ybreaks.push_back(c);
    }
    res.cert.title = "cutoff-certificate";
    res.cert.add("Lf_positive_on_band", true, worst, worst_at, 0,
                 "band width " + std::to_string(delta) + ", kept delta " +
                     std::to_string(res.delta));
    return res;
}

/// Plateau mask of a structure: compactly supported strictly inside U,
/// identically one on the delta-subset, so the decaying profiles
/// h^2 = f^2 - 2 t delta phi stay positive where phi lives.
inline ScalarField2 plateau_cutoff(const Region& U, double delta_cert, double grid_hint = 0) {
    Region shr = U.shrunk(delta_cert / 2);
    CutoffOptions co;
    co.grid_hint = grid_hint > 0 ? grid_hint : delta_cert / 16;
    co.certify = false;
    return build_cutoff(shr, 0.475 * delta_cert, 1.0, co).f;
}

}  // namespace nsif
