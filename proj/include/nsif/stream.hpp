#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "nsif/field2d.hpp"
#include "nsif/profile1d.hpp"
#include "nsif/report.hpp"

namespace nsif {

/// Windowed slope profile: rises 0->1 over [a0,a1], stays 1, falls back to 0
/// over [b0,b1]. Used to reshape stream-function levels; any C1 function of
/// a stream function is again a stream function.
struct LevelWindow {
    double a0 = 0, a1 = 1, b0 = 2, b1 = 3;

    Jet3 slope(double t) const {  // value = window, derivatives in t
        Jet3 up = smoothstep((t - a0) / (a1 - a0))
                      .compose(Jet3{(t - a0) / (a1 - a0), 1.0 / (a1 - a0), 0, 0});
        Jet3 dn = Jet3::constant(1) -
                  smoothstep((t - b0) / (b1 - b0))
                      .compose(Jet3{(t - b0) / (b1 - b0), 1.0 / (b1 - b0), 0, 0});
        return up * dn;
    }

    /// Integral of slope() from 0 to t (assumes the two ramps do not overlap).
    double integral(double t) const {
        static const GaussRule g12(12);
        auto T = [&](double u) {  // integral of the unit smoothstep over [0,u]
            if (u <= 0) return 0.0;
            if (u >= 1) return 0.5;
            return g12.integrate(0.0, u, [](double s) { return smoothstep(s).f; });
        };
        double acc = 0;
        acc += (a1 - a0) * T(std::min(1.0, std::max(0.0, (t - a0) / (a1 - a0))));
        if (t > a1) acc += std::min(t, b0) - a1;
        if (t > b0) {
            double u = std::min(1.0, (t - b0) / (b1 - b0));
            acc += (b1 - b0) * (u - T(u));
        }
        return acc;
    }
};

/// Rotational loop around a point of P; the stream function is smooth, so
/// the mollification of the prototype degenerates to the identity and the
/// field has closed-form derivatives. div(x2 v) = 0 holds structurally.
struct AnnulusSpec {
    Vec2 center{0, 0.5};
    double ri = 0.10, ro = 0.26;
    double amp = 1.0;
};

namespace detail {

struct AnnulusVelImpl : VectorImpl {
    AnnulusSpec spec;
    LevelWindow win;

    explicit AnnulusVelImpl(const AnnulusSpec& s) : spec(s) {
        double lo = s.ri * s.ri / 2, hi = s.ro * s.ro / 2, span = hi - lo;
        win = {lo + 0.05 * span, lo + 0.35 * span, lo + 0.65 * span, lo + 0.95 * span};
    }

    Sample2 eval(Vec2 p) const override {
        double X = p.x - spec.center.x, Y = p.y - spec.center.y;
        double psi = (X * X + Y * Y) / 2;
        Jet3 q = win.slope(psi);  // Lambda'(psi) and derivatives in psi
        // grad psi = (X, Y), Hess psi = I
        Sample Q;  // Lambda'(psi(x)) as a 2D sample
        Q.v = q.f;
        Q.dx = q.d1 * X;
        Q.dy = q.d1 * Y;
        Q.dxx = q.d2 * X * X + q.d1;
        Q.dxy = q.d2 * X * Y;
        Q.dyy = q.d2 * Y * Y + q.d1;
        Sample W1 = Q * Sample{-Y, 0, -1, 0, 0, 0};  // w = Lambda' * (-Y, X)
        Sample W2 = Q * Sample{X, 1, 0, 0, 0, 0};
        double iy = 1.0 / p.y;
        Sample ry{iy, 0, -iy * iy, 0, 0, 2 * iy * iy * iy};
        return {W1 * ry * spec.amp, W2 * ry * spec.amp};
    }
};

}  // namespace detail

inline VectorField2 annulus_velocity(const AnnulusSpec& spec) {
    Box2 supp{{spec.center.x - spec.ro, spec.center.y - spec.ro},
              {spec.center.x + spec.ro, spec.center.y + spec.ro}};
    return {std::make_shared<detail::AnnulusVelImpl>(spec), supp};
}

/// Radii of the smooth joints of the annulus window; quadrature panels
/// aligned with these stay spectral.
inline std::vector<double> annulus_radial_breaks(const AnnulusSpec& s) {
    double lo = s.ri * s.ri / 2, hi = s.ro * s.ro / 2, span = hi - lo;
    std::vector<double> out;
    for (double t : {0.0, 0.05, 0.35, 0.65, 0.95, 1.0})
        out.push_back(std::sqrt(2 * (lo + t * span)));
    return out;
}

/// Mollification kernel exp(-1/(1-|y/eps|^2)) sampled on a tensor Gauss grid,
/// with differentiated-kernel weights for derivatives up to third order.
/// Order-0 weights are normalized and order-1 weights calibrated so constants
/// and affine functions are reproduced exactly; mixed second-order weights are
/// shared between both difference orders, which makes curl-grad cancellation
/// (and hence div(x2 v) = 0) exact.
struct Mollifier {
    double eps;
    std::vector<Vec2> nodes;
    std::vector<double> w0, wx, wy, wxx, wxy, wyy, wxxx, wxxy, wxyy, wyyy;

    explicit Mollifier(double radius, int n = 33) : eps(radius) {
        GaussRule g(n);
        auto bump = [&](double q, double out[4]) {  // g(q)=exp(-1/(1-q)) and 3 derivs
            if (q >= 1) {
                out[0] = out[1] = out[2] = out[3] = 0;
                return;
            }
            double im = 1.0 / (1 - q);
            if (im > 700) {
                out[0] = out[1] = out[2] = out[3] = 0;
                return;
            }
            double e = std::exp(-im);
            double h1 = -im * im, h2 = -2 * im * im * im, h3 = -6 * im * im * im * im;
            out[0] = e;
            out[1] = h1 * e;
            out[2] = (h2 + h1 * h1) * e;
            out[3] = (h3 + 3 * h1 * h2 + h1 * h1 * h1) * e;
        };
        double norm = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec2 y{eps * g.x[i], eps * g.x[j]};
                double gw = g.w[i] * g.w[j] * eps * eps;
                double q = (y.x * y.x + y.y * y.y) / (eps * eps);
                double d[4];
                bump(q, d);
                if (d[0] == 0) continue;
                double q1 = 2 * y.x / (eps * eps), q2 = 2 * y.y / (eps * eps);
                double q11 = 2 / (eps * eps);
                nodes.push_back(y);
                w0.push_back(gw * d[0]);
                wx.push_back(gw * d[1] * q1);
                wy.push_back(gw * d[1] * q2);
                wxx.push_back(gw * (d[2] * q1 * q1 + d[1] * q11));
                wxy.push_back(gw * d[2] * q1 * q2);
                wyy.push_back(gw * (d[2] * q2 * q2 + d[1] * q11));
                wxxx.push_back(gw * (d[3] * q1 * q1 * q1 + 3 * d[2] * q1 * q11));
                wxxy.push_back(gw * (d[3] * q1 * q1 * q2 + d[2] * q2 * q11));
                wxyy.push_back(gw * (d[3] * q1 * q2 * q2 + d[2] * q1 * q11));
                wyyy.push_back(gw * (d[3] * q2 * q2 * q2 + 3 * d[2] * q2 * q11));
                norm += gw * d[0];
            }
        for (auto& w : w0) w /= norm;
        double s1 = 0, s2 = 0;
        for (size_t q = 0; q < nodes.size(); ++q) {
            wx[q] /= norm;
            wy[q] /= norm;
            s1 += wx[q] * (-nodes[q].x);
            s2 += wy[q] * (-nodes[q].y);
        }
        for (auto& w : wx) w /= s1;
        for (auto& w : wy) w /= s2;
        double sxx = 0, sxy = 0, syy = 0, s3 = 0, s3y = 0;
        for (size_t q = 0; q < nodes.size(); ++q) {
            sxx += wxx[q] / norm * (nodes[q].x * nodes[q].x / 2);
            syy += wyy[q] / norm * (nodes[q].y * nodes[q].y / 2);
            sxy += wxy[q] / norm * (nodes[q].x * nodes[q].y);
            s3 += wxxx[q] / norm * (-nodes[q].x * nodes[q].x * nodes[q].x / 6);
            s3y += wyyy[q] / norm * (-nodes[q].y * nodes[q].y * nodes[q].y / 6);
        }
        for (size_t q = 0; q < nodes.size(); ++q) {
            wxx[q] /= norm * sxx;
            wyy[q] /= norm * syy;
            wxy[q] /= norm * sxy;
            wxxx[q] /= norm * s3;
            wyyy[q] /= norm * s3y;
            wxxy[q] /= norm;
            wxyy[q] /= norm;
        }
    }
};

/// Scalar jet to third order used by mollified stream evaluation.
struct Jet2D3 {
    double v = 0, x = 0, y = 0, xx = 0, xy = 0, yy = 0, xxx = 0, xxy = 0, xyy = 0, yyy = 0;
};

/// The four-region loop field of the arrangement: prescribed direction (1,0)
/// in a rectangle near the axis, weak return flow above, O(eps) risers.
/// Built as grad-perp of a mollified, level-reshaped piecewise-quadratic
/// stream function.
struct Loop4Spec {
    double d = 4, r = 1, eps = 0.05;
    int moll_nodes = 33;
};

namespace detail {

struct Loop4Stream {
    double d, r, eps;
    double F;                      // loop flux, 0.49 eps^2 r^2
    double g0, g1;                 // top duct inner/outer radii
    double d_in;                   // pulled-in right/left zero line
    LevelWindow win;               // on depth in units of eps^2 r^2
    double unit;                   // eps^2 r^2

    explicit Loop4Stream(const Loop4Spec& s) : d(s.d), r(s.r), eps(s.eps) {
        unit = eps * eps * r * r;
        F = 0.49 * unit;
        g0 = 0.102 * r;
        g1 = std::sqrt(g0 * g0 + 2 * F / (eps * eps));
        d_in = d - 0.01 * eps * r;
        double beta = 5e-5, h = 5e-5;  // flatten bands in depth units
        win = {beta, 2 * beta, 0.49 - 2 * h, 0.49 - h};
    }

    double raw(double x1, double x2) const {  // piecewise-quadratic stream
        double p1 = -x2 * x2 / 2;
        double p2 = 0.5 * eps * (x1 - d_in) * x2;
        double p4 = -0.5 * eps * (x1 + d_in) * x2;
        double p3 = 0.5 * eps * eps * (x2 * x2 - g1 * g1);
        return std::max(std::max(p1, p3), std::max(p2, p4));
    }

    double value(Vec2 p) const {  // level-reshaped stream, in absolute units
        double depth = -raw(p.x, p.y) / unit;
        return -win.integral(depth) * unit;
    }
};

struct Loop4VelImpl : VectorImpl {
    Loop4Stream st;
    Mollifier mo;

    Loop4VelImpl(const Loop4Spec& s)
        : st(s), mo(0.002 * s.eps * s.r, s.moll_nodes) {}

    Jet2D3 phi(Vec2 p) const {
        Jet2D3 j;
        for (size_t q = 0; q < mo.nodes.size(); ++q) {
            double f = st.value({p.x - mo.nodes[q].x, p.y - mo.nodes[q].y});
            j.v += mo.w0[q] * f;
            j.x += mo.wx[q] * f;
            j.y += mo.wy[q] * f;
            j.xx += mo.wxx[q] * f;
            j.xy += mo.wxy[q] * f;
            j.yy += mo.wyy[q] * f;
            j.xxx += mo.wxxx[q] * f;
            j.xxy += mo.wxxy[q] * f;
            j.xyy += mo.wxyy[q] * f;
            j.yyy += mo.wyyy[q] * f;
        }
        return j;
    }

    Sample2 eval(Vec2 p) const override {
        Jet2D3 j = phi(p);
        Sample W1{-j.y, -j.xy, -j.yy, -j.xxy, -j.xyy, -j.yyy};
        Sample W2{j.x, j.xx, j.xy, j.xxx, j.xxy, j.xyy};
        double iy = 1.0 / p.y;
        Sample ry{iy, 0, -iy * iy, 0, 0, 2 * iy * iy * iy};
        return {W1 * ry, W2 * ry};
    }
};

}  // namespace detail

inline VectorField2 loop4_velocity(const Loop4Spec& spec) {
    double pad = 0.0025 * spec.eps * spec.r;
    Box2 supp{{-spec.d, 0.005 * spec.eps * spec.r},
              {spec.d, std::sqrt(0.010404 + 2 * 0.49) * spec.r + pad}};
    return {std::make_shared<detail::Loop4VelImpl>(spec), supp};
}

using LoopSpec = std::variant<AnnulusSpec, Loop4Spec>;

struct DivfreeResult {
    VectorField2 v;
    VerificationReport cert;
};

/// v = J(w)/x2 for a weakly divergence-free prototype w, realized through the
/// stream function of w so div(x2 v) vanishes structurally; certified on a grid.
inline DivfreeResult build_divfree_v(const Region& U, const LoopSpec& spec,
                                     double tol_div = 1e-8, GridSpec grid = {64, 64}) {
    DivfreeResult res;
    if (std::holds_alternative<AnnulusSpec>(spec)) {
        const auto& a = std::get<AnnulusSpec>(spec);
        res.v = annulus_velocity(a);
    } else {
        res.v = loop4_velocity(std::get<Loop4Spec>(spec));
    }
    const Box2 sb = res.v.support();
    if (!U.bbox().dilated(1e-12).contains_box(sb))
        throw ConfigError("build_divfree_v: prototype support leaves the region");

    double worst = 0;
    Vec2 at{};
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            Vec2 p{sb.lo.x + (i + 0.5) * sb.width() / grid.nx,
                   sb.lo.y + (j + 0.5) * sb.height() / grid.ny};
            Sample2 s = res.v.at(p);
            double dv = p.y * (s.x.dx + s.y.dy) + s.y.v;
            if (std::abs(dv) > worst) {
                worst = std::abs(dv);
                at = p;
            }
        }
    res.cert.title = "divfree";
    res.cert.add("div_x2v_below_tol", worst <= tol_div, tol_div - worst, at, 0,
                 "max |div(x2 v)| = " + std::to_string(worst));
    return res;
}

}  // namespace nsif
