#pragma once

#include <cmath>

#include "nsif/field2d.hpp"

namespace nsif {

/// Rotation around the x1 axis by angle phi.
inline Mat3 rotation(double phi) {
    Mat3 R = Mat3::identity();
    double c = std::cos(phi), s = std::sin(phi);
    R.a[1][1] = c;
    R.a[1][2] = -s;
    R.a[2][1] = s;
    R.a[2][2] = c;
    return R;
}

/// Cylindrical projection onto the closed upper half plane.
inline Vec2 cyl_project(Vec3 p) { return {p.x, std::hypot(p.y, p.z)}; }

namespace detail {

/// Planar data of the lift at (x1, rho): components (v1, v2, g) of u in the
/// cylindrical frame, with their (x1, rho) derivatives. g = sqrt(f^2 - |v|^2),
/// which reduces to f off the support of v.
struct PlaneData {
    Sample v1, v2, g;
    bool ok = true;
};

inline PlaneData plane_data(const VectorField2& v, const ScalarField2& f, Vec2 q) {
    PlaneData d;
    Sample2 vv = v.at(q);
    Sample ff = f.at(q);
    d.v1 = vv.x;
    d.v2 = vv.y;
    double speed2 = vv.x.v * vv.x.v + vv.y.v * vv.y.v;
    if (speed2 == 0) {
        d.g = ff;
        return d;
    }
    Sample g2 = ff * ff - vv.x * vv.x - vv.y * vv.y;
    if (g2.v <= 0) {
        d.ok = false;
        return d;
    }
    d.g = sqrt_sample(g2);
    return d;
}

}  // namespace detail

/// Axisymmetric lift u[v, f]: the 3D field whose planar trace is
/// (v1, v2, sqrt(f^2 - |v|^2)); |u| = f composed with the projection.
class AxisymField {
  public:
    AxisymField() = default;
    AxisymField(VectorField2 v, ScalarField2 f) : v_(std::move(v)), f_(std::move(f)) {
        supp_ = f_.support();
        if (!v_.empty()) supp_ = supp_.hull(v_.support());
        if (supp_.lo.y <= 0) throw ConfigError("AxisymField: support touches the axis");
    }

    const Box2& meridian_support() const { return supp_; }
    const ScalarField2& profile() const { return f_; }
    const VectorField2& swirl() const { return v_; }

    bool in_support(Vec3 p) const { return supp_.contains(cyl_project(p)); }

    Vec3 eval(Vec3 p) const {
        Vec2 q = cyl_project(p);
        if (!supp_.contains(q)) return {};
        auto d = detail::plane_data(v_, f_, q);
        if (!d.ok) throw NumericError("lift: f <= |v| inside supp v");
        double c = p.y / q.y, s = p.z / q.y;
        // v1 x1hat + v2 rhohat + g phihat
        return {d.v1.v, d.v2.v * c - d.g.v * s, d.v2.v * s + d.g.v * c};
    }

    /// Full velocity gradient (d_j u_i) at p; assembled on the meridian plane
    /// and rotated by equivariance elsewhere.
    Mat3 gradient(Vec3 p) const {
        Vec2 q = cyl_project(p);
        if (q.y <= 0) throw NumericError("gradient: point on the rotation axis");
        if (!supp_.contains(q)) return {};
        auto d = detail::plane_data(v_, f_, q);
        if (!d.ok) throw NumericError("gradient: f <= |v| inside supp v");
        Mat3 G;  // G.a[i][j] = d_j u_i at (x1, rho, 0)
        G.a[0][0] = d.v1.dx;
        G.a[0][1] = d.v1.dy;
        G.a[0][2] = 0;
        G.a[1][0] = d.v2.dx;
        G.a[1][1] = d.v2.dy;
        G.a[1][2] = -d.g.v / q.y;
        G.a[2][0] = d.g.dx;
        G.a[2][1] = d.g.dy;
        G.a[2][2] = d.v2.v / q.y;
        double phi = std::atan2(p.z, p.y);
        if (phi == 0) return G;
        Mat3 R = rotation(phi);
        return R.mul(G).mul(R.transposed());
    }

    double divergence(Vec3 p) const { return gradient(p).trace(); }

    /// Vector Laplacian, from the cylindrical component formulas
    /// (d11 + d_rho_rho + rho^-1 d_rho) v1 etc.
    Vec3 laplacian(Vec3 p) const {
        Vec2 q = cyl_project(p);
        if (q.y <= 0) throw NumericError("laplacian: point on the rotation axis");
        if (!supp_.contains(q)) return {};
        auto d = detail::plane_data(v_, f_, q);
        if (!d.ok) throw NumericError("laplacian: f <= |v| inside supp v");
        double rho = q.y;
        double L1 = d.v1.dxx + d.v1.dyy + d.v1.dy / rho;
        double L2 = d.v2.dxx + d.v2.dyy + d.v2.dy / rho - d.v2.v / (rho * rho);
        double L3 = d.g.dxx + d.g.dyy + d.g.dy / rho - d.g.v / (rho * rho);
        double c = p.y / rho, s = p.z / rho;
        // frame vectors: x1hat, rhohat = (0,c,s), phihat = (0,-s,c)
        return {L1, L2 * c - L3 * s, L2 * s + L3 * c};
    }

    /// u . Laplacian(u), closed form v1 L1 + v2 L2 + g L3 (axisymmetric scalar).
    double u_dot_laplacian(Vec3 p) const {
        Vec2 q = cyl_project(p);
        if (q.y <= 0) throw NumericError("u_dot_laplacian: point on the rotation axis");
        if (!supp_.contains(q)) return 0;
        auto d = detail::plane_data(v_, f_, q);
        if (!d.ok) throw NumericError("u_dot_laplacian: f <= |v| inside supp v");
        double rho = q.y;
        double L1 = d.v1.dxx + d.v1.dyy + d.v1.dy / rho;
        double L2 = d.v2.dxx + d.v2.dyy + d.v2.dy / rho - d.v2.v / (rho * rho);
        double L3 = d.g.dxx + d.g.dyy + d.g.dy / rho - d.g.v / (rho * rho);
        return d.v1.v * L1 + d.v2.v * L2 + d.g.v * L3;
    }

  private:
    VectorField2 v_;
    ScalarField2 f_;
    Box2 supp_;
};

inline AxisymField lift(const VectorField2& v, const ScalarField2& f) {
    return AxisymField(v, f);
}
inline AxisymField lift(const ScalarField2& f) { return AxisymField({}, f); }

/// Trace of (grad u)(grad u)^T-style contraction sum_ij d_i u_j d_j u_i at a
/// plane point, in the closed planar form. This is the pressure source.
inline double stress_trace(const VectorField2& v, const ScalarField2& f, Vec2 z) {
    if (z.y <= 0) throw NumericError("stress_trace: requires z2 > 0");
    Sample2 vv = v.at(z);
    Sample ff = f.at(z);
    double d2f2 = 2 * ff.v * ff.dy;
    double d2v2 = 2 * (vv.x.v * vv.x.dy + vv.y.v * vv.y.dy);
    return vv.x.dx * vv.x.dx + vv.y.dy * vv.y.dy + 2 * vv.x.dy * vv.y.dx -
           (d2f2 - d2v2) / z.y + vv.y.v * vv.y.v / (z.y * z.y);
}

/// Same contraction with the swirl direction reversed enters identically;
/// the dedicated v-only part below is the interaction source (f-independent).
inline double stress_trace_swirl_only(const VectorField2& v, Vec2 z) {
    if (z.y <= 0) throw NumericError("stress_trace: requires z2 > 0");
    Sample2 vv = v.at(z);
    double d2v2 = 2 * (vv.x.v * vv.x.dy + vv.y.v * vv.y.dy);
    return -(vv.x.dx * vv.x.dx + vv.y.dy * vv.y.dy + 2 * vv.x.dy * vv.y.dx + d2v2 / z.y +
             vv.y.v * vv.y.v / (z.y * z.y));
}

}  // namespace nsif
