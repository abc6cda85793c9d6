#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "nsif/common.hpp"
#include "nsif/jet.hpp"

namespace nsif {

/// Scalar value with derivatives up to second order at a point of the plane.
struct Sample {
    double v = 0, dx = 0, dy = 0, dxx = 0, dxy = 0, dyy = 0;

    Sample operator+(const Sample& o) const {
        return {v + o.v, dx + o.dx, dy + o.dy, dxx + o.dxx, dxy + o.dxy, dyy + o.dyy};
    }
    Sample operator-(const Sample& o) const {
        return {v - o.v, dx - o.dx, dy - o.dy, dxx - o.dxx, dxy - o.dxy, dyy - o.dyy};
    }
    Sample operator*(double s) const {
        return {v * s, dx * s, dy * s, dxx * s, dxy * s, dyy * s};
    }
    Sample operator*(const Sample& o) const {
        return {v * o.v,
                dx * o.v + v * o.dx,
                dy * o.v + v * o.dy,
                dxx * o.v + 2 * dx * o.dx + v * o.dxx,
                dxy * o.v + dx * o.dy + dy * o.dx + v * o.dxy,
                dyy * o.v + 2 * dy * o.dy + v * o.dyy};
    }
    Vec2 grad() const { return {dx, dy}; }
};
inline Sample operator*(double s, const Sample& a) { return a * s; }

/// Tensor product of two 1D jets f1(x)*f2(y).
inline Sample tensor_sample(const Jet3& jx, const Jet3& jy) {
    return {jx.f * jy.f, jx.d1 * jy.f, jx.f * jy.d1, jx.d2 * jy.f, jx.d1 * jy.d1, jx.f * jy.d2};
}

/// sqrt of a sample, valid where the value is positive.
inline Sample sqrt_sample(const Sample& s) {
    double r = std::sqrt(s.v);
    double i = 0.5 / r;
    Sample o;
    o.v = r;
    o.dx = s.dx * i;
    o.dy = s.dy * i;
    o.dxx = s.dxx * i - s.dx * s.dx / (4 * r * s.v);
    o.dxy = s.dxy * i - s.dx * s.dy / (4 * r * s.v);
    o.dyy = s.dyy * i - s.dy * s.dy / (4 * r * s.v);
    return o;
}

struct Sample2 {
    Sample x, y;
    Sample2 operator+(const Sample2& o) const { return {x + o.x, y + o.y}; }
    Sample2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 value() const { return {x.v, y.v}; }
};

struct ScalarImpl {
    virtual ~ScalarImpl() = default;
    virtual Sample eval(Vec2 p) const = 0;
};

struct VectorImpl {
    virtual ~VectorImpl() = default;
    virtual Sample2 eval(Vec2 p) const = 0;
};

/// Scalar field on the (closed) upper half plane with derivative access.
/// Evaluates to exactly zero outside its support box.
class ScalarField2 {
  public:
    ScalarField2() = default;
    ScalarField2(std::shared_ptr<const ScalarImpl> impl, Box2 supp)
        : impl_(std::move(impl)), supp_(supp) {}

    bool empty() const { return !impl_; }
    const Box2& support() const { return supp_; }

    Sample at(Vec2 p) const {
        if (!impl_ || !supp_.contains(p)) return {};
        return impl_->eval(p);
    }
    double value(Vec2 p) const { return at(p).v; }

  private:
    std::shared_ptr<const ScalarImpl> impl_;
    Box2 supp_;
};

class VectorField2 {
  public:
    VectorField2() = default;
    VectorField2(std::shared_ptr<const VectorImpl> impl, Box2 supp)
        : impl_(std::move(impl)), supp_(supp) {}

    bool empty() const { return !impl_; }
    const Box2& support() const { return supp_; }

    Sample2 at(Vec2 p) const {
        if (!impl_ || !supp_.contains(p)) return {};
        return impl_->eval(p);
    }
    Vec2 value(Vec2 p) const {
        Sample2 s = at(p);
        return {s.x.v, s.y.v};
    }

  private:
    std::shared_ptr<const VectorImpl> impl_;
    Box2 supp_;
};

struct LambdaScalar : ScalarImpl {
    std::function<Sample(Vec2)> fn;
    explicit LambdaScalar(std::function<Sample(Vec2)> f) : fn(std::move(f)) {}
    Sample eval(Vec2 p) const override { return fn(p); }
};

struct LambdaVector : VectorImpl {
    std::function<Sample2(Vec2)> fn;
    explicit LambdaVector(std::function<Sample2(Vec2)> f) : fn(std::move(f)) {}
    Sample2 eval(Vec2 p) const override { return fn(p); }
};

inline ScalarField2 make_scalar(Box2 supp, std::function<Sample(Vec2)> fn) {
    return {std::make_shared<LambdaScalar>(std::move(fn)), supp};
}
inline VectorField2 make_vector(Box2 supp, std::function<Sample2(Vec2)> fn) {
    return {std::make_shared<LambdaVector>(std::move(fn)), supp};
}

inline ScalarField2 scalar_sum(const std::vector<ScalarField2>& parts) {
    if (parts.empty()) return {};
    Box2 box = parts[0].support();
    for (const auto& p : parts) box = box.hull(p.support());
    return make_scalar(box, [parts](Vec2 p) {
        Sample s;
        for (const auto& f : parts) s = s + f.at(p);
        return s;
    });
}

inline VectorField2 vector_sum(const std::vector<VectorField2>& parts) {
    if (parts.empty()) return {};
    Box2 box = parts[0].support();
    for (const auto& p : parts) box = box.hull(p.support());
    return make_vector(box, [parts](Vec2 p) {
        Sample2 s;
        for (const auto& f : parts) s = s + f.at(p);
        return s;
    });
}

inline ScalarField2 scaled(const ScalarField2& f, double c) {
    return make_scalar(f.support(), [f, c](Vec2 p) { return f.at(p) * c; });
}
inline VectorField2 scaled(const VectorField2& f, double c) {
    return make_vector(f.support(), [f, c](Vec2 p) { return f.at(p) * c; });
}

/// f(x) -> sigma * f((x1-alpha)/rho, x2/rho); support scales accordingly.
inline Sample rescale_sample(Sample s, double rho) {
    double ir = 1.0 / rho;
    return {s.v, s.dx * ir, s.dy * ir, s.dxx * ir * ir, s.dxy * ir * ir, s.dyy * ir * ir};
}

inline ScalarField2 rescaled(const ScalarField2& f, double alpha, double rho, double sigma) {
    Box2 b = f.support();
    Box2 nb{{alpha + rho * b.lo.x, rho * b.lo.y}, {alpha + rho * b.hi.x, rho * b.hi.y}};
    return make_scalar(nb, [f, alpha, rho, sigma](Vec2 p) {
        Sample s = f.at({(p.x - alpha) / rho, p.y / rho});
        return rescale_sample(s, rho) * sigma;
    });
}

inline VectorField2 rescaled(const VectorField2& f, double alpha, double rho, double sigma) {
    Box2 b = f.support();
    Box2 nb{{alpha + rho * b.lo.x, rho * b.lo.y}, {alpha + rho * b.hi.x, rho * b.hi.y}};
    return make_vector(nb, [f, alpha, rho, sigma](Vec2 p) {
        Sample2 s = f.at({(p.x - alpha) / rho, p.y / rho});
        return Sample2{rescale_sample(s.x, rho), rescale_sample(s.y, rho)} * sigma;
    });
}

/// Central finite differences for evaluators without analytic derivatives.
inline ScalarField2 fd_scalar(Box2 supp, std::function<double(Vec2)> fn, double h) {
    return make_scalar(supp, [fn, h](Vec2 p) {
        auto f = [&](double dx, double dy) { return fn({p.x + dx, p.y + dy}); };
        Sample s;
        s.v = f(0, 0);
        s.dx = (f(h, 0) - f(-h, 0)) / (2 * h);
        s.dy = (f(0, h) - f(0, -h)) / (2 * h);
        s.dxx = (f(h, 0) - 2 * s.v + f(-h, 0)) / (h * h);
        s.dyy = (f(0, h) - 2 * s.v + f(0, -h)) / (h * h);
        s.dxy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
        return s;
    });
}

/// Region of the half plane: rectangle or rectangular ring (outer minus inner).
struct Region {
    enum class Kind { Rectangle, RectangularRing };
    Kind kind = Kind::Rectangle;
    Box2 outer;
    Box2 inner;  // ring only

    static Region rectangle(Box2 b) { return {Kind::Rectangle, b, {}}; }
    static Region ring(Box2 outer, Box2 inner) {
        return {Kind::RectangularRing, outer, inner};
    }

    void validate() const {
        if (outer.hi.x <= outer.lo.x || outer.hi.y <= outer.lo.y)
            throw ConfigError("Region: outer rectangle is degenerate");
        if (outer.lo.y <= 0)
            throw ConfigError("Region: closure must stay in the open upper half plane");
        if (kind == Kind::RectangularRing) {
            if (!(inner.lo.x > outer.lo.x && inner.hi.x < outer.hi.x &&
                  inner.lo.y > outer.lo.y && inner.hi.y < outer.hi.y))
                throw ConfigError("Region: inner rectangle must be strictly inside outer");
        }
    }

    Box2 bbox() const { return outer; }

    bool contains(Vec2 p) const {  // open interior
        if (!outer.contains_strict(p)) return false;
        if (kind == Kind::RectangularRing && inner.contains(p)) return false;
        return true;
    }
    bool in_closure(Vec2 p) const {
        if (!outer.contains(p)) return false;
        if (kind == Kind::RectangularRing && inner.contains_strict(p)) return false;
        return true;
    }
    /// Distance from an interior point to the region boundary.
    double boundary_distance(Vec2 p) const {
        double d = outer.dist_to_boundary_from_inside(p);
        if (kind == Kind::RectangularRing) d = std::min(d, inner.dist_outside(p));
        return d;
    }
    /// Region shrunk inward by gamma (ring: inner grows outward too).
    Region shrunk(double gamma) const {
        Region r = *this;
        r.outer = {{outer.lo.x + gamma, outer.lo.y + gamma},
                   {outer.hi.x - gamma, outer.hi.y - gamma}};
        if (kind == Kind::RectangularRing)
            r.inner = {{inner.lo.x - gamma, inner.lo.y - gamma},
                       {inner.hi.x + gamma, inner.hi.y + gamma}};
        r.validate();
        return r;
    }

    double min_halfside() const {
        double d = std::min(outer.width(), outer.height()) / 2;
        if (kind == Kind::RectangularRing) {
            double gap = std::min(std::min(inner.lo.x - outer.lo.x, outer.hi.x - inner.hi.x),
                                  std::min(inner.lo.y - outer.lo.y, outer.hi.y - inner.hi.y));
            d = std::min(d, gap / 2);
        }
        return d;
    }
};

/// Lf = Laplacian(f) + f_y / y - f / y^2, the azimuthal-lift operator.
inline double apply_L(const Sample& s, double y) { return s.dxx + s.dyy + s.dy / y - s.v / (y * y); }

inline double apply_L(const ScalarField2& f, Vec2 p) {
    if (p.y <= 0) throw NumericError("apply_L: singular on the rotation axis (x2 <= 0)");
    return apply_L(f.at(p), p.y);
}

/// Second divided difference; equals f''(xi)/2 for some xi in (a,c).
template <class F>
double divided_difference2(F&& f, double a, double b, double c) {
    if (!(a < b && b < c)) throw ConfigError("divided_difference2: need a < b < c");
    double fa = f(a), fb = f(b), fc = f(c);
    return ((fa - fb) / (a - b) - (fc - fb) / (c - b)) / (a - c);
}

}  // namespace nsif
