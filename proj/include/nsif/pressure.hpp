#pragma once

#include <array>
#include <functional>
#include <vector>

#include <json.hpp>

#include "nsif/axisym.hpp"
#include "nsif/elliptic.hpp"
#include "nsif/field2d.hpp"

namespace nsif {

/// Ring kernel of the axisymmetric Newtonian potential, reduced to the
/// meridian plane through the complete elliptic integral:
///   Ker = K(m) / (pi sqrt(S)),  S = (x1-y1)^2 + (rho+sigma)^2,
///   m = 4 rho sigma / S.
/// The potential of a planar source theta is  p(x) = int theta(y) sigma Ker dy.
struct KernelVG {
    double v = 0, dx = 0, dr = 0;
};

inline KernelVG ring_kernel(double x1, double rho, double y1, double sg) {
    double X = x1 - y1, Rs = rho + sg;
    double S = X * X + Rs * Rs;
    double m = 4 * rho * sg / S;
    if (m > 1 - 1e-14) m = 1 - 1e-14;
    EllipticKE ke = elliptic_KE(m);
    double is = 1.0 / std::sqrt(S);
    double mx = -m * 2 * X / S;
    double mr = 4 * sg / S - m * 2 * Rs / S;
    KernelVG k;
    k.v = ke.K * is / M_PI;
    k.dx = (ke.dK * mx - ke.K * X / S) * is / M_PI;
    k.dr = (ke.dK * mr - ke.K * Rs / S) * is / M_PI;
    return k;
}

using SourceFn = std::function<double(Vec2)>;

struct SourcePanel {
    Box2 cell;  // bounding box, used for target-distance tests
    std::vector<Vec2> nodes;
    std::vector<double> wth;  // gauss weight * theta(y) * sigma
    double max_density = 0;   // max |theta * sigma| over nodes
    bool polar = false;
    Vec2 pc{};                       // sector geometry when polar
    double r0 = 0, r1 = 0, a0 = 0, a1 = 0;
};

struct PressureOptions {
    int gauss_n = 6;
    double tol = 1e-8;        // requested absolute quadrature tolerance
    int far_terms = 30;
    double far_factor = 2.6;  // far-field switch at far_factor * r_max
    int max_depth = 30;
    int panels_per_break = 2; // refinement of each smooth interval
    double max_panel_frac = 0.12;  // panel size cap relative to strip extent
};

/// Partition [lo,hi] respecting the given breakpoints, then subdivide so no
/// interval exceeds max_h.
inline std::vector<double> axis_partition(double lo, double hi, std::vector<double> breaks,
                                          double max_h, int per_break) {
    std::vector<double> cuts{lo, hi};
    for (double b : breaks)
        if (b > lo + 1e-15 && b < hi - 1e-15) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> out;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        int n = std::max(per_break, int(std::ceil((b - a) / max_h)));
        for (int j = 0; j < n; ++j) out.push_back(a + (b - a) * j / n);
    }
    out.push_back(hi);
    return out;
}

/// Panelized planar source with cached Gauss data and exterior Legendre
/// coefficients.
/// Polar panel layout for sources with concentric structure (the swirl
/// prototypes); panels aligned with the radial joints keep Gauss spectral.
struct PolarLayout {
    Vec2 center;
    std::vector<double> radial_breaks;
    int n_ang = 6;       // angular sectors (the integrand is mild in angle)
    int radial_sub = 4;  // subdivision of each smooth radial interval
};

struct SourceQuad {
    std::vector<SourcePanel> panels;
    SourceFn theta;
    double r_max = 0;
    double diam = 0;
    std::vector<double> cn;
    double raw_c0 = 0, raw_c1 = 0;  // quadrature residue of the dropped moments
    double est_rel_err = 0;

    static SourceQuad build(SourceFn theta, const std::vector<Box2>& strips,
                            const std::vector<double>& xbreaks,
                            const std::vector<double>& ybreaks, PressureOptions opt = {}) {
        SourceQuad q;
        q.theta = std::move(theta);
        GaussRule g(opt.gauss_n);
        Box2 bb = strips.at(0);
        for (const auto& s : strips) bb = bb.hull(s);
        q.diam = bb.diameter();
        for (const auto& strip : strips) {
            auto xs = axis_partition(strip.lo.x, strip.hi.x, xbreaks,
                                     std::max(strip.width(), strip.height()) * opt.max_panel_frac,
                                     opt.panels_per_break);
            auto ys = axis_partition(strip.lo.y, strip.hi.y, ybreaks,
                                     std::max(strip.width(), strip.height()) * opt.max_panel_frac,
                                     opt.panels_per_break);
            for (size_t i = 0; i + 1 < xs.size(); ++i)
                for (size_t j = 0; j + 1 < ys.size(); ++j) {
                    SourcePanel p;
                    p.cell = {{xs[i], ys[j]}, {xs[i + 1], ys[j + 1]}};
                    double mx = (xs[i] + xs[i + 1]) / 2, hx = (xs[i + 1] - xs[i]) / 2;
                    double my = (ys[j] + ys[j + 1]) / 2, hy = (ys[j + 1] - ys[j]) / 2;
                    for (int a = 0; a < opt.gauss_n; ++a)
                        for (int b = 0; b < opt.gauss_n; ++b) {
                            Vec2 y{mx + hx * g.x[a], my + hy * g.x[b]};
                            double th = q.theta(y) * y.y;
                            p.nodes.push_back(y);
                            p.wth.push_back(g.w[a] * g.w[b] * hx * hy * th);
                            p.max_density = std::max(p.max_density, std::abs(th));
                            q.r_max = std::max(q.r_max, y.norm());
                        }
                    q.panels.push_back(std::move(p));
                }
        }
        q.finish(opt);
        return q;
    }

    static SourceQuad build_polar(SourceFn theta, const PolarLayout& lay,
                                  PressureOptions opt = {}) {
        SourceQuad q;
        q.theta = std::move(theta);
        GaussRule g(std::max(opt.gauss_n, 8));
        double rmax_lay = lay.radial_breaks.back();
        q.diam = 2 * rmax_lay;
        std::vector<double> rb;
        for (size_t k = 0; k + 1 < lay.radial_breaks.size(); ++k)
            for (int s = 0; s < lay.radial_sub; ++s)
                rb.push_back(lay.radial_breaks[k] +
                             (lay.radial_breaks[k + 1] - lay.radial_breaks[k]) * s /
                                 lay.radial_sub);
        rb.push_back(lay.radial_breaks.back());
        for (size_t k = 0; k + 1 < rb.size(); ++k) {
            double r0 = rb[k], r1 = rb[k + 1];
            for (int s = 0; s < lay.n_ang; ++s) {
                double a0 = 2 * M_PI * s / lay.n_ang, a1 = 2 * M_PI * (s + 1) / lay.n_ang;
                SourcePanel p;
                Box2 cell{{1e300, 1e300}, {-1e300, -1e300}};
                int gn = int(g.x.size());
                for (int a = 0; a < gn; ++a)
                    for (int b = 0; b < gn; ++b) {
                        double r = (r0 + r1) / 2 + (r1 - r0) / 2 * g.x[a];
                        double ph = (a0 + a1) / 2 + (a1 - a0) / 2 * g.x[b];
                        Vec2 y{lay.center.x + r * std::cos(ph),
                               lay.center.y + r * std::sin(ph)};
                        double th = q.theta(y) * y.y;
                        p.nodes.push_back(y);
                        p.wth.push_back(g.w[a] * g.w[b] * (r1 - r0) / 2 * (a1 - a0) / 2 * r *
                                        th);
                        p.max_density = std::max(p.max_density, std::abs(th));
                        q.r_max = std::max(q.r_max, y.norm());
                        cell.lo.x = std::min(cell.lo.x, y.x);
                        cell.lo.y = std::min(cell.lo.y, y.y);
                        cell.hi.x = std::max(cell.hi.x, y.x);
                        cell.hi.y = std::max(cell.hi.y, y.y);
                    }
                p.cell = cell.dilated((r1 - r0) / (2 * opt.gauss_n));
                p.polar = true;
                p.pc = lay.center;
                p.r0 = r0;
                p.r1 = r1;
                p.a0 = a0;
                p.a1 = a1;
                q.panels.push_back(std::move(p));
            }
        }
        q.finish(opt);
        return q;
    }

    /// Sources of double-divergence form have no monopole or dipole; zeroing
    /// the quadrature residue keeps the far expansion honest out to the
    /// decay-window distances.
    void drop_low_moments() {
        raw_c0 = cn.at(0);
        raw_c1 = cn.at(1);
        cn[0] = 0;
        cn[1] = 0;
    }

    void finish(const PressureOptions& opt) {
        // exterior Legendre coefficients: cn = 1/2 int theta sigma r^n Pn(cos)
        cn.assign(opt.far_terms + 1, 0.0);
        for (const auto& p : panels)
            for (size_t i = 0; i < p.nodes.size(); ++i) {
                double r = p.nodes[i].norm();
                double u = r > 0 ? p.nodes[i].x / r : 0.0;
                double P0 = 1, P1 = u, rp = 1;
                for (int n = 0; n <= int(cn.size()) - 1; ++n) {
                    double Pn = (n == 0) ? P0 : P1;
                    cn[n] += 0.5 * p.wth[i] * rp * Pn;
                    if (n >= 1) {
                        double P2 = ((2 * n + 1) * u * P1 - n * P0) / (n + 1);
                        P0 = P1;
                        P1 = P2;
                    }
                    rp *= r;
                }
            }
    }
};

struct PotEval {
    double p = 0;
    Vec2 g{};
    double err = 0;
};

/// Newtonian potential of a planar axisymmetric source: value and gradient by
/// cached panel quadrature, adaptive 4-way splitting near the target (the
/// logarithmic singularity is integrable; cells whose contribution bound falls
/// below a fraction of the tolerance are dropped), and an exterior Legendre
/// expansion in the far zone.
class PlanarPotential {
  public:
    PlanarPotential() = default;
    PlanarPotential(SourceQuad src, PressureOptions opt = {})
        : src_(std::move(src)), opt_(opt) {
        far_radius_ = opt_.far_factor * src_.r_max;
        gauss4_ = std::make_shared<GaussRule>(4);
    }

    const SourceQuad& source() const { return src_; }
    double far_radius() const { return far_radius_; }

    PotEval eval(Vec2 x) const {
        if (x.norm() >= far_radius_) return far_eval(x);
        PotEval e;
        for (const auto& p : src_.panels) {
            double d = p.cell.dist_outside(x);
            double diam = p.cell.diameter();
            if (d >= 0.7 * diam) {
                for (size_t i = 0; i < p.nodes.size(); ++i) {
                    KernelVG k = ring_kernel(x.x, x.y, p.nodes[i].x, p.nodes[i].y);
                    e.p += p.wth[i] * k.v;
                    e.g.x += p.wth[i] * k.dx;
                    e.g.y += p.wth[i] * k.dr;
                }
            } else if (p.polar) {
                refine_sector(x, p.pc, p.r0, p.r1, p.a0, p.a1, p.max_density, 0, e);
            } else {
                refine(x, p.cell, p.max_density, 0, e);
            }
        }
        return e;
    }

    double value(Vec2 x) const { return eval(x).p; }
    Vec2 grad(Vec2 x) const { return eval(x).g; }

    /// (pxx, pxy, pyy) by central differences of the quadrature gradient.
    std::array<double, 3> hess(Vec2 x, double h = 0) const {
        if (h <= 0) h = 1e-4 * std::max(src_.diam, 1e-6);
        Vec2 gxp = grad({x.x + h, x.y}), gxm = grad({x.x - h, x.y});
        Vec2 gyp = grad({x.x, x.y + h}), gym = grad({x.x, x.y - h});
        double pxx = (gxp.x - gxm.x) / (2 * h);
        double pyy = (gyp.y - gym.y) / (2 * h);
        double pxy = 0.5 * ((gyp.x - gym.x) / (2 * h) + (gxp.y - gxm.y) / (2 * h));
        return {pxx, pxy, pyy};
    }

  private:
    void refine(Vec2 x, const Box2& cell, double dens, int depth, PotEval& e) const {
        double diam = cell.diameter();
        double d = cell.dist_outside(x);
        if (d >= 0.7 * diam || depth >= opt_.max_depth) {
            if (depth >= opt_.max_depth && d < 0.25 * diam) {
                // dropped innermost cell: log singularity, bounded contribution
                e.err += dens * diam * diam * (1 + std::abs(std::log(diam + 1e-300)));
                return;
            }
            double mx = cell.center().x, hx = cell.width() / 2;
            double my = cell.center().y, hy = cell.height() / 2;
            const GaussRule& g = *gauss4_;
            for (size_t a = 0; a < g.x.size(); ++a)
                for (size_t b = 0; b < g.x.size(); ++b) {
                    Vec2 y{mx + hx * g.x[a], my + hy * g.x[b]};
                    double wth = g.w[a] * g.w[b] * hx * hy * src_.theta(y) * y.y;
                    KernelVG k = ring_kernel(x.x, x.y, y.x, y.y);
                    e.p += wth * k.v;
                    e.g.x += wth * k.dx;
                    e.g.y += wth * k.dr;
                }
            return;
        }
        double cutoff = 0.01 * opt_.tol / std::max(1.0, dens);
        if (diam * diam * (1 + std::abs(std::log(diam + 1e-300))) < cutoff) {
            e.err += dens * diam * diam * (1 + std::abs(std::log(diam + 1e-300)));
            return;
        }
        Vec2 c = cell.center();
        Box2 q[4] = {{{cell.lo.x, cell.lo.y}, {c.x, c.y}},
                     {{c.x, cell.lo.y}, {cell.hi.x, c.y}},
                     {{cell.lo.x, c.y}, {c.x, cell.hi.y}},
                     {{c.x, c.y}, {cell.hi.x, cell.hi.y}}};
        for (auto& sub : q) refine(x, sub, dens, depth + 1, e);
    }

    void refine_sector(Vec2 x, Vec2 pc, double r0, double r1, double a0, double a1,
                       double dens, int depth, PotEval& e) const {
        double rm = (r0 + r1) / 2, am = (a0 + a1) / 2;
        double diam = std::hypot(r1 - r0, r1 * (a1 - a0));
        double dx = (x - Vec2{pc.x + rm * std::cos(am), pc.y + rm * std::sin(am)}).norm();
        bool far = dx >= 0.7 * diam + diam / 2;
        if (far || depth >= opt_.max_depth) {
            if (!far && depth >= opt_.max_depth) {
                e.err += dens * diam * diam * (1 + std::abs(std::log(diam + 1e-300)));
                return;
            }
            const GaussRule& g = *gauss4_;
            for (size_t a = 0; a < g.x.size(); ++a)
                for (size_t b = 0; b < g.x.size(); ++b) {
                    double r = rm + (r1 - r0) / 2 * g.x[a];
                    double ph = am + (a1 - a0) / 2 * g.x[b];
                    Vec2 y{pc.x + r * std::cos(ph), pc.y + r * std::sin(ph)};
                    double wth =
                        g.w[a] * g.w[b] * (r1 - r0) / 2 * (a1 - a0) / 2 * r *
                        src_.theta(y) * y.y;
                    KernelVG k = ring_kernel(x.x, x.y, y.x, y.y);
                    e.p += wth * k.v;
                    e.g.x += wth * k.dx;
                    e.g.y += wth * k.dr;
                }
            return;
        }
        double cutoff = 0.01 * opt_.tol / std::max(1.0, dens);
        if (diam * diam * (1 + std::abs(std::log(diam + 1e-300))) < cutoff) {
            e.err += dens * diam * diam * (1 + std::abs(std::log(diam + 1e-300)));
            return;
        }
        refine_sector(x, pc, r0, rm, a0, am, dens, depth + 1, e);
        refine_sector(x, pc, rm, r1, a0, am, dens, depth + 1, e);
        refine_sector(x, pc, r0, rm, am, a1, dens, depth + 1, e);
        refine_sector(x, pc, rm, r1, am, a1, dens, depth + 1, e);
    }

    PotEval far_eval(Vec2 x) const {
        PotEval e;
        double R = x.norm();
        double u = x.x / R, s = x.y / R;
        double P0 = 1, P1 = u;
        double Rp = 1.0 / (R * R);  // R^{-(n+1)} starting at n=1... handled below
        // p = sum cn Pn(u) R^-(n+1); dPn via (1-u^2) Pn' = n (P_{n-1} - u Pn)
        double invR = 1.0 / R;
        double Rpow = invR;  // R^{-(n+1)} for n=0
        for (size_t n = 0; n < src_.cn.size(); ++n) {
            double Pn, dPn;
            if (n == 0) {
                Pn = 1;
                dPn = 0;
            } else if (n == 1) {
                Pn = u;
                dPn = 1;
            } else {
                Pn = P1;
                dPn = (std::abs(1 - u * u) > 1e-14) ? n * (P0 - u * P1) / (1 - u * u) : 0.0;
            }
            double c = src_.cn[n];
            e.p += c * Pn * Rpow;
            double dudx1 = (1 - u * u) / R;
            double dudrho = -u * s / R;
            e.g.x += c * (dPn * dudx1 - (n + 1) * Pn * u * invR) * Rpow;
            e.g.y += c * (dPn * dudrho - (n + 1) * Pn * s * invR) * Rpow;
            if (n >= 1) {
                double P2 = ((2 * n + 1) * u * P1 - n * P0) / (n + 1);
                P0 = P1;
                P1 = P2;
            }
            Rpow *= invR;
        }
        (void)Rp;
        return e;
    }

    SourceQuad src_;
    PressureOptions opt_;
    double far_radius_ = 0;
    std::shared_ptr<GaussRule> gauss4_;
};

/// Panel layout of a source: either rectangular strips with axis breakpoints
/// or a polar layout around a swirl center.
struct SourceLayout {
    std::vector<Box2> strips;
    std::vector<double> xbreaks, ybreaks;
    bool polar = false;
    PolarLayout pol;

    static SourceLayout rect(std::vector<Box2> s, std::vector<double> xb = {},
                             std::vector<double> yb = {}) {
        SourceLayout l;
        l.strips = std::move(s);
        l.xbreaks = std::move(xb);
        l.ybreaks = std::move(yb);
        return l;
    }
    static SourceLayout polar_around(PolarLayout p) {
        SourceLayout l;
        l.polar = true;
        l.pol = std::move(p);
        return l;
    }
};

inline SourceQuad build_source(SourceFn theta, const SourceLayout& lay,
                               PressureOptions opt = {}) {
    if (lay.polar) return SourceQuad::build_polar(std::move(theta), lay.pol, opt);
    return SourceQuad::build(std::move(theta), lay.strips, lay.xbreaks, lay.ybreaks, opt);
}

/// Swirl-free pressure source: theta = -(f^2)_sigma / sigma.
inline SourceQuad axial_source(const ScalarField2& f, const SourceLayout& lay,
                               PressureOptions opt = {}) {
    SourceQuad q = build_source(
        [f](Vec2 y) {
            Sample s = f.at(y);
            return -2 * s.v * s.dy / y.y;
        },
        lay, opt);
    q.drop_low_moments();
    return q;
}

/// v-only source of the interaction function F[v,f] = grad p[0,f] - grad p[v,f];
/// the f-dependent parts cancel exactly, so F is the gradient of this potential
/// and does not depend on f at all.
inline SourceQuad interaction_source(const VectorField2& v, SourceLayout lay,
                                     PressureOptions opt = {}) {
    // the far-field constant is a small cancellation residue of this source,
    // so its quadrature runs at elevated order
    if (lay.polar) {
        lay.pol.radial_sub = std::max(lay.pol.radial_sub, 6);
        opt.gauss_n = std::max(opt.gauss_n, 10);
    }
    SourceQuad q =
        build_source([v](Vec2 y) { return stress_trace_swirl_only(v, y); }, lay, opt);
    q.drop_low_moments();
    return q;
}

/// Interaction function evaluator: F(x) = gradient of the v-only potential.
class InteractionField {
  public:
    InteractionField() = default;
    InteractionField(const VectorField2& v, const SourceLayout& lay,
                     PressureOptions opt = {})
        : pot_(interaction_source(v, lay, opt), opt) {}
    explicit InteractionField(PlanarPotential pot) : pot_(std::move(pot)) {}

    Vec2 operator()(Vec2 x) const { return pot_.grad(x); }
    const PlanarPotential& potential() const { return pot_; }

    /// Jacobian dF_i/dx_j via the potential Hessian.
    std::array<double, 3> hessian(Vec2 x) const { return pot_.hess(x); }

  private:
    PlanarPotential pot_;
};

/// Planar pressure of a lifted pair, split into its swirl-free part and the
/// interaction part on their natural panel geometries:
///   p[v,f] = p[0,f] - P_F,     F[v,f] = grad P_F .
class PairPressure {
  public:
    PairPressure() = default;
    PairPressure(const ScalarField2& f, const SourceLayout& flay, const VectorField2& v,
                 const SourceLayout& vlay, PressureOptions opt = {})
        : axial_(axial_source(f, flay, opt), opt), has_swirl_(!v.empty()) {
        if (has_swirl_) swirl_ = PlanarPotential(interaction_source(v, vlay, opt), opt);
    }

    PotEval eval(Vec2 x) const {  // p[v,f] and its gradient
        PotEval a = axial_.eval(x);
        if (!has_swirl_) return a;
        PotEval s = swirl_.eval(x);
        a.p -= s.p;
        a.g = a.g - s.g;
        a.err += s.err;
        return a;
    }
    double value(Vec2 x) const { return eval(x).p; }
    Vec2 grad(Vec2 x) const { return eval(x).g; }
    double value_axial(Vec2 x) const { return axial_.value(x); }  // p[0,f]
    Vec2 grad_axial(Vec2 x) const { return axial_.grad(x); }

    const PlanarPotential& axial() const { return axial_; }
    const PlanarPotential& swirl() const { return swirl_; }
    bool has_swirl() const { return has_swirl_; }

  private:
    PlanarPotential axial_, swirl_;
    bool has_swirl_ = false;
};

struct ScanSpec {
    double axis_range = 0;     // 0: auto = 3 * diam
    int axis_samples = 1200;
    double safety_C = 1.25;
    double tol_band = 1e-3;    // band width of the decay-window test
    double kappa_factor = 1e4;
    double n_ladder_top = 1e6;
    int window_nx = 13, window_ny = 5;
};

struct InteractionProfile {
    double A = 0, B = 0, C = 0, D = 0, N = 0, kappa = 0;
    nlohmann::json scan;

    nlohmann::json to_json() const {
        return {{"A", A},     {"B", B}, {"C", C},       {"D", D},
                {"N", N},     {"kappa", kappa},         {"scan", scan}};
    }
};

/// D = (9/4pi) * int v1(cyl)^2 over R^3 = (9/2) * int int v1^2 sigma,
/// integrated on a refined copy of the source layout.
inline double far_field_D(const VectorField2& v, SourceLayout lay) {
    PressureOptions opt;
    opt.gauss_n = 10;
    if (lay.polar) lay.pol.radial_sub *= 2;
    SourceQuad q = build_source([v](Vec2 y) {
        double v1 = v.at(y).x.v;
        return v1 * v1;
    }, lay, opt);
    double s = 0;
    for (const auto& p : q.panels)
        for (double w : p.wth) s += w;
    return 4.5 * s;
}

/// Extracts the constants (A,B,C,D,N,kappa) of an interaction function by
/// scanning. C and N are empirical over/under-estimates, flagged as such.
inline InteractionProfile profile_interaction(const VectorField2& v,
                                              const SourceLayout& vlay,
                                              const InteractionField& F, ScanSpec sc = {}) {
    InteractionProfile out;
    const double diam = F.potential().source().diam;
    double range = sc.axis_range > 0 ? sc.axis_range : 3 * diam;

    // axis scan + golden refinement of the max of F1(.,0)
    double bestx = 0, bestv = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < sc.axis_samples; ++i) {
        double x = -range + 2 * range * i / (sc.axis_samples - 1);
        double F1 = F({x, 0}).x;
        if (F1 > bestv) {
            bestv = F1;
            bestx = x;
        }
    }
    if (!(bestv > 0)) throw NumericError("profile: F1 has no positive value on the scan");
    double lo = bestx - range / sc.axis_samples * 2, hi = bestx + range / sc.axis_samples * 2;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = F({a, 0}).x, fb = F({b, 0}).x;
    for (int it = 0; it < 60; ++it) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = F({b, 0}).x;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = F({a, 0}).x;
        }
    }
    out.A = (lo + hi) / 2;
    out.B = F({out.A, 0}).x;

    out.D = far_field_D(v, vlay);

    // decay constant: safety * max over sampled |x| in [2|A|, 16 diam]
    double maxC = 0;
    double rlo = std::max(2 * std::abs(out.A), 0.25 * diam), rhi = 16 * diam;
    for (int i = 0; i < 40; ++i) {
        double r = rlo * std::pow(rhi / rlo, i / 39.0);
        for (int j = 0; j < 9; ++j) {
            double th = M_PI * j / 8.0;
            Vec2 x{r * std::cos(th), r * std::sin(th)};
            Vec2 Fx = F(x);
            maxC = std::max(maxC, r * r * r * r * std::hypot(Fx.x, Fx.y));
        }
    }
    out.C = sc.safety_C * std::max(maxC, out.D);
    out.kappa = sc.kappa_factor * out.C / out.D;

    // decay-window threshold: smallest ladder rung from which the band
    // |F1(x) - n^-4 D| <= tol_band n^-4 D holds on |x1-n|<kappa, |x2|<1
    double Nfound = -1;
    std::vector<double> ladder;
    for (double n = std::max(4.0, 2 * std::abs(out.A)); n <= sc.n_ladder_top; n *= 1.35)
        ladder.push_back(n);
    std::vector<bool> pass(ladder.size(), false);
    for (size_t i = 0; i < ladder.size(); ++i) {
        double n = ladder[i];
        bool ok = true;
        for (int ix = 0; ix < sc.window_nx && ok; ++ix)
            for (int iy = 0; iy < sc.window_ny && ok; ++iy) {
                double x1 = n - out.kappa + 2 * out.kappa * ix / (sc.window_nx - 1);
                double x2 = double(iy) / (sc.window_ny - 1);
                double want = out.D / (n * n * n * n);
                double got = F({x1, x2}).x;
                if (std::abs(got - want) > sc.tol_band * want) ok = false;
            }
        pass[i] = ok;
    }
    for (size_t i = 0; i < ladder.size(); ++i) {
        bool allafter = true;
        for (size_t j = i; j < ladder.size(); ++j) allafter = allafter && pass[j];
        if (allafter) {
            Nfound = ladder[i];
            break;
        }
    }
    if (Nfound < 0) throw NumericError("profile: decay window never certifies on the ladder");
    out.N = Nfound;

    out.scan = {{"axis_range", range},
                {"axis_samples", sc.axis_samples},
                {"safety_C", sc.safety_C},
                {"tol_band", sc.tol_band},
                {"kappa_factor", sc.kappa_factor},
                {"C_is_empirical_overestimate", true},
                {"N_is_empirical", true}};
    return out;
}

}  // namespace nsif
