#pragma once

#include <map>

#include "nsif/arrangement.hpp"
#include "nsif/axisym.hpp"
#include "nsif/oscillator.hpp"
#include "nsif/pressure.hpp"
#include "nsif/structure.hpp"

namespace nsif {

/// One side of an evolving pair: a structure plus the panel layouts of its
/// pressure sources.
struct EvolutionPair {
    Structure S;
    SourceLayout flay, vlay;
};

struct EvolutionOptions {
    PressureOptions popt{};
    double fd_step = 0;      // 0: 1e-4 * diam
    int corr_gauss = 4;      // quadrature order of the moving correction sources
    double corr_cap = 0.2;   // panel cap of the correction sources
    int time_nodes = 8;      // Gauss nodes for time integrals of reports
    int k_max = 1 << 14;
};

/// Two-pair time evolution: h-fields, oscillator-driven q-fields, the
/// composite velocity, and the pointwise inequality residual.
///
/// Everything reduces to a handful of static potentials (the swirl-free
/// pressures, the interaction potentials, and the correction potentials of
/// the time-linear profile changes); the square waves take three values, so
/// the q time integrals are exact piecewise polynomials over the cached
/// coefficients.
class Evolution {
  public:
    Evolution(EvolutionPair p1, EvolutionPair p2, double T, double theta_target = 0,
              EvolutionOptions opt = {})
        : pr_{std::move(p1), std::move(p2)}, T_(T), opt_(opt) {
        for (int i = 0; i < 2; ++i) {
            pax_[i] = PlanarPotential(axial_source(pr_[i].S.f, pr_[i].flay, opt_.popt),
                                      opt_.popt);
            potF_[i] = PlanarPotential(interaction_source(pr_[i].S.v, pr_[i].vlay, opt_.popt),
                                       opt_.popt);
            // correction potential of the phi-decay: Newt[2 d2 phi_i / y2]
            SourceQuad q = build_source(
                [S = pr_[i].S](Vec2 y) { return 2 * S.phi.at(y).dy / y.y; }, pr_[i].flay,
                opt_.popt);
            q.drop_low_moments();
            potQ_[i] = PlanarPotential(std::move(q), opt_.popt);
        }
        // correction potential of the transported gain: Newt[d2(v2 . F1)/y2]
        SourceQuad qvf = build_source(
            [this](Vec2 y) {
                Sample2 vv = pr_[1].S.v.at(y);
                if (vv.x.v == 0 && vv.y.v == 0 && vv.x.dy == 0 && vv.y.dy == 0) return 0.0;
                Vec2 Fv = potF_[0].grad(y);
                auto Hv = potF_[0].hess(y);
                double d2 = vv.x.dy * Fv.x + vv.y.dy * Fv.y + vv.x.v * Hv[1] + vv.y.v * Hv[2];
                return d2 / y.y;
            },
            pr_[1].vlay, opt_.popt);
        qvf.drop_low_moments();
        potVF_ = PlanarPotential(std::move(qvf), opt_.popt);

        diam_ = pr_[0].S.U.bbox().hull(pr_[1].S.U.bbox()).diameter();
        fd_ = opt_.fd_step > 0 ? opt_.fd_step : 1e-4 * diam_;
        theta_ = theta_target > 0 ? theta_target : 0.05;
        select_delta();
    }

    double T() const { return T_; }
    double delta() const { return delta_; }
    double theta() const { return theta_; }
    double nu0() const { return nu0_; }
    int k() const { return k_; }
    const EvolutionPair& pair(int i) const { return pr_[i]; }
    const PlanarPotential& interaction(int i) const { return potF_[i]; }

    // ---- point caches -----------------------------------------------------

    struct PointCache {
        Vec2 x;
        double f2[2]{}, phi[2]{};
        Vec2 gf2[2]{}, gphi[2]{};
        Sample2 v[2]{};
        Vec2 gpax[2]{}, gF[2]{}, gQ[2]{}, gVF{};
        double c0[2]{}, cF[2][2]{}, cL[2]{};
        Vec2 vF1{};  // v2 . F1 related: value of F1 at x
    };

    PointCache cache_point(Vec2 x) const {
        PointCache c;
        c.x = x;
        for (int i = 0; i < 2; ++i) {
            Sample f = pr_[i].S.f.at(x);
            Sample ph = pr_[i].S.phi.at(x);
            c.f2[i] = f.v * f.v;
            c.gf2[i] = {2 * f.v * f.dx, 2 * f.v * f.dy};
            c.phi[i] = ph.v;
            c.gphi[i] = {ph.dx, ph.dy};
            c.v[i] = pr_[i].S.v.at(x);
            c.gpax[i] = pax_[i].grad(x);
            c.gF[i] = potF_[i].grad(x);
            c.gQ[i] = potQ_[i].grad(x);
        }
        c.gVF = potVF_.grad(x);
        c.vF1 = c.gF[0];
        for (int i = 0; i < 2; ++i) {
            Vec2 vi = c.v[i].value();
            if (vi.x == 0 && vi.y == 0) continue;
            Vec2 base{c.gf2[i].x + 2 * (c.gpax[0].x + c.gpax[1].x),
                      c.gf2[i].y + 2 * (c.gpax[0].y + c.gpax[1].y)};
            c.c0[i] = vi.dot(base);
            c.cF[i][0] = -2 * vi.dot(c.gF[0]);
            c.cF[i][1] = -2 * vi.dot(c.gF[1]);
            // d/ds part: -2 delta grad phi_i + (i==2 term) + 2(corrections)
            Vec2 L{-2 * delta_ * c.gphi[i].x + 2 * delta_ * (c.gQ[0].x + c.gQ[1].x) -
                       2 * potvf_sign() * c.gVF.x,
                   -2 * delta_ * c.gphi[i].y + 2 * delta_ * (c.gQ[0].y + c.gQ[1].y) -
                       2 * potvf_sign() * c.gVF.y};
            if (i == 1) {
                Vec2 gvF = grad_v2F1(x);
                L.x += gvF.x;
                L.y += gvF.y;
            }
            c.cL[i] = vi.dot(L);
        }
        return c;
    }

    /// gradient of v2 . F1 at x (enters grad h2^2)
    Vec2 grad_v2F1(Vec2 x) const {
        Sample2 vv = pr_[1].S.v.at(x);
        if (vv.x.v == 0 && vv.y.v == 0 && vv.x.dx == 0 && vv.y.dx == 0) return {};
        Vec2 Fv = potF_[0].grad(x);
        auto H = potF_[0].hess(x);
        return {vv.x.dx * Fv.x + vv.y.dx * Fv.y + vv.x.v * H[0] + vv.y.v * H[1],
                vv.x.dy * Fv.x + vv.y.dy * Fv.y + vv.x.v * H[1] + vv.y.v * H[2]};
    }

    // ---- h fields ----------------------------------------------------------

    double h2sq_of(const PointCache& c, int i, double t) const {
        double base = c.f2[i] - 2 * t * delta_ * c.phi[i];
        if (i == 1) base += t * c.v[1].value().dot(c.vF1);
        return base;
    }
    double h_of(const PointCache& c, int i, double t) const {
        return std::sqrt(std::max(0.0, h2sq_of(c, i, t)));
    }
    Vec2 grad_h2(const PointCache& c, int i, double t) const {
        Vec2 g{c.gf2[i].x - 2 * t * delta_ * c.gphi[i].x,
               c.gf2[i].y - 2 * t * delta_ * c.gphi[i].y};
        if (i == 1) {
            Vec2 gv = grad_v2F1(c.x);
            g.x += t * gv.x;
            g.y += t * gv.y;
        }
        return g;
    }

    /// h_{i,t} as a scalar field (finite-difference derivatives).
    ScalarField2 h_field(int i, double t) const {
        auto self = this;
        Box2 sb = pr_[i].S.f.support();
        return fd_scalar(sb, [self, i, t](Vec2 p) {
            Sample f = self->pr_[i].S.f.at(p);
            double ph = self->pr_[i].S.phi.value(p);
            double base = f.v * f.v - 2 * t * self->delta_ * ph;
            if (i == 1) {
                Vec2 vv = self->pr_[1].S.v.value(p);
                if (vv.x != 0 || vv.y != 0) base += t * vv.dot(self->potF_[0].grad(p));
            }
            return std::sqrt(std::max(0.0, base));
        }, fd_);
    }

    // ---- oscillators and q fields -------------------------------------------

    OscProcess osc(int i, int k) const { return OscProcess{i + 1, 1, k, T_}; }

    struct Piece {
        double s0, s1;
        double a[2];
        double sg[2];
    };
    std::vector<Piece> pieces(double t, int k) const {
        OscProcess o1 = osc(0, k), o2 = osc(1, k);
        auto e1 = o1.piece_edges(0, t), e2 = o2.piece_edges(0, t);
        std::vector<double> edges;
        std::merge(e1.begin(), e1.end(), e2.begin(), e2.end(), std::back_inserter(edges));
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        std::vector<Piece> out;
        for (size_t s = 0; s + 1 < edges.size(); ++s) {
            Piece p{edges[s], edges[s + 1], {0, 0}, {0, 0}};
            double mid = (p.s0 + p.s1) / 2;
            p.a[0] = o1.eval(mid);
            p.a[1] = o2.eval(mid);
            p.sg[0] = std::abs(p.a[0]) > 0.5 ? 1.0 : 0.0;
            p.sg[1] = std::abs(p.a[1]) > 0.5 ? 1.0 : 0.0;
            out.push_back(p);
        }
        return out;
    }

    double q2_of(const PointCache& c, int i, double t, int k) const {
        double acc = 0;
        for (const Piece& p : pieces(t, k)) {
            if (p.a[i] == 0) continue;
            double w = c.c0[i] + p.sg[0] * c.cF[i][0] + p.sg[1] * c.cF[i][1];
            acc += p.a[i] * (w * (p.s1 - p.s0) + c.cL[i] * (p.s1 * p.s1 - p.s0 * p.s0) / 2);
        }
        return c.f2[i] - 2 * t * delta_ * c.phi[i] - acc;
    }

    double dq2dt_of(const PointCache& c, int i, double t, int k) const {
        OscProcess o1 = osc(0, k), o2 = osc(1, k);
        double a1 = o1.eval(t), a2 = o2.eval(t);
        double ai = i == 0 ? a1 : a2;
        double s1 = std::abs(a1) > 0.5 ? 1 : 0, s2 = std::abs(a2) > 0.5 ? 1 : 0;
        double w = c.c0[i] + s1 * c.cF[i][0] + s2 * c.cF[i][1] + t * c.cL[i];
        return -2 * delta_ * c.phi[i] - ai * w;
    }

    // ---- selected constants --------------------------------------------------

    void select_delta() {
        // largest delta keeping (v_i, h_{i,t}, phi_i) structures on
        // (-delta, T+delta): the binding floor is min (f^2 - |v|^2) over
        // supp phi (phi ends where f is still of order one); halved once
        double dmax = 1e300;
        for (int i = 0; i < 2; ++i) {
            Box2 sb = pr_[i].S.phi.support();
            for (int a = 0; a <= 48; ++a)
                for (int b = 0; b <= 48; ++b) {
                    Vec2 p{sb.lo.x + sb.width() * a / 48.0, sb.lo.y + sb.height() * b / 48.0};
                    double ph = pr_[i].S.phi.value(p);
                    if (ph <= 1e-9) continue;
                    double f = pr_[i].S.f.value(p);
                    Vec2 vv = pr_[i].S.v.value(p);
                    double head = f * f - vv.dot(vv);
                    if (i == 1) {
                        double vf = vv.x == 0 && vv.y == 0 ? 0.0 : vv.dot(potF_[0].grad(p));
                        if (vf < 0) head += (T_ + 1) * vf;  // worst time
                        if (head <= 0)
                            throw NumericError("select_delta: transported gain kills f2 > |v2|");
                    }
                    dmax = std::min(dmax, head / (2 * (T_ + 1) * ph));
                }
        }
        delta_ = 0.5 * std::min(dmax, theta_ / (2 * T_ + 2));
        if (!(delta_ > 0)) throw NumericError("select_delta: no positive decay rate");
    }

    /// nu0 from nu0 |u . Delta u| < delta/8, maximized over the grid, time
    /// nodes and oscillator values.
    double select_nu0(GridSpec grid = {24, 24}) {
        double worst = 0;
        for (int i = 0; i < 2; ++i) {
            for (double t : {0.0, T_ / 2, T_}) {
                ScalarField2 ht = h_field(i, t);
                for (double a : {0.0, 1.0}) {
                    VectorField2 av = a == 0 ? VectorField2{} : pr_[i].S.v;
                    AxisymField u = a == 0 ? AxisymField({}, ht) : AxisymField(av, ht);
                    Box2 bb = pr_[i].S.U.bbox();
                    for (int ii = 1; ii < grid.nx; ++ii)
                        for (int jj = 1; jj < grid.ny; ++jj) {
                            Vec2 p{bb.lo.x + bb.width() * ii / grid.nx,
                                   bb.lo.y + bb.height() * jj / grid.ny};
                            if (!pr_[i].S.U.contains(p)) continue;
                            worst = std::max(worst,
                                             std::abs(u.u_dot_laplacian({p.x, p.y, 0})));
                        }
                }
            }
        }
        nu0_ = std::min(1.0, delta_ / 8 / worst);
        max_udlap_h_ = worst;
        return nu0_;
    }

    struct ConvergenceRow {
        int k;
        double grad_gap;      // |v_i| |grad q^2 - grad h^2| worst
        double pressure_gap;  // 2 |v_i| sum |grad p[q] - grad p[h]| worst
        double udlap_gap;     // |u.Du(q) - u.Du(h)| worst
        bool pass_conv1, pass_conv2;
    };

    /// doubles k until both closeness conditions hold on the sample grid
    std::vector<ConvergenceRow> select_k(int grid_n = 6, int k_start = 8) {
        if (nu0_ == 0) select_nu0();
        std::vector<ConvergenceRow> rows;
        auto samples = supp_v_samples(grid_n);
        for (int k = k_start; k <= opt_.k_max; k *= 2) {
            ConvergenceRow row{k, 0, 0, 0, false, false};
            for (double t : {0.3 * T_, 0.7 * T_, T_}) {
                for (const auto& [i, c] : samples) {
                    double vnorm = c.v[i].value().norm();
                    Vec2 gq = grad_q2_fd(c, i, t, k);
                    Vec2 gh = grad_h2(c, i, t);
                    row.grad_gap =
                        std::max(row.grad_gap, vnorm * std::hypot(gq.x - gh.x, gq.y - gh.y));
                    double pg = pressure_gap(c.x, t, k);
                    row.pressure_gap = std::max(row.pressure_gap, 2 * vnorm * pg);
                    double du = udlap_gap(c.x, i, t, k);
                    row.udlap_gap = std::max(row.udlap_gap, du);
                }
            }
            row.pass_conv1 = row.grad_gap + row.pressure_gap <= delta_ / 2;
            row.pass_conv2 = nu0_ * row.udlap_gap <= delta_ / 8;
            rows.push_back(row);
            if (row.pass_conv1 && row.pass_conv2) {
                k_ = k;
                return rows;
            }
        }
        throw NumericError("select_k: conditions not met below k_max");
    }

    // grad of q^2 by central differences over fresh caches
    Vec2 grad_q2_fd(const PointCache& c, int i, double t, int k) const {
        double h = fd_;
        auto q2at = [&](Vec2 p) { return q2_of(cache_point(p), i, t, k); };
        return {(q2at({c.x.x + h, c.x.y}) - q2at({c.x.x - h, c.x.y})) / (2 * h),
                (q2at({c.x.x, c.x.y + h}) - q2at({c.x.x, c.x.y - h})) / (2 * h)};
    }

    /// sum over pairs l of |grad p[a_l v_l, q_l,t] - grad p[a_l v_l, h_l,t]|
    /// via the difference source (the v-parts cancel exactly).
    double pressure_gap(Vec2 x, double t, int k) const {
        double total = 0;
        for (int l = 0; l < 2; ++l) {
            PlanarPotential dp = difference_potential(l, t, k);
            Vec2 g = dp.grad(x);
            total += std::hypot(g.x, g.y);
        }
        return total;
    }

    /// potential of the source -(d/dy2)(q_l^2 - h_l^2)/y2
    PlanarPotential difference_potential(int l, double t, int k) const {
        PressureOptions po = opt_.popt;
        po.gauss_n = opt_.corr_gauss;
        po.max_panel_frac = opt_.corr_cap;
        auto theta = [this, l, t, k](Vec2 y) {
            double h = fd_;
            auto dval = [&](Vec2 p) {
                PointCache c = cache_point(p);
                return q2_of(c, l, t, k) - h2sq_of(c, l, t);
            };
            return -(dval({y.x, y.y + h}) - dval({y.x, y.y - h})) / (2 * h) / y.y;
        };
        SourceQuad q = build_source(theta, support_layout(l), po);
        q.drop_low_moments();
        return PlanarPotential(std::move(q), po);
    }

    /// |u.Du at q-level minus u.Du at h-level| at a point (worst sign value)
    double udlap_gap(Vec2 x, int i, double t, int k) const {
        StencilCache st = cache_stencil(x);
        double uq = 0;
        {
            double rho = x.y;
            Sample q2 = q2_sample(st, i, t, k);
            Sample2 vv = st.c[1][1].v[i];
            Sample g2 = q2 - (vv.x * vv.x + vv.y * vv.y);
            if (g2.v <= 0) throw NumericError("udlap_gap: profile below swirl");
            Sample g = sqrt_sample(g2);
            uq = g.v * (g.dxx + g.dyy + g.dy / rho - g.v / (rho * rho));
            uq += vv.x.v * (vv.x.dxx + vv.x.dyy + vv.x.dy / rho);
            uq += vv.y.v * (vv.y.dxx + vv.y.dyy + vv.y.dy / rho - vv.y.v / (rho * rho));
        }
        ScalarField2 hf = h_field(i, t);
        AxisymField uh(pr_[i].S.v, hf);
        return std::abs(uq - uh.u_dot_laplacian({x.x, x.y, 0}));
    }

    ScalarField2 q_field(int i, double t, int k) const {
        auto self = this;
        Box2 sb = pr_[i].S.f.support();
        return fd_scalar(sb, [self, i, t, k](Vec2 p) {
            double q2 = self->q2_of(self->cache_point(p), i, t, k);
            return std::sqrt(std::max(0.0, q2));
        }, fd_);
    }

    /// the composite velocity at time t (profiles at q-level)
    AxisymField velocity_part(int i, double t, int k) const {
        double a = osc(i, k).eval(t);
        return AxisymField(a == 0 ? VectorField2{} : scaled(pr_[i].S.v, a), q_field(i, t, k));
    }

    // ---- the inequality residual ---------------------------------------------

    /// nine-point cache around x; everything time-dependent is assembled from
    /// these exact piecewise integrals, so sweeps over (t, nu) are cheap
    struct StencilCache {
        PointCache c[3][3];  // [ix][iy], offsets -h, 0, +h
        double h = 0;
    };

    StencilCache cache_stencil(Vec2 x) const {
        StencilCache st;
        st.h = fd_;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                st.c[a][b] = cache_point({x.x + (a - 1) * fd_, x.y + (b - 1) * fd_});
        return st;
    }

    /// q_{i,t}^2 with finite-difference derivatives from the stencil
    Sample q2_sample(const StencilCache& st, int i, double t, int k) const {
        double q[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) q[a][b] = q2_of(st.c[a][b], i, t, k);
        double h = st.h;
        Sample s;
        s.v = q[1][1];
        s.dx = (q[2][1] - q[0][1]) / (2 * h);
        s.dy = (q[1][2] - q[1][0]) / (2 * h);
        s.dxx = (q[2][1] - 2 * q[1][1] + q[0][1]) / (h * h);
        s.dyy = (q[1][2] - 2 * q[1][1] + q[1][0]) / (h * h);
        s.dxy = (q[2][2] - q[2][0] - q[0][2] + q[0][0]) / (4 * h * h);
        return s;
    }

    /// u . Laplacian u of the composite velocity at a plane point, from the
    /// cylindrical closed form with q-level profiles
    double u_dot_lap_q(const StencilCache& st, double t, int k) const {
        double total = 0;
        double rho = st.c[1][1].x.y;
        for (int i = 0; i < 2; ++i) {
            double a = osc(i, k).eval(t);
            Sample q2 = q2_sample(st, i, t, k);
            if (q2.v <= 0) continue;
            Sample2 vv = st.c[1][1].v[i];
            Sample g2 = q2;
            if (a != 0) {
                Sample speed2 = vv.x * vv.x + vv.y * vv.y;
                g2 = g2 - speed2 * (a * a);
            }
            if (g2.v <= 0) throw NumericError("u_dot_lap_q: profile does not dominate swirl");
            Sample g = sqrt_sample(g2);
            double L3 = g.dxx + g.dyy + g.dy / rho - g.v / (rho * rho);
            total += g.v * L3;
            if (a != 0) {
                double L1 = vv.x.dxx + vv.x.dyy + vv.x.dy / rho;
                double L2 = vv.y.dxx + vv.y.dyy + vv.y.dy / rho - vv.y.v / (rho * rho);
                total += a * a * (vv.x.v * L1 + vv.y.v * L2);
            }
        }
        return total;
    }

    struct ResidualSample {
        Vec2 x;
        double t = 0, nu = 0;
        double value = 0, err = 0;
        bool on_swirl = false;
    };

    /// Residual sweep over points x times x viscosities; the difference
    /// potentials are rebuilt once per time, stencil caches once per point.
    std::vector<ResidualSample> sweep_residual(const std::vector<Vec2>& pts,
                                               const std::vector<double>& ts,
                                               const std::vector<double>& nus, int k) const {
        std::vector<StencilCache> caches;
        caches.reserve(pts.size());
        for (Vec2 p : pts) caches.push_back(cache_stencil(p));
        std::vector<ResidualSample> out;
        for (double t : ts) {
            PlanarPotential dp[2] = {difference_potential_h(0, t, k),
                                     difference_potential_h(1, t, k)};
            OscProcess o1 = osc(0, k), o2 = osc(1, k);
            double a1 = o1.eval(t), a2 = o2.eval(t);
            for (size_t ip = 0; ip < pts.size(); ++ip) {
                const StencilCache& st = caches[ip];
                const PointCache& c = st.c[1][1];
                double dt = dq2dt_of(c, 0, t, k) + dq2dt_of(c, 1, t, k);
                Vec2 v1 = c.v[0].value(), v2v = c.v[1].value();
                Vec2 U{a1 * v1.x + a2 * v2v.x, a1 * v1.y + a2 * v2v.y};
                double transport = 0, err = 0;
                bool on_swirl = (U.x != 0 || U.y != 0);
                if (on_swirl) {
                    Sample gq1 = q2_sample(st, 0, t, k), gq2 = q2_sample(st, 1, t, k);
                    Vec2 gp{};
                    for (int l = 0; l < 2; ++l) {
                        double sg = (l == 0 ? std::abs(a1) : std::abs(a2)) > 0.5 ? 1.0 : 0.0;
                        gp.x += c.gpax[l].x - sg * c.gF[l].x;
                        gp.y += c.gpax[l].y - sg * c.gF[l].y;
                        PotEval ge = dp[l].eval(c.x);
                        gp.x += ge.g.x;
                        gp.y += ge.g.y;
                        err += ge.err;
                    }
                    transport = U.dot({gq1.dx + gq2.dx + 2 * gp.x, gq1.dy + gq2.dy + 2 * gp.y});
                }
                double ud = u_dot_lap_q(st, t, k);
                for (double nu : nus) {
                    ResidualSample r;
                    r.x = pts[ip];
                    r.t = t;
                    r.nu = nu;
                    r.on_swirl = on_swirl;
                    r.value = dt + transport - 2 * nu * ud;
                    r.err = err;
                    out.push_back(r);
                }
            }
        }
        return out;
    }

    /// potential of -(d/dy2)(q_l,t^2 - f_l^2)/y2: the moving correction, so
    /// that grad p[a v, q] = grad pax - sg grad F + grad (this)
    PlanarPotential difference_potential_h(int l, double t, int k) const {
        PressureOptions po = opt_.popt;
        po.gauss_n = opt_.corr_gauss;
        po.max_panel_frac = opt_.corr_cap;
        auto theta = [this, l, t, k](Vec2 y) {
            double h = fd_;
            auto dval = [&](Vec2 p) {
                PointCache c = cache_point(p);
                return q2_of(c, l, t, k) - c.f2[l];
            };
            return -(dval({y.x, y.y + h}) - dval({y.x, y.y - h})) / (2 * h) / y.y;
        };
        SourceQuad q = build_source(theta, support_layout(l), po);
        q.drop_low_moments();
        return PlanarPotential(std::move(q), po);
    }

    SourceLayout support_layout(int l) const {
        // the moving part of q^2 lives on supp phi; panel over its box
        Box2 sb = pr_[l].S.phi.support();
        return SourceLayout::rect({sb}, {}, {});
    }

    std::vector<std::pair<int, PointCache>> supp_v_samples(int n) const {
        std::vector<std::pair<int, PointCache>> out;
        for (int i = 0; i < 2; ++i) {
            Box2 sb = pr_[i].S.v.support();
            for (int a = 0; a <= n; ++a)
                for (int b = 0; b <= n; ++b) {
                    Vec2 p{sb.lo.x + sb.width() * a / n, sb.lo.y + sb.height() * b / n};
                    if (pr_[i].S.v.value(p).norm() == 0) continue;
                    out.emplace_back(i, cache_point(p));
                }
        }
        return out;
    }

    double max_udlap_h() const { return max_udlap_h_; }

  private:
    double potvf_sign() const { return 1.0; }

    EvolutionPair pr_[2];
    double T_;
    EvolutionOptions opt_;
    PlanarPotential pax_[2], potF_[2], potQ_[2], potVF_;
    double diam_ = 1, fd_ = 1e-4;
    double delta_ = 0, theta_ = 0, nu0_ = 0, max_udlap_h_ = 0;
    int k_ = 0;
};

}  // namespace nsif
