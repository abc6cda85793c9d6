#pragma once

#include <vector>

#include "nsif/cutoff.hpp"
#include "nsif/field2d.hpp"
#include "nsif/report.hpp"

namespace nsif {

/// A validated triple (v, f, phi) on a region U of the upper half plane:
/// supp f = closure(U), supp v inside {phi = 1}, div(x2 v) = 0, f > |v| in U
/// and Lf > 0 off the plateau.
struct Structure {
    Region U;
    VectorField2 v;
    ScalarField2 f;
    ScalarField2 phi;
    double eta = 0;
    double delta = 0;
    double mu = 1;
};

/// Several disjointly supported structures acting as one (the composite
/// arrangement side); fields add, regions stay separate.
struct StructureSet {
    std::vector<Structure> parts;

    ScalarField2 total_f() const {
        std::vector<ScalarField2> fs;
        for (const auto& p : parts) fs.push_back(p.f);
        return scalar_sum(fs);
    }
    VectorField2 total_v() const {
        std::vector<VectorField2> vs;
        for (const auto& p : parts) vs.push_back(p.v);
        return vector_sum(vs);
    }
    ScalarField2 total_phi() const {
        std::vector<ScalarField2> ps;
        for (const auto& p : parts) ps.push_back(p.phi);
        return scalar_sum(ps);
    }
    Box2 bbox() const {
        Box2 b = parts.at(0).U.bbox();
        for (const auto& p : parts) b = b.hull(p.U.bbox());
        return b;
    }
    double sup_f() const {
        double m = 0;
        for (const auto& p : parts) m = std::max(m, p.mu);
        return m;
    }
};

struct ValidateOptions {
    GridSpec grid{96, 96};
    double tol_div = 1e-8;
    double plateau_tol = 1e-12;
};

/// Checks every clause of the structure definition on a grid; failures are
/// report entries, not errors.
inline VerificationReport validate_structure(const Structure& S, ValidateOptions opt = {}) {
    VerificationReport rep;
    rep.title = "structure";
    const Box2 bb = S.U.bbox();
    const double hx = bb.width() / (opt.grid.nx - 1);
    const double hy = bb.height() / (opt.grid.ny - 1);

    // supp f = closure(U): zero outside, positive at interior points near dU
    double worst_out = 0;
    Vec2 w_out{};
    Box2 dil = bb.dilated(2 * std::max(hx, hy));
    for (int i = 0; i < opt.grid.nx; ++i)
        for (int j = 0; j < opt.grid.ny; ++j) {
            Vec2 p{dil.lo.x + i * (dil.width() / (opt.grid.nx - 1)),
                   std::max(1e-12, dil.lo.y + j * (dil.height() / (opt.grid.ny - 1)))};
            if (S.U.in_closure(p)) continue;
            double a = std::abs(S.f.value(p));
            if (a > worst_out) {
                worst_out = a;
                w_out = p;
            }
        }
    rep.add("supp_f_outside_zero", worst_out == 0, -worst_out, w_out);

    bool pos_ok = true;
    Vec2 w_pos{};
    double min_pos = std::numeric_limits<double>::infinity();
    auto pts = detail::band_points(S.U, S.eta / 2, 0.05 * S.eta, opt.grid.nx, 12);
    for (Vec2 p : pts) {
        double val = S.f.value(p);
        if (val <= 0) {
            pos_ok = false;
            w_pos = p;
            min_pos = val;
            break;
        }
        if (val < min_pos) {
            min_pos = val;
            w_pos = p;
        }
    }
    rep.add("f_positive_inside", pos_ok, min_pos, w_pos);

    // grid over the interior for the remaining clauses
    double div_worst = 0, fv_margin = std::numeric_limits<double>::infinity();
    double L_worst = std::numeric_limits<double>::infinity();
    double supp_v_viol = 0;
    Vec2 w_div{}, w_fv{}, w_L{}, w_sv{};
    bool has_L_pts = false;
    for (int i = 0; i < opt.grid.nx; ++i)
        for (int j = 0; j < opt.grid.ny; ++j) {
            Vec2 p{bb.lo.x + i * hx, bb.lo.y + j * hy};
            if (!S.U.contains(p)) continue;
            Sample2 vv = S.v.at(p);
            Sample ff = S.f.at(p);
            double phi = S.phi.value(p);
            // div(x2 v) = x2 (dv1/dx + dv2/dy) + v2
            double dv = p.y * (vv.x.dx + vv.y.dy) + vv.y.v;
            if (std::abs(dv) > div_worst) {
                div_worst = std::abs(dv);
                w_div = p;
            }
            double speed = std::hypot(vv.x.v, vv.y.v);
            if (speed > 0 && phi < 1 - opt.plateau_tol && speed > supp_v_viol) {
                supp_v_viol = speed;
                w_sv = p;
            }
            if (ff.v - speed < fv_margin) {
                fv_margin = ff.v - speed;
                w_fv = p;
            }
            if (phi < 1 - opt.plateau_tol && ff.v > 0) {
                has_L_pts = true;
                double L = apply_L(ff, p.y);
                if (L < L_worst) {
                    L_worst = L;
                    w_L = p;
                }
            }
        }
    rep.add("div_x2v_small", div_worst <= opt.tol_div, opt.tol_div - div_worst, w_div,
            0, "max |div(x2 v)| = " + std::to_string(div_worst));
    rep.add("supp_v_in_plateau", supp_v_viol == 0, -supp_v_viol, w_sv);
    rep.add("f_dominates_v", fv_margin > 0, fv_margin, w_fv);
    // off-plateau grid points at underflow distance from dU evaluate to f = 0
    // and are excluded by the f > 0 guard above; the band certificate from
    // build_cutoff covers them
    rep.add("Lf_positive_off_plateau", !has_L_pts || L_worst > 0, L_worst, w_L);
    return rep;
}

}  // namespace nsif
