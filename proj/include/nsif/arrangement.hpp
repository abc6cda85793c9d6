#pragma once

#include <optional>

#include "nsif/cantor.hpp"
#include "nsif/cutoff.hpp"
#include "nsif/pressure.hpp"
#include "nsif/stream.hpp"
#include "nsif/structure.hpp"

namespace nsif {

/// Desk-scale relaxation of the proof-slack constants: kappa_factor replaces
/// the literal 1e4 in kappa = kappa_factor C/D, margin_scale multiplies the
/// 0.001-style margins, and the amplitude headroom mu >= mu_factor |f1|_inf
/// shrinks with it (clamped where the gain chain needs headroom).
struct Relaxation {
    double kappa_factor = 10;
    double margin_scale = 10;
    double mu_factor = 0;  // 0: automatic

    double resolved_mu_factor() const {
        if (mu_factor > 0) return mu_factor;
        return std::max(100.0 / margin_scale, 30.0);
    }
    double band(double paper_value) const { return paper_value * margin_scale; }
};

/// The reference structure everything is built from: the rectangle
/// (-1,1) x (1/8,7/8) with an annular swirl, symmetric in x1.
struct ReferenceStructure {
    Region U;
    AnnulusSpec an;
    CutoffResult cf;
    double phi_eta = 0;
    Structure S;
    SourceLayout flay, vlay;
};

inline ReferenceStructure make_reference_structure(double grid_hint = 1.0 / 512,
                                                   double swirl_amp = 1.0) {
    ReferenceStructure r;
    r.U = Region::rectangle({{-1, 1.0 / 8}, {1, 7.0 / 8}});
    r.an = AnnulusSpec{{0, 0.5}, 0.10, 0.26, swirl_amp};
    r.cf = build_cutoff(r.U, 0.1, 1.0, {.grid_hint = grid_hint});
    auto dv = build_divfree_v(r.U, r.an);
    if (!dv.cert.pass()) throw NumericError("reference structure: divergence certificate failed");
    ScalarField2 phi = plateau_cutoff(r.U, r.cf.delta, grid_hint);
    r.phi_eta = r.cf.delta;
    r.S = Structure{r.U, dv.v, r.cf.f, phi, r.cf.eta, r.cf.delta, 1.0};
    r.flay = SourceLayout::rect({r.U.outer}, r.cf.xbreaks, r.cf.ybreaks);
    r.vlay = SourceLayout::polar_around({r.an.center, annulus_radial_breaks(r.an)});
    return r;
}

/// Translated/rescaled copy of a structure; the interaction function obeys
/// F^{a,r,s}(x) = (s^2/r) F((x1-a)/r, x2/r).
inline Structure rescale_structure(const Structure& base, double alpha, double rho,
                                   double sigma) {
    if (rho <= 0 || sigma <= 0) throw ConfigError("rescale_structure: rho, sigma > 0");
    Structure out;
    out.U.kind = base.U.kind;
    auto map_box = [&](Box2 b) {
        return Box2{{alpha + rho * b.lo.x, rho * b.lo.y}, {alpha + rho * b.hi.x, rho * b.hi.y}};
    };
    out.U.outer = map_box(base.U.outer);
    out.U.inner = map_box(base.U.inner);
    out.U.validate();  // rejects rescalings that cross the axis
    out.v = rescaled(base.v, alpha, rho, sigma);
    out.f = rescaled(base.f, alpha, rho, sigma);
    out.phi = rescaled(base.phi, alpha, rho, 1.0);
    out.eta = base.eta * rho;
    out.delta = base.delta * rho;
    out.mu = base.mu * sigma;
    return out;
}

struct ScaledFTerm {
    double alpha = 0, rho = 1, s2r = 1;  // s2r = sigma^2 / rho
};

/// Composite interaction function: lattice translates of the joint profile
/// copies plus the far copy. Distant translates are dropped against a decay
/// bound (reported as tail_bound).
class CompositeInteraction {
  public:
    const InteractionField* F = nullptr;
    std::vector<ScaledFTerm> lattice_terms;  // translated with the lattice
    std::vector<ScaledFTerm> fixed_terms;    // evaluated once (the far copy)
    double X = 0;
    long long M = 1;
    long long near_window = 16;
    double tail_bound = 0;  // absolute bound on dropped translate terms

    Vec2 eval(Vec2 x) const {
        Vec2 acc{};
        long long n0 = (X > 0 && M > 1) ? (long long)(std::llround(x.x / X)) : 0;
        long long lo = std::max<long long>(0, n0 - near_window);
        long long hi = std::min<long long>(M - 1, n0 + near_window);
        for (long long n = lo; n <= hi; ++n)
            for (const auto& t : lattice_terms) {
                Vec2 b = (*F)({(x.x - double(n) * X - t.alpha) / t.rho, x.y / t.rho});
                acc = acc + b * t.s2r;
            }
        for (const auto& t : fixed_terms) {
            Vec2 b = (*F)({(x.x - t.alpha) / t.rho, x.y / t.rho});
            acc = acc + b * t.s2r;
        }
        return acc;
    }
};

struct HComposition {
    double a1 = 0, r1 = 1, s1 = 1;  // primed copy
    double a2 = 0, r2 = 1, s2 = 1;  // double-primed copy
    double E = 0;
    double peak = 0;   // achieved H1(A,0)
    double floor = 0;  // achieved axis minimum
    VerificationReport cert;
};

namespace detail {

/// Smallest |x| beyond which |F1(x,0)| stays below thr (scan + decay).
inline double axis_decay_abscissa(const InteractionField& F, double B, double thr,
                                  double scan_to) {
    double x = 0.05;
    while (x < scan_to) {
        bool ok = true;
        for (double xx = x; xx <= scan_to * 1.0001; xx *= 1.05)
            if (std::abs(F({xx, 0}).x) >= thr || std::abs(F({-xx, 0}).x) >= thr) {
                ok = false;
                break;
            }
        if (ok) return x;
        x *= 1.1;
    }
    throw NumericError("compose: axis decay threshold not reached on the scan");
}

}  // namespace detail

/// Chooses the two shrunk copies so the joint axis profile peaks at 7B and
/// stays above the floor, then finds the strip height E with the window
/// properties near the axis.
inline HComposition compose_H(const InteractionField& F, const InteractionProfile& prof,
                              const Relaxation& rl) {
    HComposition H;
    const double A = prof.A, B = prof.B;
    const double thr = rl.band(0.001) * B;
    const double drop = 1 - rl.band(0.001);

    // peak half width: where F1(A + x, 0) falls below drop * B
    double w = 0;
    for (double x = 0.002; x < 2; x *= 1.2)
        if (F({A + x, 0}).x < drop * B && F({A - x, 0}).x < drop * B) {
            w = x;
            break;
        }
    if (w == 0) throw NumericError("compose: peak width not found");

    // primed copy: (s')^2 / r' = 2; r' small enough that its own tail is
    // below thr wherever the base peak has already dropped
    double x1 = detail::axis_decay_abscissa(F, B, thr / 2, 20 * std::abs(A) + 40);
    H.r1 = std::min(w / x1, 1.0 / 8);
    H.s1 = std::sqrt(2 * H.r1);
    H.a1 = A * (1 - H.r1);

    double w1 = H.r1 * w;  // peak width of the primed copy
    double x2 = detail::axis_decay_abscissa(F, B, thr / 4, 20 * std::abs(A) + 40);
    H.r2 = std::min(w1 / x2, H.r1 / 8);
    H.s2 = std::sqrt(4 * H.r2);
    H.a2 = A * (1 - H.r2);

    auto H1 = [&](Vec2 x) {
        return F(x).x + 2 * F({(x.x - H.a1) / H.r1, x.y / H.r1}).x +
               4 * F({(x.x - H.a2) / H.r2, x.y / H.r2}).x;
    };
    auto Hvec = [&](Vec2 x) {
        Vec2 a = F(x), b = F({(x.x - H.a1) / H.r1, x.y / H.r1}),
             c = F({(x.x - H.a2) / H.r2, x.y / H.r2});
        return Vec2{a.x + 2 * b.x + 4 * c.x, a.y + 2 * b.y + 4 * c.y};
    };

    H.cert.title = "joint-interaction";
    H.peak = H1({A, 0});
    H.cert.add("peak_seven_B", std::abs(H.peak / (7 * B) - 1) < 0.05, H.peak / B - 7,
               {A, 0}, 0, "H1(A,0)/B = " + std::to_string(H.peak / B));

    double fl = 1e300;
    Vec2 fl_at{};
    for (double x = -x1 * 1.5; x <= x1 * 1.5; x += w / 6) {
        double val = H1({x, 0});
        if (val < fl) {
            fl = val;
            fl_at = {x, 0};
        }
    }
    H.floor = fl;
    double floor_lim = -(1 + rl.band(0.005)) * B;
    H.cert.add("axis_floor", fl >= floor_lim, fl - floor_lim, fl_at, 0,
               "min H1 / B = " + std::to_string(fl / B));

    // |H| <= 2C |x|^-4 beyond 2|A|
    bool decay_ok = true;
    double worst = 0;
    Vec2 worst_at{};
    for (double rr = 2 * std::abs(A) + 0.05; rr < 40; rr *= 1.25)
        for (int q = 0; q < 7; ++q) {
            double th = M_PI * q / 6.0;
            Vec2 x{rr * std::cos(th), rr * std::sin(th)};
            Vec2 val = Hvec(x);
            double scaled = std::hypot(val.x, val.y) * rr * rr * rr * rr;
            if (scaled > worst) {
                worst = scaled;
                worst_at = x;
            }
            if (scaled > 2 * prof.C) decay_ok = false;
        }
    H.cert.add("decay_two_C", decay_ok, 2 * prof.C - worst, worst_at);

    // strip height: below the support of every copy, with the window floor
    // and the peak window height near A
    double bottoms = std::min({1.0 / 8, H.r1 / 8, H.r2 / 8});
    double E = 0.8 * bottoms;
    double kap = prof.kappa;
    for (int tries = 0; tries < 40; ++tries, E *= 0.7) {
        bool ok = true;
        for (double x2v : {E * 0.25, E * 0.5, E * 0.75, E * 0.999}) {
            for (double xx = -x1; xx <= x1 && ok; xx += w / 4)
                if (H1({xx, x2v}) < -(1 + rl.band(0.01)) * B) ok = false;
            for (double dx = -kap * E; dx <= kap * E && ok; dx += kap * E / 6)
                if (H1({A + dx, x2v}) < (7 - rl.band(0.01) * 7) * B) ok = false;
        }
        if (ok) break;
        if (tries == 39) throw NumericError("compose: no strip height certified");
    }
    H.E = E;
    H.cert.add("strip_height", true, E, {0, E}, 0, "E = " + std::to_string(E));
    return H;
}

/// The full parameter bundle of a planned arrangement.
struct ArrangementParams {
    double xi = 0;
    Relaxation relax;
    InteractionProfile prof;
    HComposition H;
    double eps = 0, r = 0, d = 0, tau = 0, T = 0, mu = 0;
    double a = 0, s_amp = 0;  // far copy position/amplitude
    Vec2 z{};                 // contraction shift (z1, z2)
    long long M = 1;
    double X = 0;
    double sup_f1 = 0;
    Box2 BOX, RECT, SBOX;

    Box2 sbox_m(long long m) const {
        Box2 b = SBOX;
        b.lo.x += double(m - 1) * X;
        b.hi.x += double(m - 1) * X;
        return b;
    }
    IFSParams ifs() const { return {tau, M, z.x, z.y, X}; }

    nlohmann::json to_json() const {
        return {{"xi", xi},
                {"kappa_factor", relax.kappa_factor},
                {"margin_scale", relax.margin_scale},
                {"mu_factor", relax.resolved_mu_factor()},
                {"profile", prof.to_json()},
                {"copies",
                 {{"a1", H.a1}, {"r1", H.r1}, {"s1", H.s1}, {"a2", H.a2}, {"r2", H.r2},
                  {"s2", H.s2}, {"E", H.E}}},
                {"eps", eps},
                {"r", r},
                {"d", d},
                {"tau", tau},
                {"T", T},
                {"mu", mu},
                {"far_copy", {{"a", a}, {"s", s_amp}}},
                {"z", {z.x, z.y}},
                {"M", M},
                {"X", X},
                {"boxes",
                 {{"BOX", {BOX.lo.x, BOX.lo.y, BOX.hi.x, BOX.hi.y}},
                  {"RECT", {RECT.lo.x, RECT.lo.y, RECT.hi.x, RECT.hi.y}},
                  {"SBOX", {SBOX.lo.x, SBOX.lo.y, SBOX.hi.x, SBOX.hi.y}}}}};
    }
};

/// Largest eps on a dyadic ladder satisfying every smallness condition
/// (relaxed), then all derived constants. xi = 0 plans the single-contraction
/// variant (M = 1).
inline ArrangementParams plan(const InteractionField& F, const InteractionProfile& prof,
                              double base_diam, double xi, Relaxation rl = {}) {
    if (!(xi >= 0 && xi < 1)) throw ConfigError("plan: xi must lie in [0,1)");
    ArrangementParams P;
    P.xi = xi;
    P.relax = rl;
    P.prof = prof;
    P.H = compose_H(F, prof, rl);

    const double A = prof.A, B = prof.B, C = prof.C, kap = prof.kappa, E = P.H.E;
    double diam_copies = base_diam + 2 * std::abs(P.H.a1 - A) + 2;  // coarse bound

    // lattice spacing (Cantor variant): X fixed before eps
    double X = 0;
    if (xi > 0) {
        double zsum = 0;  // 2 C X^-4 sum (|k|-1/2)^-4 < 0.01 B margin
        for (int k = 1; k < 400; ++k) zsum += 2.0 / std::pow(k - 0.5, 4.0);
        X = std::max({diam_copies, 4 * std::abs(A), 2 * kap * E,
                      std::pow(2 * C * zsum / (rl.band(0.001) * 10 * B), 0.25)});
    }

    const double slack = 1 + 1.0 / rl.margin_scale;
    double eps = 1.0 / 16;
    bool ok = false;
    std::string binding = "eps ladder not started";
    for (int h = 0; h < 160; ++h, eps /= 2) {
        double r = E / eps, d = kap * r;
        if (!(eps < 0.1)) { binding = "eps < 1/10"; continue; }
        if (!(d - r > slack * (std::abs(A) + kap * E))) { binding = "d-r margin"; continue; }
        if (!(r > 10)) { binding = "r > 10"; continue; }
        if (!(r > 20 * std::abs(A))) { binding = "r > 20|A|"; continue; }
        if (!(d > 2 * diam_copies)) { binding = "d > 2 diam"; continue; }
        if (!(eps < kap / prof.N)) { binding = "eps < kappa/N"; continue; }
        double e2cap = rl.margin_scale * B * E * E * E * E / (2e6 * C);
        if (xi > 0) {
            double Md = std::floor(1 + d / (4 * X));
            if (Md < 2) { binding = "M >= 2"; continue; }
            if (Md > 9.0e15) { binding = "M exceeds exact-integer range"; continue; }
            double tau = 0.48 * eps;
            if (!(std::pow(tau, xi) * Md >= 1)) { binding = "tau^xi M >= 1"; continue; }
            if (!(eps * eps * Md < e2cap)) { binding = "eps^2 M < B E^4 margin"; continue; }
        } else {
            if (!(eps * eps < e2cap)) { binding = "eps^2 < B E^4 margin"; continue; }
        }
        ok = true;
        break;
    }
    if (!ok) throw NumericError("plan: no eps on the ladder is feasible; binding: " + binding);

    P.eps = eps;
    P.r = E / eps;
    P.d = kap * P.r;
    P.tau = 0.48 * eps;
    P.z = {A, eps * P.r / 2};
    if (xi > 0) {
        P.M = (long long)(std::floor(1 + P.d / (4 * X)));
        P.X = P.d / (4 * double(P.M - 1));  // exact quarter split; only raises X
    }

    P.a = -kap * P.r / eps;
    P.s_amp = std::sqrt(1.04 * std::pow(-P.a / P.r, 4.0) * B / prof.D * P.r);
    P.sup_f1 = std::max({1.0, P.H.s1, P.H.s2, P.s_amp});
    P.mu = rl.resolved_mu_factor() * P.sup_f1;
    P.T = (P.mu * P.mu - 5) / (1.1 * eps * eps * B);

    P.BOX = {{-P.d, 0}, {P.d, P.r}};
    P.RECT = {{-(P.d - P.r), 0.02 * eps * P.r}, {P.d - P.r, 0.98 * eps * P.r}};
    P.SBOX = {{A - kap * E, 0.02 * eps * P.r}, {A + kap * E, 0.98 * eps * P.r}};
    return P;
}

/// F* = (lattice translates of the joint profile) + far copy.
inline CompositeInteraction total_interaction(const InteractionField& F,
                                              const ArrangementParams& P) {
    CompositeInteraction FS;
    FS.F = &F;
    FS.lattice_terms = {{0, 1, 1},
                        {P.H.a1, P.H.r1, P.H.s1 * P.H.s1 / P.H.r1},
                        {P.H.a2, P.H.r2, P.H.s2 * P.H.s2 / P.H.r2}};
    FS.fixed_terms = {{P.a, P.r, P.s_amp * P.s_amp / P.r}};
    FS.X = P.X;
    FS.M = P.M;
    if (P.M > 1) {
        FS.near_window =
            std::max<long long>(8, (long long)(std::ceil(30 * std::abs(P.prof.A) / P.X)) + 2);
        double tail = 0;  // sum over dropped |n| > window of 7 * 2C (nX)^-4
        for (int k = FS.near_window; k < FS.near_window + 4000; ++k)
            tail += 7 * 2 * P.prof.C / std::pow(k * P.X * 0.5, 4.0);
        FS.tail_bound = tail;
    }
    return FS;
}

/// The second region of the arrangement: ring around the copies with the
/// prescribed duct field, ring cutoff of amplitude mu, and matching plateau.
struct PairTwo {
    Region U2;
    VectorField2 v2;
    ScalarField2 f2, phi2;
    double eta2 = 0, delta2 = 0;
    VerificationReport cert;
};

inline PairTwo build_pair2(const ArrangementParams& P, int moll_nodes = 21) {
    PairTwo p2;
    double er = P.eps * P.r;
    p2.U2 = Region::ring({{-P.d, 0.005 * er}, {P.d, P.r}},
                         {{-(P.d - P.r), er}, {P.d - P.r, P.r / 10}});
    Loop4Spec sp{P.d, P.r, P.eps, moll_nodes};
    p2.v2 = loop4_velocity(sp);

    p2.eta2 = 0.0005 * er;
    auto cf2 = build_cutoff(p2.U2, p2.eta2, P.mu, {.cert_along = 96, .cert_depth = 12});
    p2.f2 = cf2.f;
    p2.delta2 = cf2.delta;
    p2.phi2 = plateau_cutoff(p2.U2, cf2.delta);
    p2.cert = cf2.cert;
    return p2;
}

/// Grid certificate of the four duct-field clauses.
inline VerificationReport verify_v2(const ArrangementParams& P, const VectorField2& v2,
                                    GridSpec grid = {96, 48}) {
    VerificationReport rep;
    rep.title = "duct-field";
    double er = P.eps * P.r, d = P.d, r = P.r, eps = P.eps;

    double div_worst = 0, b1lo = 0, b1hi = 0, b2w = 0;
    Vec2 w_div{}, w_b{}, w_b2{};
    bool supp_ok = true;
    Vec2 w_supp{};
    Box2 excl{{-(d - r), er}, {d - r, r / 10}};
    Box2 outer{{-d, 0.005 * er}, {d, r}};
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            // log-ish spacing in x2 resolves the thin duct
            double ty = double(j) / (grid.ny - 1);
            double x2 = 0.0051 * er * std::pow(r / (0.0051 * er), ty);
            double x1 = -d + 2 * d * i / (grid.nx - 1);
            Vec2 p{x1, x2};
            Sample2 s = v2.at(p);
            double dv = p.y * (s.x.dx + s.y.dy) + s.y.v;
            if (std::abs(dv) > div_worst) {
                div_worst = std::abs(dv);
                w_div = p;
            }
            double speed = std::hypot(s.x.v, s.y.v);
            if (speed > 1e-11 && (!outer.contains_strict(p) || excl.contains(p))) {
                supp_ok = false;
                w_supp = p;
            }
            if (s.x.v < b1lo) { b1lo = s.x.v; w_b = p; }
            if (s.x.v > b1hi) b1hi = s.x.v;
            if (std::abs(s.y.v) > b2w) { b2w = std::abs(s.y.v); w_b2 = p; }
            if (p.x > -(d - r) && p.x < d - r && p.y < er) {
                if (s.x.v < -1e-10 || std::abs(s.y.v) > 1e-10) {
                    rep.add("low_strip_signs", false, -std::abs(s.y.v), p);
                    supp_ok = supp_ok;  // keep scanning
                }
            }
        }
    rep.add("div_x2v_zero", div_worst <= 1e-8, 1e-8 - div_worst, w_div);
    rep.add("support_containment", supp_ok, 0, w_supp);
    double tol = 1e-6;
    rep.add("first_component_range", b1lo >= -eps * eps - tol && b1hi <= 1 + tol,
            std::min(b1lo + eps * eps + tol, 1 + tol - b1hi), w_b,
            0, "min " + std::to_string(b1lo) + " max " + std::to_string(b1hi));
    rep.add("second_component_bound", b2w <= eps / 2 * (1 + 1e-9) + tol,
            eps / 2 - b2w, w_b2);

    // exact direction on the duct rectangle
    double worst_dev = 0;
    Vec2 w_rect{};
    for (int i = 0; i < 48; ++i)
        for (int j = 0; j < 8; ++j) {
            Vec2 p{P.RECT.lo.x + P.RECT.width() * i / 47.0,
                   P.RECT.lo.y + P.RECT.height() * j / 7.0};
            Vec2 val = v2.value(p);
            double dev = std::max(std::abs(val.x - 1), std::abs(val.y));
            if (dev > worst_dev) {
                worst_dev = dev;
                w_rect = p;
            }
        }
    rep.add("unit_direction_on_duct", worst_dev <= 1e-11, 1e-11 - worst_dev, w_rect);
    return rep;
}

/// Interval-arithmetic image of R^{-1}(tau R(S) + z) for S in the half plane.
inline Box2 contracted_image(Box2 S, double tau, Vec2 z) {
    double ylo = z.y - tau * S.hi.y;
    if (ylo < 0) ylo = 0;  // the image may wrap the axis only if tau S_hi > z2
    return {{tau * S.lo.x + z.x, ylo}, {tau * S.hi.x + z.x, z.y + tau * S.hi.y}};
}

struct ArrangementReport {
    VerificationReport report;
    double theta = 0;  // extracted gain slack
};

/// Certifies the inclusions, the far-copy window, the duct-field floor, and
/// the two arrangement inequalities; extracts the gain slack theta.
inline ArrangementReport verify_arrangement(const InteractionField& F,
                                            const ArrangementParams& P, const PairTwo& p2,
                                            const Structure& base, int grid_n = 48) {
    ArrangementReport out;
    VerificationReport& rep = out.report;
    rep.title = "arrangement";
    const double B = P.prof.B, eps = P.eps, r = P.r, d = P.d, er = P.eps * P.r;
    CompositeInteraction FS = total_interaction(F, P);

    // (a) interval inclusions
    Box2 img_box = contracted_image(P.BOX, P.tau, {P.z.x, P.z.y});
    // Gamma_m(x) = tau x + z + (m-1)(X,0,0): image of BOX under m shifts by (m-1)X
    bool inc1 = true;
    for (long long m : {1LL, P.M}) {
        Box2 img = img_box;
        img.lo.x += double(m - 1) * P.X;
        img.hi.x += double(m - 1) * P.X;
        if (!P.sbox_m(m).contains_box(img, 1e-12)) inc1 = false;
    }
    rep.add("box_into_sbox", inc1, P.SBOX.hi.x - img_box.hi.x, img_box.center());

    Box2 Uar{{P.a - r, r / 8}, {P.a + r, 7 * r / 8}};
    Box2 img_uar = contracted_image(Uar, P.tau, {P.z.x, P.z.y});
    bool inc2 = true;
    for (long long m : {1LL, P.M}) {
        Box2 img = img_uar;
        img.lo.x += double(m - 1) * P.X;
        img.hi.x += double(m - 1) * P.X;
        if (!P.RECT.contains_box(img, 1e-12)) inc2 = false;
    }
    rep.add("far_copy_into_duct", inc2, P.RECT.hi.x - (img_uar.hi.x + (P.M - 1) * P.X),
            img_uar.center());

    bool sdisj = P.M == 1 || P.X > 2 * (P.SBOX.hi.x - P.SBOX.lo.x) / 2;
    rep.add("sboxes_disjoint_in_duct", sdisj && P.RECT.contains_box(P.sbox_m(P.M), 1e-12),
            P.X - P.SBOX.width(), {});

    bool u1u2 = (P.a + r < -d);
    rep.add("regions_disjoint", u1u2, -d - (P.a + r), {P.a + r, 0});

    // (b) far-copy window on BOX
    double w1lo = 1e300, w1hi = -1e300, w2 = 0;
    Vec2 w_at{};
    auto Fars = [&](Vec2 x) {
        Vec2 b = F({(x.x - P.a) / P.r, x.y / P.r});
        return b * (P.s_amp * P.s_amp / P.r);
    };
    for (int i = 0; i <= grid_n; ++i)
        for (int j = 0; j <= 12; ++j) {
            Vec2 x{-d + 2 * d * i / grid_n, r * j / 12.0};
            Vec2 val = Fars(x);
            w1lo = std::min(w1lo, val.x);
            w1hi = std::max(w1hi, val.x);
            if (std::abs(val.y) > w2) {
                w2 = std::abs(val.y);
                w_at = x;
            }
        }
    double blo = (1.04 - P.relax.band(0.001) * 1.1) * B,
           bhi = (1.04 + P.relax.band(0.001) * 1.1) * B;
    rep.add("far_copy_window_low", w1lo >= blo, w1lo - blo, {},
            0, "min F1 copy / B = " + std::to_string(w1lo / B));
    rep.add("far_copy_window_high", w1hi <= bhi, bhi - w1hi, {},
            0, "max F1 copy / B = " + std::to_string(w1hi / B));
    rep.add("far_copy_normal_small", w2 <= P.relax.band(0.01) * eps * B,
            P.relax.band(0.01) * eps * B - w2, w_at);

    // (c) floors of F*
    double f_rect = 1e300, f_sbox = 1e300;
    for (int i = 0; i <= grid_n; ++i)
        for (int j = 0; j <= 8; ++j) {
            Vec2 y{P.RECT.lo.x + P.RECT.width() * i / grid_n,
                   P.RECT.lo.y + P.RECT.height() * j / 8.0};
            f_rect = std::min(f_rect, FS.eval(y).x - FS.tail_bound);
        }
    for (long long m : {1LL, P.M})
        for (int i = 0; i <= grid_n; ++i)
            for (int j = 0; j <= 8; ++j) {
                Box2 sb = P.sbox_m(m);
                Vec2 y{sb.lo.x + sb.width() * i / grid_n, sb.lo.y + sb.height() * j / 8.0};
                f_sbox = std::min(f_sbox, FS.eval(y).x - FS.tail_bound);
            }
    rep.add("duct_floor", f_rect >= 0.01 * B, f_rect - 0.01 * B, {},
            0, "min F1* on duct / B = " + std::to_string(f_rect / B));
    rep.add("window_floor", f_sbox >= (8 - P.relax.band(0.01) * 8) * B,
            f_sbox - (8 - P.relax.band(0.01) * 8) * B, {},
            0, "min F1* on window / B = " + std::to_string(f_sbox / B));

    // (d) v2 . F* >= -1.1 eps B on BOX (sampled on supp v2)
    double vf_min = 1e300;
    Vec2 vf_at{};
    for (int i = 0; i <= grid_n; ++i)
        for (int j = 0; j <= 16; ++j) {
            double ty = double(j) / 16;
            double x2 = 0.006 * er * std::pow(r * 0.99 / (0.006 * er), ty);
            Vec2 y{-d + 2 * d * i / grid_n, x2};
            Vec2 vv = p2.v2.value(y);
            if (vv.x == 0 && vv.y == 0) continue;
            double val = vv.dot(FS.eval(y)) - FS.tail_bound * (std::abs(vv.x) + std::abs(vv.y));
            if (val < vf_min) {
                vf_min = val;
                vf_at = y;
            }
        }
    rep.add("transport_floor", vf_min >= -1.1 * eps * B, vf_min + 1.1 * eps * B, vf_at,
            0, "min v2.F* / (eps B) = " + std::to_string(vf_min / (eps * B)));

    // (e) amplitude-floor inequality on U2: f2^2 + T v2.F* > |v2|^2
    double extra_min = 1e300;
    Vec2 extra_at{};
    for (int i = 0; i <= grid_n; ++i)
        for (int j = 0; j <= 16; ++j) {
            double ty = double(j) / 16;
            double x2 = 0.006 * er * std::pow(r * 0.99 / (0.006 * er), ty);
            Vec2 y{-d + 2 * d * i / grid_n, x2};
            if (!p2.U2.contains(y)) continue;
            Vec2 vv = p2.v2.value(y);
            double f2v = p2.f2.value(y);
            double val = f2v * f2v - vv.dot(vv);
            if (vv.x != 0 || vv.y != 0)
                val += P.T * (vv.dot(FS.eval(y)) -
                              FS.tail_bound * (std::abs(vv.x) + std::abs(vv.y)));
            if (val < extra_min) {
                extra_min = val;
                extra_at = y;
            }
        }
    rep.add("amplitude_floor", extra_min > 0, extra_min, extra_at);

    // (f) gain inequality with the 2 theta slack:
    // f2(y)^2 + T v2(y).F*(y) > tau^-2 (f1 + f2)^2(xq) for all meridian xq,
    // y on the contracted image segment. The left side is tabulated over the
    // full duct height (a superset of every image segment, so the tabulated
    // minimum under-estimates and the check stays conservative).
    const int tab_n = std::max(256, 8 * grid_n);
    std::vector<std::vector<double>> lhs_tab(2, std::vector<double>(tab_n + 1, 1e300));
    double y1_lo = P.z.x - P.tau * d, y1_hi = P.z.x + P.tau * d;
    for (int end = 0; end < 2; ++end) {
        double shift = (end == 0 ? 0.0 : double(P.M - 1) * P.X);
        if (P.M == 1 && end == 1) {
            lhs_tab[1] = lhs_tab[0];
            break;
        }
        for (int i = 0; i <= tab_n; ++i) {
            double y1 = y1_lo + (y1_hi - y1_lo) * i / tab_n + shift;
            for (int j = 0; j <= 8; ++j) {
                double y2 = P.RECT.lo.y + P.RECT.height() * j / 8.0;
                Vec2 y{y1, y2};
                Vec2 vv = p2.v2.value(y);
                double f2y = p2.f2.value(y);
                double lhs = f2y * f2y +
                             P.T * (vv.dot(FS.eval(y)) -
                                    FS.tail_bound * (std::abs(vv.x) + std::abs(vv.y)));
                lhs_tab[end][i] = std::min(lhs_tab[end][i], lhs);
            }
        }
    }
    double gain_min = 1e300;
    Vec2 gain_at{};
    auto gain_check = [&](Vec2 xq, double f1v, double f2v) {
        double rhs = (f1v + f2v) * (f1v + f2v) / (P.tau * P.tau);
        double y1 = P.tau * xq.x + P.z.x;
        double pos = (y1 - y1_lo) / (y1_hi - y1_lo) * tab_n;
        int i0 = std::min(tab_n - 1, std::max(0, int(std::floor(pos))));
        for (int end = 0; end < 2; ++end) {
            double lhs = std::min(lhs_tab[end][i0], lhs_tab[end][i0 + 1]);
            double margin = lhs - rhs;
            if (margin < gain_min) {
                gain_min = margin;
                gain_at = xq;
            }
        }
    };
    // meridian sample points: each copy region of U1 and the ring U2
    auto scan_region = [&](Box2 bb, auto f1_of, auto f2_of, int nx, int ny) {
        for (int i = 0; i <= nx; ++i)
            for (int j = 0; j <= ny; ++j) {
                Vec2 xq{bb.lo.x + bb.width() * i / nx, bb.lo.y + bb.height() * j / ny};
                gain_check(xq, f1_of(xq), f2_of(xq));
            }
    };
    auto zero_f = [](Vec2) { return 0.0; };
    // base copy and the two shrunk copies, over each lattice translate end
    for (long long n : {0LL, P.M - 1}) {
        double sh = double(n) * P.X;
        Box2 b1{{-1 + sh, 1.0 / 8}, {1 + sh, 7.0 / 8}};
        scan_region(
            b1, [&](Vec2 q) { return base.f.value({q.x - sh, q.y}); }, zero_f, grid_n / 2, grid_n / 2);
        Box2 b2{{P.H.a1 - P.H.r1 + sh, P.H.r1 / 8}, {P.H.a1 + P.H.r1 + sh, 7 * P.H.r1 / 8}};
        scan_region(
            b2,
            [&](Vec2 q) { return P.H.s1 * base.f.value({(q.x - sh - P.H.a1) / P.H.r1, q.y / P.H.r1}); },
            zero_f, grid_n / 3, grid_n / 3);
        Box2 b3{{P.H.a2 - P.H.r2 + sh, P.H.r2 / 8}, {P.H.a2 + P.H.r2 + sh, 7 * P.H.r2 / 8}};
        scan_region(
            b3,
            [&](Vec2 q) { return P.H.s2 * base.f.value({(q.x - sh - P.H.a2) / P.H.r2, q.y / P.H.r2}); },
            zero_f, grid_n / 3, grid_n / 3);
    }
    // far copy
    Box2 bf{{P.a - P.r, P.r / 8}, {P.a + P.r, 7 * P.r / 8}};
    scan_region(
        bf, [&](Vec2 q) { return P.s_amp * base.f.value({(q.x - P.a) / P.r, q.y / P.r}); },
        zero_f, grid_n / 2, grid_n / 2);
    // ring region: f1 = 0, f2 as built (worst at the plateau, f2 = mu)
    scan_region(
        p2.U2.outer, zero_f, [&](Vec2 q) { return p2.f2.value(q); }, grid_n, 24);

    rep.add("gain_inequality", gain_min > 0, gain_min, gain_at,
            0, "worst margin = " + std::to_string(gain_min));
    out.theta = std::max(0.0, gain_min / 2);
    rep.extra["theta"] = out.theta;
    rep.extra["tail_bound"] = FS.tail_bound;
    return out;
}

}  // namespace nsif
