#include <catch2/catch_amalgamated.hpp>

#include "nsif/arrangement.hpp"

using namespace nsif;

namespace {

struct Ctx {
    ReferenceStructure ref;
    InteractionField F;
    InteractionProfile prof;
    Relaxation rl;  // desk profile
    Ctx() {
        ref = make_reference_structure();
        F = InteractionField(ref.S.v, ref.vlay);
        ScanSpec sc;
        sc.kappa_factor = rl.kappa_factor;
        sc.tol_band = 0.001 * rl.margin_scale;
        prof = profile_interaction(ref.S.v, ref.vlay, F, sc);
    }
};

Ctx& ctx() {
    static Ctx c;
    return c;
}

}  // namespace

TEST_CASE("rescaling acts on regions, fields and the interaction law") {
    auto& c = ctx();
    // identity
    Structure id = rescale_structure(c.ref.S, 0, 1, 1);
    CHECK(id.U.outer.lo.x == c.ref.S.U.outer.lo.x);
    CHECK(id.f.value({0.3, 0.5}) == Catch::Approx(c.ref.S.f.value({0.3, 0.5})).epsilon(1e-15));

    double al = 2.5, rho = 0.5, sg = 3.0;
    Structure sc = rescale_structure(c.ref.S, al, rho, sg);
    // support is the coordinate image
    CHECK(sc.U.outer.lo.x == Catch::Approx(al + rho * -1.0));
    CHECK(sc.U.outer.hi.y == Catch::Approx(rho * 7.0 / 8));
    CHECK(sc.f.value({al, rho * 0.5}) == Catch::Approx(sg * 1.0));
    CHECK(sc.f.value({al + rho * 1.01, rho * 0.5}) == 0.0);

    // the interaction of the rescaled structure obeys the exact scaling law:
    // F_scaled(al + rho A, 0) = (sg^2/rho) F(A, 0)
    SourceLayout vlay2 = SourceLayout::polar_around(
        {{al + rho * c.ref.an.center.x, rho * c.ref.an.center.y},
         [&] {
             auto rb = annulus_radial_breaks(c.ref.an);
             for (auto& r : rb) r *= rho;
             return rb;
         }()});
    InteractionField F2(sc.v, vlay2);
    double want = sg * sg / rho * c.F({c.prof.A, 0}).x;
    double got = F2({al + rho * c.prof.A, 0}).x;
    CHECK(got == Catch::Approx(want).epsilon(1e-5));

    CHECK_THROWS_AS(rescale_structure(c.ref.S, 0, -1, 1), ConfigError);
}

TEST_CASE("joint interaction: peak at seven B, floor and decay hold") {
    auto& c = ctx();
    auto H = compose_H(c.F, c.prof, c.rl);
    CHECK(std::abs(H.peak / (7 * c.prof.B) - 1) < 0.05);
    for (const auto& cl : H.cert.clauses) {
        CAPTURE(cl.name, cl.margin, cl.note);
        CHECK(cl.pass);
    }
    CHECK(H.r2 <= H.r1 / 8);
    CHECK(H.E > 0);
}

TEST_CASE("planner: point variant and the contraction identities") {
    auto& c = ctx();
    auto P = plan(c.F, c.prof, 2.1, 0.0, c.rl);
    CHECK(P.M == 1);
    CHECK(P.tau * P.M < 1);
    CHECK(P.tau == Catch::Approx(0.48 * P.eps));
    CHECK(P.d == Catch::Approx(c.prof.kappa * P.r));
    CHECK(P.r == Catch::Approx(P.H.E / P.eps));
    CHECK(P.T > 0);
    CHECK(P.mu >= 30 * P.sup_f1);
    // the smallness ledger
    CHECK(P.eps < 0.1);
    CHECK(P.r > 10);
    CHECK(P.eps < c.prof.kappa / c.prof.N);
    // the image of BOX under the contraction is inside SBOX (pure intervals)
    Box2 img = contracted_image(P.BOX, P.tau, {P.z.x, P.z.y});
    CHECK(P.SBOX.contains_box(img, 1e-12));
    CHECK(img.lo.y == Catch::Approx(0.02 * P.eps * P.r));
    CHECK(img.hi.y == Catch::Approx(0.98 * P.eps * P.r));
}

TEST_CASE("planner: self-similar variant satisfies the dimension constraints") {
    // the island count M grows like 1/eps, so the self-similar variant needs
    // a deeper margin relaxation to stay within exactly representable counts
    auto& c = ctx();
    Relaxation deep = c.rl;
    deep.margin_scale = 300;
    ScanSpec sc;
    sc.kappa_factor = deep.kappa_factor;
    sc.tol_band = 0.001 * deep.margin_scale;
    auto prof = profile_interaction(c.ref.S.v, c.ref.vlay, c.F, sc);
    auto P = plan(c.F, prof, 2.1, 0.5, deep);
    CHECK(P.M >= 2);
    CHECK(std::pow(P.tau, 0.5) * P.M >= 1);
    CHECK(P.tau * P.M < 1);
    // tau M = tau + tau d/(4X) and tau d < kappa E gives the < 1 chain
    CHECK(P.tau * P.d / (4 * P.X) < 0.5);
    IFSParams ifs = P.ifs();
    ifs.validate(0.5);
    CHECK(ifs.dimension() >= 0.5);

    CHECK_THROWS_AS(plan(c.F, prof, 2.1, 1.0, deep), ConfigError);
}

TEST_CASE("arrangement verification on a coarse grid") {
    auto& c = ctx();
    auto P = plan(c.F, c.prof, 2.1, 0.0, c.rl);
    auto p2 = build_pair2(P, 15);

    auto v2rep = verify_v2(P, p2.v2, {64, 32});
    for (const auto& cl : v2rep.clauses) {
        CAPTURE(cl.name, cl.margin, cl.note, cl.wx, cl.wy);
        CHECK(cl.pass);
    }

    auto ar = verify_arrangement(c.F, P, p2, c.ref.S, 12);
    for (const auto& cl : ar.report.clauses) {
        CAPTURE(cl.name, cl.margin, cl.note, cl.wx, cl.wy);
        CHECK(cl.pass);
    }
    CHECK(ar.theta > 0);

    // forcing the horizon below the planned value breaks the gain chain
    ArrangementParams bad = P;
    bad.T = P.T / 400.0;
    auto bar = verify_arrangement(c.F, bad, p2, c.ref.S, 8);
    const Clause* cl = bar.report.find("gain_inequality");
    REQUIRE(cl != nullptr);
    CHECK_FALSE(cl->pass);
}

TEST_CASE("the simplified duct field cannot exist") {
    // a field with v = (1,0) on a rectangle K, zero second component and
    // nonnegative first component everywhere to the right cannot have
    // div(x2 v) = 0: the boundary flux of x2 v over the half-strip from K
    // to the support edge is strictly positive
    double a2 = 0.1, b2 = 0.4;
    double left_edge_flux = (b2 * b2 - a2 * a2) / 2;  // int x2 dx2 over K's left edge
    CHECK(left_edge_flux > 0);

    // and accordingly the actual duct field must take a negative first
    // component somewhere (the return flow)
    Loop4Spec sp{3.0, 1.0, 0.08, 15};
    auto v = loop4_velocity(sp);
    double vmin = 0;
    for (int i = 0; i <= 64; ++i) {
        Vec2 p{-3.0 + 6.0 * i / 64, 0.5};
        vmin = std::min(vmin, v.value(p).x);
    }
    CHECK(vmin <= -sp.eps * sp.eps / 2);
}
