#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nsif/stream.hpp"

using namespace nsif;

TEST_CASE("annulus velocity: structurally divergence free, symmetric") {
    Region U = Region::rectangle({{-1, 1.0 / 8}, {1, 7.0 / 8}});
    AnnulusSpec an;
    auto res = build_divfree_v(U, an);
    CHECK(res.cert.pass());

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ux(-0.2, 0.2), uy(0.3, 0.7);
    double worst = 0;
    for (int i = 0; i < 500; ++i) {
        Vec2 p{ux(rng), uy(rng)};
        Sample2 s = res.v.at(p);
        double dv = p.y * (s.x.dx + s.y.dy) + s.y.v;
        worst = std::max(worst, std::abs(dv));
        // v1 even, v2 odd in x1
        Sample2 m = res.v.at({-p.x, p.y});
        CHECK(m.x.v == Catch::Approx(s.x.v).margin(1e-14));
        CHECK(m.y.v == Catch::Approx(-s.y.v).margin(1e-14));
    }
    CHECK(worst <= 1e-12);

    // support containment and an actually nonzero field
    CHECK(res.v.value({0, 0.5 + 0.19}).x != 0.0);
    CHECK(res.v.value({0.3, 0.5}).x == 0.0);
}

TEST_CASE("annulus derivative evaluators match finite differences") {
    // fourth-order stencils; the window ramps are steep so second-order
    // differences would be truncation-limited
    AnnulusSpec an;
    auto v = annulus_velocity(an);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ux(-0.12, 0.12), uy(0.39, 0.61);
    double h = 4e-5;
    auto d1 = [&](auto&& f, Vec2 p, int ax) {
        auto sh = [&](double t) { return ax ? f(Vec2{p.x, p.y + t}) : f(Vec2{p.x + t, p.y}); };
        return (8 * (sh(h) - sh(-h)) - (sh(2 * h) - sh(-2 * h))) / (12 * h);
    };
    auto d2 = [&](auto&& f, Vec2 p, int ax) {
        auto sh = [&](double t) { return ax ? f(Vec2{p.x, p.y + t}) : f(Vec2{p.x + t, p.y}); };
        return (-sh(2 * h) + 16 * sh(h) - 30 * sh(0) + 16 * sh(-h) - sh(-2 * h)) /
               (12 * h * h);
    };
    for (int i = 0; i < 100; ++i) {
        Vec2 p{ux(rng), uy(rng)};
        Sample2 s = v.at(p);
        auto vx = [&](Vec2 q) { return v.value(q).x; };
        auto vy = [&](Vec2 q) { return v.value(q).y; };
        CHECK(s.x.dx == Catch::Approx(d1(vx, p, 0)).epsilon(1e-5).margin(2e-7));
        CHECK(s.y.dy == Catch::Approx(d1(vy, p, 1)).epsilon(1e-5).margin(2e-7));
        CHECK(s.x.dyy == Catch::Approx(d2(vx, p, 1)).epsilon(2e-5).margin(3e-5));
    }
}

TEST_CASE("loop field: prescribed direction on the duct rectangle") {
    Loop4Spec sp{3.0, 1.0, 0.08, 21};
    auto v = loop4_velocity(sp);
    double er = sp.eps * sp.r;

    // exact (1,0) inside the duct rectangle
    for (Vec2 p : {Vec2{0, 0.5 * er}, Vec2{1.2, 0.3 * er}, Vec2{-1.5, 0.9 * er},
                   Vec2{sp.d - sp.r, 0.5 * er}}) {
        Sample2 s = v.at(p);
        CHECK(s.x.v == Catch::Approx(1.0).margin(1e-12));
        CHECK(s.y.v == Catch::Approx(0.0).margin(1e-12));
    }

    // structural divergence-free property, including near the region switches
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> ux(-sp.d, sp.d), uy(0.006 * er, 0.99 * sp.r);
    double worst = 0;
    for (int i = 0; i < 300; ++i) {
        Vec2 p{ux(rng), uy(rng)};
        Sample2 s = v.at(p);
        worst = std::max(worst, std::abs(p.y * (s.x.dx + s.y.dy) + s.y.v));
    }
    CHECK(worst <= 1e-10);

    // return flow in the top duct is -eps^2 in the first component
    Sample2 top = v.at({0, 0.5 * sp.r});
    CHECK(top.x.v == Catch::Approx(-sp.eps * sp.eps).margin(1e-8));
    CHECK(top.y.v == Catch::Approx(0.0).margin(1e-8));

    // riser carries the O(eps) vertical leg
    Sample2 ris = v.at({sp.d - 0.3 * sp.r, 0.4 * er});
    CHECK(ris.y.v > 0);
    CHECK(std::abs(ris.y.v) <= sp.eps / 2 * (1 + 1e-6));

    // the excluded middle box is a true hole
    CHECK(std::abs(v.value({0, 0.09 * sp.r}).x) < 1e-12);
    CHECK(std::abs(v.value({0, 0.09 * sp.r}).y) < 1e-12);
}

TEST_CASE("loop field component bounds") {
    Loop4Spec sp{3.0, 1.0, 0.08, 21};
    auto v = loop4_velocity(sp);
    double er = sp.eps * sp.r;
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> ux(-sp.d, sp.d), uy(0.005 * er, sp.r);
    double tol = 1e-6;
    for (int i = 0; i < 2000; ++i) {
        Vec2 p{ux(rng), uy(rng)};
        Vec2 val = v.value(p);
        CAPTURE(p.x, p.y, val.x, val.y);
        CHECK(val.x >= -sp.eps * sp.eps - tol);
        CHECK(val.x <= 1 + tol);
        CHECK(std::abs(val.y) <= sp.eps / 2 * (1 + 1e-6) + tol);
    }
}
