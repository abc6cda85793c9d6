#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nsif/cutoff.hpp"
#include "nsif/field2d.hpp"
#include "nsif/stream.hpp"
#include "nsif/structure.hpp"

using namespace nsif;

namespace {

ScalarField2 poly_field(std::function<Sample(Vec2)> fn) {
    return make_scalar({{-100, -100}, {100, 100}}, std::move(fn));
}

}  // namespace

TEST_CASE("operator L on closed forms") {
    // f = x2^2: Laplacian 2, f_y/y = 2, f/y^2 = 1 -> L = 3 at (0,1)
    auto f = poly_field([](Vec2 p) { return Sample{p.y * p.y, 0, 2 * p.y, 0, 0, 2}; });
    CHECK(apply_L(f, {0, 1}) == Catch::Approx(3.0).margin(1e-14));

    // f = x2: L vanishes identically off the axis
    auto g = poly_field([](Vec2 p) { return Sample{p.y, 0, 1, 0, 0, 0}; });
    for (double y : {0.2, 1.0, 5.0, 17.0})
        CHECK(apply_L(g, {0.3, y}) == Catch::Approx(0.0).margin(1e-14));

    CHECK_THROWS_AS(apply_L(g, {0, 0}), NumericError);
    CHECK_THROWS_AS(apply_L(g, {0, -1}), NumericError);
}

TEST_CASE("divided differences and the mean value property") {
    auto sq = [](double x) { return x * x; };
    CHECK(divided_difference2(sq, 0, 1, 2) == Catch::Approx(1.0).margin(1e-15));
    auto cube = [](double x) { return x * x * x; };
    CHECK(divided_difference2(cube, 0, 1, 2) == Catch::Approx(3.0).margin(1e-14));
    CHECK_THROWS_AS(divided_difference2(sq, 1, 1, 2), ConfigError);
    CHECK_THROWS_AS(divided_difference2(sq, 2, 1, 0), ConfigError);

    // sandwich: value lies in the hull of f''/2 over (a,c)
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        double w1 = U(rng), w2 = U(rng), ph = U(rng);
        auto f = [&](double x) { return std::sin(w1 * x + ph) + 0.3 * std::cos(w2 * x); };
        auto fpp = [&](double x) {
            return -w1 * w1 * std::sin(w1 * x + ph) - 0.3 * w2 * w2 * std::cos(w2 * x);
        };
        double a = U(rng), b = U(rng), c = U(rng);
        double lo = std::min({a, b, c}), hi = std::max({a, b, c});
        double mid = a + b + c - lo - hi;
        if (!(lo < mid && mid < hi)) continue;
        double val = divided_difference2(f, lo, mid, hi);
        double m = 1e300, M = -1e300;
        for (int i = 0; i <= 1000; ++i) {
            double x = lo + (hi - lo) * i / 1000.0;
            m = std::min(m, fpp(x) / 2);
            M = std::max(M, fpp(x) / 2);
        }
        CHECK(val >= m - 1e-9);
        CHECK(val <= M + 1e-9);
    }
}

TEST_CASE("rectangle cutoff: support, plateau, symmetry, band positivity") {
    Region U = Region::rectangle({{-1, 1.0 / 8}, {1, 7.0 / 8}});
    auto res = build_cutoff(U, 0.1, 1.0, {.grid_hint = 1.0 / 512});
    const auto& f = res.f;

    CHECK(res.delta > 0);
    CHECK(res.delta < 0.1);
    CHECK(res.cert.pass());

    // plateau value
    CHECK(f.value({0, 0.5}) == 1.0);
    // zero outside the closure
    CHECK(f.value({1.2, 0.5}) == 0.0);
    CHECK(f.value({0, 0.9}) == 0.0);
    CHECK(f.value({0, 1.0 / 16}) == 0.0);

    // even symmetry about the vertical axis, to roundoff
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ux(0, 1), uy(1.0 / 8, 7.0 / 8);
    for (int i = 0; i < 100; ++i) {
        double x = ux(rng), y = uy(rng);
        CHECK(f.value({-x, y}) == Catch::Approx(f.value({x, y})).margin(1e-15));
    }

    // Lf > 0 at grid points of the band U \ U_delta (grid 1/512)
    double h = 1.0 / 512;
    double worst = 1e300;
    int band_pts = 0;
    for (double x = -1 + h; x < 1; x += h)
        for (double y : {1.0 / 8 + h, 1.0 / 8 + 2 * h, 7.0 / 8 - h, 7.0 / 8 - 2 * h}) {
            Vec2 p{x, y};
            if (!U.contains(p) || U.boundary_distance(p) >= res.delta) continue;
            ++band_pts;
            worst = std::min(worst, apply_L(f, p));
        }
    INFO("band points " << band_pts << " worst " << worst);
    CHECK(band_pts > 0);
    CHECK(worst > 0);

    CHECK_THROWS_AS(build_cutoff(U, 0.5, 1.0), ConfigError);  // eta too large
}

TEST_CASE("edge profile satisfies the second-derivative bands") {
    // f'' > 0, 0 < f' < (x-a) f'', f < (x-a)^2 f'' on (a, a+delta)
    PlateauProfile pr(0, 2, 0.1, 1.0 / 512);
    double delta = pr.edge_width();
    for (int i = 1; i <= 40; ++i) {
        double t = delta * 0.1 + (0.89 * delta) * i / 40.0;
        Jet3 j = pr.at(t);
        if (j.f == 0) continue;  // below double range
        CAPTURE(t);
        CHECK(j.d2 > 0);
        CHECK(j.d1 > 0);
        CHECK(j.d1 < t * j.d2);
        CHECK(j.f < t * t * j.d2);
    }
}

TEST_CASE("L of a product cutoff splits into 1D parts") {
    Region U = Region::rectangle({{-1, 1.0 / 8}, {1, 7.0 / 8}});
    auto res = build_cutoff(U, 0.1, 1.0, {.grid_hint = 1.0 / 512});
    PlateauProfile p1(-1, 1, 0.1, 1.0 / 512), p2(1.0 / 8, 7.0 / 8, 0.1, 1.0 / 512);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ux(-0.99, 0.99), uy(0.13, 0.87);
    for (int i = 0; i < 300; ++i) {
        Vec2 p{ux(rng), uy(rng)};
        Jet3 a = p1.at(p.x), b = p2.at(p.y);
        double g1 = a.d2;
        double g2 = b.d2 + b.d1 / p.y - b.f / (p.y * p.y);
        double split = g1 * b.f + a.f * g2;
        double direct = apply_L(res.f, p);
        CHECK(direct == Catch::Approx(split).epsilon(1e-10).margin(1e-13));
    }
}

TEST_CASE("ring cutoff: support shape and band positivity") {
    Region U = Region::ring({{-2, 0.5}, {2, 3}}, {{-1, 1}, {1, 2}});
    auto res = build_cutoff(U, 0.15, 2.0);
    const auto& f = res.f;
    CHECK(f.value({0, 1.5}) == 0.0);             // inside the hole
    CHECK(f.value({0, 0.75}) > 0.0);             // in the ring
    CHECK(f.value({1.5, 2.7}) > 0.0);            // in the ring
    CHECK(f.value({0, 0.4}) == 0.0);             // outside
    CHECK(f.value({0, 2.6}) == Catch::Approx(2.0));  // plateau (far from both walls)
    CHECK(res.cert.pass());
    CHECK(res.delta > 0);
}

TEST_CASE("structure validation passes for a recipe build and fails when forced") {
    Region U = Region::rectangle({{-1, 1.0 / 8}, {1, 7.0 / 8}});
    auto cf = build_cutoff(U, 0.1, 1.0, {.grid_hint = 1.0 / 512});
    AnnulusSpec an;  // default: centered loop well inside the plateau
    auto dv = build_divfree_v(U, an);
    REQUIRE(dv.cert.pass());
    ScalarField2 phi = plateau_cutoff(U, cf.delta, 1.0 / 512);

    Structure S{U, dv.v, cf.f, phi, 0.1, cf.delta, 1.0};
    auto rep = validate_structure(S);
    for (const auto& c : rep.clauses) {
        CAPTURE(c.name, c.margin);
        CHECK(c.pass);
    }

    // scaling the swirl by a in (-1,1) preserves the structure
    Structure Sa = S;
    Sa.v = scaled(dv.v, -0.6);
    CHECK(validate_structure(Sa).pass());

    // halving f while |v| > f/2 somewhere must fail the domination clause
    Structure Sbad = S;
    Sbad.f = scaled(cf.f, 0.25);
    auto bad = validate_structure(Sbad);
    CHECK_FALSE(bad.pass());
    const Clause* cl = bad.find("f_dominates_v");
    REQUIRE(cl != nullptr);
    CHECK_FALSE(cl->pass);
}
