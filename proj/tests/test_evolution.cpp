#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <random>

#include "nsif/evolution.hpp"

using namespace nsif;

namespace {

// desk-scale two-structure configuration: the reference structure and a
// second rectangle with its own swirl, disjoint supports, O(1) horizon
struct Desk {
    ReferenceStructure r1;
    Region U2 = Region::rectangle({{1.7, 1.0 / 8}, {3.7, 7.0 / 8}});
    AnnulusSpec an2{{2.7, 0.5}, 0.10, 0.26, 0.8};
    std::unique_ptr<Evolution> ev;

    Desk() {
        r1 = make_reference_structure();
        auto cf2 = build_cutoff(U2, 0.1, 2.0);
        auto dv2 = build_divfree_v(U2, an2);
        if (!dv2.cert.pass()) throw std::runtime_error("desk: pair-2 divergence failed");
        ScalarField2 phi2 = plateau_cutoff(U2, cf2.delta);
        Structure S2{U2, dv2.v, cf2.f, phi2, cf2.eta, cf2.delta, 2.0};
        EvolutionPair p1{r1.S, r1.flay, r1.vlay};
        EvolutionPair p2{S2, SourceLayout::rect({U2.outer}, cf2.xbreaks, cf2.ybreaks),
                         SourceLayout::polar_around({an2.center, annulus_radial_breaks(an2)})};
        ev = std::make_unique<Evolution>(p1, p2, 1.0, 0.05);
    }
};

Desk& desk() {
    static Desk d;
    return d;
}

}  // namespace

TEST_CASE("decay rate and viscosity ceiling are positive and conforming") {
    auto& d = desk();
    CHECK(d.ev->delta() > 0);
    double nu0 = d.ev->select_nu0({16, 16});
    CHECK(nu0 > 0);
    CHECK(nu0 * d.ev->max_udlap_h() <= d.ev->delta() / 8 * (1 + 1e-12));
}

TEST_CASE("profiles at time zero and the exact decay identity") {
    auto& d = desk();
    const Evolution& ev = *d.ev;
    for (Vec2 x : {Vec2{0.0, 0.5}, Vec2{0.3, 0.3}, Vec2{2.7, 0.5}, Vec2{2.2, 0.7}}) {
        auto c = ev.cache_point(x);
        for (int i = 0; i < 2; ++i) {
            CHECK(ev.q2_of(c, i, 0.0, 16) == Catch::Approx(c.f2[i]).margin(1e-14));
            CHECK(ev.h2sq_of(c, i, 0.0) == Catch::Approx(c.f2[i]).margin(1e-14));
        }
    }

    // at a point carrying no swirl the time derivative is exactly
    // -2 delta (phi1 + phi2)
    Vec2 x{0.55, 0.62};  // inside U1's plateau, off the swirl ring
    auto c = ev.cache_point(x);
    REQUIRE(c.v[0].value().norm() == 0.0);
    REQUIRE(c.phi[0] == Catch::Approx(1.0).margin(1e-12));
    for (double t : {0.1, 0.5, 0.9}) {
        double want = -2 * ev.delta() * (c.phi[0] + c.phi[1]);
        double got = ev.dq2dt_of(c, 0, t, 16) + ev.dq2dt_of(c, 1, t, 16);
        CHECK(got == Catch::Approx(want).margin(1e-15));
    }
}

TEST_CASE("time derivative of q^2 matches finite differences") {
    auto& d = desk();
    const Evolution& ev = *d.ev;
    int k = 16;
    // generic points (avoiding oscillator jump times)
    for (Vec2 x : {Vec2{0.0, 0.62}, Vec2{2.7, 0.62}, Vec2{0.13, 0.35}}) {
        auto c = ev.cache_point(x);
        for (double t : {0.203, 0.5071, 0.817}) {
            double ht = 1e-6;
            for (int i = 0; i < 2; ++i) {
                double fd = (ev.q2_of(c, i, t + ht, k) - ev.q2_of(c, i, t - ht, k)) / (2 * ht);
                double an = ev.dq2dt_of(c, i, t, k);
                CHECK(an == Catch::Approx(fd).epsilon(1e-6).margin(1e-9));
            }
        }
    }
}

TEST_CASE("q converges to h uniformly as the frequency doubles") {
    auto& d = desk();
    const Evolution& ev = *d.ev;
    std::vector<Vec2> pts;
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; b <= 6; ++b) {
            pts.push_back({-0.9 + 1.8 * a / 6.0, 0.2 + 0.55 * b / 6.0});
            pts.push_back({1.8 + 1.8 * a / 6.0, 0.2 + 0.55 * b / 6.0});
        }
    std::vector<Evolution::PointCache> cs;
    for (Vec2 p : pts) cs.push_back(ev.cache_point(p));
    double prev = 1e300;
    for (int k : {16, 32, 64}) {
        double worst = 0;
        for (const auto& c : cs)
            for (double t : {0.31, 0.67, 1.0}) {
                double q1 = std::sqrt(std::max(0.0, ev.q2_of(c, 0, t, k)));
                double q2 = std::sqrt(std::max(0.0, ev.q2_of(c, 1, t, k)));
                double ht2 = ev.h2sq_of(c, 0, t) + ev.h2sq_of(c, 1, t);
                worst = std::max(worst, std::abs((q1 + q2) * (q1 + q2) - ht2));
            }
        CAPTURE(k, worst, prev);
        CHECK(worst <= 0.75 * prev);
        prev = worst;
    }
}

TEST_CASE("frequency selection meets both closeness conditions") {
    auto& d = desk();
    auto rows = d.ev->select_k(4, 16);
    REQUIRE(!rows.empty());
    CHECK(rows.back().pass_conv1);
    CHECK(rows.back().pass_conv2);
    CHECK(d.ev->k() >= 16);
    // the recorded ladder must show improvement
    if (rows.size() >= 2) {
        CHECK(rows.back().grad_gap + rows.back().pressure_gap <
              rows.front().grad_gap + rows.front().pressure_gap);
    }
}

TEST_CASE("velocity at time zero has the prescribed magnitude and no divergence") {
    auto& d = desk();
    const Evolution& ev = *d.ev;
    int k = d.ev->k() > 0 ? d.ev->k() : 64;
    AxisymField u1 = ev.velocity_part(0, 0.0, k);
    AxisymField u2 = ev.velocity_part(1, 0.0, k);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ux(-0.9, 0.9), ur(0.2, 0.8), uphi(0, 2 * M_PI);
    double worst = 0, wdiv = 0;
    for (int i = 0; i < 24; ++i) {
        double phi = uphi(rng), rho = ur(rng);
        Vec3 p{ux(rng), rho * std::cos(phi), rho * std::sin(phi)};
        double want = d.r1.S.f.value(cyl_project(p));
        double got = (u1.eval(p) + u2.eval(p)).norm();
        worst = std::max(worst, std::abs(got - want));
        wdiv = std::max(wdiv, std::abs(u1.divergence(p)));
    }
    CHECK(worst <= 1e-9);
    CHECK(wdiv <= 1e-6);
}

TEST_CASE("inequality residual lies in the certified band") {
    auto& d = desk();
    const Evolution& ev = *d.ev;
    if (d.ev->k() == 0) d.ev->select_k(4, 16);
    if (d.ev->nu0() == 0) d.ev->select_nu0({16, 16});
    int k = d.ev->k();
    double delta = ev.delta(), nu0 = ev.nu0();

    std::vector<Vec2> pts;
    for (int a = 0; a <= 5; ++a)
        for (int b = 0; b <= 5; ++b) {
            pts.push_back({-0.85 + 1.7 * a / 5.0, 0.2 + 0.55 * b / 5.0});
            pts.push_back({1.85 + 1.7 * a / 5.0, 0.2 + 0.55 * b / 5.0});
        }
    pts.push_back({5.0, 0.5});  // outside both supports
    std::vector<double> ts{0.213, 0.492, 0.801};
    std::vector<double> nus{0.0, nu0 / 2, nu0};
    auto rows = ev.sweep_residual(pts, ts, nus, k);
    double tol_num = 1e-6;
    double lo = 0, hi = 0;
    for (const auto& r : rows) {
        lo = std::min(lo, r.value);
        hi = std::max(hi, r.value);
        CAPTURE(r.x.x, r.x.y, r.t, r.nu, r.value, r.on_swirl);
        CHECK(r.value <= tol_num);
        CHECK(r.value >= -(3 * delta + tol_num));
    }
    INFO("residual range [" << lo << ", " << hi << "], band -(3 delta)=" << -3 * delta);
    CHECK(lo < 0);  // the decay mechanism is visible

    // outside the supports the residual vanishes identically
    auto out = ev.sweep_residual({{5.0, 0.5}}, {0.5}, {nu0}, k);
    CHECK(out[0].value == 0.0);
}
