#include <catch2/catch_amalgamated.hpp>

#include "nsif/elliptic.hpp"

using namespace nsif;

TEST_CASE("complete elliptic integrals against reference values") {
    auto e0 = elliptic_KE(0.0);
    CHECK(e0.K == Catch::Approx(M_PI_2).epsilon(1e-14));
    CHECK(e0.E == Catch::Approx(M_PI_2).epsilon(1e-14));

    // K(0.5), E(0.5) (parameter convention m = k^2)
    auto eh = elliptic_KE(0.5);
    CHECK(eh.K == Catch::Approx(1.854074677301372).epsilon(1e-13));
    CHECK(eh.E == Catch::Approx(1.350643881047676).epsilon(1e-13));

    auto e9 = elliptic_KE(0.9);
    CHECK(e9.K == Catch::Approx(2.578092113348173).epsilon(1e-12));
    CHECK(e9.E == Catch::Approx(1.104774732704073).epsilon(1e-12));
}

TEST_CASE("Legendre relation over the whole range") {
    for (double m : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.95, 0.999}) {
        auto a = elliptic_KE(m), b = elliptic_KE(1 - m);
        double legendre = a.E * b.K + b.E * a.K - a.K * b.K;
        CHECK(legendre == Catch::Approx(M_PI_2).epsilon(1e-12));
    }
}

TEST_CASE("derivatives agree with finite differences") {
    // Richardson-extrapolated central differences; steps sized against the
    // cancellation floor of dK at small m
    auto rich = [](auto&& f, double m, double h) {
        double c1 = (f(m + h) - f(m - h)) / (2 * h);
        double c2 = (f(m + h / 2) - f(m - h / 2)) / h;
        return (4 * c2 - c1) / 3;
    };
    for (double m : {1e-4, 0.05, 0.3, 0.6, 0.9}) {
        auto c = elliptic_KE(m);
        double h1 = std::min(std::max(1e-7, 1e-3 * m), (1 - m) / 8);
        CHECK(c.dK == Catch::Approx(rich([](double t) { return elliptic_KE(t).K; }, m, h1))
                          .epsilon(1e-6));
        CHECK(c.dE == Catch::Approx(rich([](double t) { return elliptic_KE(t).E; }, m, h1))
                          .epsilon(1e-6));
        double h2 = std::min({std::max(1e-5, 3e-3 * m), (1 - m) / 8, m / 2});
        CHECK(c.d2K == Catch::Approx(rich([](double t) { return elliptic_KE(t).dK; }, m, h2))
                           .epsilon(1e-4));
    }
}

TEST_CASE("domain guard") {
    CHECK_THROWS_AS(elliptic_KE(-0.1), NumericError);
    CHECK_THROWS_AS(elliptic_KE(1.0), NumericError);
}

TEST_CASE("series and AGM paths agree at the switch") {
    auto a = elliptic_KE(1.0000001e-8);  // AGM side
    auto b = elliptic_KE(0.9999999e-8);  // series side
    CHECK(a.K == Catch::Approx(b.K).epsilon(1e-12));
    CHECK(a.E == Catch::Approx(b.E).epsilon(1e-12));
    CHECK(a.dK == Catch::Approx(b.dK).epsilon(1e-7));
    CHECK(a.dE == Catch::Approx(b.dE).epsilon(1e-7));
}
