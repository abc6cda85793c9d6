#include <catch2/catch_amalgamated.hpp>

#include "nsif/oscillator.hpp"

using namespace nsif;

TEST_CASE("square wave values at the reference times") {
    double T = 2.7;
    OscProcess b1{1, 1, 1, T}, b2{2, 1, 1, T};
    CHECK(b1.eval(T / 8) == 1.0);
    CHECK(b1.eval(3 * T / 8) == -1.0);
    CHECK(b1.eval(3 * T / 4) == 0.0);
    CHECK(b2.eval(T / 4) == 1.0);
    CHECK(b2.eval(3 * T / 4) == -1.0);

    // periodic extension
    CHECK(b1.eval(T + T / 8) == 1.0);
    CHECK(b1.eval(-T + T / 8) == 1.0);

    // pair compression: the second pair runs 4x faster
    OscProcess b1m2{1, 2, 1, T};
    CHECK(b1m2.eval(T / 32) == 1.0);
}

TEST_CASE("picking: the (2,1) pair extracts T/2 (f(1)-f(0)), others vanish") {
    double T = 1.9;
    OscProcess b1{1, 1, 1, T}, b2{2, 1, 1, T};
    auto f = [](double, double a) { return a * a; };
    double got21 = pick_integral(b2, b1, f, T);
    CHECK(got21 == Catch::Approx(T / 2 * (1.0 - 0.0)).epsilon(1e-14));
    double got11 = pick_integral(b1, b1, f, T);
    CHECK(got11 == Catch::Approx(0.0).margin(1e-14));
    double got12 = pick_integral(b1, b2, f, T);
    CHECK(got12 == Catch::Approx(0.0).margin(1e-14));
    double got22 = pick_integral(b2, b2, f, T);
    CHECK(got22 == Catch::Approx(0.0).margin(1e-14));

    auto odd = [](double, double a) { return a; };
    CHECK_THROWS_AS(pick_integral(b2, b1, odd, T), ConfigError);
}

TEST_CASE("pick error halves when the frequency doubles, uniformly in t") {
    double T = 1.0;
    auto f = [T](double s, double a) { return std::sin(2 * M_PI * s / T) * a * a; };
    auto limit = [T](double t) {
        // (1/2) int_0^t (f(s,1) - f(s,0)) ds in closed form
        return 0.5 * (T / (2 * M_PI)) * (1 - std::cos(2 * M_PI * t / T));
    };
    auto sup_err = [&](int k) {
        OscProcess b1{1, 1, k, T}, b2{2, 1, k, T};
        double worst = 0;
        for (int j = 1; j <= 100; ++j) {
            double t = j * T / 100;
            worst = std::max(worst, std::abs(pick_integral(b2, b1, f, t) - limit(t)));
        }
        return worst;
    };
    double e4 = sup_err(4), e8 = sup_err(8);
    CAPTURE(e4, e8);
    CHECK(e8 / e4 >= 0.35);
    CHECK(e8 / e4 <= 0.65);
}

TEST_CASE("smoothing: measure bound, range, and integral proximity") {
    double T = 1.0;
    int k = 8;
    OscProcess sq{1, 1, k, T};
    OscProcess sm = smooth(OscProcess{1, 1, 1, T}, k);

    // measure of the disagreement set is at most 1/k (dense sampling)
    int N = 200000, diff = 0;
    for (int i = 0; i < N; ++i) {
        double t = T * (i + 0.5) / N;
        if (sm.eval(t) != sq.eval(t)) ++diff;
        double val = sm.eval(t);
        CHECK(val >= -1.0);
        CHECK(val <= 1.0);
    }
    CHECK(double(diff) / N * T <= 1.0 / k * 1.05);

    // equal to the square wave at midpoints of constant pieces
    for (int j = 0; j < 4 * k; ++j) {
        double t = (j + 0.5) * T / (4 * k);
        CHECK(sm.eval(t) == sq.eval(t));
    }

    // pick integrals agree within 6 sup|f| / k
    OscProcess sq2{2, 1, k, T};
    OscProcess sm2 = smooth(OscProcess{2, 1, 1, T}, k);
    auto f = [T](double s, double a) { return std::cos(2 * M_PI * s / T) + a * a; };
    double N_f = 2.0;
    double a = pick_integral(sq2, sq, f, T);
    double b = pick_integral(sm2, sm, f, T);
    CHECK(std::abs(a - b) <= 6 * N_f / k);
}

TEST_CASE("cross-pair orthogonality decays with frequency") {
    double T = 1.0;
    auto f = [T](double s, double a) { return std::sin(2 * M_PI * s / T) + a * a; };
    for (int m = 1; m <= 3; ++m)
        for (int n = 1; n <= 3; ++n) {
            if (m == n) continue;
            for (int k : {4, 8, 16}) {
                OscProcess bi{2, m, k, T}, bl{1, n, k, T};
                double val = std::abs(pick_integral(bi, bl, f, T));
                CAPTURE(m, n, k, val);
                CHECK(val <= 8.0 / k);
            }
        }
}

TEST_CASE("weak nullity against continuous integrands") {
    double T = 1.0;
    auto g = [T](double s) { return std::exp(std::sin(2 * M_PI * s / T) + s); };
    for (int role : {1, 2}) {
        double prev = 1e300;
        for (int k : {8, 32, 128}) {
            OscProcess b{role, 1, k, T};
            double worst = 0;
            for (int j = 1; j <= 20; ++j) {
                double t = j * T / 20;
                double val = pick_integral(
                    b, b, [&](double s, double) { return g(s); }, t);
                worst = std::max(worst, std::abs(val));
            }
            CHECK(worst < prev);
            prev = worst;
        }
        CHECK(prev <= 0.05);
    }
}
