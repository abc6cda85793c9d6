#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nsif/cantor.hpp"

using namespace nsif;

TEST_CASE("composition maps: closed form equals explicit composition") {
    IFSParams s{0.5, 2, 0.0, 0.0, 2.0};
    // beta_1(beta_2(x)) = 0.25 x + 1
    double got = pi_m(s, {1, 2}, 3.0);
    CHECK(got == Catch::Approx(0.25 * 3.0 + 1.0).epsilon(1e-15));

    // all-ones multiindex collapses to the pure contraction
    IFSParams s2{0.4, 3, 0.7, 0.0, 1.5};
    double x = 1.3;
    int j = 5;
    double tj = std::pow(s2.tau, j);
    CHECK(pi_m(s2, {1, 1, 1, 1, 1}, x) ==
          Catch::Approx(tj * x + s2.z1 * (1 - tj) / (1 - s2.tau)).epsilon(1e-14));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(-3, 3);
    std::uniform_int_distribution<int> um(1, 3), uj(1, 8);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<int> m(uj(rng));
        for (auto& mk : m) mk = um(rng);
        double xx = ux(rng);
        CHECK(std::abs(pi_m(s2, m, xx) - pi_m_composed(s2, m, xx)) <= 1e-12);
    }

    CHECK_THROWS_AS(pi_m(s2, {1, 4}, 0.0), ConfigError);
}

TEST_CASE("stage boxes: counts, nesting, disjointness, separation") {
    IFSParams s{1.0 / 3, 2, 0.0, 0.0, 2.0 / 3};
    Box3 seed{{0, 0, 0}, {1, 1, 1}};
    auto stages = iterate_boxes(s, seed, 6);
    CHECK(stages[0].boxes.size() == 1);
    CHECK(stages[2].boxes.size() == 4);
    CHECK(stages[6].boxes.size() == 64);
    double zeta = stages[1].min_separation;
    CHECK(zeta > 0);
    for (int j = 1; j <= 6; ++j) {
        CHECK(stages[j].pairwise_disjoint);
        CHECK(stages[j].nested_in_previous);
        CHECK(stages[j].min_separation >=
              std::pow(s.tau, j - 1) * zeta * (1 - 1e-12));
    }
    CHECK_THROWS_AS(iterate_boxes(s, seed, 30), ConfigError);
}

TEST_CASE("projection of the stage set is the interval iterate") {
    IFSParams s{1.0 / 3, 2, 0.0, 0.0, 2.0 / 3};
    Box3 seed{{0, 0, 0}, {1, 1, 1}};
    auto stages = iterate_boxes(s, seed, 4);
    auto ivs = stage_intervals(s, {0, 1}, 4);
    REQUIRE(stages[4].boxes.size() == ivs.size());
    for (size_t i = 0; i < ivs.size(); ++i) {
        CHECK(stages[4].boxes[i].lo.x == Catch::Approx(ivs[i].lo).margin(1e-15));
        CHECK(stages[4].boxes[i].hi.x == Catch::Approx(ivs[i].hi).margin(1e-15));
    }
}

TEST_CASE("dimension: closed forms and box counting") {
    IFSParams c13{1.0 / 3, 2, 0, 0, 2.0 / 3};
    CHECK(c13.dimension() == Catch::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
    CHECK(c13.dimension() == Catch::Approx(0.6309297535714574).epsilon(1e-12));

    IFSParams c34{1.0 / 4, 3, 0, 0, 3.0 / 8};
    CHECK(c34.dimension() == Catch::Approx(std::log(3.0) / std::log(4.0)).epsilon(1e-12));
    CHECK(c34.dimension() == Catch::Approx(0.7924812503605781).epsilon(1e-12));

    auto fit13 = box_counting_dimension(c13, {0, 1}, 6);
    CHECK(fit13.dimension == Catch::Approx(c13.dimension()).epsilon(0.10));
    auto fit34 = box_counting_dimension(c34, {0, 1}, 6);
    CHECK(fit34.dimension == Catch::Approx(c34.dimension()).epsilon(0.10));
}

TEST_CASE("parameter feasibility ties to the target dimension") {
    IFSParams ok{0.2, 3, 0, 0, 1};
    ok.validate(0.5);  // 0.2^0.5 * 3 = 1.34 >= 1
    CHECK(ok.dimension() >= 0.5);

    IFSParams bad{0.1, 2, 0, 0, 1};
    CHECK_THROWS_AS(bad.validate(0.9), ConfigError);  // 0.1^0.9*2 < 1

    IFSParams nonContracting{0.5, 3, 0, 0, 1};
    CHECK_THROWS_AS(nonContracting.validate(), ConfigError);  // tau M >= 1
}
