#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "conetool/spectrum.hpp"

using namespace conetool;

TEST_CASE("circle spectrum closed form") {
    auto s = circle_spectrum(1.0, 2);
    REQUIRE(s.n == 1);
    REQUIRE(s.entries.size() == 3);
    CHECK(s.entries[0].lambda == 0.0);
    CHECK(s.entries[0].multiplicity == 1);
    CHECK(s.entries[1].lambda == -1.0);
    CHECK(s.entries[1].multiplicity == 2);
    CHECK(s.entries[2].lambda == -4.0);
    CHECK(s.entries[2].multiplicity == 2);

    auto half = circle_spectrum(0.5, 1);
    CHECK(half.entries[1].lambda == -4.0);

    auto wide = circle_spectrum(2.0, 3);
    CHECK(wide.entries[1].lambda == -0.25);
    CHECK(wide.entries[2].lambda == -1.0);
    CHECK(wide.entries[3].lambda == -2.25);
}

TEST_CASE("circle spectrum rejects bad input") {
    CHECK_THROWS_AS(circle_spectrum(0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(circle_spectrum(-1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(circle_spectrum(1.0, 0), std::invalid_argument);
}

TEST_CASE("sphere spectrum closed form") {
    auto s2 = sphere_spectrum(2, 1.0, 2);
    CHECK(s2.entries[0].lambda == 0.0);
    CHECK(s2.entries[0].multiplicity == 1);
    CHECK(s2.entries[1].lambda == -2.0);
    CHECK(s2.entries[1].multiplicity == 3);
    CHECK(s2.entries[2].lambda == -6.0);
    CHECK(s2.entries[2].multiplicity == 5);

    auto s3 = sphere_spectrum(3, 1.0, 1);
    CHECK(s3.entries[1].lambda == -3.0);
    CHECK(s3.entries[1].multiplicity == 4);

    auto scaled = sphere_spectrum(2, 2.0, 1);
    CHECK(scaled.entries[1].lambda == -0.5);

    CHECK_THROWS_AS(sphere_spectrum(1, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(sphere_spectrum(2, -1.0, 2), std::invalid_argument);
}

TEST_CASE("sphere multiplicities match the harmonic dimension formula") {
    // n=2: 2l+1; n=3: (l+1)²
    for (int l = 0; l <= 8; ++l) {
        CHECK(sphere_multiplicity(l, 2) == 2 * l + 1);
        CHECK(sphere_multiplicity(l, 3) == (l + 1) * (l + 1));
    }
}

TEST_CASE("custom spectrum validation") {
    auto ok = custom_spectrum({{0.0, 1}, {-2.0, 3}}, 2);
    CHECK(ok.entries.size() == 2);
    CHECK(ok.entries[1].lambda == -2.0);

    CHECK_THROWS_WITH(custom_spectrum({{-2.0, 3}}, 2),
                      Catch::Matchers::ContainsSubstring("eigenvalue 0 missing"));
    CHECK_THROWS_WITH(custom_spectrum({{0.0, 1}, {1.0, 1}}, 2),
                      Catch::Matchers::ContainsSubstring("positive eigenvalue"));
    CHECK_THROWS_WITH(custom_spectrum({{0.0, 1}, {-2.0, 1}, {-2.0, 2}}, 2),
                      Catch::Matchers::ContainsSubstring("duplicate"));
    // unsorted input is sorted, not rejected
    auto sorted = custom_spectrum({{-4.0, 2}, {0.0, 1}, {-1.0, 2}}, 1);
    CHECK(sorted.entries[0].lambda == 0.0);
    CHECK(sorted.entries[1].lambda == -1.0);
    CHECK(sorted.entries[2].lambda == -4.0);
}

TEST_CASE("lambda1 returns the greatest negative eigenvalue") {
    CHECK(lambda1(circle_spectrum(1.0, 4)) == -1.0);
    CHECK(lambda1(sphere_spectrum(2, 1.0, 3)) == -2.0);
    CHECK_THROWS_AS(lambda1(custom_spectrum({{0.0, 1}}, 1)), std::invalid_argument);
}

TEST_CASE("generated spectra satisfy ordering invariants", "[property]") {
    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> adist(0.1, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        double a = adist(rng);
        auto s = circle_spectrum(a, 6);
        REQUIRE(s.entries[0].lambda == 0.0);
        for (std::size_t j = 1; j < s.entries.size(); ++j) {
            REQUIRE(s.entries[j].lambda < s.entries[j - 1].lambda);
            REQUIRE(s.entries[j].lambda < 0.0);
        }
        // lambda1 ∘ circle_spectrum = −1/a²
        REQUIRE_THAT(lambda1(s), Catch::Matchers::WithinRel(-1.0 / (a * a), 1e-14));
    }
    for (int n = 2; n <= 4; ++n) {
        auto s = sphere_spectrum(n, 1.0, 6);
        for (int l = 0; l <= 6; ++l)
            REQUIRE(s.entries[static_cast<std::size_t>(l)].lambda == -double(l) * (l + n - 1));
    }
}

TEST_CASE("lambda_for_mode agrees with spectra") {
    auto c = CrossSection::circle(2.0);
    CHECK(lambda_for_mode(c, 3) == -2.25);
    CHECK(lambda_for_mode(c, -3) == -2.25);
    auto s = CrossSection::round_sphere(2, 1.0);
    CHECK(lambda_for_mode(s, 2) == -6.0);
}
