// Energies, distances, rotation numbers, convexity and admissibility.
#include "elastica/energy.hh"
#include "elastica/surgery.hh"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

using namespace elastica;

namespace {

PlanarCurve circle(int m, double L, std::size_t n) {
    return PlanarCurve::from_profile(Grid::uniform(L, n), std::vector<double>(n, 2 * kPi * m / L));
}

} // namespace

TEST_CASE("unit circle energy") {
    const auto c = circle(1, 2 * kPi, 4001);
    CHECK(std::abs(energy(c, EnergyDensity::power(2)) - 2 * kPi) <= 1e-6);
}

TEST_CASE("m-fold circle energies match the closed form") {
    for (int m : {1, 2, 3})
        for (double p : {1.5, 2.0, 3.0})
            for (double L : {1.0, 2 * kPi, 7.5}) {
                const double want = std::pow(2 * kPi * m, p) * std::pow(L, 1 - p);
                CHECK(std::abs(bending_energy(circle(m, L, 4001), p) - want) <= 1e-6 * want);
            }
}

TEST_CASE("energy estimate and error bar") {
    const Grid g = Grid::uniform(1.0, 401);
    std::vector<double> k(g.n);
    for (std::size_t i = 0; i < g.n; ++i) k[i] = std::sin(3 * g.s(i)) + 2;
    const auto est = energy_estimate(PlanarCurve::from_profile(g, k), EnergyDensity::power(2));
    // int_0^1 (sin 3s + 2)^2 ds
    const double exact = 4.5 - std::sin(6.0) / 12 + (4.0 / 3) * (1 - std::cos(3.0));
    CHECK(std::abs(est.value - exact) <= 2 * est.error_bar);
    CHECK(est.error_bar <= 10 * g.h * g.h);
    CHECK(est.error_bar > 0);
}

TEST_CASE("energy is additive over node-aligned concatenation") {
    const Grid g = Grid::uniform(1.0, 201);
    std::vector<double> k(g.n);
    for (std::size_t i = 0; i < g.n; ++i) k[i] = std::cos(5 * g.s(i));
    const auto c = PlanarCurve::from_profile(g, k);
    const auto f = EnergyDensity::power(3);
    const double whole = energy(c, f);
    const double parts = energy(restrict(c, 0, 0.35), f) + energy(restrict(c, 0.35, 1), f);
    CHECK(std::abs(whole - parts) <= 1e-15 * whole);
}

TEST_CASE("non-finite densities are rejected") {
    EnergyDensity bad;
    bad.f = [](double x) { return x > 0.5 ? std::numeric_limits<double>::infinity() : x; };
    bad.label = "bad";
    CHECK_THROWS_AS(energy(circle(1, 2 * kPi, 11), bad), Error);
    try {
        energy(circle(1, 2 * kPi, 11), bad);
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::DensityDomainError);
    }
}

TEST_CASE("density parsing") {
    const auto d = EnergyDensity::parse("p:2.5");
    REQUIRE(d.p.has_value());
    CHECK(*d.p == 2.5);
    CHECK(std::abs(d.eval(1.7) - std::pow(1.7, 2.5)) <= 1e-12);
    const std::string path = "density_table_test.txt";
    {
        std::ofstream out(path);
        out << "0 0\n1 1\n2 4\n3 9\n";
    }
    const auto t = EnergyDensity::parse("table:" + path);
    CHECK(t.eval(1.5) == doctest::Approx(2.5));
    CHECK(t.eval(4.0) == doctest::Approx(14.0));
    std::remove(path.c_str());
    CHECK_THROWS_AS(EnergyDensity::parse("q:1"), Error);
    CHECK_THROWS_AS(EnergyDensity::table({0, 1}, {1, 0}), Error);
}

TEST_CASE("spatial bending energy") {
    const std::size_t n = 4001;
    const double L = 2 * kPi;
    std::vector<Vec3> circ(n), seg(n);
    // Chord-exact sampling of the unit circle.
    const double h = L / double(n - 1), d = 2 * std::asin(h / 2);
    for (std::size_t i = 0; i < n; ++i) {
        circ[i] = Vec3(std::cos(d * double(i)), std::sin(d * double(i)), 0);
        seg[i] = Vec3(h * double(i), 0, 0);
    }
    CHECK(std::abs(bending_energy_3d(SpaceCurve::from_points(Grid{n, h, L}, circ)) - 2 * kPi) <= 10 * h * h);
    CHECK(bending_energy_3d(SpaceCurve::from_points(Grid{n, h, L}, seg)) <= 1e-15);
    std::vector<Vec3> fast(n);
    for (std::size_t i = 0; i < n; ++i) fast[i] = 1.01 * seg[i];
    CHECK_THROWS_AS(bending_energy_3d(SpaceCurve::from_points(Grid{n, h, L}, fast)), Error);
}

TEST_CASE("profile distance") {
    const auto a = circle(1, 2 * kPi, 401);
    CHECK(profile_distance(a, a, 2) == 0.0);
    const auto b = a.rotated(1e-3, a.base_point());
    CHECK(profile_distance(a, b, 2) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK_THROWS_AS(profile_distance(a, circle(1, 2 * kPi, 402), 2), Error);

    // Metric axioms on random triples.
    std::mt19937 rng(5);
    std::normal_distribution<double> N(0, 1);
    const Grid g = Grid::uniform(1.0, 101);
    auto rnd = [&] {
        std::vector<double> k(g.n);
        for (auto &v : k) v = N(rng);
        return PlanarCurve::from_profile(g, k, Vec2(N(rng), N(rng)), N(rng));
    };
    for (int t = 0; t < 50; ++t) {
        const auto x = rnd(), y = rnd(), z = rnd();
        for (double p : {1.5, 2.0, 3.0}) {
            CHECK(profile_distance(x, y, p) == doctest::Approx(profile_distance(y, x, p)).epsilon(1e-14));
            CHECK(profile_distance(x, z, p) <= profile_distance(x, y, p) + profile_distance(y, z, p) + 1e-14);
        }
    }
}

TEST_CASE("rotation numbers") {
    CHECK(std::abs(rotation_number(circle(1, 2 * kPi, 4001)).value - 1) <= 1e-8);
    const auto r3 = rotation_number(circle(3, 2 * kPi, 4001));
    CHECK(std::abs(r3.value - 3) <= 1e-8);
    CHECK(r3.rounded == 3);
    const auto rot = rotation_number(circle(3, 2 * kPi, 4001).rotated(0.4, Vec2(2, 1)));
    CHECK(std::abs(rot.value - 3) <= 1e-8);
    const auto open = PlanarCurve::from_profile(Grid::uniform(1, 11), std::vector<double>(11, 0.0));
    CHECK_THROWS_AS(rotation_number(open), Error);
}

TEST_CASE("convexity probe") {
    SUBCASE("worked inequalities") {
        const auto f2 = EnergyDensity::power(2), f3 = EnergyDensity::power(3);
        CHECK(2 * f2.eval(1.0 / 2) == doctest::Approx(0.5));
        CHECK(1.5 * f3.eval(2 / 1.5) == doctest::Approx(3.5555555555555554));
        CHECK(1.5 * f3.eval(2 / 1.5) < f3.eval(2));
    }
    for (double p : {1.1, 1.5, 2.0, 3.0, 5.0, 8.0}) {
        const auto rep = convexity_probe(EnergyDensity::power(p));
        CHECK(rep.passed);
        CHECK(rep.min_scaling_margin > 0);
        CHECK(rep.min_midpoint_margin > 0);
    }
    try {
        convexity_probe(EnergyDensity::power(1.0));
        FAIL("linear density accepted");
    } catch (const ProbeFailure &e) {
        CHECK(e.code() == ErrorCode::ProbeFailed);
        CHECK(e.t > 0);
        CHECK(e.lambda > 1);
    }
    EnergyDensity concave;
    concave.f = [](double x) { return std::sqrt(x); };
    concave.label = "sqrt";
    CHECK_THROWS_AS(convexity_probe(concave), ProbeFailure);
    // A constant offset is removed before testing.
    EnergyDensity shifted;
    shifted.f = [](double x) { return 1 + x * x; };
    shifted.label = "1+x^2";
    const auto rep = convexity_probe(shifted);
    CHECK(rep.f0 == 1.0);
    CHECK(rep.passed);
}

TEST_CASE("admissibility residuals") {
    const auto seg = PlanarCurve::from_profile(Grid::uniform(1, 11), std::vector<double>(11, 0.0));
    CHECK(length(seg) == 1.0);
    const auto bc = BoundaryCondition::clamped(Vec2(0, 0), Vec2(0.999, 0), Vec2(1, 0), Vec2(1, 0), 1.0);
    const auto r = check_admissible(seg, bc);
    CHECK(r.tangent_start == 0.0);
    CHECK(r.end == doctest::Approx(1e-3));
    const auto circ = circle(1, 2 * kPi, 101);
    const auto rc = check_admissible(circ, BoundaryCondition::closed(2 * kPi));
    CHECK(rc.constrained <= 1e-3);
    CHECK_THROWS_AS(BoundaryCondition::pinned(1.0, 1.0), Error);
    CHECK(BoundaryCondition::pinned(0.3, 2.0).r() == doctest::Approx(0.3));
}
