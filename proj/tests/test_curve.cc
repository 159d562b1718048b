// Reconstruction, curvature recovery and rigid motions.
#include "elastica/curve.hh"
#include "elastica/error.hh"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace elastica;

namespace {

std::vector<double> sample(const Grid &g, double (*f)(double, double)) {
    std::vector<double> k(g.n);
    for (std::size_t i = 0; i < g.n; ++i) k[i] = f(g.s(i), g.L);
    return k;
}

Vec2 sine_endpoint(std::size_t n) {
    const Grid g = Grid::uniform(1.0, n);
    auto c = PlanarCurve::from_profile(g, sample(g, [](double s, double L) { return std::sin(2 * kPi * s / L); }));
    return reconstruct(c).x.back();
}

} // namespace

TEST_CASE("grid spacing and snapping") {
    const Grid g = Grid::uniform(2.0, 401);
    CHECK(g.h * double(g.n - 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.snap(0.0126) == 3);
    CHECK(g.snap(5.0) == 400);
    CHECK_THROWS_AS(Grid::uniform(1.0, 1), Error);
    CHECK_THROWS_AS(Grid::uniform(0.0, 10), Error);
}

TEST_CASE("zero curvature reconstructs the segment") {
    const Grid g = Grid::uniform(1.0, 101);
    const auto rec = reconstruct(PlanarCurve::from_profile(g, std::vector<double>(g.n, 0.0)));
    for (std::size_t i = 0; i < g.n; ++i) {
        CHECK(rec.x[i].x() == doctest::Approx(g.s(i)).epsilon(1e-14));
        CHECK(std::abs(rec.x[i].y()) < 1e-15);
    }
}

TEST_CASE("unit curvature closes up to second order") {
    for (std::size_t n : {201u, 401u, 801u}) {
        const Grid g = Grid::uniform(2 * kPi, n);
        const auto rec = reconstruct(PlanarCurve::from_profile(g, std::vector<double>(n, 1.0)));
        CHECK((rec.x.back() - rec.x.front()).norm() <= 1.0 * g.h * g.h);
        // Chords shrink by cos(h/2), so the polygon radius is slightly small.
        CHECK(rec.x[(n - 1) / 2].y() == doctest::Approx(2.0).epsilon(g.h * g.h));
    }
}

TEST_CASE("sine profile endpoint converges at second order") {
    // Richardson reference from the 4x finer grid.
    const Vec2 e1 = sine_endpoint(201), e2 = sine_endpoint(801);
    const Vec2 ref = e2 + (e2 - e1) / 15.0;
    const double err1 = (e1 - ref).norm(), err2 = (e2 - ref).norm();
    CHECK(err1 / err2 == doctest::Approx(16.0).epsilon(0.05));
    const double h = 1.0 / 200;
    CHECK(err1 <= 1.0 * h * h);
}

TEST_CASE("Simpson reconstruction is more accurate than trapezoid") {
    const Grid g = Grid::uniform(1.0, 201);
    auto c = PlanarCurve::from_profile(g, sample(g, [](double s, double L) { return std::sin(2 * kPi * s / L); }));
    const Vec2 ref = sine_endpoint(6401);
    const double et = (reconstruct(c).x.back() - ref).norm();
    const double es = (reconstruct(c, Quadrature::Simpson).x.back() - ref).norm();
    CHECK(es < et);
}

TEST_CASE("curvature of sampled positions") {
    SUBCASE("segment") {
        std::vector<Vec2> x;
        for (int i = 0; i <= 100; ++i) x.emplace_back(0.01 * i * 0.6, 0.01 * i * 0.8);
        for (double k : curvature_of(x, 0.01)) CHECK(std::abs(k) < 1e-10);
    }
    SUBCASE("circle, both orientations") {
        const std::size_t n = 801;
        const double h = 2 * kPi / double(n - 1);
        // Exact samples have chord 2 sin(h/2), so speed residual ~ h^2/24.
        std::vector<Vec2> x, y;
        for (std::size_t i = 0; i < n; ++i) {
            x.emplace_back(std::cos(h * double(i)), std::sin(h * double(i)));
            y.emplace_back(std::cos(h * double(i)), -std::sin(h * double(i)));
        }
        const auto k = curvature_of(x, h, 1e-5), km = curvature_of(y, h, 1e-5);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(k[i] - 1) <= 2 * h * h);
            CHECK(std::abs(km[i] + 1) <= 2 * h * h);
        }
    }
    SUBCASE("speed violation") {
        std::vector<Vec2> x;
        for (int i = 0; i <= 10; ++i) x.emplace_back(0.02 * i, 0.0);
        CHECK_THROWS_AS(curvature_of(x, 0.01), Error);
    }
}

TEST_CASE("round trip reconstruct then curvature_of") {
    const Grid g = Grid::uniform(1.0, 801);
    const auto k = sample(g, [](double s, double) { return 3 + std::cos(5 * s); });
    const auto rec = reconstruct(PlanarCurve::from_profile(g, k));
    const auto k2 = curvature_of(rec.x, g.h, 1e-4);
    double err = 0;
    for (std::size_t i = 0; i < g.n; ++i) err = std::max(err, std::abs(k[i] - k2[i]));
    CHECK(err <= 50 * g.h * g.h);
}

TEST_CASE("helix curvature vectors") {
    const double r = 0.5, c = 0.3;
    const double w = 1 / std::sqrt(r * r + c * c);
    const std::size_t n = 1001;
    const double L = 2 * 2 * kPi / w, h = L / double(n - 1);
    std::vector<Vec3> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = h * double(i);
        x[i] = Vec3(r * std::cos(w * s), r * std::sin(w * s), c * w * s);
    }
    const auto curve = SpaceCurve::from_points(Grid{n, h, L}, x);
    for (const auto &kv : curvature_of(curve, 1e-4)) CHECK(std::abs(kv.norm() - r * w * w) <= 5 * h * h);
}

TEST_CASE("evaluation between nodes") {
    const Grid g = Grid::uniform(2 * kPi, 401);
    auto c = PlanarCurve::from_profile(g, std::vector<double>(g.n, 1.0));
    const auto rec = reconstruct(c);
    const double s = 1.234567;
    CHECK(curvature_at(c, s) == doctest::Approx(1.0));
    CHECK(angle_at(c, rec, s) == doctest::Approx(s).epsilon(1e-12));
    CHECK((position_at(c, rec, s) - Vec2(std::sin(s), 1 - std::cos(s))).norm() <= g.h * g.h);
    CHECK_THROWS_AS(curvature_at(c, 7.0), Error);
}

TEST_CASE("rigid motions are orthogonal") {
    const auto R = RigidMotion::rotation2(0.7, Vec2(1, 2));
    CHECK(R.orthogonality_residual() < 1e-12);
    CHECK((R.apply(Vec2(1, 2)) - Vec2(1, 2)).norm() < 1e-15);
    const auto P = RigidMotion::point_reflection2(Vec2(1, 0));
    CHECK((P.apply(Vec2(0, 0)) - Vec2(2, 0)).norm() < 1e-15);
    const auto M = RigidMotion::plane_reflection(Vec3(0, 0, 1), Vec3(0, 0, 1));
    CHECK(M.determinant() == doctest::Approx(-1));
    CHECK((M.apply(Vec3(0, 0, 3)) - Vec3(0, 0, -1)).norm() < 1e-15);
    CHECK_THROWS_AS(RigidMotion::plane_reflection(Vec3::Zero(), Vec3(0, 0, 2)), Error);
    CHECK_THROWS_AS(RigidMotion::axis_rotation(Vec3::Zero(), Vec3(0, 1, 1), 0.1), Error);
    const auto A = RigidMotion::axis_rotation(Vec3::Zero(), Vec3(0, 0, 1), kPi / 2);
    CHECK((A.apply(Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-15);
}

TEST_CASE("flatten rejects corners") {
    const Grid g = Grid::uniform(1.0, 11);
    CurvePiece a{g.h, std::vector<double>(11, 0.0), 0.0}, b{g.h, std::vector<double>(11, 0.0), 1.0};
    PlanarCurve c(Vec2::Zero(), {a, b});
    CHECK(c.node_count() == 21);
    CHECK(c.junctions().size() == 1);
    CHECK(c.junctions()[0].turn == doctest::Approx(1.0));
    CHECK_THROWS_AS(c.flatten(), Error);
}
