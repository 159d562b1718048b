// Concatenation, restriction and the planar/spatial surgery primitives.
#include "elastica/energy.hh"
#include "elastica/surgery.hh"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace elastica;

namespace {

PlanarCurve segment(Vec2 from, double len, std::size_t n = 11, double angle = 0) {
    return PlanarCurve::from_profile(Grid::uniform(len, n), std::vector<double>(n, 0.0), from, angle);
}

PlanarCurve profile(double L, std::size_t n, double (*k)(double)) {
    const Grid g = Grid::uniform(L, n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = k(g.s(i));
    return PlanarCurve::from_profile(g, v);
}

PlanarCurve random_curve(std::mt19937 &rng, std::size_t n) {
    std::normal_distribution<double> N(0, 1);
    const double a = N(rng), b = N(rng), c = N(rng);
    const Grid g = Grid::uniform(1.5, n);
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = a + b * std::sin(3 * g.s(i)) + c * std::cos(7 * g.s(i));
    return PlanarCurve::from_profile(g, k, Vec2(N(rng), N(rng)), N(rng));
}

double max_gap(const std::vector<Vec2> &a, const std::vector<Vec2> &b) {
    REQUIRE(a.size() == b.size());
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a[i] - b[i]).norm());
    return m;
}

// Helix sampled so that every chord equals h.
SpaceCurve helix(double r, double c, double turns, std::size_t n, double &omega) {
    omega = 1 / std::sqrt(r * r + c * c);
    const double L = turns * 2 * kPi / omega, h = L / double(n - 1);
    const double w = omega;
    auto chord = [&](double d) { return std::hypot(2 * r * std::sin(w * d / 2), c * w * d); };
    double d = h;
    for (int it = 0; it < 50; ++it) d *= h / chord(d);
    std::vector<Vec3> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = d * double(i);
        x[i] = Vec3(r * std::cos(omega * s), r * std::sin(omega * s), c * omega * s);
    }
    return SpaceCurve::from_points(Grid{n, h, L}, x);
}

} // namespace

TEST_CASE("concat translates later parts") {
    const auto c = concat({segment(Vec2(0, 0), 1), segment(Vec2(5, 5), 1)});
    const auto rec = reconstruct(c);
    CHECK((rec.x.back() - Vec2(2, 0)).norm() < 1e-14);
    CHECK(c.length() == 2.0);
    CHECK_THROWS_AS(concat(std::vector<PlanarCurve>{}), Error);
}

TEST_CASE("concat is associative and length additive") {
    std::mt19937 rng(1);
    const auto a = random_curve(rng, 101), b = random_curve(rng, 51), c = random_curve(rng, 81);
    const auto left = concat({concat({a, b}), c}), right = concat({a, concat({b, c})});
    CHECK(max_gap(reconstruct(left).x, reconstruct(right).x) <= 1e-12);
    CHECK(left.length() == a.length() + b.length() + c.length());
    const Vec2 P(3, -1);
    CHECK(max_gap(reconstruct(concat({prepend_point(P, a), b})).x, reconstruct(prepend_point(P, concat({a, b}))).x) <=
          1e-12);
}

TEST_CASE("prepend_point keeps the profile") {
    std::mt19937 rng(2);
    const auto a = random_curve(rng, 101);
    const auto b = prepend_point(Vec2(1, 1), a);
    CHECK(b.k() == a.k());
    CHECK((reconstruct(b).x.front() - Vec2(1, 1)).norm() == 0.0);
    const auto same = prepend_point(a.base_point(), a);
    CHECK(max_gap(reconstruct(same).x, reconstruct(a).x) == 0.0);
}

TEST_CASE("restrict and reverse") {
    std::mt19937 rng(3);
    const auto a = random_curve(rng, 201);
    const auto full = restrict(a, 0, a.length());
    CHECK(max_gap(reconstruct(full).x, reconstruct(a).x) == 0.0);
    const auto rr = reverse(reverse(a));
    CHECK(max_gap(reconstruct(rr).x, reconstruct(a).x) <= 1e-12);
    const auto r = reverse(a);
    CHECK(r.k().front() == -a.k().back());
    CHECK(energy(r, EnergyDensity::power(2)) == doctest::Approx(energy(a, EnergyDensity::power(2))).epsilon(1e-14));
    CHECK_THROWS_AS(restrict(a, 0.5, 0.5), Error);
    CHECK_THROWS_AS(restrict(a, -1, 0.5), Error);
    const auto mid = restrict(a, 0.3, 0.9);
    CHECK(mid.length() == doctest::Approx(0.6).epsilon(1e-12));
    const auto rec = reconstruct(a), rm = reconstruct(mid);
    CHECK((rm.x.back() - rec.x[snap_node(a, 0.9)]).norm() <= 1e-13);
}

TEST_CASE("rotate180 of a segment retraces it") {
    const auto s = segment(Vec2(0, 0), 1, 21);
    const auto out = rotate180_about(s, 0, 1, Vec2(0.5, 0));
    CHECK(max_gap(reconstruct(out).x, reconstruct(s).x) <= 1e-15);
}

TEST_CASE("rotate180 at one period") {
    // Orbit-like profile; one period turns the tangent by 2 pi.
    const auto c = profile(2.0, 2401, [](double s) { return 2 * kPi * (1 + 0.5 * std::sin(2 * kPi * s)); });
    const double a = 0.3, b = 1.3;
    const auto rec = reconstruct(c);
    const Vec2 mid = 0.5 * (rec.x[snap_node(c, a)] + rec.x[snap_node(c, b)]);
    const auto out = rotate180_about(c, a, b, mid);
    const auto f = EnergyDensity::power(2);
    CHECK(std::abs(energy(out, f) - energy(c, f)) <= 1e-12 * energy(c, f));
    CHECK(out.length() == doctest::Approx(c.length()).epsilon(1e-15));
    const auto js = out.junctions();
    REQUIRE(js.size() == 2);
    const double ka = c.k()[snap_node(c, a)];
    for (const auto &j : js) {
        CHECK(j.jump() == doctest::Approx(2 * std::abs(ka)).epsilon(1e-12));
        CHECK(std::abs(j.turn) <= 10 * c.grid().h * c.grid().h);
    }
    // Middle is -gamma(a+b-s) + 2c.
    const auto ro = reconstruct(out);
    const std::size_t ia = snap_node(c, a), ib = snap_node(c, b);
    double err = 0;
    for (std::size_t i = ia; i <= ib; ++i) err = std::max(err, (ro.x[i] - (2 * mid - rec.x[ia + ib - i])).norm());
    CHECK(err <= 1e-12);
}

TEST_CASE("rescale_segment") {
    const auto circle = profile(2 * kPi, 801, [](double) { return 1.0; });
    CHECK(max_gap(reconstruct(rescale_segment(circle, 1, 3, 1.0)).x, reconstruct(circle).x) <= 1e-14);
    const auto sc = rescale_segment(circle, 1, 3, 2.0);
    const std::size_t ia = snap_node(circle, 1), ib = snap_node(circle, 3);
    const double sa = circle.grid().s(ia), sb = circle.grid().s(ib);
    CHECK(sc.length() == doctest::Approx(2 * kPi + (sb - sa)).epsilon(1e-14));
    CHECK(sc.pieces()[1].k[5] == 0.5);
    CHECK_THROWS_AS(rescale_segment(circle, 1, 3, 0.0), Error);
    CHECK_THROWS_AS(rescale_segment(circle, 3, 1, 2.0), Error);
    // Whole-curve scaling law B_p[lambda g] = lambda^{1-p} B_p[g].
    for (double p : {1.5, 2.0, 3.0}) {
        const double lam = 1.37;
        const auto big = rescale_segment(circle, 0, 2 * kPi, lam);
        CHECK(bending_energy(big, p) ==
              doctest::Approx(std::pow(lam, 1 - p) * bending_energy(circle, p)).epsilon(1e-8));
    }
}

TEST_CASE("odd extension") {
    const auto seg = segment(Vec2(0, 0), 1, 11);
    const auto ext = odd_extend(seg);
    const auto rec = reconstruct(ext.curve);
    for (std::size_t i = 0; i < rec.x.size(); ++i) {
        CHECK(rec.x[i].x() == doctest::Approx(-1.0 + 0.1 * double(i)).epsilon(1e-14));
        CHECK(std::abs(rec.x[i].y()) < 1e-15);
    }
    const auto wave = profile(1.0, 101, [](double s) { return 1 + std::sin(4 * s); }).translated(Vec2(2, 3));
    const auto e2 = odd_extend(wave);
    CHECK((e2.translation - Vec2(-2, -3)).norm() == 0.0);
    const auto kl = e2.curve.k_left(), kr = e2.curve.k_right();
    const std::size_t mid = 100;
    for (std::size_t i = 0; i <= 100; ++i) CHECK(std::abs(kr[mid + i]) == std::abs(kl[mid - i]));
    // gamma_ext(-s) = -gamma(s).
    const auto r2 = reconstruct(e2.curve), rw = reconstruct(prepend_point(Vec2::Zero(), wave));
    double err = 0;
    for (std::size_t i = 0; i <= 100; ++i) err = std::max(err, (r2.x[mid - i] + rw.x[i]).norm());
    CHECK(err <= 1e-13);
}

TEST_CASE("energy invariance under rigid motions, reverse and reflection") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_curve(rng, 301);
        for (double p : {1.5, 2.0, 3.0}) {
            const auto f = EnergyDensity::power(p);
            const double F = energy(c, f);
            CHECK(std::abs(energy(c.rotated(0.3 * trial, Vec2(1, 2)), f) - F) <= 1e-12 * F);
            CHECK(std::abs(energy(c.translated(Vec2(5, -7)), f) - F) <= 1e-12 * F);
            CHECK(std::abs(energy(reverse(c), f) - F) <= 1e-12 * F);
            // Mirror image: negated profile.
            auto k = c.k();
            for (auto &v : k) v = -v;
            const auto m = PlanarCurve::from_profile(c.grid(), k, c.base_point(), -c.base_angle());
            CHECK(std::abs(energy(m, f) - F) <= 1e-12 * F);
        }
    }
}

TEST_CASE("spatial concat and prepend") {
    double w = 0;
    const auto h = helix(0.5, 0.2, 2, 801, w);
    const double L = h.length();
    const auto a = restrict(h, 0, 0.4 * L), b = restrict(h, 0.4 * L, L);
    const auto ab = concat({prepend_point(Vec3(10, 0, 0), a), b});
    CHECK(ab.length() == doctest::Approx(L).epsilon(1e-14));
    CHECK((ab.start() - Vec3(10, 0, 0)).norm() == 0.0);
    CHECK(bending_energy_3d(ab) == doctest::Approx(bending_energy_3d(h)).epsilon(1e-13));
}

TEST_CASE("reflection of a two-turn helix about a radial plane") {
    double w = 0;
    const double r = 0.5, c = 0.2;
    const auto h = helix(r, c, 2, 4001, w);
    const double period = 2 * kPi / w;
    const double a = 0.25 * period, b = a + period;
    const std::size_t ia = snap_node(h, a);
    const Vec3 pa = h.points()[ia];
    const Vec3 omega = Vec3(pa.x(), pa.y(), 0).normalized();
    // Plane through gamma(a) containing the axis direction.
    const auto out = reflect_about_plane(h, a, b, pa, omega);
    const double B = bending_energy_3d(h), Bo = bending_energy_3d(out);
    CHECK(std::abs(Bo - B) <= 1e-12 * B);
    CHECK(out.length() == doctest::Approx(h.length()).epsilon(1e-14));
    const auto &k0 = curvature_vectors(out.pieces()[0]).back();
    const auto &k1 = curvature_vectors(out.pieces()[1]).front();
    CHECK((k1 - k0).norm() == doctest::Approx(2 * std::abs(k0.dot(omega))).epsilon(1e-10));
    CHECK((k1 - k0).norm() == doctest::Approx(2 * r * w * w).epsilon(1e-5));
    // C1 at both cuts.
    for (std::size_t i = 0; i + 1 < out.pieces().size(); ++i) {
        const Vec3 t0 = tangents(out.pieces()[i]).back(), t1 = tangents(out.pieces()[i + 1]).front();
        CHECK((t1 - t0).norm() <= 10 * h.grid().h * h.grid().h);
    }
    CHECK_THROWS_AS(reflect_about_plane(h, a, b, pa, 2 * omega), Error);
    CHECK_THROWS_AS(reflect_about_plane(h, b, a, pa, omega), Error);
}

TEST_CASE("reflection about a plane containing the arc is the identity") {
    double w = 0;
    const auto flat = helix(1.0, 0.0, 1, 401, w);
    const auto out = reflect_about_plane(flat, 1.0, 4.0, Vec3::Zero(), Vec3(0, 0, 1));
    const auto p0 = flat.points(), p1 = out.points();
    for (std::size_t i = 0; i < p0.size(); ++i) CHECK((p0[i] - p1[i]).norm() <= 1e-14);
}

TEST_CASE("rotation about an axis") {
    double w = 0;
    const auto circ3 = helix(1.0, 0.0, 3, 3001, w);  // three-fold circle in the xy plane
    const double T = 2 * kPi;
    const std::size_t ia = snap_node(circ3, T);
    const Vec3 pa = circ3.points()[ia];
    const Vec3 ta = tangents(circ3.pieces()[0])[ia];
    SUBCASE("zero angle") {
        const auto out = rotate_about_axis(circ3, T, 2 * T, pa, ta, 0.0);
        const auto p0 = circ3.points(), p1 = out.points();
        for (std::size_t i = 0; i < p0.size(); ++i) CHECK((p0[i] - p1[i]).norm() <= 1e-13);
    }
    SUBCASE("angle 0.1") {
        const auto out = rotate_about_axis(circ3, T, 2 * T, pa, ta, 0.1);
        const double B = bending_energy_3d(circ3);
        CHECK(std::abs(bending_energy_3d(out) - B) <= 1e-12 * B);
        const Vec3 k0 = curvature_vectors(out.pieces()[0]).back(), k1 = curvature_vectors(out.pieces()[1]).front();
        const double ang = std::acos(k0.normalized().dot(k1.normalized()));
        CHECK(ang == doctest::Approx(0.1).epsilon(1e-3));
    }
    CHECK_THROWS_AS(rotate_about_axis(circ3, T, 2 * T, pa, Vec3(1, 1, 0), 0.1), Error);
}

TEST_CASE("reparameterize a space curve to unit speed") {
    std::vector<Vec3> x;
    for (int i = 0; i <= 200; ++i) {
        const double u = double(i) / 200;
        x.emplace_back(u * u, 0, 0);  // non-uniform speed
    }
    const SpaceCurve raw({SpacePiece{0.005, x, {}}});
    const auto u = reparameterize(raw, 101);
    CHECK(unit_speed_residual(u) <= 1e-12);
    CHECK(u.length() == doctest::Approx(1.0));
}
