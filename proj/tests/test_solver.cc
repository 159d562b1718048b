// Critical points, flat-core loops, helices, gradient flow and the
// second-variation probe.
#include "elastica/profiles.hh"
#include "elastica/solver.hh"
#include "elastica/surgery.hh"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace elastica;

namespace {

ErrorCode code_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("no exception");
    return ErrorCode::SchemaError;
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto cross = [](Vec2 u, Vec2 v) { return u.x() * v.y() - u.y() * v.x(); };
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return d1 * d2 < 0 && d3 * d4 < 0;
}

bool self_intersects(const PlanarCurve &c) {
    const auto x = reconstruct(c).x;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        for (std::size_t j = i + 2; j + 1 < x.size(); ++j)
            if (segments_cross(x[i], x[i + 1], x[j], x[j + 1])) return true;
    return false;
}

int sign_changes(const std::vector<double> &k) {
    int n = 0;
    for (std::size_t i = 0; i + 1 < k.size(); ++i) n += k[i] * k[i + 1] < 0;
    return n;
}

} // namespace

TEST_CASE("exponent range") {
    CHECK_NOTHROW(check_exponent(1.05, false));
    CHECK_NOTHROW(check_exponent(10, false));
    CHECK(code_of([] { check_exponent(1.01, false); }) == ErrorCode::BadRange);
    CHECK(code_of([] { check_exponent(12, false); }) == ErrorCode::BadRange);
    CHECK_NOTHROW(check_exponent(12, true));
    CHECK(code_of([] { check_exponent(1.0, true); }) == ErrorCode::BadRange);
}

TEST_CASE("sine amplitude parameter") {
    for (double r : {0.0, 0.3, 0.6, 0.95}) {
        const double B = sine_amplitude_parameter(r, PinnedKind::Arc);
        CHECK(std::cyl_bessel_j(0.0, B) == doctest::Approx(r).epsilon(1e-12));
    }
    const double B = sine_amplitude_parameter(0.3, PinnedKind::Loop);
    CHECK(std::cyl_bessel_j(0.0, B) == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(B > 2.4048);
    CHECK(code_of([] { sine_amplitude_parameter(0.41, PinnedKind::Loop); }) == ErrorCode::ModeNotFound);
    CHECK(code_of([] { make_pinned_mode(2, 0.45, 1, PinnedKind::Loop); }) == ErrorCode::ModeNotFound);
}

TEST_CASE("closed circles") {
    const auto c1 = make_circle(2, 1, 2 * kPi);
    CHECK(bending_energy(c1.curve, 2) == doctest::Approx(2 * kPi).epsilon(1e-12));
    const auto c2 = make_circle(3, 2, 2 * kPi);
    CHECK(bending_energy(c2.curve, 3) == doctest::Approx(16 * kPi).epsilon(1e-12));
    CHECK(c2.residual <= 1e-9);
    CHECK(rotation_number(c2.curve).rounded == 2);

    // A wobbly start with one full turn relaxes to the round circle.
    const double L = 3.0;
    const Grid g = Grid::uniform(L, 1001);
    std::vector<double> k(g.n);
    for (std::size_t i = 0; i < g.n; ++i) k[i] = 2 * kPi / L * (1 + 0.05 * std::sin(4 * kPi * g.s(i) / L));
    const auto cp = solve_critical(BoundaryCondition::closed(L), 2, PlanarCurve::from_profile(g, k));
    for (double v : cp.curve.k()) CHECK(std::abs(v - 2 * kPi / L) <= 1e-8);
    CHECK(cp.constraint_residual <= 1e-10);
}

TEST_CASE("pinned modes") {
    SUBCASE("(2, 0.6) arc is convex and embedded") {
        const auto cp = make_pinned_mode(2, 0.6, 1, PinnedKind::Arc);
        CHECK(cp.residual <= 1e-9);
        CHECK(cp.constraint_residual <= 1e-8);
        CHECK(fold_index(Profile::of(cp.curve)).m == 1);
        CHECK(sign_changes(cp.curve.k()) == 0);
        CHECK_FALSE(self_intersects(restrict_nodes(cp.curve, 0, cp.curve.k().size() - 1)));
        const double h = cp.curve.grid().h;
        const auto sym = verify_pinned_symmetry(cp.curve);
        CHECK(sym.chord == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(sym.x <= 10 * h * h);
        CHECK(sym.y <= 10 * h * h);
        CHECK(std::abs(cp.curve.k().front()) <= 10 * h * h);
        CHECK(std::abs(cp.curve.k().back()) <= 10 * h * h);
    }
    SUBCASE("(2, 0.3) loop crosses itself") {
        const auto cp = make_pinned_mode(2, 0.3, 1, PinnedKind::Loop, 1.0, 1001);
        CHECK(self_intersects(cp.curve));
        CHECK(fold_index(Profile::of(cp.curve)).m == 1);
    }
    SUBCASE("two-fold arc") {
        const auto cp = make_pinned_mode(2, 0.3, 2, PinnedKind::Arc);
        const auto fi = fold_index(Profile::of(cp.curve));
        CHECK(fi.m == 2);
        const auto z = inflections(Profile::of(cp.curve));
        REQUIRE(z.size() == 3);
        CHECK(z[0] == doctest::Approx(0.0));
        CHECK(z[1] == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(z[2] == doctest::Approx(1.0));
    }
    SUBCASE("p = 3 arc") {
        const auto cp = make_pinned_mode(3, 0.4, 1, PinnedKind::Arc);
        CHECK(fold_index(Profile::of(cp.curve)).m == 1);
        CHECK(cp.residual <= 1e-9);
    }
    SUBCASE("p < 2 modes keep their kind and scale like n^p") {
        for (double p : {1.2, 1.5}) {
            for (auto kind : {PinnedKind::Arc, PinnedKind::Loop}) {
                const auto one = make_pinned_mode(p, 0.3, 1, kind, 1.0, 801);
                CHECK(one.residual <= 1e-9);
                CHECK(self_intersects(one.curve) == (kind == PinnedKind::Loop));
                const double h = one.curve.grid().h;
                CHECK(std::abs(one.curve.k().front()) <= 10 * h * h);
                CHECK(std::abs(one.curve.k().back()) <= 10 * h * h);
                const double E1 = bending_energy(one.curve, p);
                for (int n : {2, 3}) {
                    const auto cp = make_pinned_mode(p, 0.3, n, kind, 1.0, 801);
                    CHECK(bending_energy(cp.curve, p) == doctest::Approx(std::pow(n, p) * E1).epsilon(1e-4));
                }
            }
        }
    }
    SUBCASE("three-fold mode is well periodic with T = L/3") {
        const double L = 1.5;
        const auto cp = make_pinned_mode(2, 0.3, 3, PinnedKind::Arc, L, 3001);
        const auto w = detect_well_periodic(Profile::of(cp.curve));
        CHECK(w.T == doctest::Approx(L / 3).epsilon(1e-8));
    }
}

TEST_CASE("figure-eight") {
    const auto f = make_figure_eight(2, 1, 1.0, 8001);
    CHECK(std::abs(rotation_number(f.curve).value) <= 1e-4);
    // Euler's figure-eight: k = 2 q lam cn(lam s, q) with 2E(q^2) = K(q^2), so
    // B L = 64 K^2 (q^2 - 1/2) = 112.43960974132139.
    const double BL = bending_energy(f.curve, 2) * f.curve.length();
    MESSAGE("figure-eight B*L at n=8001: " << doctest::toString(BL).c_str());
    CHECK(BL == doctest::Approx(112.43960974132139).epsilon(1e-6));
    const auto f2 = make_figure_eight(3, 2, 2.0, 2001);
    CHECK(std::abs(rotation_number(f2.curve).value) <= 1e-4);
    CHECK(fold_index(Profile::of(f2.curve)).m == 4);
}

TEST_CASE("flat-core loop") {
    for (double p : {3.0, 2.1, 4.0}) {
        const auto loop = make_flatcore_loop(p);
        CHECK(loop.f2_residual <= 1e-6);
        CHECK(loop.f3_min_interior > 0);
        CHECK(loop.f3_end_residual <= 1e-6);
        CHECK(loop.f4_residual <= 1e-6);
        // Horizontal force balance on the first integral gives chord 1/(p-1).
        CHECK(loop.chord == doctest::Approx(1 / (p - 1)).epsilon(1e-4));
    }
    CHECK(code_of([] { make_flatcore_loop(2.0); }) == ErrorCode::UnsupportedExponent);
    CHECK(code_of([] { make_flatcore_loop(1.5); }) == ErrorCode::UnsupportedExponent);
}

TEST_CASE("flat-core assembly") {
    FlatCoreDecomposition d{{+1, -1}, {0.5, 0.0, 0.5}};
    CHECK_FALSE(d.quasi_alternating());
    d.seg_lengths = {0.5, 0.2, 0.5};
    CHECK(d.quasi_alternating());
    FlatCoreDecomposition same{{+1, +1}, {0.5, 0.0, 0.5}};
    CHECK(same.quasi_alternating());
    CHECK_FALSE((FlatCoreDecomposition{{+1}, {0.0, 0.5}}).quasi_alternating());

    const auto loop = make_flatcore_loop(3);
    const auto c = assemble_flatcore(loop, d);
    CHECK(c.length() == doctest::Approx(d.total_length()).epsilon(1e-12));
    const auto rec = reconstruct(c);
    // Endpoint lies on the axis at total segment length plus two chords.
    CHECK(std::abs(rec.x.back().y()) <= 1e-9);
    CHECK(rec.x.back().x() == doctest::Approx(1.2 + 2 * loop.chord).epsilon(1e-9));
    CHECK(classify_pelastica(c) == PElasticaClass::Flatcore);
    for (const auto &j : c.junctions()) CHECK(std::abs(j.turn) <= 1e-9);
}

TEST_CASE("helix") {
    const auto hx = make_helix(1.0, 0.5, 2.0, 2001);
    CHECK(unit_speed_residual(hx) <= 1e-8);
    const auto flat = make_helix(0.7, 0.0, 1.0, 1001);
    for (const auto &x : flat.points()) {
        CHECK(std::abs(x.z()) == 0.0);
        CHECK(std::hypot(x.x(), x.y()) == doctest::Approx(0.7).epsilon(1e-14));
    }
    CHECK(code_of([] { make_helix(-1, 0, 1, 10); }) == ErrorCode::BadRange);
}

TEST_CASE("gradient flow") {
    SUBCASE("critical start stays put") {
        const auto cp = make_pinned_mode(2, 0.6, 1, PinnedKind::Arc, 1.0, 801);
        FlowOptions o;
        o.max_iter = 50;
        const auto tr = gradient_flow(cp.curve, cp.bc, 2, o);
        CHECK(std::abs(tr.energies.back() - tr.energies.front()) <= 1e-10);
    }
    SUBCASE("perturbed arc relaxes monotonically") {
        const auto cp = make_pinned_mode(3, 0.4, 1, PinnedKind::Arc, 1.0, 801);
        const Grid g = cp.curve.grid();
        std::vector<double> k = cp.curve.k();
        for (std::size_t i = 0; i < g.n; ++i) k[i] += 0.5 * std::sin(3 * kPi * g.s(i));
        const auto start = PlanarCurve::from_profile(g, k, Vec2::Zero(), cp.curve.base_angle());
        FlowOptions o;
        o.max_iter = 3000;
        const auto tr = gradient_flow(start, cp.bc, 3, o);
        for (std::size_t i = 1; i < tr.energies.size(); ++i) CHECK(tr.energies[i] <= tr.energies[i - 1]);
        for (double r : tr.residuals) CHECK(r <= 1e-6);
        const double F = bending_energy(cp.curve, 3);
        CHECK(tr.energies.back() == doctest::Approx(F).epsilon(1e-6));
        CHECK(check_admissible(tr.final_curve, cp.bc).constrained <= 1e-6);
    }
    SUBCASE("unstable arc escapes") {
        const auto cp = make_pinned_mode(2, 0.3, 2, PinnedKind::Arc, 1.0, 801);
        const Grid g = cp.curve.grid();
        std::vector<double> k = cp.curve.k();
        for (std::size_t i = 0; i < g.n; ++i) k[i] += 1e-3 * std::sin(kPi * g.s(i));
        const auto start = PlanarCurve::from_profile(g, k, Vec2::Zero(), cp.curve.base_angle());
        const double F = bending_energy(cp.curve, 2);
        FlowOptions o;
        o.stop_below = 0.9 * F;
        o.time_budget = 20;
        const auto tr = gradient_flow(start, cp.bc, 2, o);
        CHECK(tr.energies.back() < 0.9 * F);
    }
    SUBCASE("projection failure") {
        const auto seg = PlanarCurve::from_profile(Grid::uniform(1, 101), std::vector<double>(101, 0.0));
        const auto bc = BoundaryCondition::clamped(Vec2(0, 0), Vec2(0.999, 0), Vec2(-1, 0), Vec2(-1, 0), 1.0);
        CHECK(code_of([&] { project_admissible(seg, bc); }) == ErrorCode::ProjectionFailed);
    }
}

TEST_CASE("stability probe") {
    const std::size_t n = 401;
    const auto circle = stability_probe(make_circle(2, 1, 2 * kPi, n));
    CHECK(circle.stable);
    CHECK(circle.asymmetry <= 1e-6);
    CHECK(stability_probe(make_figure_eight(2, 1, 1.0, n)).stable);
    const auto f2 = stability_probe(make_figure_eight(2, 2, 1.0, n));
    CHECK_FALSE(f2.stable);
    CHECK(f2.min_eigenvalue < -0.1 * f2.scale);
    CHECK_FALSE(stability_probe(make_pinned_mode(2, 0.3, 2, PinnedKind::Arc, 1.0, n)).stable);
    CHECK(stability_probe(make_pinned_mode(2, 0.6, 1, PinnedKind::Arc, 1.0, n)).stable);
}

TEST_CASE("classification") {
    CHECK(classify_pelastica(make_circle(2, 2, 1.0, 201).curve) == PElasticaClass::Circular);
    CHECK(classify_pelastica(make_pinned_mode(2, 0.3, 2, PinnedKind::Arc, 1.0, 801).curve) == PElasticaClass::Wavelike);
    const Grid g = Grid::uniform(1, 401);
    std::vector<double> k(g.n);
    for (std::size_t i = 0; i < g.n; ++i) k[i] = std::exp(g.s(i)) - 1.5;
    CHECK(classify_pelastica(PlanarCurve::from_profile(g, k)) == PElasticaClass::Unknown);
    CHECK(to_string(PElasticaClass::Flatcore) == "flatcore");
}
