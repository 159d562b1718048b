#include "elastica/perturb.hh"
#include "elastica/error.hh"
#include "elastica/profiles.hh"
#include "elastica/surgery.hh"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace elastica {

double PerturbationReport::max_jump() const {
    double m = 0;
    for (const auto &j : curvature_jumps) m = std::max(m, j.jump);
    return m;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double noise_floor(const PlanarCurve &c) {
    double m = 0;
    for (const auto &p : c.pieces())
        for (std::size_t i = 1; i + 1 < p.k.size(); ++i)
            m = std::max(m, std::abs(p.k[i + 1] - 2 * p.k[i] + p.k[i - 1]));
    return m;
}

// Node count of a cut offset 1/j on spacing h; at least one cell.
std::size_t offset_cells(double j, double h) {
    if (!(j > 0) || !std::isfinite(j)) fail(ErrorCode::BadRange, "j must be positive");
    return std::max<std::size_t>(1, std::size_t(std::lround(1.0 / (j * h))));
}

PlanarCompetitor finish(const std::string &name, const PlanarCurve &before, PlanarCurve after,
                        const EnergyDensity &f, BcKind kind) {
    PlanarCompetitor out;
    auto &r = out.report;
    r.construction = name;
    const auto e0 = energy_estimate(before, f), e1 = energy_estimate(after, f);
    r.energy_before = e0.value;
    r.energy_after = e1.value;
    r.energy_margin = e1.value - e0.value;
    r.margin_bar = e0.error_bar + e1.error_bar;
    for (const auto &j : after.junctions()) {
        r.c1_residual = std::max(r.c1_residual, std::abs(j.turn));
        r.curvature_jumps.push_back({j.s, j.jump()});
    }
    r.noise_floor = noise_floor(before);
    r.bc_residuals = check_admissible(after, boundary_of(before, kind));
    r.distance = curve_distance(after, before, f.p.value_or(2.0));
    r.length_residual = std::abs(after.length() - before.length());
    out.curve = std::move(after);
    return out;
}

// Zeros of a single uniform curve strictly inside (a, b).
std::vector<double> zeros_between(const PlanarCurve &c, double a, double b) {
    std::vector<double> out;
    const double h = c.grid().h;
    for (double z : inflections(Profile::of(c)))
        if (z > a + 0.5 * h && z < b - 0.5 * h) out.push_back(z);
    return out;
}

PlanarCurve cyclic_shift(const PlanarCurve &c, std::size_t cut) {
    const std::size_t n = c.node_count();
    return prepend_point(c.base_point(), concat({restrict_nodes(c, cut, n - 1), restrict_nodes(c, 0, cut)}));
}

struct Crossing {
    double a = 0, b = 0;
};

bool find_crossing(const std::vector<Vec2> &x, const std::vector<double> &s, Crossing &out) {
    auto cross = [](const Vec2 &u, const Vec2 &v) { return u.x() * v.y() - u.y() * v.x(); };
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const Vec2 lo = x[i].cwiseMin(x[i + 1]), hi = x[i].cwiseMax(x[i + 1]);
        for (std::size_t m = i + 2; m + 1 < x.size(); ++m) {
            if (std::max(x[m].x(), x[m + 1].x()) < lo.x() || std::min(x[m].x(), x[m + 1].x()) > hi.x()) continue;
            if (std::max(x[m].y(), x[m + 1].y()) < lo.y() || std::min(x[m].y(), x[m + 1].y()) > hi.y()) continue;
            const Vec2 d1 = x[i + 1] - x[i], d2 = x[m + 1] - x[m], w = x[m] - x[i];
            const double den = cross(d1, d2);
            if (den == 0) continue;
            const double t = cross(w, d2) / den, u = cross(w, d1) / den;
            if (t >= 0 && t < 1 && u >= 0 && u < 1) {
                out.a = s[i] + t * (s[i + 1] - s[i]);
                out.b = s[m] + u * (s[m + 1] - s[m]);
                return true;
            }
        }
    }
    return false;
}

CurvePiece sample_piece(const PlanarCurve &e, double a, double b, std::size_t cells) {
    return resample_arc(e, a, b, cells).pieces().front();
}

double piece_turn(const CurvePiece &p) {
    double t = 0;
    for (std::size_t i = 0; i + 1 < p.k.size(); ++i) t += 0.5 * p.h * (p.k[i] + p.k[i + 1]);
    return t;
}

} // namespace

BoundaryCondition boundary_of(const PlanarCurve &c, BcKind kind) {
    const auto rec = reconstruct(c);
    BoundaryCondition bc;
    bc.kind = kind;
    bc.L = c.length();
    bc.P0 = rec.x.front();
    bc.P1 = rec.x.back();
    bc.V0 = rec.t.front();
    bc.V1 = rec.t.back();
    return bc;
}

double curve_distance(const PlanarCurve &a, const PlanarCurve &b, double p) {
    if (!(p >= 1)) fail(ErrorCode::BadRange, "distance exponent must be >= 1");
    std::vector<double> s = a.node_s();
    const auto sb = b.node_s();
    s.insert(s.end(), sb.begin(), sb.end());
    std::sort(s.begin(), s.end());
    const double L = std::min(a.length(), b.length());
    const double tol = 1e-12 * L;
    double integral = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double lo = s[i], hi = std::min(s[i + 1], L);
        if (hi - lo <= tol) continue;
        const double m = 0.5 * (lo + hi);
        integral += (hi - lo) * std::pow(std::abs(curvature_at(a, m) - curvature_at(b, m)), p);
    }
    return (a.base_point() - b.base_point()).norm() + std::abs(a.base_angle() - b.base_angle()) +
           std::pow(integral, 1.0 / p);
}

double curve_distance(const SpaceCurve &a, const SpaceCurve &b) {
    if (a.node_count() != b.node_count()) fail(ErrorCode::GridMismatch, "curves have different node counts");
    auto flat = [](const SpaceCurve &c) {
        std::vector<Vec3> k;
        std::vector<double> h;
        for (const auto &p : c.pieces()) {
            const auto &kv = curvature_vectors(p);
            // Interior junction nodes keep both one-sided values.
            for (std::size_t i = 0; i + 1 < kv.size(); ++i) {
                k.push_back(kv[i]);
                k.push_back(kv[i + 1]);
                h.push_back(p.h);
            }
        }
        return std::make_pair(k, h);
    };
    const auto [ka, ha] = flat(a);
    const auto [kb, hb] = flat(b);
    if (ka.size() != kb.size()) fail(ErrorCode::GridMismatch, "curves have different cell counts");
    double integral = 0;
    for (std::size_t c = 0; c < ha.size(); ++c)
        integral += 0.5 * ha[c] * ((ka[2 * c] - kb[2 * c]).squaredNorm() + (ka[2 * c + 1] - kb[2 * c + 1]).squaredNorm());
    return (a.start() - b.start()).norm() + (a.tangent_start() - b.tangent_start()).norm() + std::sqrt(integral);
}

double distance_order(const std::vector<double> &js, const std::vector<double> &d) {
    if (js.size() != d.size() || js.size() < 2) fail(ErrorCode::BadRange, "need at least two (j, distance) pairs");
    double mx = 0, my = 0;
    const double n = double(js.size());
    for (std::size_t i = 0; i < js.size(); ++i) {
        if (!(d[i] > 0)) fail(ErrorCode::BadRange, "distances must be positive");
        mx += std::log(1 / js[i]) / n;
        my += std::log(d[i]) / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < js.size(); ++i) {
        const double x = std::log(1 / js[i]) - mx;
        sxy += x * (std::log(d[i]) - my);
        sxx += x * x;
    }
    return sxy / sxx;
}

////////////////////////////////////////////////////////////////////////////////
// Planar constructions
////////////////////////////////////////////////////////////////////////////////
PlanarCompetitor global_rotation_competitor(const PlanarCurve &c, double s1, double s2, const EnergyDensity &f,
                                            BcKind kind, double tangent_tol) {
    const double L = c.length();
    if (!(s1 >= 0 && s1 < s2 && s2 <= L && s2 - s1 < L))
        fail(ErrorCode::BadRange, "need 0 <= s1 < s2 <= L with s2 - s1 < L");
    const std::size_t i1 = snap_node(c, s1), i2 = snap_node(c, s2);
    const auto rec = reconstruct(c);
    const double dt = (rec.t[i1] - rec.t[i2]).norm();
    if (dt > tangent_tol)
        fail(ErrorCode::HypothesisViolated, "tangents at the cuts differ by " + fmt(dt));
    const Vec2 center = 0.5 * (rec.x[i1] + rec.x[i2]);
    auto out = finish("global-rot", c, rotate180_about(c, rec.s[i1], rec.s[i2], center), f, kind);
    const auto kl = c.k_left(), kr = c.k_right();
    out.report.extras["s1"] = rec.s[i1];
    out.report.extras["s2"] = rec.s[i2];
    out.report.extras["predicted_jump"] = std::abs(-kr[i1] - kl[i2]);
    out.report.extras["center_x"] = center.x();
    out.report.extras["center_y"] = center.y();
    return out;
}

PlanarCompetitor local_rotation_family(const PlanarCurve &c0, double s1, double s3, double j, const EnergyDensity &f,
                                       BcKind kind) {
    const PlanarCurve c = c0.piece_count() == 1 ? c0 : c0.flatten();
    const Grid g = c.grid();
    if (!(s1 >= 0 && s1 < s3)) fail(ErrorCode::BadRange, "need 0 <= s1 < s3");
    const std::size_t i1 = g.snap(s1), i3 = g.snap(s3);
    const std::size_t dn = offset_cells(j, g.h);
    if (i3 + dn > g.n - 1 || s3 + 1 / j > g.L * (1 + 1e-12))
        fail(ErrorCode::RangeExceeded, "s3 + 1/j = " + fmt(s3 + 1 / j) + " exceeds L = " + fmt(g.L));

    const Profile pr = Profile::of(c);
    const double eps = default_zero_tolerance(pr);
    const auto &k = c.k();
    if (std::abs(pr(s1)) > eps || std::abs(pr(s3)) > eps)
        fail(ErrorCode::HypothesisViolated, "s1 and s3 must be zeros of the curvature");
    const auto mid = zeros_between(c, g.s(i1), g.s(i3));
    if (mid.size() != 1) fail(ErrorCode::HypothesisViolated, "s1, s3 must bound exactly one interior zero");
    if (pr(0.5 * (s1 + mid[0])) * pr(0.5 * (mid[0] + s3)) >= 0)
        fail(ErrorCode::HypothesisViolated, "arcs on both sides of s2 must have opposite signs");
    if (!zeros_between(c, g.s(i3), g.s(i3 + dn) + g.h).empty())
        fail(ErrorCode::HypothesisViolated, "1/j reaches the next zero after s3");

    const std::size_t a = i1 + dn, b = i3 + dn;
    const auto rec = reconstruct(c);
    const Vec2 center = 0.5 * (rec.x[a] + rec.x[b]);
    auto out = finish("local-rot", c, rotate180_about(c, g.s(a), g.s(b), center), f, kind);
    out.report.extras["j"] = j;
    out.report.extras["offset"] = g.s(dn);
    out.report.extras["cut1"] = g.s(a);
    out.report.extras["cut2"] = g.s(b);
    out.report.extras["predicted_jump"] = 2 * std::abs(k[a]);
    out.report.extras["tangent_mismatch"] = (rec.t[a] - rec.t[b]).norm();
    return out;
}

PlanarCompetitor pinned_shift_family(const PlanarCurve &c0, double j, const EnergyDensity &f) {
    const PlanarCurve c = c0.piece_count() == 1 ? c0 : c0.flatten();
    const Grid g = c.grid();
    FoldInfo fi;
    try {
        fi = fold_index(Profile::of(c));
    } catch (const Error &e) {
        fail(ErrorCode::HypothesisViolated, std::string("curve is not folded: ") + e.what());
    }
    if (fi.m != 2) fail(ErrorCode::HypothesisViolated, "pinned shift needs zeros exactly at 0, L/2, L");
    const std::size_t dn = offset_cells(j, g.h);
    if (dn >= g.n - 1) fail(ErrorCode::RangeExceeded, "1/j must be shorter than L");
    auto out = finish("pinned-shift", c, cyclic_shift(c, dn), f, BcKind::Pinned);
    out.report.extras["j"] = j;
    out.report.extras["offset"] = g.s(dn);
    out.report.extras["k_start"] = c.k()[dn];
    return out;
}

double loop_rescale_factor(double a, double b, double j, double c_j) {
    if (!(a < b)) fail(ErrorCode::BadRange, "need a < b");
    return (b - a + 1 / j - c_j) / (b - a);
}

PlanarCompetitor pinned_loop_rescale_family(const PlanarCurve &c0, double j, const EnergyDensity &f, double a,
                                            double b) {
    const PlanarCurve c = c0.piece_count() == 1 ? c0 : c0.flatten();
    const Grid g = c.grid();
    const double L = g.L;
    const auto rec = reconstruct(c);
    const double scale = std::max(1.0, L);
    const double l = rec.x.back().x();
    if (rec.x.front().norm() > 1e-9 * scale || std::abs(rec.x.back().y()) > 1e-9 * scale)
        fail(ErrorCode::HypothesisViolated, "curve must run from (0,0) to (l,0)");
    if (!(l > 1e-12 * scale)) fail(ErrorCode::HypothesisViolated, "chord must be positive");
    if (!(rec.t.front().x() > 0)) fail(ErrorCode::HypothesisViolated, "start tangent must point along the chord");

    if (a < 0 || b < 0) {
        Crossing x;
        if (!find_crossing(rec.x, rec.s, x)) fail(ErrorCode::HypothesisViolated, "curve is injective");
        a = x.a;
        b = x.b;
    }
    const double delta = g.s(offset_cells(j, g.h));
    if (!(delta < a && a < b && b < L - delta))
        fail(ErrorCode::RangeExceeded, "need 1/j < a < b < L - 1/j");

    const OddExtension ext = odd_extend(c);
    const PlanarCurve &E = ext.curve;  // E(u) = gamma(u - L) on [0, 2L]
    const auto erec = reconstruct(E);

    struct Built {
        PlanarCurve curve;
        double lambda = 1;
        double q_angle = 0;
        double chord = 0;
    };
    auto build = [&](double cj, double spacing) {
        Built out;
        out.lambda = loop_rescale_factor(a, b, 1 / delta, cj);
        auto cells = [&](double len) { return std::max<std::size_t>(2, std::size_t(std::lround(len / spacing))); };
        CurvePiece A = sample_piece(E, L - cj, L + a, cells(a + cj));
        CurvePiece B = sample_piece(E, L + a, L + b, cells(b - a));
        CurvePiece C = sample_piece(E, L + b, 2 * L - delta, cells(L - delta - b));
        B.h *= out.lambda;
        for (auto &v : B.k) v /= out.lambda;
        B.theta0 = A.theta0 + piece_turn(A);
        C.theta0 = B.theta0 + piece_turn(B);
        const double start = A.theta0;
        PlanarCurve raw(Vec2::Zero(), {A, B, C});
        const Vec2 end = reconstruct(raw).x.back();
        const double phi = -std::atan2(end.y(), end.x());
        out.curve = raw.rotated(phi, Vec2::Zero());
        out.q_angle = out.curve.base_angle() - start;
        out.chord = end.norm();
        return out;
    };

    // Bisection on the chord of the discrete competitor.
    double lo = -delta * (1 - 1e-9), hi = delta * (1 - 1e-9);
    double glo = build(lo, g.h).chord - l, ghi = build(hi, g.h).chord - l;
    if (glo * ghi > 0)
        fail(ErrorCode::RootNotBracketed, "chord equation has no sign change on (-1/j, 1/j)");
    while (hi - lo > 1e-12) {
        const double m = 0.5 * (lo + hi);
        const double gm = build(m, g.h).chord - l;
        if ((gm < 0) == (glo < 0)) {
            lo = m;
            glo = gm;
        } else {
            hi = m;
        }
    }
    const double cj = 0.5 * (lo + hi);

    // Same relation on the continuous interpolant, for reference.
    double cont = std::numeric_limits<double>::quiet_NaN();
    {
        const Vec2 tip = position_at(E, erec, 2 * L - delta);
        auto gc = [&](double s) { return (tip - position_at(E, erec, L - s)).norm() - l; };
        double u = -delta, v = delta, gu = gc(u);
        if (gu * gc(v) < 0) {
            while (v - u > 1e-13) {
                const double m = 0.5 * (u + v);
                if ((gc(m) < 0) == (gu < 0)) u = m; else v = m;
            }
            cont = 0.5 * (u + v);
        }
    }

    Built best = build(cj, g.h);
    auto out = finish("loop-rescale", c, best.curve, f, BcKind::Pinned);
    // Piecewise error bars do not see the cancellation at the cuts, so the
    // bar is Richardson on the margin itself: the same construction on twice
    // the spacing against the input's every-other-node trapezoid.
    {
        const double coarse_after = energy(build(cj, 2 * g.h).curve, f);
        const auto &k = c.k();
        double coarse_before = 0;
        const std::size_t cells = g.n - 1, even = cells - cells % 2;
        auto fk = [&](std::size_t i) { return f.eval(std::abs(k[i])); };
        for (std::size_t i = 0; i + 2 <= even; i += 2) coarse_before += g.h * (fk(i) + fk(i + 2));
        if (cells % 2) coarse_before += 0.5 * g.h * (fk(cells - 1) + fk(cells));
        out.report.margin_bar = std::abs(out.report.energy_margin - (coarse_after - coarse_before)) / 3;
    }
    auto &x = out.report.extras;
    x["j"] = 1 / delta;
    x["offset"] = delta;
    x["a"] = a;
    x["b"] = b;
    x["c_j"] = cj;
    x["c_j_continuous"] = cont;
    x["c_j_sign"] = cj > 0 ? 1 : (cj < 0 ? -1 : 0);
    x["lambda_j"] = best.lambda;
    x["q_angle"] = best.q_angle;
    return out;
}

PlanarCompetitor flatcore_endpoint_shift(const PlanarCurve &c, const FlatCoreDecomposition &d, double j,
                                         const EnergyDensity &f) {
    if (d.seg_lengths.size() != d.N() + 1 || d.N() == 0)
        fail(ErrorCode::HypothesisViolated, "decomposition needs at least one loop");
    PlanarCurve u = c;
    if (d.seg_lengths.front() != 0) {
        if (d.seg_lengths.back() != 0) fail(ErrorCode::HypothesisViolated, "no loop touches an endpoint");
        u = reverse(c);
    }
    if (!u.is_uniform()) fail(ErrorCode::GridMismatch, "flat-core curve must be on one spacing");
    const double h = u.pieces().front().h;
    const std::size_t dn = offset_cells(j, h);
    if (!(double(dn) * h < d.loop_arclength)) fail(ErrorCode::RangeExceeded, "1/j must be shorter than a loop");
    const auto rec = reconstruct(u);
    auto out = finish("flatcore-shift", u, cyclic_shift(u, dn), f, BcKind::Pinned);
    out.report.extras["j"] = j;
    out.report.extras["offset"] = double(dn) * h;
    out.report.extras["k_start"] = u.k_right()[dn];
    out.report.extras["reversed"] = d.seg_lengths.front() != 0;
    out.report.extras["tangent_ends_mismatch"] = (rec.t.front() - rec.t.back()).norm();
    return out;
}

PlanarCompetitor flatcore_loop_swap(const PlanarCurve &c, const FlatCoreDecomposition &d, double j,
                                    const EnergyDensity &f) {
    if (d.seg_lengths.size() != d.N() + 1) fail(ErrorCode::HypothesisViolated, "need N+1 segment lengths");
    std::size_t i = d.N();
    for (std::size_t m = 0; m + 1 < d.N(); ++m)
        if (d.seg_lengths[m + 1] == 0 && d.sigmas[m] != d.sigmas[m + 1]) {
            i = m;
            break;
        }
    if (i == d.N()) fail(ErrorCode::HypothesisViolated, "no adjacent loops of opposite orientation");
    if (!c.is_uniform()) fail(ErrorCode::GridMismatch, "flat-core curve must be on one spacing");
    const double h = c.pieces().front().h;
    const std::size_t dn = offset_cells(j, h);
    const double ell = d.loop_arclength;
    if (!(double(dn) * h < ell)) fail(ErrorCode::RangeExceeded, "1/j must be shorter than a loop");

    double s0 = 0;
    for (std::size_t m = 0; m <= i; ++m) s0 += d.seg_lengths[m];
    s0 += double(i) * ell;
    const std::size_t x0 = snap_node(c, s0), y0 = snap_node(c, s0 + ell), y1 = snap_node(c, s0 + 2 * ell);
    const std::size_t n = c.node_count();
    // Y|[0,d] (+) X|[1-d,1] (+) X|[0,1-d] (+) Y|[d,1] between the outer parts.
    std::vector<PlanarCurve> parts;
    if (x0 > 0) parts.push_back(restrict_nodes(c, 0, x0));
    parts.push_back(restrict_nodes(c, y0, y0 + dn));
    parts.push_back(restrict_nodes(c, y0 - dn, y0));
    parts.push_back(restrict_nodes(c, x0, y0 - dn));
    parts.push_back(restrict_nodes(c, y0 + dn, y1));
    if (y1 + 1 < n) parts.push_back(restrict_nodes(c, y1, n - 1));
    PlanarCurve swapped = prepend_point(c.base_point(), concat(parts));
    auto out = finish("flatcore-swap", c, swapped, f, BcKind::Clamped);
    out.report.extras["j"] = j;
    out.report.extras["offset"] = double(dn) * h;
    out.report.extras["first_loop"] = double(i);
    out.report.extras["predicted_jump"] = 2 * std::abs(c.k_right()[x0 + dn]);
    return out;
}

////////////////////////////////////////////////////////////////////////////////
// Spatial constructions
////////////////////////////////////////////////////////////////////////////////
namespace {

SpatialCompetitor finish_spatial(const std::string &name, const SpaceCurve &before, SpaceCurve after) {
    SpatialCompetitor out;
    auto &r = out.report;
    r.construction = name;
    const auto e0 = bending_energy_3d_estimate(before), e1 = bending_energy_3d_estimate(after);
    r.energy_before = e0.value;
    r.energy_after = e1.value;
    r.energy_margin = e1.value - e0.value;
    r.margin_bar = e0.error_bar + e1.error_bar;
    double s = 0;
    const auto &ps = after.pieces();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i > 0) {
            const Vec3 t0 = tangents(ps[i - 1]).back(), t1 = tangents(ps[i]).front();
            r.c1_residual = std::max(r.c1_residual, (t1 - t0).norm());
            r.curvature_jumps.push_back({s, (curvature_vectors(ps[i]).front() - curvature_vectors(ps[i - 1]).back()).norm()});
        }
        s += ps[i].length();
    }
    for (const auto &p : before.pieces()) {
        const auto &kv = curvature_vectors(p);
        for (std::size_t i = 1; i + 1 < kv.size(); ++i)
            r.noise_floor = std::max(r.noise_floor, (kv[i + 1] - 2 * kv[i] + kv[i - 1]).norm());
    }
    auto &b = r.bc_residuals;
    b.start = (after.start() - before.start()).norm();
    b.end = (after.end() - before.end()).norm();
    b.tangent_start = (after.tangent_start() - before.tangent_start()).norm();
    b.tangent_end = (after.tangent_end() - before.tangent_end()).norm();
    b.length = std::abs(after.length() - before.length());
    b.constrained = std::max({b.start, b.end, b.tangent_start, b.tangent_end, b.length});
    r.distance = curve_distance(after, before);
    r.length_residual = b.length;
    out.curve = std::move(after);
    return out;
}

struct SpatialCut {
    std::size_t i1, i2;
    Vec3 x1, x2, t1, t2, k1;
};

SpatialCut spatial_cut(const SpaceCurve &c, double s1, double s2) {
    if (c.pieces().size() != 1) fail(ErrorCode::BadRange, "spatial constructions need a single-piece curve");
    const double L = c.length();
    if (!(s1 >= 0 && s1 < s2 && s2 <= L && s2 - s1 < L))
        fail(ErrorCode::BadRange, "need 0 <= s1 < s2 <= L with s2 - s1 < L");
    const auto &p = c.pieces().front();
    const auto t = tangents(p);
    SpatialCut out;
    out.i1 = snap_node(c, s1);
    out.i2 = snap_node(c, s2);
    out.x1 = p.x[out.i1];
    out.x2 = p.x[out.i2];
    out.t1 = t[out.i1];
    out.t2 = t[out.i2];
    out.k1 = curvature_vectors(p)[out.i1];
    return out;
}

} // namespace

SpatialCompetitor spatial_reflection_competitor(const SpaceCurve &c, double s1, double s2, const Vec3 &omega,
                                                double tol) {
    if (!(std::abs(omega.norm() - 1) <= 1e-12)) fail(ErrorCode::BadNormal, "omega must be a unit vector");
    const SpatialCut cut = spatial_cut(c, s1, s2);
    const double scale = std::max(1.0, c.length());
    const double orth = std::max({std::abs((cut.x2 - cut.x1).dot(omega)) / scale, std::abs(cut.t1.dot(omega)),
                                  std::abs(cut.t2.dot(omega))});
    if (orth > tol) fail(ErrorCode::HypothesisViolated, "chord and tangents are not orthogonal to omega (" + fmt(orth) + ")");
    const double h = c.pieces().front().h;
    auto out = finish_spatial("spatial-reflect", c,
                              reflect_about_plane(c, double(cut.i1) * h, double(cut.i2) * h, cut.x1, omega));
    auto &x = out.report.extras;
    x["orthogonality"] = orth;
    x["predicted_jump"] = 2 * std::abs(cut.k1.dot(omega));
    x["omega_x"] = omega.x();
    x["omega_y"] = omega.y();
    x["omega_z"] = omega.z();
    return out;
}

SpatialCompetitor spatial_rotation_family(const SpaceCurve &c, double s1, double s2, double theta, double tol) {
    const SpatialCut cut = spatial_cut(c, s1, s2);
    const double scale = std::max(1.0, c.length());
    const Vec3 dir = cut.t1.normalized();
    const double par = std::max({(cut.x2 - cut.x1).cross(dir).norm() / scale, cut.t2.cross(dir).norm()});
    if (par > tol) fail(ErrorCode::HypothesisViolated, "chord and tangents are not parallel (" + fmt(par) + ")");
    const double h = c.pieces().front().h;
    auto out = finish_spatial("spatial-rotate", c,
                              rotate_about_axis(c, double(cut.i1) * h, double(cut.i2) * h, cut.x1, dir, theta));
    auto &x = out.report.extras;
    x["parallelism"] = par;
    x["theta"] = theta;
    // Angle between the one-sided curvature vectors at the first cut.
    double angle = 0;
    const auto &ps = out.curve.pieces();
    if (ps.size() > 1) {
        const Vec3 k0 = curvature_vectors(ps[0]).back(), k1 = curvature_vectors(ps[1]).front();
        angle = std::atan2(k0.cross(k1).norm(), k0.dot(k1));
    }
    x["measured_angle"] = angle;
    x["curvature_norm"] = cut.k1.norm();
    return out;
}

} // namespace elastica
