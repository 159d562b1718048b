#include "elastica/surgery.hh"
#include "elastica/error.hh"

#include <algorithm>
#include <cmath>
#include <string>

namespace elastica {

namespace {

template <typename Curve>
std::size_t snap_impl(const Curve &c, double s) {
    const double L = c.length();
    if (s < -1e-9 * L || s > L * (1 + 1e-9))
        fail(ErrorCode::BadRange, "arclength " + std::to_string(s) + " outside [0, L]");
    std::size_t g = 0;
    double s0 = 0;
    for (const auto &p : c.pieces()) {
        const std::size_t cells = p.length() / p.h + 0.5;
        if (s <= s0 + p.length() + 0.5 * p.h) {
            long i = std::lround((s - s0) / p.h);
            return g + std::size_t(std::clamp<long>(i, 0, long(cells)));
        }
        s0 += p.length();
        g += cells;
    }
    return g;
}

double piece_turn(const CurvePiece &p, std::size_t upto) {
    double t = 0;
    for (std::size_t j = 0; j < upto; ++j) t += 0.5 * p.h * (p.k[j] + p.k[j + 1]);
    return t;
}

} // namespace

std::size_t snap_node(const PlanarCurve &c, double s) { return snap_impl(c, s); }
std::size_t snap_node(const SpaceCurve &c, double s) { return snap_impl(c, s); }

////////////////////////////////////////////////////////////////////////////////
// Planar
////////////////////////////////////////////////////////////////////////////////
PlanarCurve concat(const std::vector<PlanarCurve> &parts) {
    if (parts.empty()) fail(ErrorCode::EmptyList, "nothing to concatenate");
    std::vector<CurvePiece> pieces;
    for (const auto &c : parts) pieces.insert(pieces.end(), c.pieces().begin(), c.pieces().end());
    return PlanarCurve(parts.front().base_point(), std::move(pieces));
}

PlanarCurve prepend_point(const Vec2 &P, const PlanarCurve &c) { return PlanarCurve(P, c.pieces()); }

PlanarCurve restrict_nodes(const PlanarCurve &c, std::size_t ia, std::size_t ib) {
    if (ia >= ib || ib >= c.node_count())
        fail(ErrorCode::BadRange, "restriction needs node indices ia < ib < n");
    std::vector<CurvePiece> out;
    std::size_t g0 = 0;
    for (const auto &p : c.pieces()) {
        const std::size_t g1 = g0 + p.cells();
        const std::size_t lo = std::max(ia, g0), hi = std::min(ib, g1);
        if (hi > lo) {
            CurvePiece q;
            q.h = p.h;
            q.k.assign(p.k.begin() + long(lo - g0), p.k.begin() + long(hi - g0) + 1);
            q.theta0 = p.theta0 + piece_turn(p, lo - g0);
            out.push_back(std::move(q));
        }
        g0 = g1;
    }
    const auto rec = reconstruct(c);
    return PlanarCurve(rec.x[ia], std::move(out));
}

PlanarCurve restrict(const PlanarCurve &c, double a, double b) {
    if (!(a < b)) fail(ErrorCode::BadRange, "restriction needs a < b");
    return restrict_nodes(c, snap_node(c, a), snap_node(c, b));
}

PlanarCurve reverse(const PlanarCurve &c) {
    std::vector<CurvePiece> out;
    out.reserve(c.piece_count());
    for (auto it = c.pieces().rbegin(); it != c.pieces().rend(); ++it) {
        CurvePiece q;
        q.h = it->h;
        q.k.assign(it->k.rbegin(), it->k.rend());
        for (auto &v : q.k) v = -v;
        q.theta0 = it->theta0 + piece_turn(*it, it->cells()) + kPi;
        out.push_back(std::move(q));
    }
    const auto rec = reconstruct(c);
    return PlanarCurve(rec.x.back(), std::move(out));
}

PlanarCurve rotate180_about(const PlanarCurve &c, double a, double b, const Vec2 &center) {
    if (!(a < b)) fail(ErrorCode::BadRange, "rotation needs a < b");
    const std::size_t ia = snap_node(c, a), ib = snap_node(c, b);
    if (ia >= ib) fail(ErrorCode::BadRange, "rotation arc collapses on the grid");
    std::vector<PlanarCurve> parts;
    if (ia > 0) parts.push_back(restrict_nodes(c, 0, ia));
    parts.push_back(reverse(restrict_nodes(c, ia, ib).rotated(kPi, center)));
    if (ib + 1 < c.node_count()) parts.push_back(restrict_nodes(c, ib, c.node_count() - 1));
    return concat(parts);
}

PlanarCurve rescale_segment(const PlanarCurve &c, double a, double b, double lambda) {
    if (!(lambda > 0) || !std::isfinite(lambda)) fail(ErrorCode::NonpositiveScale, "scale factor must be positive");
    if (!(a < b)) fail(ErrorCode::BadRange, "rescale needs a < b");
    const std::size_t ia = snap_node(c, a), ib = snap_node(c, b);
    if (ia >= ib) fail(ErrorCode::BadRange, "rescaled arc collapses on the grid");
    std::vector<PlanarCurve> parts;
    if (ia > 0) parts.push_back(restrict_nodes(c, 0, ia));
    PlanarCurve mid = restrict_nodes(c, ia, ib);
    std::vector<CurvePiece> scaled = mid.pieces();
    for (auto &p : scaled) {
        p.h *= lambda;
        for (auto &v : p.k) v /= lambda;
    }
    parts.emplace_back(mid.base_point(), std::move(scaled));
    if (ib + 1 < c.node_count()) parts.push_back(restrict_nodes(c, ib, c.node_count() - 1));
    return concat(parts);
}

OddExtension odd_extend(const PlanarCurve &c) {
    OddExtension out;
    out.translation = -c.base_point();
    const PlanarCurve g = prepend_point(Vec2::Zero(), c);
    const PlanarCurve neg = reverse(g.rotated(kPi, Vec2::Zero()));
    out.curve = concat({neg, g});
    out.offset = c.length();
    return out;
}

PlanarCurve resample_arc(const PlanarCurve &c, double a, double b, std::size_t cells) {
    if (!(a < b) || cells < 1) fail(ErrorCode::BadRange, "resample needs a < b and at least one cell");
    const auto rec = reconstruct(c);
    CurvePiece p;
    p.h = (b - a) / double(cells);
    p.k.resize(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) {
        const double s = j == cells ? b : a + p.h * double(j);
        p.k[j] = curvature_at(c, s, j < cells);
    }
    p.theta0 = angle_at(c, rec, a);
    return PlanarCurve(position_at(c, rec, a), {std::move(p)});
}

////////////////////////////////////////////////////////////////////////////////
// Spatial
////////////////////////////////////////////////////////////////////////////////
SpaceCurve concat(const std::vector<SpaceCurve> &parts) {
    if (parts.empty()) fail(ErrorCode::EmptyList, "nothing to concatenate");
    std::vector<SpacePiece> pieces;
    for (const auto &c : parts) {
        for (auto p : c.pieces()) {
            if (!pieces.empty()) {
                const Vec3 d = pieces.back().x.back() - p.x.front();
                for (auto &x : p.x) x += d;
            }
            pieces.push_back(std::move(p));
        }
    }
    return SpaceCurve(std::move(pieces));
}

SpaceCurve prepend_point(const Vec3 &P, const SpaceCurve &c) {
    std::vector<SpacePiece> pieces = c.pieces();
    const Vec3 d = P - c.start();
    for (auto &p : pieces)
        for (auto &x : p.x) x += d;
    return SpaceCurve(std::move(pieces));
}

SpaceCurve restrict_nodes(const SpaceCurve &c, std::size_t ia, std::size_t ib) {
    if (ia >= ib || ib >= c.node_count())
        fail(ErrorCode::BadRange, "restriction needs node indices ia < ib < n");
    std::vector<SpacePiece> out;
    std::size_t g0 = 0;
    for (const auto &p : c.pieces()) {
        const std::size_t g1 = g0 + p.x.size() - 1;
        const std::size_t lo = std::max(ia, g0), hi = std::min(ib, g1);
        if (hi > lo) {
            if (hi - lo < 2) fail(ErrorCode::BadRange, "spatial sub-arc needs at least two cells per piece");
            SpacePiece q;
            q.h = p.h;
            q.x.assign(p.x.begin() + long(lo - g0), p.x.begin() + long(hi - g0) + 1);
            q.kappa.assign(p.kappa.begin() + long(lo - g0), p.kappa.begin() + long(hi - g0) + 1);
            out.push_back(std::move(q));
        }
        g0 = g1;
    }
    return SpaceCurve(std::move(out));
}

SpaceCurve restrict(const SpaceCurve &c, double a, double b) {
    if (!(a < b)) fail(ErrorCode::BadRange, "restriction needs a < b");
    return restrict_nodes(c, snap_node(c, a), snap_node(c, b));
}

SpaceCurve transform(const SpaceCurve &c, const RigidMotion &m) {
    std::vector<SpacePiece> pieces = c.pieces();
    const Eigen::Matrix3d Q = m.linear;
    for (auto &p : pieces) {
        for (auto &x : p.x) x = m.apply(x);
        for (auto &k : p.kappa) k = Q * k;
    }
    return SpaceCurve(std::move(pieces));
}

namespace {

SpaceCurve move_middle(const SpaceCurve &c, double a, double b, const RigidMotion &m) {
    if (!(a < b)) fail(ErrorCode::BadRange, "surgery needs a < b");
    const std::size_t ia = snap_node(c, a), ib = snap_node(c, b);
    if (ib < ia + 2) fail(ErrorCode::BadRange, "moved arc is shorter than two cells");
    std::vector<SpaceCurve> parts;
    if (ia > 0) parts.push_back(restrict_nodes(c, 0, ia));
    parts.push_back(transform(restrict_nodes(c, ia, ib), m));
    if (ib + 1 < c.node_count()) parts.push_back(restrict_nodes(c, ib, c.node_count() - 1));
    return concat(parts);
}

} // namespace

SpaceCurve reflect_about_plane(const SpaceCurve &c, double a, double b, const Vec3 &point, const Vec3 &omega) {
    return move_middle(c, a, b, RigidMotion::plane_reflection(point, omega));
}

SpaceCurve rotate_about_axis(const SpaceCurve &c, double a, double b, const Vec3 &point, const Vec3 &dir,
                             double theta) {
    return move_middle(c, a, b, RigidMotion::axis_rotation(point, dir, theta));
}

SpaceCurve reparameterize(const SpaceCurve &c, std::size_t n) {
    if (n < 3) fail(ErrorCode::BadRange, "reparameterization needs at least three nodes");
    const auto pts = c.points();
    std::vector<double> s(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + (pts[i] - pts[i - 1]).norm();
    const double L = s.back();
    const double h = L / double(n - 1);
    std::vector<Vec3> out(n);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double si = i + 1 == n ? L : h * double(i);
        while (j + 2 < s.size() && s[j + 1] < si) ++j;
        const double w = (si - s[j]) / (s[j + 1] - s[j]);
        out[i] = (1 - w) * pts[j] + w * pts[j + 1];
    }
    return SpaceCurve::from_points(Grid{n, h, L}, std::move(out));
}

} // namespace elastica
