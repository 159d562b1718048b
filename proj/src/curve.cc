#include "elastica/curve.hh"
#include "elastica/error.hh"

#include <algorithm>
#include <cmath>
#include <string>

namespace elastica {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::SpeedViolation:      return "SpeedViolation";
        case ErrorCode::DimensionMismatch:   return "DimensionMismatch";
        case ErrorCode::EmptyList:           return "EmptyList";
        case ErrorCode::BadRange:            return "BadRange";
        case ErrorCode::NonpositiveScale:    return "NonpositiveScale";
        case ErrorCode::BadNormal:           return "BadNormal";
        case ErrorCode::BadAxis:             return "BadAxis";
        case ErrorCode::DensityDomainError:  return "DensityDomainError";
        case ErrorCode::GridMismatch:        return "GridMismatch";
        case ErrorCode::NotClosed:           return "NotClosed";
        case ErrorCode::ProbeFailed:         return "ProbeFailed";
        case ErrorCode::NotWellPeriodic:     return "NotWellPeriodic";
        case ErrorCode::NotFolded:           return "NotFolded";
        case ErrorCode::HypothesisViolated:  return "HypothesisViolated";
        case ErrorCode::BadNormalization:    return "BadNormalization";
        case ErrorCode::ZeroChord:           return "ZeroChord";
        case ErrorCode::NoConvergence:       return "NoConvergence";
        case ErrorCode::LeftBasin:           return "LeftBasin";
        case ErrorCode::ModeNotFound:        return "ModeNotFound";
        case ErrorCode::UnsupportedExponent: return "UnsupportedExponent";
        case ErrorCode::RootNotBracketed:    return "RootNotBracketed";
        case ErrorCode::ProjectionFailed:    return "ProjectionFailed";
        case ErrorCode::IllConditioned:      return "IllConditioned";
        case ErrorCode::RangeExceeded:       return "RangeExceeded";
        case ErrorCode::NoDropFound:         return "NoDropFound";
        case ErrorCode::SchemaError:         return "SchemaError";
    }
    return "Unknown";
}

double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

////////////////////////////////////////////////////////////////////////////////
// Grid
////////////////////////////////////////////////////////////////////////////////
Grid Grid::uniform(double L, std::size_t n) {
    if (n < 2) fail(ErrorCode::BadRange, "grid needs at least two nodes");
    if (!(L > 0) || !std::isfinite(L)) fail(ErrorCode::BadRange, "grid length must be positive");
    return Grid{n, L / double(n - 1), L};
}

Grid Grid::with_spacing(double L, double h) {
    if (!(h > 0)) fail(ErrorCode::BadRange, "spacing must be positive");
    auto cells = std::max<long>(1, std::lround(L / h));
    return uniform(L, std::size_t(cells) + 1);
}

std::size_t Grid::snap(double s) const {
    long i = std::lround(s / h);
    return std::size_t(std::clamp<long>(i, 0, long(n) - 1));
}

////////////////////////////////////////////////////////////////////////////////
// PlanarCurve
////////////////////////////////////////////////////////////////////////////////
double Junction::jump() const { return std::abs(k_right - k_left); }

PlanarCurve::PlanarCurve(Vec2 base_point, std::vector<CurvePiece> pieces)
    : m_base(std::move(base_point)), m_pieces(std::move(pieces)) {
    if (m_pieces.empty()) fail(ErrorCode::EmptyList, "curve without pieces");
    for (const auto &p : m_pieces) {
        if (p.k.size() < 2) fail(ErrorCode::BadRange, "piece needs at least two nodes");
        if (!(p.h > 0)) fail(ErrorCode::BadRange, "piece spacing must be positive");
    }
}

PlanarCurve PlanarCurve::from_profile(const Grid &grid, std::vector<double> k, Vec2 base_point, double base_angle) {
    if (k.size() != grid.n) fail(ErrorCode::GridMismatch, "profile length differs from grid size");
    return PlanarCurve(std::move(base_point), {CurvePiece{grid.h, std::move(k), base_angle}});
}

double PlanarCurve::length() const {
    double L = 0;
    for (const auto &p : m_pieces) L += p.length();
    return L;
}

std::size_t PlanarCurve::node_count() const {
    std::size_t n = 1;
    for (const auto &p : m_pieces) n += p.cells();
    return n;
}

std::vector<double> PlanarCurve::node_s() const {
    std::vector<double> s;
    s.reserve(node_count());
    double s0 = 0;
    s.push_back(0);
    for (const auto &p : m_pieces) {
        for (std::size_t i = 1; i < p.k.size(); ++i) s.push_back(s0 + p.h * double(i));
        s0 += p.length();
    }
    return s;
}

std::vector<double> PlanarCurve::k_left() const {
    std::vector<double> out;
    out.reserve(node_count());
    out.push_back(m_pieces.front().k.front());
    for (const auto &p : m_pieces)
        for (std::size_t i = 1; i < p.k.size(); ++i) out.push_back(p.k[i]);
    return out;
}

std::vector<double> PlanarCurve::k_right() const {
    std::vector<double> out;
    out.reserve(node_count());
    for (const auto &p : m_pieces)
        for (std::size_t i = 0; i + 1 < p.k.size(); ++i) out.push_back(p.k[i]);
    out.push_back(m_pieces.back().k.back());
    return out;
}

std::vector<Junction> PlanarCurve::junctions() const {
    std::vector<Junction> out;
    double s = 0;
    double theta_end = 0;
    for (std::size_t i = 0; i < m_pieces.size(); ++i) {
        const auto &p = m_pieces[i];
        if (i > 0) {
            const auto &q = m_pieces[i - 1];
            out.push_back({i, s, q.k.back(), p.k.front(), wrap_angle(p.theta0 - theta_end)});
        }
        double dtheta = 0;
        for (std::size_t j = 0; j + 1 < p.k.size(); ++j) dtheta += 0.5 * p.h * (p.k[j] + p.k[j + 1]);
        theta_end = p.theta0 + dtheta;
        s += p.length();
    }
    return out;
}

bool PlanarCurve::is_uniform(double rel_tol) const {
    const double h0 = m_pieces.front().h;
    return std::all_of(m_pieces.begin(), m_pieces.end(),
                       [&](const CurvePiece &p) { return std::abs(p.h - h0) <= rel_tol * h0; });
}

Grid PlanarCurve::grid() const {
    if (!is_uniform()) fail(ErrorCode::GridMismatch, "curve pieces use different spacings");
    return Grid{node_count(), m_pieces.front().h, length()};
}

PlanarCurve PlanarCurve::flatten(double max_turn) const {
    const Grid g = grid();
    for (const auto &j : junctions())
        if (std::abs(j.turn) > max_turn)
            fail(ErrorCode::HypothesisViolated, "cannot flatten a curve with a corner at s=" + std::to_string(j.s));
    return from_profile(g, k_right(), m_base, base_angle());
}

PlanarCurve PlanarCurve::translated(const Vec2 &d) const {
    PlanarCurve out = *this;
    out.m_base += d;
    return out;
}

PlanarCurve PlanarCurve::rotated(double angle, const Vec2 &center) const {
    PlanarCurve out = *this;
    const Eigen::Rotation2Dd R(angle);
    out.m_base = center + R * (m_base - center);
    for (auto &p : out.m_pieces) p.theta0 += angle;
    return out;
}

////////////////////////////////////////////////////////////////////////////////
// Reconstruction
////////////////////////////////////////////////////////////////////////////////
namespace {

// Per-cell integrals of nodal samples f on spacing h.
template <typename T>
std::vector<T> cell_integrals(const std::vector<T> &f, double h, Quadrature q) {
    const std::size_t m = f.size();
    std::vector<T> out(m - 1);
    if (q == Quadrature::Trapezoid || m < 3) {
        for (std::size_t i = 0; i + 1 < m; ++i) out[i] = 0.5 * h * (f[i] + f[i + 1]);
        return out;
    }
    // Quadratic interpolation through three neighbouring nodes, fourth order.
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (i + 2 < m) out[i] = (h / 12.0) * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
        else           out[i] = (h / 12.0) * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]);
    }
    return out;
}

} // namespace

bool self_intersects(const std::vector<Vec2> &x) {
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
            if (t > 0 && t < 1 && u > 0 && u < 1) return true;
        }
    }
    return false;
}

PlanarSamples reconstruct(const PlanarCurve &c, Quadrature q) {
    PlanarSamples out;
    const std::size_t N = c.node_count();
    out.s.reserve(N);
    out.theta.reserve(N);
    out.x.reserve(N);
    out.t.reserve(N);

    double s0 = 0;
    Vec2 x = c.base_point();
    double theta_end = c.base_angle();
    for (std::size_t pi = 0; pi < c.pieces().size(); ++pi) {
        const auto &p = c.pieces()[pi];
        const std::size_t m = p.k.size();
        double theta_start = (pi == 0) ? p.theta0 : theta_end + wrap_angle(p.theta0 - theta_end);

        std::vector<double> theta(m);
        theta[0] = theta_start;
        auto dth = cell_integrals(p.k, p.h, q);
        for (std::size_t i = 1; i < m; ++i) theta[i] = theta[i - 1] + dth[i - 1];

        std::vector<Vec2> t(m);
        for (std::size_t i = 0; i < m; ++i) t[i] = Vec2(std::cos(theta[i]), std::sin(theta[i]));
        auto dx = cell_integrals(t, p.h, q);

        // Junction nodes store the right-limit angle and tangent.
        const std::size_t first = (pi == 0) ? 0 : 1;
        if (pi > 0) {
            out.theta.back() = theta[0];
            out.t.back() = t[0];
        }
        std::vector<Vec2> xs(m);
        xs[0] = x;
        for (std::size_t i = 1; i < m; ++i) xs[i] = xs[i - 1] + dx[i - 1];
        for (std::size_t i = first; i < m; ++i) {
            out.s.push_back(s0 + p.h * double(i));
            out.theta.push_back(theta[i]);
            out.x.push_back(xs[i]);
            out.t.push_back(t[i]);
        }
        x = xs[m - 1];
        theta_end = theta[m - 1];
        s0 += p.length();
    }
    return out;
}

namespace {

struct Location {
    std::size_t piece = 0;
    std::size_t global0 = 0;  // global index of the piece's first node
    std::size_t cell = 0;     // local cell index
    double tau = 0;           // offset inside the cell
};

Location locate(const PlanarCurve &c, double s, bool right) {
    const auto &ps = c.pieces();
    const double L = c.length();
    if (s < -1e-12 * L || s > L * (1 + 1e-12))
        fail(ErrorCode::BadRange, "arclength " + std::to_string(s) + " outside [0, L]");
    s = std::clamp(s, 0.0, L);
    double s0 = 0;
    std::size_t g0 = 0;
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        const double len = ps[pi].length();
        const bool last = pi + 1 == ps.size();
        const bool inside = right ? (s < s0 + len || last) : (s <= s0 + len || last);
        if (inside) {
            double u = std::clamp(s - s0, 0.0, len);
            auto cell = std::min<std::size_t>(std::size_t(u / ps[pi].h), ps[pi].cells() - 1);
            return {pi, g0, cell, u - ps[pi].h * double(cell)};
        }
        s0 += len;
        g0 += ps[pi].cells();
    }
    return {};
}

} // namespace

double curvature_at(const PlanarCurve &c, double s, bool right) {
    const Location loc = locate(c, s, right);
    const auto &p = c.pieces()[loc.piece];
    const std::size_t m = p.k.size();
    if (m < 4) {
        const double w = loc.tau / p.h;
        return (1 - w) * p.k[loc.cell] + w * p.k[loc.cell + 1];
    }
    // Cubic Lagrange through four nodes around the cell.
    std::size_t i0 = loc.cell == 0 ? 0 : loc.cell - 1;
    if (i0 + 3 >= m) i0 = m - 4;
    const double x = (double(loc.cell) * p.h + loc.tau) / p.h - double(i0);
    const double *f = &p.k[i0];
    const double l0 = -(x - 1) * (x - 2) * (x - 3) / 6.0;
    const double l1 = x * (x - 2) * (x - 3) / 2.0;
    const double l2 = -x * (x - 1) * (x - 3) / 2.0;
    const double l3 = x * (x - 1) * (x - 2) / 6.0;
    return l0 * f[0] + l1 * f[1] + l2 * f[2] + l3 * f[3];
}

double angle_at(const PlanarCurve &c, const PlanarSamples &rec, double s) {
    const Location loc = locate(c, s, true);
    const auto &p = c.pieces()[loc.piece];
    const double th = rec.theta[loc.global0 + loc.cell];
    const double k0 = p.k[loc.cell], k1 = p.k[loc.cell + 1];
    return th + k0 * loc.tau + (k1 - k0) * loc.tau * loc.tau / (2.0 * p.h);
}

Vec2 position_at(const PlanarCurve &c, const PlanarSamples &rec, double s) {
    const Location loc = locate(c, s, true);
    const auto &p = c.pieces()[loc.piece];
    const std::size_t g = loc.global0 + loc.cell;
    const double th0 = rec.theta[g];
    const double th1 = th0 + 0.5 * p.h * (p.k[loc.cell] + p.k[loc.cell + 1]);
    const Vec2 t0(std::cos(th0), std::sin(th0)), t1(std::cos(th1), std::sin(th1));
    return rec.x[g] + loc.tau * t0 + (loc.tau * loc.tau / (2.0 * p.h)) * (t1 - t0);
}

////////////////////////////////////////////////////////////////////////////////
// Curvature from positions
////////////////////////////////////////////////////////////////////////////////
namespace {

template <typename V>
void differentiate(const std::vector<V> &x, double h, std::vector<V> &d1, std::vector<V> &d2) {
    const std::size_t n = x.size();
    if (n < 3) fail(ErrorCode::BadRange, "need at least three samples to differentiate");
    d1.resize(n);
    d2.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        d1[i] = (x[i + 1] - x[i - 1]) / (2 * h);
        d2[i] = (x[i + 1] - 2 * x[i] + x[i - 1]) / (h * h);
    }
    d1[0] = (-3 * x[0] + 4 * x[1] - x[2]) / (2 * h);
    d1[n - 1] = (3 * x[n - 1] - 4 * x[n - 2] + x[n - 3]) / (2 * h);
    if (n >= 4) {
        d2[0] = (2 * x[0] - 5 * x[1] + 4 * x[2] - x[3]) / (h * h);
        d2[n - 1] = (2 * x[n - 1] - 5 * x[n - 2] + 4 * x[n - 3] - x[n - 4]) / (h * h);
    } else {
        d2[0] = d2[1];
        d2[n - 1] = d2[1];
    }
}

} // namespace

double unit_speed_residual(const std::vector<Vec2> &x, double h) {
    double r = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) r = std::max(r, std::abs((x[i + 1] - x[i]).norm() / h - 1.0));
    return r;
}

std::vector<double> curvature_of(const std::vector<Vec2> &x, double h, double speed_tol) {
    const double res = unit_speed_residual(x, h);
    if (res > speed_tol)
        fail(ErrorCode::SpeedViolation, "unit-speed residual " + std::to_string(res) + " exceeds tolerance");
    std::vector<Vec2> d1, d2;
    differentiate(x, h, d1, d2);
    std::vector<double> k(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double sp = d1[i].norm();
        k[i] = (d1[i].x() * d2[i].y() - d1[i].y() * d2[i].x()) / (sp * sp * sp);
    }
    return k;
}

////////////////////////////////////////////////////////////////////////////////
// SpaceCurve
////////////////////////////////////////////////////////////////////////////////
SpaceCurve::SpaceCurve(std::vector<SpacePiece> pieces) : m_pieces(std::move(pieces)) {
    if (m_pieces.empty()) fail(ErrorCode::EmptyList, "curve without pieces");
    for (auto &p : m_pieces) {
        if (p.x.size() < 3) fail(ErrorCode::BadRange, "space piece needs at least three nodes");
        if (!(p.h > 0)) fail(ErrorCode::BadRange, "piece spacing must be positive");
        if (p.kappa.empty()) p.kappa = second_differences(p.x, p.h);
        if (p.kappa.size() != p.x.size()) fail(ErrorCode::GridMismatch, "curvature samples differ from positions");
    }
}

SpaceCurve SpaceCurve::from_points(const Grid &grid, std::vector<Vec3> points) {
    if (points.size() != grid.n) fail(ErrorCode::GridMismatch, "point count differs from grid size");
    return SpaceCurve({SpacePiece{grid.h, std::move(points), {}}});
}

SpaceCurve SpaceCurve::embed(const PlanarCurve &c) {
    const Grid g = c.grid();
    const auto rec = reconstruct(c);
    std::vector<Vec3> pts(rec.x.size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = Vec3(rec.x[i].x(), rec.x[i].y(), 0.0);
    return from_points(g, std::move(pts));
}

double SpaceCurve::length() const {
    double L = 0;
    for (const auto &p : m_pieces) L += p.length();
    return L;
}

std::size_t SpaceCurve::node_count() const {
    std::size_t n = 1;
    for (const auto &p : m_pieces) n += p.x.size() - 1;
    return n;
}

std::vector<Vec3> SpaceCurve::points() const {
    std::vector<Vec3> out;
    out.reserve(node_count());
    out.push_back(m_pieces.front().x.front());
    for (const auto &p : m_pieces) out.insert(out.end(), p.x.begin() + 1, p.x.end());
    return out;
}

Grid SpaceCurve::grid() const {
    const double h0 = m_pieces.front().h;
    for (const auto &p : m_pieces)
        if (std::abs(p.h - h0) > 1e-9 * h0) fail(ErrorCode::GridMismatch, "space pieces use different spacings");
    return Grid{node_count(), h0, length()};
}

std::vector<Vec3> tangents(const SpacePiece &p) {
    std::vector<Vec3> d1, d2;
    differentiate(p.x, p.h, d1, d2);
    for (auto &t : d1) t.normalize();
    return d1;
}

std::vector<Vec3> second_differences(const std::vector<Vec3> &x, double h) {
    std::vector<Vec3> d1, d2;
    differentiate(x, h, d1, d2);
    return d2;
}

const std::vector<Vec3> &curvature_vectors(const SpacePiece &p) { return p.kappa; }

Vec3 SpaceCurve::tangent_start() const { return tangents(m_pieces.front()).front(); }
Vec3 SpaceCurve::tangent_end() const { return tangents(m_pieces.back()).back(); }

double unit_speed_residual(const SpaceCurve &c) {
    double r = 0;
    for (const auto &p : c.pieces())
        for (std::size_t i = 0; i + 1 < p.x.size(); ++i)
            r = std::max(r, std::abs((p.x[i + 1] - p.x[i]).norm() / p.h - 1.0));
    return r;
}

std::vector<Vec3> curvature_of(const SpaceCurve &c, double speed_tol) {
    const double res = unit_speed_residual(c);
    if (res > speed_tol)
        fail(ErrorCode::SpeedViolation, "unit-speed residual " + std::to_string(res) + " exceeds tolerance");
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < c.pieces().size(); ++i) {
        auto kv = curvature_vectors(c.pieces()[i]);
        out.insert(out.end(), kv.begin() + (i == 0 ? 0 : 1), kv.end());
    }
    return out;
}

////////////////////////////////////////////////////////////////////////////////
// RigidMotion
////////////////////////////////////////////////////////////////////////////////
RigidMotion RigidMotion::rotation2(double angle, const Vec2 &center) {
    RigidMotion m;
    m.dimension = 2;
    m.linear = Eigen::Rotation2Dd(angle).toRotationMatrix();
    m.translation = center - m.linear * center;
    return m;
}

RigidMotion RigidMotion::point_reflection2(const Vec2 &center) {
    RigidMotion m;
    m.dimension = 2;
    m.linear = -Eigen::Matrix2d::Identity();
    m.translation = 2.0 * center;
    return m;
}

RigidMotion RigidMotion::plane_reflection(const Vec3 &point, const Vec3 &n) {
    if (std::abs(n.norm() - 1.0) > 1e-10) fail(ErrorCode::BadNormal, "plane normal must have unit length");
    RigidMotion m;
    m.dimension = 3;
    m.linear = Eigen::Matrix3d::Identity() - 2.0 * n * n.transpose();
    m.translation = point - m.linear * point;
    return m;
}

RigidMotion RigidMotion::axis_rotation(const Vec3 &point, const Vec3 &dir, double angle) {
    if (std::abs(dir.norm() - 1.0) > 1e-10) fail(ErrorCode::BadAxis, "axis direction must have unit length");
    RigidMotion m;
    m.dimension = 3;
    m.linear = Eigen::AngleAxisd(angle, dir).toRotationMatrix();
    m.translation = point - m.linear * point;
    return m;
}

double RigidMotion::orthogonality_residual() const {
    const Eigen::MatrixXd e = linear.transpose() * linear - Eigen::MatrixXd::Identity(dimension, dimension);
    return e.cwiseAbs().maxCoeff();
}

Vec2 RigidMotion::apply(const Vec2 &p) const {
    if (dimension != 2) fail(ErrorCode::DimensionMismatch, "planar point with spatial motion");
    return linear * p + translation;
}

Vec3 RigidMotion::apply(const Vec3 &p) const {
    if (dimension != 3) fail(ErrorCode::DimensionMismatch, "spatial point with planar motion");
    return linear * p + translation;
}

} // namespace elastica
