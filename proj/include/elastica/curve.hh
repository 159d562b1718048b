// Arclength-parameterized planar and spatial curves on uniform grids.
//
// A PlanarCurve is stored intrinsically: a chain of pieces, each holding
// nodal signed-curvature samples on its own uniform sub-grid plus the
// absolute tangent angle at its start. Positions are obtained by turning
// angle integration (composite trapezoid by default). Pieces are glued by
// translation only, which is exactly the concatenation used by all cut and
// paste constructions; a junction keeps both one-sided curvature values, so
// curvature jumps are represented exactly and energies of rearranged curves
// are permutations of the same samples.
//
// A SpaceCurve is stored by positions, again as translated pieces.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace elastica {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

constexpr double kPi = 3.14159265358979323846;

// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

////////////////////////////////////////////////////////////////////////////////
// Grid
////////////////////////////////////////////////////////////////////////////////
struct Grid {
    std::size_t n = 2;
    double h = 1.0;
    double L = 1.0;

    // Throws BadRange unless n >= 2 and L > 0.
    static Grid uniform(double L, std::size_t n);
    // Largest grid with spacing closest to h that spans [0, L] exactly.
    static Grid with_spacing(double L, double h);

    double s(std::size_t i) const { return h * double(i); }
    // Nearest node to arclength s (clamped to the grid).
    std::size_t snap(double s) const;
};

enum class Quadrature { Trapezoid, Simpson };

////////////////////////////////////////////////////////////////////////////////
// Planar curves
////////////////////////////////////////////////////////////////////////////////
struct CurvePiece {
    double h = 0;
    std::vector<double> k;  // nodal curvature, size >= 2
    double theta0 = 0;      // absolute tangent angle at the first node

    double length() const { return h * double(k.size() - 1); }
    std::size_t cells() const { return k.size() - 1; }
};

// Location of a glue point between two pieces and the data on both sides.
struct Junction {
    std::size_t piece = 0;   // index of the piece that starts here
    double s = 0;            // arclength of the junction
    double k_left = 0;
    double k_right = 0;
    double turn = 0;         // tangent angle jump, wrapped to (-pi, pi]
    double jump() const;
};

struct PlanarSamples {
    std::vector<double> s;
    std::vector<double> theta;  // lifted (continuous) tangent angle
    std::vector<Vec2> x;
    std::vector<Vec2> t;
};

class PlanarCurve {
public:
    PlanarCurve() = default;
    PlanarCurve(Vec2 base_point, std::vector<CurvePiece> pieces);

    static PlanarCurve from_profile(const Grid &grid, std::vector<double> k,
                                    Vec2 base_point = Vec2::Zero(), double base_angle = 0.0);

    const Vec2 &base_point() const { return m_base; }
    double base_angle() const { return m_pieces.front().theta0; }
    const std::vector<CurvePiece> &pieces() const { return m_pieces; }
    std::size_t piece_count() const { return m_pieces.size(); }

    double length() const;

    // Global node count with junction nodes merged.
    std::size_t node_count() const;
    std::vector<double> node_s() const;
    // One-sided curvature at every global node; they differ only at junctions.
    std::vector<double> k_left() const;
    std::vector<double> k_right() const;

    std::vector<Junction> junctions() const;

    // True when every piece shares the same spacing (relative tolerance).
    bool is_uniform(double rel_tol = 1e-9) const;
    // Global uniform grid. Throws GridMismatch when !is_uniform().
    Grid grid() const;
    // Single-piece copy using right-limit values at junctions. Throws
    // GridMismatch for non-uniform curves and HypothesisViolated for corners.
    PlanarCurve flatten(double max_turn = 1e-6) const;

    // Nodal profile of a single-piece curve.
    const std::vector<double> &k() const { return m_pieces.front().k; }

    // Rigid motions.
    PlanarCurve translated(const Vec2 &d) const;
    PlanarCurve rotated(double angle, const Vec2 &center) const;

private:
    Vec2 m_base = Vec2::Zero();
    std::vector<CurvePiece> m_pieces;
};

PlanarSamples reconstruct(const PlanarCurve &c, Quadrature q = Quadrature::Trapezoid);

// Proper crossing of two non-adjacent segments of the polyline.
bool self_intersects(const std::vector<Vec2> &x);

// Evaluation at arbitrary arclength, consistent with trapezoid
// reconstruction at the nodes. `right` selects the one-sided value at
// junctions.
double curvature_at(const PlanarCurve &c, double s, bool right = true);
double angle_at(const PlanarCurve &c, const PlanarSamples &rec, double s);
Vec2 position_at(const PlanarCurve &c, const PlanarSamples &rec, double s);

// Signed curvature of planar positions sampled at spacing h (central second
// differences, second-order one-sided at the ends). Throws SpeedViolation
// if max_i | |x_{i+1}-x_i|/h - 1 | exceeds speed_tol.
std::vector<double> curvature_of(const std::vector<Vec2> &x, double h, double speed_tol = 1e-6);
double unit_speed_residual(const std::vector<Vec2> &x, double h);

////////////////////////////////////////////////////////////////////////////////
// Spatial curves
////////////////////////////////////////////////////////////////////////////////
// Positions plus the curvature vectors measured on them. Surgery moves both
// by the same isometry, so |kappa| samples survive rearrangement bit for bit
// up to the rounding of one matrix product.
struct SpacePiece {
    double h = 0;
    std::vector<Vec3> x;      // size >= 3
    std::vector<Vec3> kappa;  // filled from x when empty
    double length() const { return h * double(x.size() - 1); }
};

class SpaceCurve {
public:
    SpaceCurve() = default;
    explicit SpaceCurve(std::vector<SpacePiece> pieces);
    static SpaceCurve from_points(const Grid &grid, std::vector<Vec3> points);
    static SpaceCurve embed(const PlanarCurve &c);

    const std::vector<SpacePiece> &pieces() const { return m_pieces; }
    double length() const;
    std::size_t node_count() const;
    std::vector<Vec3> points() const;  // merged at junctions
    Grid grid() const;

    Vec3 start() const { return m_pieces.front().x.front(); }
    Vec3 end() const { return m_pieces.back().x.back(); }
    Vec3 tangent_start() const;
    Vec3 tangent_end() const;

private:
    std::vector<SpacePiece> m_pieces;
};

// Second differences of positions; second-order everywhere.
std::vector<Vec3> second_differences(const std::vector<Vec3> &x, double h);
// Stored curvature vectors of one piece.
const std::vector<Vec3> &curvature_vectors(const SpacePiece &p);
// Unit tangent of one piece (second-order differences).
std::vector<Vec3> tangents(const SpacePiece &p);
// Curvature vectors of a single-piece curve after the unit-speed check.
std::vector<Vec3> curvature_of(const SpaceCurve &c, double speed_tol = 1e-6);
double unit_speed_residual(const SpaceCurve &c);

////////////////////////////////////////////////////////////////////////////////
// Rigid motions
////////////////////////////////////////////////////////////////////////////////
struct RigidMotion {
    int dimension = 2;
    Eigen::MatrixXd linear;
    Eigen::VectorXd translation;

    static RigidMotion rotation2(double angle, const Vec2 &center);
    static RigidMotion point_reflection2(const Vec2 &center);
    static RigidMotion plane_reflection(const Vec3 &point, const Vec3 &unit_normal);
    static RigidMotion axis_rotation(const Vec3 &point, const Vec3 &unit_dir, double angle);

    // |Q^T Q - I|_max; must stay below 1e-12.
    double orthogonality_residual() const;
    double determinant() const { return linear.determinant(); }

    Vec2 apply(const Vec2 &p) const;
    Vec3 apply(const Vec3 &p) const;
};

} // namespace elastica
