// Cut-and-paste primitives on planar and spatial curves. Cut points are
// snapped to the nearest node of the curve; every primitive returns a new
// curve and leaves its input untouched.

#pragma once

#include "elastica/curve.hh"

#include <vector>

namespace elastica {

// Global node index nearest to arclength s.
std::size_t snap_node(const PlanarCurve &c, double s);
std::size_t snap_node(const SpaceCurve &c, double s);

// gamma_1 (+) ... (+) gamma_N, left-associative; later parts are translated
// so that each start matches the previous end.
PlanarCurve concat(const std::vector<PlanarCurve> &parts);
SpaceCurve concat(const std::vector<SpaceCurve> &parts);

// (P (+) gamma)(s) = gamma(s) - gamma(0) + P.
PlanarCurve prepend_point(const Vec2 &P, const PlanarCurve &c);
SpaceCurve prepend_point(const Vec3 &P, const SpaceCurve &c);

// Sub-arc between the nodes nearest to a and b (0 <= a < b <= L).
PlanarCurve restrict(const PlanarCurve &c, double a, double b);
SpaceCurve restrict(const SpaceCurve &c, double a, double b);
// Same, by global node index.
PlanarCurve restrict_nodes(const PlanarCurve &c, std::size_t ia, std::size_t ib);
SpaceCurve restrict_nodes(const SpaceCurve &c, std::size_t ia, std::size_t ib);

// Opposite orientation; signed curvature is negated.
PlanarCurve reverse(const PlanarCurve &c);

// gamma|[0,a] (+) R(gamma|[a,b]) (+) gamma|[b,L] where the middle is
// s -> -gamma(a+b-s) + 2c.
PlanarCurve rotate180_about(const PlanarCurve &c, double a, double b, const Vec2 &center);

// Middle arc [a,b] scaled by lambda about its own start.
PlanarCurve rescale_segment(const PlanarCurve &c, double a, double b, double lambda);

struct OddExtension {
    PlanarCurve curve;     // parameterized by s + L on [-L, L]
    Vec2 translation;      // applied to the input so that gamma(0) = 0
    double offset = 0;     // arclength of the original s = 0 in `curve`
};
// -gamma(-s) on [-L, 0) followed by gamma.
OddExtension odd_extend(const PlanarCurve &c);

// Uniform resampling of one arc [a, b] (not necessarily on nodes) with
// `cells` cells. Curvature is interpolated by cubics; the start angle and
// point come from the trapezoid reconstruction of c.
PlanarCurve resample_arc(const PlanarCurve &c, double a, double b, std::size_t cells);

// Reflection of the middle arc about the plane through `point` with unit
// normal omega. Throws BadNormal, BadRange.
SpaceCurve reflect_about_plane(const SpaceCurve &c, double a, double b, const Vec3 &point, const Vec3 &omega);
// Rotation of the middle arc about the axis (point, unit dir) by theta.
// Throws BadAxis, BadRange.
SpaceCurve rotate_about_axis(const SpaceCurve &c, double a, double b, const Vec3 &point, const Vec3 &dir,
                             double theta);
// Applies a rigid motion to every piece (positions and curvature vectors).
SpaceCurve transform(const SpaceCurve &c, const RigidMotion &m);

// Resample by cumulative chord length onto a uniform grid of n nodes;
// curvature vectors are recomputed.
SpaceCurve reparameterize(const SpaceCurve &c, std::size_t n);

} // namespace elastica
