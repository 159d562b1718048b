// Competitor curves built by cutting a curve at a few points and gluing the
// pieces back after a rigid motion, a cyclic shift or a rescaling. Each
// construction returns the competitor and a report comparing it with the
// input.
//
// The j parameter is the reciprocal of the cut offset: a cut at s + 1/j is
// snapped to the nearest node, at least one cell away from s.

#pragma once

#include "elastica/energy.hh"
#include "elastica/solver.hh"

#include <map>
#include <string>
#include <vector>

namespace elastica {

struct CurvatureJump {
    double s = 0;
    double jump = 0;
};

struct PerturbationReport {
    std::string construction;
    double energy_before = 0;
    double energy_after = 0;
    double energy_margin = 0;  // after - before
    double margin_bar = 0;     // sum of both quadrature error bars; loop rescale
                               // uses Richardson on the margin itself
    double c1_residual = 0;    // max tangent mismatch at cuts
    std::vector<CurvatureJump> curvature_jumps;
    double noise_floor = 0;    // max |second difference| of the input's curvature
    AdmissibilityResiduals bc_residuals;
    double distance = 0;
    double length_residual = 0;
    std::map<std::string, double> extras;

    double max_jump() const;
    // Some cut carries a jump of at least ten times the noise floor.
    bool not_c2() const { return max_jump() >= 10 * noise_floor; }
};

struct PlanarCompetitor {
    PlanarCurve curve;
    PerturbationReport report;
};

struct SpatialCompetitor {
    SpaceCurve curve;
    PerturbationReport report;
};

// Boundary data that c itself satisfies for the given kind.
BoundaryCondition boundary_of(const PlanarCurve &c, BcKind kind);

// Distance of profile type between curves on different grids: start point,
// start angle and the L^p norm of k_a - k_b by the midpoint rule on the
// union of both node sets. Agrees with profile_distance to O(h^2).
double curve_distance(const PlanarCurve &a, const PlanarCurve &b, double p);
double curve_distance(const SpaceCurve &a, const SpaceCurve &b);

// Least-squares slope of log(distance) against log(1/j).
double distance_order(const std::vector<double> &js, const std::vector<double> &distances);

// Half-turn of gamma|[s1,s2] about the midpoint of its end points.
// Throws HypothesisViolated when the tangents at s1, s2 differ by more than
// tangent_tol.
PlanarCompetitor global_rotation_competitor(const PlanarCurve &c, double s1, double s2, const EnergyDensity &f,
                                            BcKind kind = BcKind::Clamped, double tangent_tol = 1e-6);

// Half-turn of gamma|[s1+1/j, s3+1/j] where s1 < s2 < s3 are consecutive
// zeros. Throws RangeExceeded (s3 + 1/j beyond L), HypothesisViolated
// (s1, s3 not zeros bounding two arcs of opposite sign).
PlanarCompetitor local_rotation_family(const PlanarCurve &c, double s1, double s3, double j, const EnergyDensity &f,
                                       BcKind kind = BcKind::Clamped);

// P0 (+) gamma|[1/j, L] (+) gamma|[0, 1/j] for a curve whose zeros are
// {0, L/2, L}. Throws HypothesisViolated.
PlanarCompetitor pinned_shift_family(const PlanarCurve &c, double j, const EnergyDensity &f);

// Odd extension, shift of the start to -c_j, rotation back onto the chord
// and rescaling of the self-intersection arc [a, b] by lambda_j so that the
// length is restored. c_j is found by bisection on the discrete competitor's
// chord; the value from the continuous relation is reported next to it.
// Negative a or b selects the first self-intersection found.
// Throws HypothesisViolated, RootNotBracketed.
PlanarCompetitor pinned_loop_rescale_family(const PlanarCurve &c, double j, const EnergyDensity &f, double a = -1,
                                            double b = -1);
double loop_rescale_factor(double a, double b, double j, double c_j);

// Cyclic shift of a flat-core curve whose first (or last) segment is empty.
PlanarCompetitor flatcore_endpoint_shift(const PlanarCurve &c, const FlatCoreDecomposition &d, double j,
                                         const EnergyDensity &f);
// Exchange of a 1/j piece between the first pair of adjacent opposite loops
// with no segment between them. Throws HypothesisViolated.
PlanarCompetitor flatcore_loop_swap(const PlanarCurve &c, const FlatCoreDecomposition &d, double j,
                                    const EnergyDensity &f);

// Reflection of gamma|[s1,s2] in the plane through gamma(s1) with normal
// omega; the chord and both tangents must be orthogonal to omega.
SpatialCompetitor spatial_reflection_competitor(const SpaceCurve &c, double s1, double s2, const Vec3 &omega,
                                                double tol = 1e-4);
// Rotation of gamma|[s1,s2] by theta about the tangent line at gamma(s1);
// chord and both tangents must be parallel.
SpatialCompetitor spatial_rotation_family(const SpaceCurve &c, double s1, double s2, double theta,
                                          double tol = 1e-4);

} // namespace elastica
