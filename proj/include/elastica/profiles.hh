// Structure of curvature profiles: zeros, well-periodicity, fold index and
// the two symmetry identities the constructions rely on.

#pragma once

#include "elastica/curve.hh"

#include <string>
#include <vector>

namespace elastica {

// Uniformly sampled profile k(s_i), s_i = i h.
struct Profile {
    std::vector<double> k;
    double h = 1;

    double length() const { return h * double(k.size() - 1); }
    // Cubic interpolation between nodes.
    double operator()(double s) const;
    static Profile of(const PlanarCurve &c);  // throws GridMismatch unless uniform
};

// Default zero tolerance 10 h max|k'|.
double default_zero_tolerance(const Profile &k);

// Sorted zeros of the interpolant. Sign changes are located by bisection;
// interior touch points (local minima of |k| below eps) and endpoints with
// |k| <= eps are included; zeros closer than 3h are merged.
// eps < 0 selects default_zero_tolerance.
std::vector<double> inflections(const Profile &k, double eps = -1);

struct WellPeriodicProfile {
    double T = 0;
    double s0 = 0;
    std::vector<double> phi;    // k(s0 + s) on one antiperiod, spacing h
    double tol = 0;             // relative to max|k|
    std::vector<double> zeros;
    double antiperiodic_residual = 0;
    double odd_residual = 0;
    double symmetry_residual = 0;
    double zero_set_residual = 0;
};

// Throws NotWellPeriodic naming the first failed predicate and its location.
WellPeriodicProfile detect_well_periodic(const Profile &k, double tol = 1e-4);

struct FoldInfo {
    int m = 0;  // m/2-fold
    double T = 0;
};

// Throws NotFolded when k(0) != 0 or L/T is not an integer within tol_rel.
FoldInfo fold_index(const Profile &k, double tol = 1e-4, double tol_rel = 1e-3);

struct SymmetryResiduals {
    double tangent = 0;    // max |g'(s1+sig) - g'(s3+sig)|
    double curvature = 0;  // max |k(s1+sig) + k(s3-sig)|
};

// Throws HypothesisViolated unless s1 < s2 < s3 are zeros bounding two
// zero-free arcs of opposite sign.
SymmetryResiduals verify_symmetry_lemma(const PlanarCurve &c, double s1, double s2, double s3);

struct PinnedSymmetryResiduals {
    double chord = 0;  // l
    double x = 0;      // max |x(L-s) + x(s) - l|
    double y = 0;      // max |y(L-s) - y(s)|
};

// Endpoints must be (0,0) and (l,0). Throws BadNormalization, ZeroChord.
PinnedSymmetryResiduals verify_pinned_symmetry(const PlanarCurve &c, double tol = 1e-8);

} // namespace elastica
