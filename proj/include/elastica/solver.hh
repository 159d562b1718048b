// Discrete critical points of B_p = int |k|^p ds at fixed length.
//
// Unknowns are the nodal curvatures k_0..k_{n-1} and the start angle
// theta_0; angles and positions follow by the same trapezoid recurrences
// that `reconstruct` uses, so a solver output satisfies its boundary data
// as a PlanarCurve to rounding. Stationarity is solved by Newton's method on
// the KKT system in the sparse (k, theta) form, which also converges to
// saddle points (the unstable modes the perturbation suite needs).
//
// Boundary kinds add these constraints to the end-point condition:
//   pinned   k_0 = k_{n-1} = 0 (natural condition, imposed strongly)
//   clamped  theta_0, theta_{n-1} fixed
//   closed   theta_0 fixed, theta_{n-1} = theta_0 + 2 pi m, k_0 = k_{n-1}
//            and optionally k_0 = 0 to fix the starting point.
// Gradient flow uses the same constraints minus the phase row, so solver
// output is a fixed point of the flow. Random perturbation tests use only
// the admissible set itself (no curvature constraints).

#pragma once

#include "elastica/curve.hh"
#include "elastica/energy.hh"

#include <limits>
#include <string>
#include <vector>

namespace elastica {

struct SolveOptions {
    double tol = 1e-9;        // scaled stationarity residual
    int max_iter = 200;
    bool force_p = false;     // allow p outside [1.05, 10]
    bool fix_phase = false;   // closed only: k_0 = 0
    int expected_interior_zeros = -1;  // LeftBasin check, -1 disables
};

struct CriticalPoint {
    PlanarCurve curve;
    double p = 2;
    BoundaryCondition bc;
    std::vector<double> multipliers;
    double residual = 0;             // scaled stationarity
    double constraint_residual = 0;  // admissibility (length units)
    std::string mode;
    int iterations = 0;
    bool fix_phase = false;
};

// Accepts p in [1.05, 10] unless forced; throws BadRange otherwise.
void check_exponent(double p, bool force);

// Newton-KKT solve started from `init` (uniform grid). Throws NoConvergence,
// LeftBasin (interior zero count differs from opts.expected_interior_zeros).
CriticalPoint solve_critical(const BoundaryCondition &bc, double p, const PlanarCurve &init,
                             const SolveOptions &opts = {}, const std::string &mode = "");

enum class PinnedKind { Arc, Loop };
std::string to_string(PinnedKind k);

// Root of J0(B) = target on the arc or loop branch. Throws ModeNotFound.
double sine_amplitude_parameter(double target, PinnedKind kind);

// (p, r, n)-arc or loop with P0 = (0,0), P1 = (rL, 0). Initialized from
// A sin(n pi s / L) with the chord matched by the J0 relation, continued in p
// from p = 2 when a direct solve fails. Throws ModeNotFound.
CriticalPoint make_pinned_mode(double p, double r, int n, PinnedKind kind, double L = 1.0, std::size_t nodes = 4001,
                               SolveOptions opts = {});

CriticalPoint make_circle(double p, int m, double L, std::size_t nodes = 4001);
// n-fold figure-eight, base point at an inflection, rotation number 0.
CriticalPoint make_figure_eight(double p, int n, double L, std::size_t nodes = 4001, SolveOptions opts = {});

struct FlatCoreLoop {
    PlanarCurve curve;   // arclength 1, starts at the origin with tangent (1,0)
    double p = 3;
    double chord = 0;    // x(1) - x(0)
    double f2_residual = 0;  // end tangent deviation from (1,0)
    double f3_min_interior = 0;  // min k away from the ends, must be > 0
    double f3_end_residual = 0;  // max(|k(0)|, |k(1)|)
    double f4_residual = 0;      // max of both symmetry identities
};

// Unit loop with k = 0 and tangent (1,0) at both ends, sampled from the
// first integral of the Euler-Lagrange equation; its chord is the pinned
// loop branch parameter at which flat tails appear. nodes must be odd.
// Throws UnsupportedExponent (p <= 2), RootNotBracketed (inversion failed).
FlatCoreLoop make_flatcore_loop(double p, std::size_t nodes = 2001);

struct FlatCoreDecomposition {
    std::vector<int> sigmas;         // +1 or -1 per loop
    std::vector<double> seg_lengths; // L_0..L_N, N = sigmas.size()
    double loop_arclength = 1.0;

    std::size_t N() const { return sigmas.size(); }
    double total_length() const;
    // L_0, L_N > 0 and L_j = 0 implies sigma_j = sigma_{j+1}.
    bool quasi_alternating() const;
};

// Segments (s, 0) and loops of both orientations glued per the
// decomposition. Segment lengths are snapped to the loop grid spacing.
PlanarCurve assemble_flatcore(const FlatCoreLoop &loop, const FlatCoreDecomposition &d);
PlanarCurve assemble_flatcore(double p, const FlatCoreDecomposition &d, std::size_t loop_nodes = 2001);

// Helix with `turns` turns sampled so that every chord is exactly h.
SpaceCurve make_helix(double radius, double pitch, double turns, std::size_t n);

struct FlowOptions {
    int max_iter = 20000;
    double time_budget = 60.0;  // seconds
    double stop_below = -std::numeric_limits<double>::infinity();
    double grad_tol = 1e-10;    // scaled projected gradient
    double projection_tol = 1e-12;
};

struct FlowTrace {
    std::vector<double> energies;
    std::vector<double> residuals;  // constraint residual after each step
    std::vector<double> steps;
    PlanarCurve final_curve;
    int iterations = 0;
    bool converged = false;
    double seconds = 0;
};

// Projected line-search descent on the admissible set of `bc` with the
// solver's curvature conditions (pinned k = 0 at the ends, closed k periodic);
// closed
// problems keep the start point, start angle and rotation number of c0.
// Non-uniform or multi-piece inputs are flattened/resampled first.
// Throws ProjectionFailed.
FlowTrace gradient_flow(const PlanarCurve &c0, const BoundaryCondition &bc, double p, const FlowOptions &opts = {});

// Newton projection onto the admissible set (same constraints as the flow).
PlanarCurve project_admissible(const PlanarCurve &c, const BoundaryCondition &bc, double tol = 1e-12);
// Single uniform piece with n nodes sampled from c.
PlanarCurve to_uniform(const PlanarCurve &c, std::size_t n);

struct StabilityReport {
    double min_eigenvalue = 0;
    double scale = 0;       // spectral radius of the reduced Hessian
    double asymmetry = 0;   // |H - H^T| / |H| before symmetrization
    std::vector<double> lowest;  // a few smallest eigenvalues
    bool stable = false;    // min_eigenvalue >= -1e-6 scale
    std::size_t dimension = 0;
};

// Finite-difference Hessian of the Lagrangian on the tangent space of the
// solver constraints, in the metric of the trapezoid weights. Throws
// IllConditioned when the reduced Hessian is not symmetric to 1e-6.
StabilityReport stability_probe(const CriticalPoint &cp);

enum class PElasticaClass { Wavelike, Flatcore, Circular, Unknown };
std::string to_string(PElasticaClass c);
PElasticaClass classify_pelastica(const PlanarCurve &c);

} // namespace elastica
