// Curvature energies F = int f(|k|) ds, lengths, rotation numbers, the
// profile distance used in convergence checks and the convexity probe.

#pragma once

#include "elastica/curve.hh"
#include "elastica/error.hh"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace elastica {

struct EnergyDensity {
    std::function<double(double)> f;
    std::string label;
    std::optional<double> p;
    bool strictly_convex = false;
    bool f0_zero = false;

    double eval(double x) const { return f(x); }

    static EnergyDensity power(double p);
    // Piecewise linear interpolant of a monotone table (x ascending, x0 = 0),
    // extended linearly past the last sample.
    static EnergyDensity table(std::vector<double> x, std::vector<double> y, std::string label = "table");
    // "p:<value>" or "table:<file>" (two numeric columns per line).
    static EnergyDensity parse(const std::string &spec);
};

struct EnergyEstimate {
    double value = 0;
    double error_bar = 0;  // |T_h - T_2h| / 3 summed over pieces
};

double energy(const PlanarCurve &c, const EnergyDensity &f);
EnergyEstimate energy_estimate(const PlanarCurve &c, const EnergyDensity &f);
// B_p for f = x^p.
double bending_energy(const PlanarCurve &c, double p);

// int |kappa|^2 ds. Throws SpeedViolation.
double bending_energy_3d(const SpaceCurve &c, double speed_tol = 1e-6);
EnergyEstimate bending_energy_3d_estimate(const SpaceCurve &c, double speed_tol = 1e-6);

// |g1(0)-g2(0)| + |theta1(0)-theta2(0)| + (int |k1-k2|^p)^{1/p}.
// Throws GridMismatch unless both curves share their node arclengths.
double profile_distance(const PlanarCurve &a, const PlanarCurve &b, double p);

struct RotationNumber {
    double value = 0;
    long rounded = 0;
    double closure_residual = 0;
};
// Throws NotClosed when the curve does not close in position and tangent.
RotationNumber rotation_number(const PlanarCurve &c, double tol = 1e-6);

struct ConvexityReport {
    bool passed = false;
    double f0 = 0;                   // subtracted before testing
    double min_midpoint_margin = 0;  // min (f(a)+f(b))/2 - f((a+b)/2)
    double min_scaling_margin = 0;   // min f(t) - lambda f(t/lambda)
    std::size_t checks = 0;
};

class ProbeFailure : public Error {
public:
    ProbeFailure(double t, double lambda, const std::string &what)
        : Error(ErrorCode::ProbeFailed, what), t(t), lambda(lambda) {}
    double t;
    double lambda;
};

// Samples t in (0, t_max] on a geometric grid and lambda in (1, 4], after
// replacing f by f - f(0). Throws ProbeFailure with the first witness; for a
// failed midpoint test between a < b the witness is t = b, lambda = b/a.
ConvexityReport convexity_probe(const EnergyDensity &f, double t_max = 10.0, std::size_t samples = 60);

double length(const PlanarCurve &c);
double length(const SpaceCurve &c);

enum class BcKind { Clamped, Pinned, Closed };

struct BoundaryCondition {
    BcKind kind = BcKind::Pinned;
    Vec2 P0 = Vec2::Zero();
    Vec2 P1 = Vec2::Zero();
    Vec2 V0 = Vec2(1, 0);
    Vec2 V1 = Vec2(1, 0);
    double L = 1;

    double r() const { return (P1 - P0).norm() / L; }
    // Throws BadRange on |P0-P1| >= L (except closed) or non-unit tangents.
    void validate() const;

    static BoundaryCondition pinned(double r, double L);
    static BoundaryCondition closed(double L);
    static BoundaryCondition clamped(Vec2 P0, Vec2 P1, Vec2 V0, Vec2 V1, double L);
};

std::string to_string(BcKind k);
BcKind parse_bc_kind(const std::string &s);

struct AdmissibilityResiduals {
    double start = 0;
    double end = 0;
    double tangent_start = 0;
    double tangent_end = 0;
    double length = 0;
    // Maximum over the residuals the boundary kind actually constrains.
    double constrained = 0;
};

AdmissibilityResiduals check_admissible(const PlanarCurve &c, const BoundaryCondition &bc);

} // namespace elastica
