#include "elastica/energy.hh"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace elastica {

////////////////////////////////////////////////////////////////////////////////
// Densities
////////////////////////////////////////////////////////////////////////////////
EnergyDensity EnergyDensity::power(double p) {
    if (!(p > 0)) fail(ErrorCode::BadRange, "power density needs p > 0");
    EnergyDensity d;
    if (p == 2.0) d.f = [](double x) { return x * x; };
    else d.f = [p](double x) { return std::pow(x, p); };
    std::ostringstream os;
    os << "x^" << p;
    d.label = os.str();
    d.p = p;
    d.strictly_convex = p > 1;
    d.f0_zero = true;
    return d;
}

EnergyDensity EnergyDensity::table(std::vector<double> x, std::vector<double> y, std::string label) {
    if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::SchemaError, "density table needs two equal columns");
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) fail(ErrorCode::SchemaError, "density table abscissae must increase");
        if (y[i] < y[i - 1]) fail(ErrorCode::SchemaError, "density table values must be monotone");
    }
    if (x.front() != 0.0) fail(ErrorCode::SchemaError, "density table must start at x = 0");
    EnergyDensity d;
    d.label = std::move(label);
    d.f0_zero = y.front() == 0.0;
    d.f = [x = std::move(x), y = std::move(y)](double t) {
        if (!(t >= 0)) return std::numeric_limits<double>::quiet_NaN();
        auto it = std::upper_bound(x.begin(), x.end(), t);
        std::size_t i = it == x.end() ? x.size() - 2 : std::size_t(std::max<long>(0, long(it - x.begin()) - 1));
        const double w = (t - x[i]) / (x[i + 1] - x[i]);
        return y[i] + w * (y[i + 1] - y[i]);
    };
    return d;
}

EnergyDensity EnergyDensity::parse(const std::string &spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) fail(ErrorCode::SchemaError, "density must be p:<value> or table:<file>");
    const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    if (kind == "p") {
        try {
            return power(std::stod(arg));
        } catch (const std::logic_error &) {
            fail(ErrorCode::SchemaError, "bad exponent '" + arg + "'");
        }
    }
    if (kind == "table") {
        std::ifstream in(arg);
        if (!in) fail(ErrorCode::SchemaError, "cannot open density table " + arg);
        std::vector<double> x, y;
        std::string line;
        while (std::getline(in, line)) {
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            double a, b;
            if (ls >> a >> b) {
                x.push_back(a);
                y.push_back(b);
            }
        }
        return table(std::move(x), std::move(y), "table:" + arg);
    }
    fail(ErrorCode::SchemaError, "unknown density kind '" + kind + "'");
}

////////////////////////////////////////////////////////////////////////////////
// Energies
////////////////////////////////////////////////////////////////////////////////
namespace {

// Trapezoid on spacing h and on every other node; odd cell counts keep the
// last cell at spacing h in the coarse sum.
template <typename Sample>
EnergyEstimate trapezoid_pair(std::size_t m, double h, Sample g) {
    double fine = 0;
    for (std::size_t i = 0; i + 1 < m; ++i) fine += 0.5 * h * (g(i) + g(i + 1));
    const std::size_t cells = m - 1;
    if (cells < 2) return {fine, 0};
    const std::size_t even = cells - cells % 2;
    double coarse = 0;
    for (std::size_t i = 0; i + 2 <= even; i += 2) coarse += h * (g(i) + g(i + 2));
    if (cells % 2) coarse += 0.5 * h * (g(cells - 1) + g(cells));
    return {fine, std::abs(fine - coarse) / 3.0};
}

double checked(const EnergyDensity &f, double x) {
    const double v = f.eval(x);
    if (!std::isfinite(v))
        fail(ErrorCode::DensityDomainError, "density " + f.label + " is not finite at " + std::to_string(x));
    return v;
}

} // namespace

EnergyEstimate energy_estimate(const PlanarCurve &c, const EnergyDensity &f) {
    EnergyEstimate out;
    for (const auto &p : c.pieces()) {
        std::vector<double> v(p.k.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = checked(f, std::abs(p.k[i]));
        auto e = trapezoid_pair(v.size(), p.h, [&](std::size_t i) { return v[i]; });
        out.value += e.value;
        out.error_bar += e.error_bar;
    }
    return out;
}

double energy(const PlanarCurve &c, const EnergyDensity &f) {
    double total = 0;
    for (const auto &p : c.pieces()) {
        double s = 0.5 * (checked(f, std::abs(p.k.front())) + checked(f, std::abs(p.k.back())));
        for (std::size_t i = 1; i + 1 < p.k.size(); ++i) s += checked(f, std::abs(p.k[i]));
        total += p.h * s;
    }
    return total;
}

double bending_energy(const PlanarCurve &c, double p) { return energy(c, EnergyDensity::power(p)); }

EnergyEstimate bending_energy_3d_estimate(const SpaceCurve &c, double speed_tol) {
    const double res = unit_speed_residual(c);
    if (res > speed_tol)
        fail(ErrorCode::SpeedViolation, "unit-speed residual " + std::to_string(res) + " exceeds tolerance");
    EnergyEstimate out;
    for (const auto &p : c.pieces()) {
        const auto &kv = curvature_vectors(p);
        auto e = trapezoid_pair(kv.size(), p.h, [&](std::size_t i) { return kv[i].squaredNorm(); });
        out.value += e.value;
        out.error_bar += e.error_bar;
    }
    return out;
}

double bending_energy_3d(const SpaceCurve &c, double speed_tol) {
    return bending_energy_3d_estimate(c, speed_tol).value;
}

double profile_distance(const PlanarCurve &a, const PlanarCurve &b, double p) {
    if (!(p >= 1)) fail(ErrorCode::BadRange, "distance exponent must be >= 1");
    const auto sa = a.node_s(), sb = b.node_s();
    if (sa.size() != sb.size()) fail(ErrorCode::GridMismatch, "curves have different node counts");
    const double tol = 1e-9 * std::max(a.length(), b.length());
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (std::abs(sa[i] - sb[i]) > tol) fail(ErrorCode::GridMismatch, "curves have different node positions");
    const auto ar = a.k_right(), al = a.k_left(), br = b.k_right(), bl = b.k_left();
    double integral = 0;
    for (std::size_t i = 0; i + 1 < sa.size(); ++i) {
        const double h = sa[i + 1] - sa[i];
        integral += 0.5 * h * (std::pow(std::abs(ar[i] - br[i]), p) + std::pow(std::abs(al[i + 1] - bl[i + 1]), p));
    }
    return (a.base_point() - b.base_point()).norm() + std::abs(a.base_angle() - b.base_angle()) +
           std::pow(integral, 1.0 / p);
}

RotationNumber rotation_number(const PlanarCurve &c, double tol) {
    const auto rec = reconstruct(c);
    const double turn = rec.theta.back() - rec.theta.front();
    RotationNumber out;
    out.value = turn / (2 * kPi);
    out.rounded = std::lround(out.value);
    const double dx = (rec.x.back() - rec.x.front()).norm();
    const double dt = std::abs(turn - 2 * kPi * double(out.rounded));
    out.closure_residual = std::max(dx, dt);
    if (out.closure_residual > tol * std::max(1.0, c.length()))
        fail(ErrorCode::NotClosed, "closure residual " + std::to_string(out.closure_residual));
    return out;
}

ConvexityReport convexity_probe(const EnergyDensity &f, double t_max, std::size_t samples) {
    ConvexityReport rep;
    rep.f0 = f.eval(0.0);
    auto g = [&](double x) { return f.eval(x) - rep.f0; };
    std::vector<double> ts(samples);
    const double t_min = t_max * 1e-3;
    for (std::size_t i = 0; i < samples; ++i)
        ts[i] = t_min * std::pow(t_max / t_min, double(i) / double(samples - 1));
    const double lambdas[] = {1.05, 1.25, 1.5, 2.0, 3.0, 4.0};

    rep.min_midpoint_margin = rep.min_scaling_margin = std::numeric_limits<double>::infinity();
    // Strictness must beat rounding in the function values themselves.
    auto strict = [](double margin, double scale) { return margin > 0 && margin > 64 * 2.2e-16 * std::abs(scale); };

    for (double t : ts) {
        for (double lam : lambdas) {
            const double ft = g(t);
            const double m = ft - lam * g(t / lam);
            rep.min_scaling_margin = std::min(rep.min_scaling_margin, m / std::max(std::abs(ft), 1e-300));
            ++rep.checks;
            if (!strict(m, ft))
                throw ProbeFailure(t, lam, "lambda f(t/lambda) < f(t) fails at t=" + std::to_string(t) +
                                               " lambda=" + std::to_string(lam));
            const double a = t / lam, b = t;
            const double mid = 0.5 * (g(a) + g(b)) - g(0.5 * (a + b));
            rep.min_midpoint_margin = std::min(rep.min_midpoint_margin, mid / std::max(std::abs(g(b)), 1e-300));
            ++rep.checks;
            if (!strict(mid, g(b)))
                throw ProbeFailure(b, lam, "midpoint convexity fails on [" + std::to_string(a) + ", " +
                                               std::to_string(b) + "]");
        }
    }
    rep.passed = true;
    return rep;
}

double length(const PlanarCurve &c) { return c.length(); }
double length(const SpaceCurve &c) { return c.length(); }

////////////////////////////////////////////////////////////////////////////////
// Boundary conditions
////////////////////////////////////////////////////////////////////////////////
std::string to_string(BcKind k) {
    switch (k) {
        case BcKind::Clamped: return "clamped";
        case BcKind::Pinned: return "pinned";
        case BcKind::Closed: return "closed";
    }
    return "?";
}

BcKind parse_bc_kind(const std::string &s) {
    if (s == "clamped") return BcKind::Clamped;
    if (s == "pinned") return BcKind::Pinned;
    if (s == "closed") return BcKind::Closed;
    fail(ErrorCode::SchemaError, "unknown boundary kind '" + s + "'");
}

void BoundaryCondition::validate() const {
    if (!(L > 0)) fail(ErrorCode::BadRange, "length must be positive");
    if (kind == BcKind::Closed) {
        if ((P1 - P0).norm() > 1e-12 * L || (V1 - V0).norm() > 1e-12)
            fail(ErrorCode::BadRange, "closed data needs P0 = P1 and V0 = V1");
        return;
    }
    if (!((P1 - P0).norm() < L)) fail(ErrorCode::BadRange, "endpoint distance must be below the length");
    if (kind == BcKind::Clamped && (std::abs(V0.norm() - 1) > 1e-12 || std::abs(V1.norm() - 1) > 1e-12))
        fail(ErrorCode::BadRange, "clamped tangents must be unit vectors");
}

BoundaryCondition BoundaryCondition::pinned(double r, double L) {
    BoundaryCondition bc;
    bc.kind = BcKind::Pinned;
    bc.P0 = Vec2::Zero();
    bc.P1 = Vec2(r * L, 0);
    bc.L = L;
    bc.validate();
    return bc;
}

BoundaryCondition BoundaryCondition::closed(double L) {
    BoundaryCondition bc;
    bc.kind = BcKind::Closed;
    bc.L = L;
    bc.validate();
    return bc;
}

BoundaryCondition BoundaryCondition::clamped(Vec2 P0, Vec2 P1, Vec2 V0, Vec2 V1, double L) {
    BoundaryCondition bc{BcKind::Clamped, P0, P1, V0, V1, L};
    bc.validate();
    return bc;
}

AdmissibilityResiduals check_admissible(const PlanarCurve &c, const BoundaryCondition &bc) {
    const auto rec = reconstruct(c);
    AdmissibilityResiduals r;
    r.length = std::abs(c.length() - bc.L);
    if (bc.kind == BcKind::Closed) {
        r.end = (rec.x.back() - rec.x.front()).norm();
        r.tangent_end = (rec.t.back() - rec.t.front()).norm();
        r.constrained = std::max({r.end, r.tangent_end, r.length});
        return r;
    }
    r.start = (rec.x.front() - bc.P0).norm();
    r.end = (rec.x.back() - bc.P1).norm();
    r.tangent_start = (rec.t.front() - bc.V0).norm();
    r.tangent_end = (rec.t.back() - bc.V1).norm();
    r.constrained = std::max({r.start, r.end, r.length});
    if (bc.kind == BcKind::Clamped) r.constrained = std::max({r.constrained, r.tangent_start, r.tangent_end});
    return r;
}

} // namespace elastica
