#include "elastica/solver.hh"
#include "elastica/error.hh"
#include "elastica/profiles.hh"
#include "elastica/surgery.hh"

#include <Eigen/Sparse>
#include <boost/math/special_functions/beta.hpp>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>
#include <optional>
#include <sstream>

namespace elastica {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Constraint set on z = (k_0..k_{n-1}, theta_0).
struct Setup {
    std::size_t n = 0;
    double h = 0, L = 0, p = 2;
    Vec2 P0 = Vec2::Zero();
    bool position = true;
    Vec2 target = Vec2::Zero();
    std::optional<double> th_start, th_end;
    bool natural = false, periodic = false, phase = false;

    std::size_t rows() const {
        return (position ? 2 : 0) + (th_start ? 1 : 0) + (th_end ? 1 : 0) + (natural ? 2 : 0) + (periodic ? 1 : 0) +
               (phase ? 1 : 0);
    }
    double w(std::size_t i) const { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }
};

struct State {
    std::vector<double> theta;
    Vec2 X = Vec2::Zero();
    double E = 0;
    VectorXd g;  // dE/dz
    MatrixXd J;  // dc/dz
    VectorXd c;
    VectorXd mu;
    double res = 0;    // scaled stationarity
    double cnorm = 0;  // constraint residual in length units
};

double max_abs(const VectorXd &v, std::size_t n) {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[Eigen::Index(i)]));
    return m;
}

VectorXd inverse_metric(const Setup &S) {
    VectorXd mi(Eigen::Index(S.n + 1));
    for (std::size_t i = 0; i < S.n; ++i) mi[Eigen::Index(i)] = 1.0 / (S.h * S.w(i));
    mi[Eigen::Index(S.n)] = 1.0 / S.L;
    return mi;
}

void angles(const Setup &S, const VectorXd &z, std::vector<double> &theta) {
    theta.resize(S.n);
    theta[0] = z[Eigen::Index(S.n)];
    for (std::size_t i = 1; i < S.n; ++i) theta[i] = theta[i - 1] + 0.5 * S.h * (z[Eigen::Index(i - 1)] + z[Eigen::Index(i)]);
}

// Values, energy and (optionally) first derivatives of the reduced problem.
State evaluate(const Setup &S, const VectorXd &z, bool derivatives = true) {
    const std::size_t n = S.n;
    const double h = S.h, p = S.p;
    State st;
    angles(S, z, st.theta);
    Vec2 X = S.P0;
    Vec2 tprev(std::cos(st.theta[0]), std::sin(st.theta[0]));
    for (std::size_t i = 1; i < n; ++i) {
        const Vec2 t(std::cos(st.theta[i]), std::sin(st.theta[i]));
        X += 0.5 * h * (tprev + t);
        tprev = t;
    }
    st.X = X;
    double E = 0;
    for (std::size_t i = 0; i < n; ++i) E += h * S.w(i) * std::pow(std::abs(z[Eigen::Index(i)]), p);
    st.E = E;

    const Eigen::Index m = Eigen::Index(S.rows()), N = Eigen::Index(n + 1);
    st.c.resize(m);
    Eigen::Index r = 0;
    const double k0 = z[0], kn = z[Eigen::Index(n - 1)];
    if (S.position) {
        st.c[r++] = X.x() - S.target.x();
        st.c[r++] = X.y() - S.target.y();
    }
    if (S.th_start) st.c[r++] = st.theta[0] - *S.th_start;
    if (S.th_end) st.c[r++] = st.theta[n - 1] - *S.th_end;
    if (S.natural) {
        st.c[r++] = k0;
        st.c[r++] = kn;
    }
    if (S.periodic) st.c[r++] = k0 - kn;
    if (S.phase) st.c[r++] = k0;

    double cn = 0;
    r = 0;
    if (S.position) {
        cn = std::max(cn, std::hypot(st.c[0], st.c[1]));
        r = 2;
    }
    for (; r < m; ++r) cn = std::max(cn, S.L * std::abs(st.c[r]));
    st.cnorm = cn;
    if (!derivatives) return st;

    st.g = VectorXd::Zero(N);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = z[Eigen::Index(i)];
        st.g[Eigen::Index(i)] = h * S.w(i) * p * std::pow(std::abs(k), p - 1) * ((k > 0) - (k < 0));
    }

    st.J = MatrixXd::Zero(m, N);
    r = 0;
    if (S.position) {
        // G_j = sum_{i >= j} h w_i (-sin, cos)(theta_i)
        std::vector<Vec2> G(n + 1, Vec2::Zero());
        for (std::size_t i = n; i-- > 0;)
            G[i] = G[i + 1] + h * S.w(i) * Vec2(-std::sin(st.theta[i]), std::cos(st.theta[i]));
        for (std::size_t j = 0; j < n; ++j) {
            Vec2 d = 0.5 * h * G[j + 1];
            if (j >= 1) d += 0.5 * h * G[j];
            st.J(r, Eigen::Index(j)) = d.x();
            st.J(r + 1, Eigen::Index(j)) = d.y();
        }
        st.J(r, Eigen::Index(n)) = G[0].x();
        st.J(r + 1, Eigen::Index(n)) = G[0].y();
        r += 2;
    }
    if (S.th_start) st.J(r++, Eigen::Index(n)) = 1;
    if (S.th_end) {
        for (std::size_t j = 0; j < n; ++j) st.J(r, Eigen::Index(j)) = 0.5 * h * double((j + 1 < n) + (j >= 1));
        st.J(r++, Eigen::Index(n)) = 1;
    }
    if (S.natural) {
        st.J(r++, 0) = 1;
        st.J(r++, Eigen::Index(n - 1)) = 1;
    }
    if (S.periodic) {
        st.J(r, 0) = 1;
        st.J(r++, Eigen::Index(n - 1)) = -1;
    }
    if (S.phase) st.J(r++, 0) = 1;

    // Least-squares multipliers in the metric M = diag(h w, L).
    const VectorXd mi = inverse_metric(S);
    if (m > 0) {
        const MatrixXd JM = st.J * mi.asDiagonal();
        const MatrixXd A = JM * st.J.transpose();
        st.mu = A.completeOrthogonalDecomposition().solve(-(JM * st.g));
    } else {
        st.mu = VectorXd();
    }
    VectorXd grad = st.g;
    if (m > 0) grad += st.J.transpose() * st.mu;
    const VectorXd rr = mi.cwiseProduct(grad);
    const double kmax = max_abs(z, n);
    double scale = p * std::pow(kmax, p - 1);
    if (!(scale > 0)) scale = 1;
    st.res = rr.cwiseAbs().maxCoeff() / scale;
    return st;
}

// Newton-KKT direction in the sparse (k, theta) form.
std::optional<VectorXd> newton_direction(const Setup &S, const VectorXd &z, const State &st) {
    using Trip = Eigen::Triplet<double>;
    const std::size_t n = S.n;
    const double h = S.h, p = S.p;
    const std::size_t nv = 2 * n, nrec = n - 1, mc = S.rows();
    const std::size_t NK = nv + nrec + mc;
    std::vector<Trip> T;
    T.reserve(12 * n);
    auto put = [&](std::size_t i, std::size_t j, double v) {
        T.emplace_back(Eigen::Index(i), Eigen::Index(j), v);
        if (i != j) T.emplace_back(Eigen::Index(j), Eigen::Index(i), v);
    };
    const double kmax = max_abs(z, n);
    const double floor = 1e-8 * p * (p - 1) * std::pow(std::max(kmax, 1e-300), p - 2);
    double mux = 0, muy = 0;
    if (S.position) {
        mux = st.mu[0];
        muy = st.mu[1];
    }
    // For p < 2 the unknown is psi = phi'(k), which is smooth through the
    // zeros of k; D = dk/dpsi scales the k columns of the constraint rows.
    const bool dual = p < 2;
    std::vector<double> D(dual ? n : 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = z[Eigen::Index(i)];
        double hk;
        if (dual) {
            D[i] = std::pow(std::abs(k), 2 - p) / (p * (p - 1));
            hk = 1;
        } else {
            hk = p * (p - 1) * std::pow(std::abs(k), p - 2) + floor;
        }
        T.emplace_back(Eigen::Index(i), Eigen::Index(i), h * S.w(i) * hk);
        const double th = st.theta[i];
        const double ht = -h * S.w(i) * (mux * std::cos(th) + muy * std::sin(th));
        if (ht != 0) T.emplace_back(Eigen::Index(n + i), Eigen::Index(n + i), ht);
    }
    auto put_k = [&](std::size_t row, std::size_t i, double v) {
        T.emplace_back(Eigen::Index(row), Eigen::Index(i), dual ? v * D[i] : v);
        T.emplace_back(Eigen::Index(i), Eigen::Index(row), v);
    };
    // Rows pinning k itself are imposed on psi directly, which vanishes
    // together with k.
    auto psi = [&](std::size_t i) {
        const double k = z[Eigen::Index(i)];
        return p * std::pow(std::abs(k), p - 1) * ((k > 0) - (k < 0));
    };
    VectorXd rhs = VectorXd::Zero(Eigen::Index(NK));
    for (std::size_t i = 0; i < n; ++i) rhs[Eigen::Index(i)] = -st.g[Eigen::Index(i)];
    // Recurrence rows theta_i - theta_{i-1} - h/2 (k_{i-1} + k_i) = 0.
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t row = nv + i - 1;
        put(row, n + i, 1.0);
        put(row, n + i - 1, -1.0);
        put_k(row, i - 1, -0.5 * h);
        put_k(row, i, -0.5 * h);
        rhs[Eigen::Index(row)] = -(st.theta[i] - st.theta[i - 1] - 0.5 * h * (z[Eigen::Index(i - 1)] + z[Eigen::Index(i)]));
    }
    std::size_t row = nv + nrec;
    Eigen::Index cr = 0;
    if (S.position) {
        for (std::size_t i = 0; i < n; ++i) {
            put(row, n + i, -h * S.w(i) * std::sin(st.theta[i]));
            put(row + 1, n + i, h * S.w(i) * std::cos(st.theta[i]));
        }
        rhs[Eigen::Index(row)] = -st.c[cr];
        rhs[Eigen::Index(row + 1)] = -st.c[cr + 1];
        row += 2;
        cr += 2;
    }
    if (S.th_start) {
        put(row, n, 1.0);
        rhs[Eigen::Index(row++)] = -st.c[cr++];
    }
    if (S.th_end) {
        put(row, 2 * n - 1, 1.0);
        rhs[Eigen::Index(row++)] = -st.c[cr++];
    }
    if (S.natural) {
        put(row, 0, 1.0);
        rhs[Eigen::Index(row++)] = dual ? -psi(0) : -st.c[cr];
        ++cr;
        put(row, n - 1, 1.0);
        rhs[Eigen::Index(row++)] = dual ? -psi(n - 1) : -st.c[cr];
        ++cr;
    }
    if (S.periodic) {
        put(row, 0, 1.0);
        put(row, n - 1, -1.0);
        rhs[Eigen::Index(row++)] = dual ? psi(n - 1) - psi(0) : -st.c[cr];
        ++cr;
    }
    if (S.phase) {
        put(row, 0, 1.0);
        rhs[Eigen::Index(row++)] = dual ? -psi(0) : -st.c[cr];
        ++cr;
    }
    // Interleave (nu_i, k_i, theta_i) node by node so the matrix is banded
    // apart from the border rows; natural ordering then keeps the fill local.
    auto perm = [&](Eigen::Index j) -> Eigen::Index {
        const Eigen::Index nn = Eigen::Index(n);
        if (j < nn) return j == 0 ? 0 : 3 * j;
        if (j < 2 * nn) return j == nn ? 1 : 3 * (j - nn) + 1;
        if (j < 3 * nn - 1) return 3 * (j - 2 * nn + 1) - 1;
        return j;
    };
    for (auto &t : T) t = Trip(perm(t.row()), perm(t.col()), t.value());
    VectorXd prhs(rhs.size());
    for (Eigen::Index j = 0; j < rhs.size(); ++j) prhs[perm(j)] = rhs[j];
    Eigen::SparseMatrix<double> K{Eigen::Index(NK), Eigen::Index(NK)};
    K.setFromTriplets(T.begin(), T.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::NaturalOrdering<int>> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success) return std::nullopt;
    VectorXd psol = lu.solve(prhs);
    if (lu.info() != Eigen::Success || !psol.allFinite()) return std::nullopt;
    psol += lu.solve(VectorXd(prhs - K * psol));
    VectorXd sol(psol.size());
    for (Eigen::Index j = 0; j < sol.size(); ++j) sol[j] = psol[perm(j)];
    VectorXd dz(Eigen::Index(n + 1));
    dz.head(Eigen::Index(n)) = sol.head(Eigen::Index(n));
    dz[Eigen::Index(n)] = sol[Eigen::Index(n)];
    return dz;
}

Setup base_setup(const PlanarCurve &c, double p) {
    const Grid g = c.grid();
    Setup S;
    S.n = g.n;
    S.h = g.h;
    S.L = g.L;
    S.p = p;
    S.P0 = c.base_point();
    return S;
}

long winding(const PlanarCurve &c) {
    const auto rec = reconstruct(c);
    return std::lround((rec.theta.back() - rec.theta.front()) / (2 * kPi));
}

// Admissible set of the boundary data, anchored at c where bc leaves freedom.
Setup flow_setup(const PlanarCurve &c, const BoundaryCondition &bc, double p) {
    Setup S = base_setup(c, p);
    switch (bc.kind) {
    case BcKind::Pinned:
        S.P0 = bc.P0;
        S.target = bc.P1;
        break;
    case BcKind::Clamped: {
        S.P0 = bc.P0;
        S.target = bc.P1;
        const auto rec = reconstruct(c);
        const double a0 = std::atan2(bc.V0.y(), bc.V0.x()), a1 = std::atan2(bc.V1.y(), bc.V1.x());
        const double start = rec.theta.front() + wrap_angle(a0 - rec.theta.front());
        S.th_start = start;
        S.th_end = rec.theta.back() + wrap_angle(a1 - rec.theta.back()) + (start - rec.theta.front());
        break;
    }
    case BcKind::Closed:
        S.target = S.P0;
        S.th_start = c.base_angle();
        S.th_end = c.base_angle() + 2 * kPi * double(winding(c));
        break;
    }
    return S;
}

Setup solver_setup(const PlanarCurve &c, const BoundaryCondition &bc, double p, bool fix_phase) {
    Setup S = flow_setup(c, bc, p);
    if (bc.kind == BcKind::Pinned) S.natural = true;
    if (bc.kind == BcKind::Closed) {
        S.periodic = true;
        S.phase = fix_phase;
    }
    return S;
}

VectorXd to_z(const PlanarCurve &c) {
    const auto &k = c.k();
    VectorXd z(Eigen::Index(k.size() + 1));
    for (std::size_t i = 0; i < k.size(); ++i) z[Eigen::Index(i)] = k[i];
    z[Eigen::Index(k.size())] = c.base_angle();
    return z;
}

PlanarCurve from_z(const Setup &S, const VectorXd &z) {
    std::vector<double> k(S.n);
    for (std::size_t i = 0; i < S.n; ++i) k[i] = z[Eigen::Index(i)];
    return PlanarCurve::from_profile(Grid{S.n, S.h, S.L}, std::move(k), S.P0, z[Eigen::Index(S.n)]);
}

PlanarCurve single_piece(const PlanarCurve &c) {
    if (c.piece_count() == 1) return c;
    if (c.is_uniform()) return c.flatten(1e-2);
    return to_uniform(c, c.node_count());
}

int interior_zeros(const PlanarCurve &c) {
    const Profile pr = Profile::of(c);
    const double L = pr.length();
    int count = 0;
    for (double s : inflections(pr))
        if (s > 1e-12 * L && s < L * (1 - 1e-12)) ++count;
    return count;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// z + alpha dz, with the k part of dz read as a step in psi = phi'(k) when
// p < 2.
VectorXd advance(const Setup &S, const VectorXd &z, const VectorXd &dz, double alpha) {
    VectorXd zt = z + alpha * dz;
    if (S.p >= 2) return zt;
    const double p = S.p;
    for (std::size_t i = 0; i < S.n; ++i) {
        const Eigen::Index j = Eigen::Index(i);
        const double k = z[j];
        const double psi = p * std::pow(std::abs(k), p - 1) * ((k > 0) - (k < 0)) + alpha * dz[j];
        zt[j] = std::pow(std::abs(psi) / p, 1 / (p - 1)) * ((psi > 0) - (psi < 0));
    }
    return zt;
}

// Newton projection z <- z - M^-1 J^T (J M^-1 J^T)^-1 c.
bool project(const Setup &S, VectorXd &z, double tol) {
    const VectorXd mi = inverse_metric(S);
    for (int it = 0; it < 30; ++it) {
        const State st = evaluate(S, z);
        if (st.cnorm <= tol * S.L) return true;
        const MatrixXd JM = st.J * mi.asDiagonal();
        const MatrixXd A = JM * st.J.transpose();
        const VectorXd y = A.completeOrthogonalDecomposition().solve(st.c);
        z -= JM.transpose() * y;
        if (!z.allFinite()) return false;
    }
    return evaluate(S, z, false).cnorm <= tol * S.L;
}

} // namespace

void check_exponent(double p, bool force) {
    if (!(p > 1)) fail(ErrorCode::BadRange, "exponent must exceed 1, got " + fmt(p));
    if (!force && (p < 1.05 || p > 10)) fail(ErrorCode::BadRange, "exponent " + fmt(p) + " outside [1.05, 10]");
}

CriticalPoint solve_critical(const BoundaryCondition &bc, double p, const PlanarCurve &init, const SolveOptions &opts,
                             const std::string &mode) {
    check_exponent(p, opts.force_p);
    bc.validate();
    PlanarCurve c0 = single_piece(init);
    if (std::abs(c0.length() - bc.L) > 1e-9 * bc.L)
        fail(ErrorCode::BadRange, "initial curve length differs from the boundary data");
    if (bc.kind != BcKind::Closed) c0 = prepend_point(bc.P0, c0);
    const Setup S = solver_setup(c0, bc, p, opts.fix_phase);
    VectorXd z = to_z(c0);
    const double ctol = 1e-11 * std::max(1.0, S.L);

    int it = 0, relaxed = 0;
    State st = evaluate(S, z);
    for (; it <= opts.max_iter; ++it) {
        if (st.res <= opts.tol && st.cnorm <= ctol) break;
        if (it == opts.max_iter)
            fail(ErrorCode::NoConvergence, "residual " + fmt(st.res) + " after " + std::to_string(it) + " iterations");
        const auto dz = newton_direction(S, z, st);
        if (!dz) fail(ErrorCode::NoConvergence, "singular KKT system at iteration " + std::to_string(it));
        auto merit = [&](const State &s) { return s.res + s.cnorm / S.L; };
        const double phi0 = merit(st);
        double alpha = 1;
        std::optional<State> best;
        VectorXd zbest;
        double phibest = 0;
        for (int ls = 0; ls < 12; ++ls, alpha *= 0.5) {
            VectorXd zt = advance(S, z, *dz, alpha);
            State s = evaluate(S, zt);
            if (!std::isfinite(s.res)) continue;
            const double ph = merit(s);
            if (!best || ph < phibest) {
                best = s;
                zbest = zt;
                phibest = ph;
            }
            if (ph < (1 - 1e-4 * alpha) * phi0) {
                relaxed = 0;
                break;
            }
            // Full steps may raise the max-norm merit a little on degenerate
            // profiles; allow a few before backtracking.
            if (ls == 0 && relaxed < 5 && ph < 10 * phi0) {
                ++relaxed;
                best = s;
                zbest = zt;
                break;
            }
        }
        if (!best) fail(ErrorCode::NoConvergence, "line search produced no finite point");
        z = zbest;
        st = *best;
    }

    CriticalPoint cp;
    cp.curve = from_z(S, z);
    cp.p = p;
    cp.bc = bc;
    if (bc.kind == BcKind::Closed) {
        cp.bc.P0 = cp.bc.P1 = S.P0;
        const Vec2 t0(std::cos(z[Eigen::Index(S.n)]), std::sin(z[Eigen::Index(S.n)]));
        cp.bc.V0 = cp.bc.V1 = t0;
    }
    cp.multipliers.assign(st.mu.data(), st.mu.data() + st.mu.size());
    cp.residual = st.res;
    cp.constraint_residual = check_admissible(cp.curve, cp.bc).constrained;
    cp.mode = mode;
    cp.iterations = it;
    cp.fix_phase = opts.fix_phase;
    if (opts.expected_interior_zeros >= 0) {
        const int zc = interior_zeros(cp.curve);
        if (zc != opts.expected_interior_zeros)
            fail(ErrorCode::LeftBasin, "solution has " + std::to_string(zc) + " interior zeros, expected " +
                                           std::to_string(opts.expected_interior_zeros));
    }
    return cp;
}

std::string to_string(PinnedKind k) { return k == PinnedKind::Arc ? "arc" : "loop"; }

double sine_amplitude_parameter(double target, PinnedKind kind) {
    constexpr double j01 = 2.404825557695773, j11 = 3.831705970207512;
    auto J0 = [](double B) { return std::cyl_bessel_j(0.0, B); };
    double a, b, want;
    if (kind == PinnedKind::Arc) {
        if (!(target >= 0 && target < 1)) fail(ErrorCode::ModeNotFound, "arc needs 0 <= r < 1");
        a = 0;
        b = j01;
        want = target;
    } else {
        if (!(target >= 0 && target <= -J0(j11))) fail(ErrorCode::ModeNotFound, "loop needs 0 <= r <= " + fmt(-J0(j11)));
        a = j01;
        b = j11;
        want = -target;
    }
    // J0 is decreasing on both brackets.
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        if (J0(m) > want) a = m;
        else b = m;
    }
    return 0.5 * (a + b);
}

namespace {

using Check = std::function<void(const CriticalPoint &)>;

CriticalPoint solve_checked(const BoundaryCondition &bc, double p, const PlanarCurve &init, const SolveOptions &opts,
                            const std::string &mode, const Check &check) {
    CriticalPoint cp = solve_critical(bc, p, init, opts, mode);
    if (check) check(cp);
    return cp;
}

CriticalPoint solve_continued(const BoundaryCondition &bc, double p, const PlanarCurve &init, SolveOptions opts,
                              const std::string &mode, const Check &check = {}) {
    try {
        return solve_checked(bc, p, init, opts, mode, check);
    } catch (const Error &e) {
        if (e.code() != ErrorCode::NoConvergence && e.code() != ErrorCode::LeftBasin) throw;
        if (p == 2) throw;
    }
    // Continuation in p from 2.
    CriticalPoint cp = solve_checked(bc, 2.0, init, opts, mode, check);
    const int steps = std::max(2, int(std::ceil(std::abs(p - 2) / 0.1)));
    for (int s = 1; s <= steps; ++s) {
        const double q = 2 + (p - 2) * double(s) / steps;
        SolveOptions o = opts;
        o.force_p = true;
        cp = solve_checked(bc, q, cp.curve, o, mode, check);
    }
    cp.p = p;
    return cp;
}

} // namespace

CriticalPoint make_pinned_mode(double p, double r, int n, PinnedKind kind, double L, std::size_t nodes,
                               SolveOptions opts) {
    check_exponent(p, opts.force_p);
    if (n < 1) fail(ErrorCode::ModeNotFound, "mode index must be positive");
    const double B = sine_amplitude_parameter(r, kind);
    const Grid g = Grid::uniform(L, nodes);
    const double A = B * n * kPi / L;
    std::vector<double> k(nodes);
    for (std::size_t i = 0; i < nodes; ++i) k[i] = A * std::sin(n * kPi * g.s(i) / L);
    const double th0 = kind == PinnedKind::Arc ? -B : kPi - B;
    const auto init = PlanarCurve::from_profile(g, std::move(k), Vec2::Zero(), th0);
    const auto bc = BoundaryCondition::pinned(r, L);
    opts.expected_interior_zeros = n - 1;
    const std::string mode = to_string(kind) + "-" + std::to_string(n);
    try {
        // Loops cross themselves and arcs do not; the zero count alone lets
        // one slide into the other at small p. At r = 0 the loop only
        // touches itself at the shared endpoint.
        const Check shape = [&](const CriticalPoint &cp) {
            if (r > 0 && self_intersects(reconstruct(cp.curve).x) != (kind == PinnedKind::Loop))
                fail(ErrorCode::LeftBasin, "solution is not a " + to_string(kind));
        };
        return solve_continued(bc, p, init, opts, mode, shape);
    } catch (const Error &e) {
        if (e.code() == ErrorCode::BadRange) throw;
        fail(ErrorCode::ModeNotFound, mode + " at p=" + fmt(p) + ", r=" + fmt(r) + ": " + e.what());
    }
}

CriticalPoint make_circle(double p, int m, double L, std::size_t nodes) {
    check_exponent(p, true);
    if (m < 1) fail(ErrorCode::BadRange, "circle needs m >= 1");
    const Grid g = Grid::uniform(L, nodes);
    const auto init = PlanarCurve::from_profile(g, std::vector<double>(nodes, 2 * kPi * m / L));
    SolveOptions o;
    o.force_p = true;
    return solve_critical(BoundaryCondition::closed(L), p, init, o, "circle-" + std::to_string(m));
}

CriticalPoint make_figure_eight(double p, int n, double L, std::size_t nodes, SolveOptions opts) {
    check_exponent(p, opts.force_p);
    if (n < 1) fail(ErrorCode::BadRange, "figure-eight needs n >= 1");
    constexpr double j01 = 2.404825557695773;
    const Grid g = Grid::uniform(L, nodes);
    const double A = j01 * 2 * kPi * n / L;
    std::vector<double> k(nodes);
    for (std::size_t i = 0; i < nodes; ++i) k[i] = A * std::sin(2 * kPi * n * g.s(i) / L);
    const auto init = PlanarCurve::from_profile(g, std::move(k), Vec2::Zero(), -j01);
    opts.fix_phase = true;
    opts.expected_interior_zeros = 2 * n - 1;
    return solve_continued(BoundaryCondition::closed(L), p, init, opts, "fig8-" + std::to_string(n));
}

FlatCoreLoop make_flatcore_loop(double p, std::size_t nodes) {
    if (!(p > 2)) fail(ErrorCode::UnsupportedExponent, "flat-core loops need p > 2");
    check_exponent(p, false);
    if (nodes < 5 || nodes % 2 == 0) fail(ErrorCode::BadRange, "loop needs an odd node count >= 5");
    // With horizontal force and k = 0 at horizontal end tangents the first
    // integral gives (p-1)|k|^p = a (1 - cos theta). Arclength from the end is
    // then an incomplete beta function of sin^2(theta/2), and the unit
    // length fixes a. Only p > 2 keeps the end integral finite.
    const double alpha = 0.5 - 1.0 / p;
    const double B = boost::math::beta(alpha, 0.5);
    const Grid g = Grid::uniform(1.0, nodes);
    std::vector<double> k(nodes);
    const std::size_t mid = nodes / 2;
    for (std::size_t i = 0; i <= mid; ++i) {
        const double q = std::min(1.0, 2 * g.s(i));
        double x;
        try {
            x = q >= 1 ? 1.0 : boost::math::ibeta_inv(alpha, 0.5, q);
        } catch (const std::exception &e) {
            fail(ErrorCode::RootNotBracketed, std::string("arclength inversion failed: ") + e.what());
        }
        k[i] = k[nodes - 1 - i] = 2 * B * std::pow(x, 1.0 / p);
    }
    // The profile has an infinite slope at the ends, so the trapezoid turning
    // is off by O(h^(1+1/p)); rescale to exactly one turn.
    double turn = 0;
    for (std::size_t i = 0; i + 1 < nodes; ++i) turn += 0.5 * g.h * (k[i] + k[i + 1]);
    for (auto &v : k) v *= 2 * kPi / turn;

    FlatCoreLoop out;
    out.p = p;
    out.curve = PlanarCurve::from_profile(g, k);
    const auto rec = reconstruct(out.curve);
    out.chord = rec.x.back().x() - rec.x.front().x();
    out.f2_residual = (rec.t.back() - Vec2(1, 0)).norm();
    out.f3_end_residual = std::max(std::abs(k.front()), std::abs(k.back()));
    out.f3_min_interior = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < nodes; ++i) out.f3_min_interior = std::min(out.f3_min_interior, k[i]);
    double f4 = 0;
    for (std::size_t i = 0; i < nodes; ++i) f4 = std::max(f4, std::abs(k[i] - k[nodes - 1 - i]));
    // Pinned symmetry after laying the chord on the x-axis.
    const Vec2 d = rec.x.back() - rec.x.front();
    const auto sym = verify_pinned_symmetry(out.curve.rotated(-std::atan2(d.y(), d.x()), Vec2::Zero()), 1e-6);
    out.f4_residual = std::max({f4, sym.x, sym.y});
    return out;
}

double FlatCoreDecomposition::total_length() const {
    double s = loop_arclength * double(N());
    for (double l : seg_lengths) s += l;
    return s;
}

bool FlatCoreDecomposition::quasi_alternating() const {
    if (seg_lengths.size() != N() + 1 || N() == 0) return false;
    if (!(seg_lengths.front() > 0 && seg_lengths.back() > 0)) return false;
    for (std::size_t j = 1; j < N(); ++j)
        if (seg_lengths[j] == 0 && sigmas[j - 1] != sigmas[j]) return false;
    return true;
}

PlanarCurve assemble_flatcore(const FlatCoreLoop &loop, const FlatCoreDecomposition &d) {
    if (d.seg_lengths.size() != d.N() + 1) fail(ErrorCode::BadRange, "need N+1 segment lengths");
    for (int s : d.sigmas)
        if (s != 1 && s != -1) fail(ErrorCode::BadRange, "loop orientation must be +1 or -1");
    for (double l : d.seg_lengths)
        if (!(l >= 0)) fail(ErrorCode::BadRange, "segment lengths must be nonnegative");
    if (!(d.loop_arclength > 0)) fail(ErrorCode::NonpositiveScale, "loop arclength must be positive");
    PlanarCurve plus = loop.curve;
    const double L1 = plus.length();
    if (std::abs(d.loop_arclength - L1) > 1e-14 * L1) plus = rescale_segment(plus, 0, L1, d.loop_arclength / L1);
    const double h = plus.grid().h;
    auto minus_piece = plus.pieces().front();
    for (auto &v : minus_piece.k) v = -v;
    minus_piece.theta0 = -minus_piece.theta0;
    const PlanarCurve minus(Vec2::Zero(), {minus_piece});

    std::vector<PlanarCurve> parts;
    for (std::size_t j = 0; j <= d.N(); ++j) {
        const double l = d.seg_lengths[j];
        if (l > 0) {
            const std::size_t cells = std::max<std::size_t>(1, std::size_t(std::llround(l / h)));
            parts.push_back(PlanarCurve::from_profile(Grid{cells + 1, h, h * double(cells)},
                                                      std::vector<double>(cells + 1, 0.0)));
        }
        if (j < d.N()) parts.push_back(d.sigmas[j] > 0 ? plus : minus);
    }
    if (parts.empty()) fail(ErrorCode::EmptyList, "empty decomposition");
    return concat(parts);
}

PlanarCurve assemble_flatcore(double p, const FlatCoreDecomposition &d, std::size_t loop_nodes) {
    return assemble_flatcore(make_flatcore_loop(p, loop_nodes), d);
}

SpaceCurve make_helix(double radius, double pitch, double turns, std::size_t n) {
    if (!(radius > 0) || !(turns > 0) || n < 3) fail(ErrorCode::BadRange, "helix needs radius, turns > 0 and n >= 3");
    const double c = pitch / (2 * kPi);
    const double omega = 1 / std::sqrt(radius * radius + c * c);
    const double L = turns * 2 * kPi / omega, h = L / double(n - 1);
    auto chord = [&](double d) { return std::hypot(2 * radius * std::sin(omega * d / 2), c * omega * d); };
    double d = h;
    for (int it = 0; it < 60; ++it) d *= h / chord(d);
    std::vector<Vec3> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = d * double(i);
        x[i] = Vec3(radius * std::cos(omega * s), radius * std::sin(omega * s), c * omega * s);
    }
    return SpaceCurve::from_points(Grid{n, h, L}, std::move(x));
}

PlanarCurve to_uniform(const PlanarCurve &c, std::size_t n) {
    if (c.piece_count() == 1 && c.k().size() == n) return c;
    const Grid g = Grid::uniform(c.length(), n);
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = curvature_at(c, std::min(g.s(i), c.length()), true);
    return PlanarCurve::from_profile(g, std::move(k), c.base_point(), c.base_angle());
}

PlanarCurve project_admissible(const PlanarCurve &c, const BoundaryCondition &bc, double tol) {
    const PlanarCurve u = single_piece(c);
    const Setup S = flow_setup(u, bc, 2.0);
    VectorXd z = to_z(u);
    if (!project(S, z, tol)) fail(ErrorCode::ProjectionFailed, "Newton projection did not converge");
    return from_z(S, z);
}

FlowTrace gradient_flow(const PlanarCurve &c0, const BoundaryCondition &bc, double p, const FlowOptions &opts) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    PlanarCurve u = single_piece(c0);
    if (bc.kind != BcKind::Closed) u = prepend_point(bc.P0, u);
    // Same constraints as the solver so that its output is a fixed point.
    const Setup S = solver_setup(u, bc, p, false);
    const VectorXd mi = inverse_metric(S);
    VectorXd z = to_z(u);
    if (!project(S, z, opts.projection_tol)) fail(ErrorCode::ProjectionFailed, "initial curve cannot be projected");

    FlowTrace tr;
    State st = evaluate(S, z);
    tr.energies.push_back(st.E);
    tr.residuals.push_back(st.cnorm);
    double alpha = 1e-3;
    for (int it = 0; it < opts.max_iter; ++it) {
        tr.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        if (tr.seconds > opts.time_budget || st.E < opts.stop_below) break;
        VectorXd grad = st.g;
        if (st.mu.size() > 0) grad += st.J.transpose() * st.mu;
        const VectorXd d = -mi.cwiseProduct(grad);
        if (st.res <= opts.grad_tol) {
            tr.converged = true;
            break;
        }
        const double dn2 = -d.dot(grad);  // |d|_M^2
        bool accepted = false, projected_any = false;
        while (alpha >= 1e-14) {
            VectorXd zt = z + alpha * d;
            if (project(S, zt, opts.projection_tol)) {
                projected_any = true;
                State s = evaluate(S, zt);
                if (s.E <= st.E - 1e-4 * alpha * dn2 && s.E <= st.E) {
                    z = zt;
                    st = s;
                    accepted = true;
                    tr.steps.push_back(alpha);
                    alpha *= 2;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (!projected_any) fail(ErrorCode::ProjectionFailed, "no step size keeps the curve admissible");
            tr.converged = true;  // no descent left at machine step sizes
            break;
        }
        tr.energies.push_back(st.E);
        tr.residuals.push_back(st.cnorm);
        tr.iterations = it + 1;
    }
    tr.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    tr.final_curve = from_z(S, z);
    return tr;
}

StabilityReport stability_probe(const CriticalPoint &cp) {
    const PlanarCurve &c = cp.curve;
    if (c.piece_count() != 1) fail(ErrorCode::GridMismatch, "probe needs a single uniform piece");
    const Setup S = solver_setup(c, cp.bc, cp.p, cp.fix_phase);
    const VectorXd z = to_z(c);
    const State st = evaluate(S, z);
    const Eigen::Index N = z.size(), m = st.J.rows();
    const VectorXd mi = inverse_metric(S);
    const VectorXd sq = mi.cwiseSqrt();  // M^{-1/2}

    auto lag_grad = [&](const VectorXd &zz) {
        const State s = evaluate(S, zz);
        VectorXd g = s.g;
        if (m > 0) g += s.J.transpose() * st.mu;
        return g;
    };
    const double kmax = max_abs(z, S.n);
    const double dk = 1e-5 * std::max(kmax, 1.0 / S.L);
    MatrixXd H(N, N);
    for (Eigen::Index j = 0; j < N; ++j) {
        const double d = j < Eigen::Index(S.n) ? dk : 1e-5;
        VectorXd zp = z, zm = z;
        zp[j] += d;
        zm[j] -= d;
        H.col(j) = (lag_grad(zp) - lag_grad(zm)) / (2 * d);
    }
    // Scaled variables z^ = M^{1/2} z.
    MatrixXd Hs = sq.asDiagonal() * H * sq.asDiagonal();
    StabilityReport rep;
    const double hmax = Hs.cwiseAbs().maxCoeff();
    rep.asymmetry = hmax > 0 ? (Hs - Hs.transpose()).cwiseAbs().maxCoeff() / hmax : 0;
    if (rep.asymmetry > 1e-6) fail(ErrorCode::IllConditioned, "Hessian asymmetry " + fmt(rep.asymmetry));
    Hs = 0.5 * (Hs + Hs.transpose()).eval();

    // The phase row k_0 = 0 sits where |k|^{p-2} vanishes, so for p > 2 it
    // barely restrains the shift mode. On the tangent space use the slice
    // <dz, (k', k(0))>_M = 0 instead.
    MatrixXd Jt = st.J;
    if (S.phase) {
        const std::size_t n = S.n;
        const auto &k = c.k();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ip = i + 1 < n ? i + 1 : 1, im = i > 0 ? i - 1 : n - 2;
            Jt(m - 1, Eigen::Index(i)) = (k[ip] - k[im]) / (2 * S.h) / mi[Eigen::Index(i)];
        }
        Jt(m - 1, Eigen::Index(n)) = k[0] / mi[Eigen::Index(n)];
    }
    MatrixXd Hz;
    if (m > 0) {
        const MatrixXd Js = Jt * sq.asDiagonal();
        Eigen::HouseholderQR<MatrixXd> qr(Js.transpose());
        MatrixXd T = Hs;
        T.applyOnTheLeft(qr.householderQ().transpose());
        T.applyOnTheRight(qr.householderQ());
        Hz = T.bottomRightCorner(N - m, N - m);
        Hz = 0.5 * (Hz + Hz.transpose()).eval();
    } else {
        Hz = Hs;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Hz, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorCode::IllConditioned, "eigensolver failed");
    const VectorXd ev = es.eigenvalues();
    rep.dimension = std::size_t(ev.size());
    rep.min_eigenvalue = ev[0];
    rep.scale = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(5, ev.size()); ++i) rep.lowest.push_back(ev[i]);
    rep.stable = rep.min_eigenvalue >= -1e-6 * rep.scale;
    return rep;
}

std::string to_string(PElasticaClass c) {
    switch (c) {
    case PElasticaClass::Wavelike: return "wavelike";
    case PElasticaClass::Flatcore: return "flatcore";
    case PElasticaClass::Circular: return "circular";
    case PElasticaClass::Unknown: break;
    }
    return "unknown";
}

PElasticaClass classify_pelastica(const PlanarCurve &c) {
    const auto k = c.k_right();
    double kmax = 0, mean = 0;
    for (double v : k) {
        kmax = std::max(kmax, std::abs(v));
        mean += v;
    }
    mean /= double(k.size());
    if (kmax == 0) return PElasticaClass::Unknown;
    double dev = 0;
    for (double v : k) dev = std::max(dev, std::abs(v - mean));
    if (dev <= 1e-8 * kmax) return PElasticaClass::Circular;
    if (!c.is_uniform()) return PElasticaClass::Unknown;
    const double h = c.grid().h;
    std::size_t run = 0;
    for (double v : k) {
        run = std::abs(v) <= 1e-12 * kmax ? run + 1 : 0;
        if (double(run) * h > 3 * h) return PElasticaClass::Flatcore;
    }
    try {
        detect_well_periodic(Profile::of(c));
        return PElasticaClass::Wavelike;
    } catch (const Error &) {
        return PElasticaClass::Unknown;
    }
}

} // namespace elastica
