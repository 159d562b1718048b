#include "elastica/profiles.hh"
#include "elastica/error.hh"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace elastica {

namespace {

std::string at(const char *what, double s) {
    std::ostringstream os;
    os.precision(6);
    os << what << " at s=" << s;
    return os.str();
}

double max_abs(const std::vector<double> &v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

int sign(double x) { return (x > 0) - (x < 0); }

} // namespace

double Profile::operator()(double s) const {
    const std::size_t n = k.size();
    const double L = length();
    s = std::clamp(s, 0.0, L);
    std::size_t cell = std::min<std::size_t>(std::size_t(s / h), n - 2);
    if (n < 4) {
        const double w = s / h - double(cell);
        return (1 - w) * k[cell] + w * k[cell + 1];
    }
    std::size_t i0 = cell == 0 ? 0 : cell - 1;
    if (i0 + 3 >= n) i0 = n - 4;
    const double x = s / h - double(i0);
    const double *f = &k[i0];
    return -(x - 1) * (x - 2) * (x - 3) / 6.0 * f[0] + x * (x - 2) * (x - 3) / 2.0 * f[1] -
           x * (x - 1) * (x - 3) / 2.0 * f[2] + x * (x - 1) * (x - 2) / 6.0 * f[3];
}

Profile Profile::of(const PlanarCurve &c) {
    const Grid g = c.grid();
    return Profile{c.k_right(), g.h};
}

double default_zero_tolerance(const Profile &k) {
    double dmax = 0;
    for (std::size_t i = 0; i + 1 < k.k.size(); ++i) dmax = std::max(dmax, std::abs(k.k[i + 1] - k.k[i]) / k.h);
    return 10 * k.h * dmax;
}

std::vector<double> inflections(const Profile &k, double eps) {
    if (k.k.size() < 2) return {};
    if (eps < 0) eps = default_zero_tolerance(k);
    const auto &v = k.k;
    const std::size_t n = v.size();
    const double h = k.h;
    std::vector<double> z;

    if (std::abs(v.front()) <= eps) z.push_back(0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (v[i] * v[i + 1] < 0) {
            double a = h * double(i), b = h * double(i + 1);
            // Node signs anchor the bracket; the interpolant at a node can
            // differ from the sample by rounding.
            const int sa = sign(v[i]);
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b), fm = k(m);
                if (sign(fm) == sa) {
                    a = m;
                } else {
                    b = m;
                }
            }
            z.push_back(0.5 * (a + b));
        } else if (i > 0 && v[i] == 0.0 && v[i - 1] * v[i + 1] < 0) {
            z.push_back(h * double(i));
        }
    }
    // Touch points: |k| has a local minimum below eps without a sign change.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double a = std::abs(v[i]);
        if (a <= eps && a <= std::abs(v[i - 1]) && a <= std::abs(v[i + 1]) && v[i - 1] * v[i] > 0 &&
            v[i] * v[i + 1] > 0)
            z.push_back(h * double(i));
    }
    if (std::abs(v.back()) <= eps) z.push_back(k.length());
    std::sort(z.begin(), z.end());

    // Merge clusters closer than 3h; endpoints win inside their cluster.
    std::vector<double> out;
    std::size_t i = 0;
    while (i < z.size()) {
        std::size_t j = i;
        while (j + 1 < z.size() && z[j + 1] - z[j] < 3 * h) ++j;
        double rep = 0;
        if (z[i] == 0.0) rep = 0.0;
        else if (z[j] == k.length()) rep = k.length();
        else {
            for (std::size_t q = i; q <= j; ++q) rep += z[q];
            rep /= double(j - i + 1);
        }
        out.push_back(rep);
        i = j + 1;
    }
    return out;
}

WellPeriodicProfile detect_well_periodic(const Profile &k, double tol) {
    WellPeriodicProfile w;
    w.tol = tol;
    const double h = k.h, L = k.length();
    const double kmax = max_abs(k.k);
    if (kmax == 0) fail(ErrorCode::NotWellPeriodic, "profile vanishes identically");
    w.zeros = inflections(k);
    const auto &z = w.zeros;
    if (z.size() < 2) fail(ErrorCode::NotWellPeriodic, "fewer than two zeros");

    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) gaps.push_back(z[i + 1] - z[i]);
    std::vector<double> sorted = gaps;
    std::nth_element(sorted.begin(), sorted.begin() + long(sorted.size() / 2), sorted.end());
    double T = sorted[sorted.size() / 2];

    // Least-squares fit z_i = a + n_i T over integer labels n_i.
    std::vector<double> idx(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        idx[i] = std::round((z[i] - z[0]) / T);
        if (i > 0 && idx[i] != idx[i - 1] + 1) fail(ErrorCode::NotWellPeriodic, at("zero set is not T Z", z[i]));
    }
    double a = z[0];
    if (z.size() >= 3) {
        double sn = 0, sz = 0, snn = 0, snz = 0;
        const double m = double(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            sn += idx[i];
            sz += z[i];
            snn += idx[i] * idx[i];
            snz += idx[i] * z[i];
        }
        T = (m * snz - sn * sz) / (m * snn - sn * sn);
        a = (sz - T * sn) / m;
    } else {
        T = z[1] - z[0];
    }
    w.T = T;
    for (std::size_t i = 0; i < z.size(); ++i) w.zero_set_residual = std::max(w.zero_set_residual, std::abs(z[i] - a - idx[i] * T));
    if (w.zero_set_residual > 2 * h + tol * T) fail(ErrorCode::NotWellPeriodic, "zero gaps are not uniform");
    w.s0 = a - T * std::floor(a / T);
    if (w.s0 > T - 1e-9 * T) w.s0 = 0;

    // Sign alternation between consecutive zeros.
    int prev = 0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        int sg = 0;
        for (double s = z[i] + 2 * h; s < z[i + 1] - 2 * h + 1e-12; s += h) {
            const int here = sign(k(s));
            if (here == 0 || (sg != 0 && here != sg)) fail(ErrorCode::NotWellPeriodic, at("sign changes inside a half wave", s));
            sg = here;
        }
        if (sg == 0) sg = sign(k(0.5 * (z[i] + z[i + 1])));
        if (prev != 0 && sg == prev) fail(ErrorCode::NotWellPeriodic, at("sign alternation fails", z[i]));
        prev = sg;
    }

    const double abs_tol = tol * kmax;
    for (double s = 0; s + T <= L + 1e-12; s += h)
        w.antiperiodic_residual = std::max(w.antiperiodic_residual, std::abs(k(s) + k(s + T)));
    for (double zi : z)
        for (double sg = h; zi - sg >= 0 && zi + sg <= L; sg += h)
            w.odd_residual = std::max(w.odd_residual, std::abs(k(zi + sg) + k(zi - sg)));
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double c = 0.5 * (z[i] + z[i + 1]);
        for (double sg = 0; sg <= 0.5 * T; sg += h)
            w.symmetry_residual = std::max(w.symmetry_residual, std::abs(k(c + sg) - k(c - sg)));
    }
    if (w.antiperiodic_residual > abs_tol) fail(ErrorCode::NotWellPeriodic, "antiperiodicity residual too large");
    if (w.odd_residual > abs_tol) fail(ErrorCode::NotWellPeriodic, "oddness residual too large");
    if (w.symmetry_residual > abs_tol) fail(ErrorCode::NotWellPeriodic, "half-wave symmetry residual too large");

    for (double s = 0; s <= T + 1e-12 && w.s0 + s <= L + 1e-12; s += h) w.phi.push_back(k(w.s0 + s));
    return w;
}

FoldInfo fold_index(const Profile &k, double tol, double tol_rel) {
    const auto w = detect_well_periodic(k, tol);
    if (std::abs(k.k.front()) > default_zero_tolerance(k)) fail(ErrorCode::NotFolded, "k(0) does not vanish");
    const double L = k.length();
    const double ratio = L / w.T;
    const long m = std::lround(ratio);
    if (m < 1 || std::abs(ratio - double(m)) > tol_rel * ratio)
        fail(ErrorCode::NotFolded, "L/T = " + std::to_string(ratio) + " is not an integer");
    return {int(m), L / double(m)};
}

SymmetryResiduals verify_symmetry_lemma(const PlanarCurve &c, double s1, double s2, double s3) {
    const Profile k = Profile::of(c);
    const double h = k.h, L = k.length();
    const double eps = default_zero_tolerance(k);
    if (!(0 <= s1 && s1 < s2 && s2 < s3 && s3 <= L + 1e-12))
        fail(ErrorCode::HypothesisViolated, "need 0 <= s1 < s2 < s3 <= L");
    for (double s : {s1, s2, s3})
        if (std::abs(k(s)) > eps) fail(ErrorCode::HypothesisViolated, at("curvature does not vanish", s));
    auto arc_sign = [&](double a, double b) {
        int sg = 0;
        for (double s = a + 2 * h; s < b - 2 * h + 1e-12; s += h) {
            const int here = sign(k(s));
            if (here == 0 || (sg != 0 && here != sg))
                fail(ErrorCode::HypothesisViolated, at("curvature vanishes inside an arc", s));
            sg = here;
        }
        return sg != 0 ? sg : sign(k(0.5 * (a + b)));
    };
    if (arc_sign(s1, s2) == arc_sign(s2, s3)) fail(ErrorCode::HypothesisViolated, "sign alternation fails");

    SymmetryResiduals r;
    const auto rec = reconstruct(c);
    for (double sg = -s1; s3 + sg <= L + 1e-12; sg += h) {
        const double a1 = angle_at(c, rec, s1 + sg), a3 = angle_at(c, rec, std::min(L, s3 + sg));
        r.tangent = std::max(r.tangent, (Vec2(std::cos(a1), std::sin(a1)) - Vec2(std::cos(a3), std::sin(a3))).norm());
    }
    for (double sg = 0; sg <= s3 - s1 + 1e-12; sg += h)
        r.curvature = std::max(r.curvature, std::abs(k(s1 + sg) + k(s3 - sg)));
    return r;
}

PinnedSymmetryResiduals verify_pinned_symmetry(const PlanarCurve &c, double tol) {
    const auto rec = reconstruct(c);
    const double scale = std::max(1.0, c.length());
    const Vec2 P0 = rec.x.front(), P1 = rec.x.back();
    if (P0.norm() > tol * scale || std::abs(P1.y()) > tol * scale)
        fail(ErrorCode::BadNormalization, "endpoints are not (0,0) and (l,0)");
    PinnedSymmetryResiduals r;
    r.chord = P1.x();
    if (std::abs(r.chord) <= tol * scale) fail(ErrorCode::ZeroChord, "endpoints coincide");
    const std::size_t n = rec.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 &a = rec.x[i], &b = rec.x[n - 1 - i];
        r.x = std::max(r.x, std::abs(b.x() + a.x() - r.chord));
        r.y = std::max(r.y, std::abs(b.y() - a.y()));
    }
    return r;
}

} // namespace elastica
