#include "elastica/harness.hh"
#include "elastica/error.hh"
#include "elastica/profiles.hh"
#include "elastica/surgery.hh"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

namespace elastica {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Start-of-curve zeros used by the rotations.
std::vector<double> zeros_of(const PlanarCurve &c) { return inflections(Profile::of(c)); }

enum class Conditions { C, Cp };

SuiteReport run_suite(const Subject &s, const std::string &construction, std::vector<double> js, Conditions cond) {
    SuiteReport rep;
    rep.id = s.id;
    rep.construction = construction;
    rep.conditions = cond == Conditions::C ? "C" : "Cp";
    if (js.empty())
        js = s.decomposition && construction.rfind("flatcore-", 0) == 0 ? default_js(s.decomposition->loop_arclength)
                                                                         : default_js(s.curve.length());
    std::sort(js.begin(), js.end());

    const Family fam = make_family(s, construction);
    std::vector<std::future<PlanarCompetitor>> jobs;
    for (double j : js) jobs.push_back(std::async(std::launch::async, fam, j));
    std::vector<PlanarCompetitor> comps;
    for (auto &f : jobs) comps.push_back(f.get());

    rep.energy = comps.front().report.energy_before;
    rep.noise_floor = comps.front().report.noise_floor;
    std::vector<double> dist;
    rep.converges = true;
    rep.energy_ok = true;
    rep.regularity_violated = true;
    rep.admissible = true;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto &r = comps[i].report;
        SuiteRow row;
        row.j = js[i];
        row.distance = r.distance;
        row.energy_margin = r.energy_margin;
        row.margin_bar = r.margin_bar;
        row.regularity = cond == Conditions::C ? r.max_jump() : std::abs(comps[i].curve.k_right().front());
        if (i > 0 && !(row.distance < rep.rows.back().distance)) rep.converges = false;
        if (row.energy_margin > std::max(row.margin_bar, 1e-12 * rep.energy)) rep.energy_ok = false;
        if (!(row.regularity >= 10 * rep.noise_floor)) rep.regularity_violated = false;
        if (r.bc_residuals.constrained > 1e-8) rep.admissible = false;
        dist.push_back(row.distance);
        rep.rows.push_back(row);
    }
    if (js.size() >= 2) {
        rep.order = distance_order(js, dist);
        if (!(rep.order >= 0.8)) rep.converges = false;
    } else {
        rep.converges = false;
    }
    if (rep.passed()) {
        rep.verdict = "instability mechanism confirmed";
    } else {
        std::string why;
        auto add = [&](bool ok, const char *what) {
            if (!ok) why += (why.empty() ? "" : ", ") + std::string(what);
        };
        add(rep.converges, "competitors do not converge");
        add(rep.energy_ok, "energy not lowered within the error bar");
        add(rep.regularity_violated, cond == Conditions::C ? "no curvature jump above noise" : "k_j(0) below noise");
        add(rep.admissible, "boundary data not kept");
        rep.verdict = "no instability found: " + why;
    }
    return rep;
}

} // namespace

////////////////////////////////////////////////////////////////////////////////
// Suites
////////////////////////////////////////////////////////////////////////////////
Subject subject_of(const CriticalPoint &cp, std::string id) {
    return Subject{id.empty() ? cp.mode : std::move(id), cp.curve, cp.bc, cp.p, std::nullopt};
}

std::vector<double> default_js(double L) { return {10 / L, 20 / L, 40 / L, 80 / L}; }

Family make_family(const Subject &s, const std::string &construction) {
    const EnergyDensity f = EnergyDensity::power(s.p);
    const PlanarCurve c = s.curve;
    const BcKind kind = s.bc.kind;
    if (construction == "global-rot") {
        return [=](double) {
            const auto wp = detect_well_periodic(Profile::of(c));
            const double s1 = wp.s0 + 0.5 * wp.T;
            return global_rotation_competitor(c, s1, s1 + 2 * wp.T, f, kind);
        };
    }
    if (construction == "local-rot") {
        return [=](double j) {
            const auto z = zeros_of(c);
            if (z.size() < 3) fail(ErrorCode::HypothesisViolated, "need three zeros of the curvature");
            return local_rotation_family(c, z[0], z[2], j, f, kind);
        };
    }
    if (construction == "pinned-shift") return [=](double j) { return pinned_shift_family(c, j, f); };
    if (construction == "loop-rescale") return [=](double j) { return pinned_loop_rescale_family(c, j, f); };
    if (construction == "flatcore-shift" || construction == "flatcore-swap") {
        if (!s.decomposition) fail(ErrorCode::HypothesisViolated, construction + " needs a flat-core decomposition");
        const FlatCoreDecomposition d = *s.decomposition;
        if (construction == "flatcore-shift") return [=](double j) { return flatcore_endpoint_shift(c, d, j, f); };
        return [=](double j) { return flatcore_loop_swap(c, d, j, f); };
    }
    fail(ErrorCode::BadRange, "unknown construction '" + construction + "'");
}

SuiteReport run_suite_C(const Subject &s, const std::string &construction, std::vector<double> js) {
    return run_suite(s, construction, std::move(js), Conditions::C);
}

SuiteReport run_suite_Cp(const Subject &s, const std::string &construction, std::vector<double> js) {
    return run_suite(s, construction, std::move(js), Conditions::Cp);
}

SuiteReport run_pinned_suite(const Subject &s, std::vector<double> js) {
    std::string construction;
    if (s.decomposition) {
        construction = "flatcore-shift";
    } else {
        // Antiperiods from the zero count; fold_index is too strict for the
        // cusp-like zeros of p > 2 modes with many folds.
        const double L = s.curve.length(), h = s.curve.grid().h;
        const auto z = zeros_of(s.curve);
        const auto interior = std::count_if(z.begin(), z.end(), [&](double x) { return x > 2 * h && x < L - 2 * h; });
        const FoldInfo fi{int(interior) + 1, L / double(interior + 1)};
        if (fi.m == 2)
            construction = "pinned-shift";
        else if (fi.m >= 3)
            construction = "local-rot";
        else if (self_intersects(reconstruct(s.curve).x))
            construction = "loop-rescale";
    }
    if (construction.empty()) {
        SuiteReport rep;
        rep.id = s.id;
        rep.conditions = "Cp";
        rep.applicable = false;
        rep.energy = energy(s.curve, EnergyDensity::power(s.p));
        rep.verdict = "no instability mechanism";
        return rep;
    }
    // A local rotation leaves k(0) alone; its evidence is the corner in k.
    if (construction == "local-rot") return run_suite_C(s, construction, std::move(js));
    return run_suite_Cp(s, construction, std::move(js));
}

////////////////////////////////////////////////////////////////////////////////
// Certificates
////////////////////////////////////////////////////////////////////////////////
Certificate instability_certificate(const Subject &s, const std::string &construction, const CertificateOptions &opts) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    Certificate cert;
    cert.construction = construction;
    const auto est = energy_estimate(s.curve, EnergyDensity::power(s.p));
    cert.energy = est.value;
    cert.error_bar = est.error_bar;
    cert.threshold = est.value - std::max(1e-6 * est.value, 10 * est.error_bar);

    double j = opts.j > 0 ? opts.j : default_js(s.curve.length()).back();
    // Relaxing a flat-core competitor gains a high power of 1/j, below the
    // threshold for the large j; start one tenth of a loop away instead.
    if (opts.j <= 0 && s.decomposition && construction.rfind("flatcore-", 0) == 0)
        j = 10 / s.decomposition->loop_arclength;
    const PlanarCompetitor comp = make_family(s, construction)(j);
    cert.start_energy = comp.report.energy_after;

    BoundaryCondition bc = boundary_of(comp.curve, s.bc.kind);
    bc.L = s.bc.L;
    FlowOptions fo;
    fo.max_iter = opts.max_iter;
    fo.time_budget = opts.time_budget;
    fo.stop_below = cert.threshold;
    cert.trace = gradient_flow(comp.curve, bc, s.p, fo);
    cert.final_energy = cert.trace.energies.back();
    cert.drop = cert.energy - cert.final_energy;
    cert.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    cert.valid = cert.final_energy < cert.threshold;
    if (!cert.valid)
        fail(ErrorCode::NoDropFound, "flow from " + construction + " ended at " + fmt(cert.final_energy) +
                                         ", threshold " + fmt(cert.threshold));
    return cert;
}

////////////////////////////////////////////////////////////////////////////////
// Random perturbations
////////////////////////////////////////////////////////////////////////////////
std::uint64_t seed_from_env() {
    if (const char *v = std::getenv("ELASTICA_SEED")) {
        char *end = nullptr;
        const auto s = std::strtoull(v, &end, 10);
        if (end != v) return s;
    }
    return 20240601;
}

RandomCheck random_perturbation_check(const CriticalPoint &cp, int trials, double max_distance, std::uint64_t seed) {
    std::mt19937_64 rng(seed ? seed : seed_from_env());
    std::normal_distribution<double> gauss;
    const PlanarCurve c = cp.curve.piece_count() == 1 ? cp.curve : cp.curve.flatten();
    const Grid g = c.grid();
    const double F = bending_energy(c, cp.p);
    constexpr int modes = 6;

    RandomCheck out;
    out.trials = trials;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> a(modes), b(modes);
        for (int m = 0; m < modes; ++m) {
            a[m] = gauss(rng) / (m + 1);
            b[m] = gauss(rng) / (m + 1);
        }
        const double dtheta = gauss(rng);
        double eps = max_distance;
        bool done = false;
        for (int tries = 0; tries < 40 && !done; ++tries, eps *= 0.5) {
            std::vector<double> k = c.k();
            for (std::size_t i = 0; i < g.n; ++i) {
                const double s = g.s(i);
                double d = 0;
                for (int m = 0; m < modes; ++m)
                    d += a[m] * std::sin((m + 1) * kPi * s / g.L) + b[m] * std::cos((m + 1) * kPi * s / g.L);
                k[i] += eps * d / g.L;
            }
            PlanarCurve trial = PlanarCurve::from_profile(g, std::move(k), c.base_point(), c.base_angle() + eps * dtheta);
            try {
                trial = project_admissible(trial, cp.bc);
            } catch (const Error &e) {
                if (e.code() != ErrorCode::ProjectionFailed) throw;
                continue;
            }
            const double d = profile_distance(trial, c, cp.p);
            if (!(d <= max_distance) || d == 0) continue;
            const double change = (bending_energy(trial, cp.p) - F) / F;
            if (change < -1e-8) ++out.violations;
            if (t == 0 || change < out.worst_change) out.worst_change = change;
            out.max_distance = std::max(out.max_distance, d);
            done = true;
        }
        if (!done) fail(ErrorCode::ProjectionFailed, "no admissible perturbation found in trial " + std::to_string(t));
    }
    return out;
}

////////////////////////////////////////////////////////////////////////////////
// Stability tables
////////////////////////////////////////////////////////////////////////////////
bool StabilityRow::matches() const {
    if (!counted) return true;
    const std::string obs = observed == "probe-only stable" ? "stable" : observed;
    return obs == predicted;
}

int StabilityTable::mismatches() const {
    return int(std::count_if(rows.begin(), rows.end(), [](const StabilityRow &r) { return !r.matches(); }));
}

namespace {

void observe(StabilityRow &row, const CriticalPoint *cp, const Subject &s, const TableOptions &opts,
             std::uint64_t seed) {
    if (cp) {
        try {
            row.probe = stability_probe(*cp);
        } catch (const Error &e) {
            row.note += std::string("probe failed: ") + e.what() + "; ";
        }
    }
    if (row.probe && row.probe->stable && cp) {
        row.random = random_perturbation_check(*cp, opts.random_trials, 1e-2, seed);
        if (row.random->violations == 0) {
            row.observed = row.construction.empty() && row.predicted == "stable" && row.reason.find("probe only") !=
                                                                                         std::string::npos
                               ? "probe-only stable"
                               : "stable";
        } else {
            row.observed = "unstable";
            row.note += std::to_string(row.random->violations) + " random perturbations lowered the energy; ";
        }
    }
    if (opts.certificates && row.predicted != "stable" && !row.construction.empty()) {
        CertificateOptions co;
        co.time_budget = opts.certificate_budget;
        try {
            row.certificate = instability_certificate(s, row.construction, co);
            row.observed = "unstable";
        } catch (const Error &e) {
            row.note += std::string("no certificate: ") + e.what() + "; ";
        }
    }
    if (row.observed.empty()) {
        if (row.probe && !row.probe->stable) {
            row.observed = "unstable";
            row.note += "negative second variation; ";
        } else {
            row.observed = "inconclusive";
        }
    }
}

StabilityRow make_row(std::string id, double p, std::string bc, std::string predicted, std::string reason) {
    StabilityRow r;
    r.id = std::move(id);
    r.p = p;
    r.bc = std::move(bc);
    r.predicted = std::move(predicted);
    r.reason = std::move(reason);
    return r;
}

std::size_t odd_nodes(double n) {
    auto m = std::size_t(std::max(5.0, std::round(n)));
    return m % 2 ? m : m + 1;
}

} // namespace

StabilityTable stability_table(const std::string &scenario, double p, double r, const TableOptions &opts) {
    StabilityTable tab;
    tab.scenario = scenario;
    tab.p = p;
    tab.r = r;
    const std::uint64_t seed = opts.seed ? opts.seed : seed_from_env();
    const std::size_t n = opts.nodes;

    if (scenario == "closed") {
        tab.r = 0;
        for (int m = 1; m <= 3; ++m) {
            const auto cp = make_circle(p, m, 1.0, n);
            StabilityRow row = make_row("circle-" + std::to_string(m), p, "closed", "stable",
                             "closed stable curves: multiply covered circles and the 1-fold figure-eight");
            observe(row, &cp, subject_of(cp, row.id), opts, seed);
            tab.rows.push_back(row);
        }
        for (int k = 1; k <= 2; ++k) {
            const auto cp = make_figure_eight(p, k, 1.0, n);
            StabilityRow row = make_row("figure-eight-" + std::to_string(k), p, "closed", k == 1 ? "stable" : "unstable",
                             k == 1 ? "closed stable curves: multiply covered circles and the 1-fold figure-eight"
                                    : "multi-fold figure-eight: half-turn of two antiperiods keeps F, breaks C2");
            if (k > 1) row.construction = "local-rot";
            observe(row, &cp, subject_of(cp, row.id), opts, seed);
            tab.rows.push_back(row);
        }
    } else if (scenario == "pinned") {
        for (PinnedKind kind : {PinnedKind::Arc, PinnedKind::Loop}) {
            for (int k = 1; k <= 3; ++k) {
                const std::string id = to_string(kind) + "-" + std::to_string(k);
                CriticalPoint cp;
                try {
                    cp = make_pinned_mode(p, r, k, kind, 1.0, n);
                } catch (const Error &e) {
                    if (e.code() != ErrorCode::ModeNotFound) throw;
                    continue;
                }
                const bool arc1 = kind == PinnedKind::Arc && k == 1;
                StabilityRow row = make_row(id, p, "pinned", arc1 ? "stable" : "unstable",
                                 arc1 ? "wavelike pinned: stable only for the convex arc (global minimizer)"
                                      : "wavelike pinned: unstable unless convex arc");
                const Subject s = subject_of(cp, id);
                if (!arc1) {
                    if (k == 2) row.construction = "pinned-shift";
                    else if (k >= 3) row.construction = "local-rot";
                    else row.construction = "loop-rescale";
                }
                observe(row, &cp, s, opts, seed);
                tab.rows.push_back(row);
            }
        }
        try {
            const auto cp = make_pinned_mode(p, 0.0, 1, PinnedKind::Loop, 1.0, n);
            StabilityRow row = make_row("loop-1-r0", p, "pinned", "stable",
                             "r = 0 loop: half figure-eight, a global minimizer; probe only");
            observe(row, &cp, subject_of(cp, row.id), opts, seed);
            tab.rows.push_back(row);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::ModeNotFound) throw;
        }
    } else if (scenario == "flatcore") {
        tab.r = 0;
        struct Sample {
            std::string id, bc, predicted, reason, construction;
            FlatCoreDecomposition d;
            BcKind kind;
        };
        const std::vector<Sample> samples = {
            {"flatcore-endpoint", "pinned", "unstable", "flat-core with a loop at an endpoint", "flatcore-shift",
             {{+1}, {0.0, 1.0}, 1.0}, BcKind::Pinned},
            {"flatcore-adjacent", "clamped", "unstable", "flat-core with adjacent opposite loops", "flatcore-swap",
             {{+1, -1}, {0.5, 0.0, 0.5}, 1.0}, BcKind::Clamped},
            {"flatcore-quasi-alternating", "clamped", "open", "quasi-alternating flat-core: stability open", "",
             {{+1, -1}, {0.5, 0.5, 0.5}, 1.0}, BcKind::Clamped},
        };
        for (const auto &sm : samples) {
            const double total = sm.d.total_length();
            const std::size_t loop_nodes = odd_nodes(double(n - 1) / total + 1);
            CriticalPoint cp;
            cp.curve = assemble_flatcore(p, sm.d, loop_nodes);
            cp.p = p;
            cp.bc = boundary_of(cp.curve, sm.kind);
            cp.mode = sm.id;
            Subject s{sm.id, cp.curve, cp.bc, p, sm.d};
            StabilityRow row = make_row(sm.id, p, sm.bc, sm.predicted, sm.reason);
            row.construction = sm.construction;
            row.counted = sm.predicted != "open";
            if (row.counted) {
                observe(row, nullptr, s, opts, seed);
            } else {
                row.random = random_perturbation_check(cp, opts.random_trials, 1e-2, seed);
                row.observed = row.random->violations ? "unstable" : "inconclusive";
                if (!row.random->violations) row.note = "no instability found";
            }
            tab.rows.push_back(row);
        }
    } else {
        fail(ErrorCode::BadRange, "unknown scenario '" + scenario + "'");
    }

    std::ostringstream os;
    os << "Uniqueness is only sampled, not proven: the table covers modes n <= 3, the second-variation probe on "
       << n << " nodes and " << opts.random_trials << " random admissible perturbations (distance <= 1e-2, seed "
       << seed << ") per stable row. No search over all admissible curves was made.";
    tab.disclosure = os.str();
    return tab;
}

////////////////////////////////////////////////////////////////////////////////
// JSON
////////////////////////////////////////////////////////////////////////////////
namespace {

bool scalar_array(const json &j) {
    return std::all_of(j.begin(), j.end(), [](const json &e) { return !e.is_structured(); });
}

void emit(std::string &out, const json &j, int indent, int depth) {
    const std::string pad = indent > 0 ? "\n" + std::string(std::size_t(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(std::size_t(indent * depth), ' ') : "";
    switch (j.type()) {
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
        } else {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            // Keep integral values typed as floats.
            if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos) out += ".0";
        }
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        const bool flat = scalar_array(j);
        out += '[';
        bool first = true;
        for (const auto &e : j) {
            if (!first) out += flat ? ", " : ",";
            if (!flat) out += pad;
            emit(out, e, indent, depth + 1);
            first = false;
        }
        if (!flat) out += close;
        out += ']';
        return;
    }
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            out += pad;
            out += json(it.key()).dump();
            out += indent > 0 ? ": " : ":";
            emit(out, it.value(), indent, depth + 1);
            first = false;
        }
        out += close;
        out += '}';
        return;
    }
    default:
        out += j.dump();
    }
}

[[noreturn]] void schema(const std::string &path, const std::string &what) {
    fail(ErrorCode::SchemaError, path + ": " + what);
}

const json &field(const json &j, const std::string &key, const std::string &path) {
    if (!j.is_object()) schema(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema(path + "." + key, "missing");
    return *it;
}

double number(const json &j, const std::string &path) {
    if (!j.is_number()) schema(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) schema(path, "not finite");
    return v;
}

std::vector<double> numbers(const json &j, const std::string &path) {
    if (!j.is_array()) schema(path, "expected an array");
    std::vector<double> v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

template <class V> V vec(const json &j, const std::string &path) {
    const auto v = numbers(j, path);
    if (v.size() != std::size_t(V::RowsAtCompileTime)) schema(path, "expected " + std::to_string(V::RowsAtCompileTime) + " entries");
    V out;
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = v[std::size_t(i)];
    return out;
}

std::vector<Vec3> points(const json &j, const std::string &path) {
    if (!j.is_array()) schema(path, "expected an array");
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec<Vec3>(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

json arr(const Vec2 &v) { return json::array({v.x(), v.y()}); }
json arr(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

json bc_json(const BoundaryCondition &bc) {
    return {{"kind", to_string(bc.kind)}, {"P0", arr(bc.P0)}, {"P1", arr(bc.P1)}, {"V0", arr(bc.V0)},
            {"V1", arr(bc.V1)},           {"L", bc.L}};
}

// Spacing whose (n-1) multiple reproduces L exactly, so that L survives a
// read/write cycle.
double spacing_for(double L, std::size_t cells) {
    double h = L / double(cells);
    for (int t = 0; t < 8 && h * double(cells) != L; ++t)
        h = h * double(cells) < L ? std::nextafter(h, 2 * h) : std::nextafter(h, 0.0);
    return h;
}

} // namespace

std::string dump_json(const json &j, int indent) {
    std::string out;
    emit(out, j, indent, 0);
    out += '\n';
    return out;
}

json to_json(const PlanarCurve &c) {
    json j;
    j["type"] = "planar";
    j["dim"] = 2;
    j["L"] = c.length();
    j["n"] = c.node_count();
    j["base_point"] = arr(c.base_point());
    j["base_angle"] = c.base_angle();
    if (c.piece_count() == 1) {
        j["h"] = c.pieces().front().h;
        j["k"] = c.k();
    } else {
        j["k"] = c.k_right();
        json pcs = json::array();
        for (const auto &p : c.pieces()) pcs.push_back({{"h", p.h}, {"theta0", p.theta0}, {"k", p.k}});
        j["pieces"] = pcs;
    }
    return j;
}

json to_json(const SpaceCurve &c) {
    json j;
    j["type"] = "space";
    j["dim"] = 3;
    j["L"] = c.length();
    j["n"] = c.node_count();
    auto pts = [](const std::vector<Vec3> &x) {
        json a = json::array();
        for (const auto &v : x) a.push_back(arr(v));
        return a;
    };
    if (c.pieces().size() == 1) {
        j["h"] = c.pieces().front().h;
        j["points"] = pts(c.pieces().front().x);
    } else {
        j["points"] = pts(c.points());
        json pcs = json::array();
        for (const auto &p : c.pieces()) pcs.push_back({{"h", p.h}, {"points", pts(p.x)}});
        j["pieces"] = pcs;
    }
    return j;
}

PlanarCurve planar_from_json(const json &j) {
    const std::string root = "$";
    const double dim = number(field(j, "dim", root), "$.dim");
    if (dim != 2) schema("$.dim", "expected 2");
    const Vec2 base = vec<Vec2>(field(j, "base_point", root), "$.base_point");
    const double angle = number(field(j, "base_angle", root), "$.base_angle");
    if (j.contains("pieces")) {
        const json &pj = j["pieces"];
        if (!pj.is_array() || pj.empty()) schema("$.pieces", "expected a non-empty array");
        std::vector<CurvePiece> pieces;
        for (std::size_t i = 0; i < pj.size(); ++i) {
            const std::string path = "$.pieces[" + std::to_string(i) + "]";
            CurvePiece p;
            p.h = number(field(pj[i], "h", path), path + ".h");
            p.theta0 = number(field(pj[i], "theta0", path), path + ".theta0");
            p.k = numbers(field(pj[i], "k", path), path + ".k");
            if (p.k.size() < 2) schema(path + ".k", "needs at least two nodes");
            if (!(p.h > 0)) schema(path + ".h", "must be positive");
            pieces.push_back(std::move(p));
        }
        pieces.front().theta0 = angle;
        return PlanarCurve(base, std::move(pieces));
    }
    auto k = numbers(field(j, "k", root), "$.k");
    const double L = number(field(j, "L", root), "$.L");
    if (k.size() < 2) schema("$.k", "needs at least two nodes");
    if (!(L > 0)) schema("$.L", "must be positive");
    if (j.contains("n") && number(j["n"], "$.n") != double(k.size())) schema("$.n", "differs from the size of k");
    double h = j.contains("h") ? number(j["h"], "$.h") : spacing_for(L, k.size() - 1);
    if (std::abs(h * double(k.size() - 1) - L) > 1e-12 * L) schema("$.h", "inconsistent with L and n");
    return PlanarCurve(base, {CurvePiece{h, std::move(k), angle}});
}

SpaceCurve space_from_json(const json &j) {
    const std::string root = "$";
    const double dim = number(field(j, "dim", root), "$.dim");
    if (dim != 3) schema("$.dim", "expected 3");
    std::vector<SpacePiece> pieces;
    if (j.contains("pieces")) {
        const json &pj = j["pieces"];
        if (!pj.is_array() || pj.empty()) schema("$.pieces", "expected a non-empty array");
        for (std::size_t i = 0; i < pj.size(); ++i) {
            const std::string path = "$.pieces[" + std::to_string(i) + "]";
            SpacePiece p;
            p.h = number(field(pj[i], "h", path), path + ".h");
            p.x = points(field(pj[i], "points", path), path + ".points");
            if (p.x.size() < 3) schema(path + ".points", "needs at least three points");
            if (!(p.h > 0)) schema(path + ".h", "must be positive");
            pieces.push_back(std::move(p));
        }
    } else {
        SpacePiece p;
        p.x = points(field(j, "points", root), "$.points");
        if (p.x.size() < 3) schema("$.points", "needs at least three points");
        const double L = number(field(j, "L", root), "$.L");
        if (!(L > 0)) schema("$.L", "must be positive");
        p.h = j.contains("h") ? number(j["h"], "$.h") : spacing_for(L, p.x.size() - 1);
        if (std::abs(p.h * double(p.x.size() - 1) - L) > 1e-12 * L) schema("$.h", "inconsistent with L and n");
        pieces.push_back(std::move(p));
    }
    return SpaceCurve(std::move(pieces));
}

json to_json(const PerturbationReport &r) {
    json jumps = json::array();
    for (const auto &c : r.curvature_jumps) jumps.push_back({{"s", c.s}, {"jump", c.jump}});
    json extras = json::object();
    for (const auto &[k, v] : r.extras) extras[k] = v;
    return {{"construction", r.construction},
            {"energy_before", r.energy_before},
            {"energy_after", r.energy_after},
            {"energy_margin", r.energy_margin},
            {"margin_bar", r.margin_bar},
            {"c1_residual", r.c1_residual},
            {"curvature_jumps", jumps},
            {"max_jump", r.max_jump()},
            {"noise_floor", r.noise_floor},
            {"not_c2", r.not_c2()},
            {"bc_residual", r.bc_residuals.constrained},
            {"distance", r.distance},
            {"length_residual", r.length_residual},
            {"extras", extras}};
}

json to_json(const SuiteReport &r) {
    json rows = json::array();
    for (const auto &row : r.rows)
        rows.push_back({{"j", row.j},
                        {"distance", row.distance},
                        {"energy_margin", row.energy_margin},
                        {"margin_bar", row.margin_bar},
                        {"regularity", row.regularity}});
    return {{"id", r.id},
            {"construction", r.construction},
            {"conditions", r.conditions},
            {"rows", rows},
            {"energy", r.energy},
            {"noise_floor", r.noise_floor},
            {"order", r.order},
            {"thresholds",
             {{"order_min", 0.8}, {"margin_rel", 1e-12}, {"jump_over_noise", 10.0}, {"bc_residual", 1e-8}}},
            {"applicable", r.applicable},
            {"converges", r.converges},
            {"energy_ok", r.energy_ok},
            {"regularity_violated", r.regularity_violated},
            {"admissible", r.admissible},
            {"passed", r.passed()},
            {"verdict", r.verdict}};
}

json to_json(const Certificate &c) {
    return {{"construction", c.construction},
            {"energy", c.energy},
            {"error_bar", c.error_bar},
            {"threshold", c.threshold},
            {"start_energy", c.start_energy},
            {"final_energy", c.final_energy},
            {"drop", c.drop},
            {"seconds", c.seconds},
            {"iterations", c.trace.iterations},
            {"energies", c.trace.energies},
            {"valid", c.valid}};
}

json to_json(const StabilityReport &r) {
    return {{"min_eigenvalue", r.min_eigenvalue}, {"scale", r.scale},   {"asymmetry", r.asymmetry},
            {"lowest", r.lowest},                 {"stable", r.stable}, {"dimension", r.dimension}};
}

json to_json(const RandomCheck &r) {
    return {{"trials", r.trials},
            {"violations", r.violations},
            {"worst_change", r.worst_change},
            {"max_distance", r.max_distance}};
}

json to_json(const StabilityTable &t) {
    json rows = json::array();
    for (const auto &r : t.rows) {
        json row = {{"id", r.id},
                    {"p", r.p},
                    {"bc", r.bc},
                    {"predicted", r.predicted},
                    {"reason", r.reason},
                    {"observed", r.observed},
                    {"construction", r.construction},
                    {"counted", r.counted},
                    {"matches", r.matches()},
                    {"note", r.note}};
        row["probe"] = r.probe ? to_json(*r.probe) : json(nullptr);
        row["random"] = r.random ? to_json(*r.random) : json(nullptr);
        if (r.certificate) {
            json c = to_json(*r.certificate);
            c.erase("energies");
            row["certificate"] = c;
        } else {
            row["certificate"] = nullptr;
        }
        rows.push_back(row);
    }
    return {{"scenario", t.scenario}, {"p", t.p},          {"r", t.r},
            {"rows", rows},           {"mismatches", t.mismatches()}, {"disclosure", t.disclosure}};
}

json to_json(const CriticalPoint &cp) {
    return {{"mode", cp.mode},
            {"p", cp.p},
            {"bc", bc_json(cp.bc)},
            {"residual", cp.residual},
            {"constraint_residual", cp.constraint_residual},
            {"iterations", cp.iterations},
            {"fix_phase", cp.fix_phase},
            {"curve", to_json(cp.curve)}};
}

////////////////////////////////////////////////////////////////////////////////
// CSV and files
////////////////////////////////////////////////////////////////////////////////
namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string curve_csv(const PlanarCurve &c) {
    const auto rec = reconstruct(c);
    const auto k = c.k_right();
    std::string out = "s,k,x,y\n";
    for (std::size_t i = 0; i < rec.s.size(); ++i)
        out += g17(rec.s[i]) + "," + g17(k[i]) + "," + g17(rec.x[i].x()) + "," + g17(rec.x[i].y()) + "\n";
    return out;
}

std::string curve_csv(const SpaceCurve &c) {
    std::string out = "s,kappa,x,y,z\n";
    double s0 = 0;
    bool first = true;
    for (const auto &p : c.pieces()) {
        const auto &kv = curvature_vectors(p);
        for (std::size_t i = first ? 0 : 1; i < p.x.size(); ++i) {
            const auto &x = p.x[i];
            out += g17(s0 + p.h * double(i)) + "," + g17(kv[i].norm()) + "," + g17(x.x()) + "," + g17(x.y()) + "," +
                   g17(x.z()) + "\n";
        }
        s0 += p.length();
        first = false;
    }
    return out;
}

std::string suite_csv(const SuiteReport &r) {
    std::string out = "j,distance,energy_margin,margin_bar,regularity\n";
    for (const auto &row : r.rows)
        out += g17(row.j) + "," + g17(row.distance) + "," + g17(row.energy_margin) + "," + g17(row.margin_bar) + "," +
               g17(row.regularity) + "\n";
    return out;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::SchemaError, path + ": cannot open");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::SchemaError, path + ": cannot write");
    out << text;
    if (!out) fail(ErrorCode::SchemaError, path + ": write failed");
}

json read_json_file(const std::string &path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        fail(ErrorCode::SchemaError, path + ": " + e.what());
    }
}

RoundTrip io_roundtrip(const std::string &path) {
    json j0 = read_json_file(path);
    if (j0.contains("curve")) j0 = json(j0["curve"]);
    RoundTrip rt;
    rt.dim = int(number(field(j0, "dim", "$"), "$.dim"));
    auto write = [&](const json &j) {
        return rt.dim == 3 ? dump_json(to_json(space_from_json(j))) : dump_json(to_json(planar_from_json(j)));
    };
    rt.first = write(j0);
    rt.second = write(json::parse(rt.first));
    rt.identical = rt.first == rt.second;
    return rt;
}

} // namespace elastica
