// Verification suites over j-families of competitors, instability
// certificates (competitor followed by gradient flow), the stability
// tables, and curve/report serialization.

#pragma once

#include "elastica/perturb.hh"
#include "elastica/solver.hh"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace elastica {

using json = nlohmann::json;

// A curve with the data a construction needs.
struct Subject {
    std::string id;
    PlanarCurve curve;
    BoundaryCondition bc;
    double p = 2;
    std::optional<FlatCoreDecomposition> decomposition;
};

Subject subject_of(const CriticalPoint &cp, std::string id = "");

using Family = std::function<PlanarCompetitor(double j)>;

// Family for one of global-rot, local-rot, pinned-shift, loop-rescale,
// flatcore-shift, flatcore-swap. Cut points for the rotations come from the
// first zeros of the curvature. Throws BadRange for unknown names; the
// constructions' own errors surface when the family is evaluated.
Family make_family(const Subject &s, const std::string &construction);

// {10, 20, 40, 80} / L.
std::vector<double> default_js(double L);

struct SuiteRow {
    double j = 0;
    double distance = 0;
    double energy_margin = 0;
    double margin_bar = 0;
    double regularity = 0;  // max jump (C) or |k_j(0)| (Cp)
};

struct SuiteReport {
    std::string id;
    std::string construction;
    std::string conditions;  // "C" or "Cp"
    std::vector<SuiteRow> rows;
    double energy = 0;       // F of the input
    double noise_floor = 0;  // of the input
    double order = 0;        // distance slope against 1/j
    bool applicable = true;
    bool converges = false;
    bool energy_ok = false;
    bool regularity_violated = false;
    bool admissible = true;  // every competitor within 1e-8 of the boundary data
    std::string verdict;

    bool passed() const { return applicable && converges && energy_ok && regularity_violated && admissible; }
};

// (i) distance decreasing with order >= 0.8, (ii) margin <= max(bar,
// 1e-12 F) for every j, (iii) every jump >= 10x the input's noise floor.
SuiteReport run_suite_C(const Subject &s, const std::string &construction, std::vector<double> js = {});
// Same, with (iii) replaced by |k_j(0)| >= 10x noise floor and pinned
// admissibility of every competitor.
SuiteReport run_suite_Cp(const Subject &s, const std::string &construction, std::vector<double> js = {});
// Chooses the pinned construction from the fold structure: pinned-shift for
// zeros {0, L/2, L}, loop-rescale for a self-intersecting half-fold curve,
// local-rot for three or more antiperiods. A convex arc has none and
// yields applicable = false with verdict "no instability mechanism".
SuiteReport run_pinned_suite(const Subject &s, std::vector<double> js = {});

struct CertificateOptions {
    double j = 0;               // 0: largest default j, or 10 per loop length on flat cores
    double time_budget = 60.0;  // seconds of flow
    int max_iter = 20000;
};

struct Certificate {
    std::string construction;
    double energy = 0;          // F of the input
    double error_bar = 0;       // quadrature bar of F
    double threshold = 0;       // F - max(1e-6 F, 10 bar)
    double start_energy = 0;    // competitor
    double final_energy = 0;
    double drop = 0;            // F - final_energy
    double seconds = 0;
    FlowTrace trace;
    bool valid = false;
};

// Gradient flow from the competitor at opts.j, stopped once below the
// threshold. Throws NoDropFound when the flow ends above it.
Certificate instability_certificate(const Subject &s, const std::string &construction,
                                    const CertificateOptions &opts = {});

struct RandomCheck {
    int trials = 0;
    int violations = 0;          // drops larger than 1e-8 F
    double worst_change = 0;     // min (E' - E) / F
    double max_distance = 0;
};

// Smooth random curvature perturbations projected onto the admissible set,
// rescaled until their profile distance is at most max_distance.
RandomCheck random_perturbation_check(const CriticalPoint &cp, int trials = 100, double max_distance = 1e-2,
                                      std::uint64_t seed = 0);

// ELASTICA_SEED, or 20240601 when unset.
std::uint64_t seed_from_env();

struct StabilityRow {
    std::string id;
    double p = 2;
    std::string bc;
    std::string predicted;   // "stable", "unstable" or "open"
    std::string reason;      // statement the prediction rests on
    std::string observed;    // "stable", "unstable", "inconclusive" or "probe-only stable"
    std::optional<StabilityReport> probe;
    std::optional<RandomCheck> random;
    std::optional<Certificate> certificate;
    std::string construction;
    std::string note;
    bool counted = true;     // open rows are listed but not scored

    bool matches() const;
};

struct StabilityTable {
    std::string scenario;
    double p = 2;
    double r = 0;
    std::vector<StabilityRow> rows;
    std::string disclosure;

    int mismatches() const;
};

struct TableOptions {
    std::size_t nodes = 801;
    int random_trials = 100;
    std::uint64_t seed = 0;     // 0 reads ELASTICA_SEED
    bool certificates = true;
    double certificate_budget = 60.0;
};

// scenario "closed": circles m = 1..3, figure-eights n = 1, 2.
// scenario "pinned": arcs and loops n = 1..3 at ratio r (loops only where
// they exist), plus the r = 0 loop as a probe-only row.
// scenario "flatcore" (p > 2): endpoint loop, adjacent opposite loops and a
// quasi-alternating sample.
StabilityTable stability_table(const std::string &scenario, double p, double r = 0.3, const TableOptions &opts = {});

////////////////////////////////////////////////////////////////////////////////
// Serialization
////////////////////////////////////////////////////////////////////////////////
// Compact JSON with every float printed with 17 significant digits.
std::string dump_json(const json &j, int indent = 2);

// Single-piece curves use the plain schema; multi-piece curves add a
// "pieces" array of {h, theta0, k} (planar) or {h, points} (spatial).
json to_json(const PlanarCurve &c);
json to_json(const SpaceCurve &c);
// Throws SchemaError naming the offending path.
PlanarCurve planar_from_json(const json &j);
SpaceCurve space_from_json(const json &j);

json to_json(const PerturbationReport &r);
json to_json(const SuiteReport &r);
json to_json(const Certificate &c);
json to_json(const StabilityReport &r);
json to_json(const RandomCheck &r);
json to_json(const StabilityTable &t);
json to_json(const CriticalPoint &cp);

// s,k,x,y(,z) with a header row.
std::string curve_csv(const PlanarCurve &c);
std::string curve_csv(const SpaceCurve &c);
// j,distance,energy_margin,margin_bar,regularity
std::string suite_csv(const SuiteReport &r);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &text);
json read_json_file(const std::string &path);

// Reads a curve file (or the "curve" of a solver document), writes it back
// and compares bytes.
struct RoundTrip {
    bool identical = false;
    int dim = 2;
    std::string first;
    std::string second;
};
RoundTrip io_roundtrip(const std::string &path);

} // namespace elastica
