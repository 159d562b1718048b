// Command line front end: make, solve, perturb, verify, flow, table, io.
//
// Exit codes: 0 pass, 1 usage or runtime error, 2 hypothesis violation,
// 3 inconclusive (suite failed, no drop, table mismatch, roundtrip differs).
#include "elastica/harness.hh"
#include "elastica/profiles.hh"

#include <CLI11.hpp>

#include <cstdio>
#include <sstream>

using namespace elastica;

namespace {

struct Outputs {
    std::string json_out;
    std::string csv_out;
};

void add_outputs(CLI::App *cmd, Outputs &o) {
    cmd->add_option("--json-out", o.json_out, "write the result as JSON");
    cmd->add_option("--csv-out", o.csv_out, "write plot data as CSV");
}

void emit(const Outputs &o, const json &j, const std::string &csv) {
    if (!o.json_out.empty()) write_file(o.json_out, dump_json(j));
    if (!o.csv_out.empty()) write_file(o.csv_out, csv);
}

Vec2 vec2(const json &j) { return Vec2(j.at(0).get<double>(), j.at(1).get<double>()); }

BoundaryCondition bc_from_json(const json &j) {
    BoundaryCondition bc;
    bc.kind = parse_bc_kind(j.at("kind").get<std::string>());
    bc.P0 = vec2(j.at("P0"));
    bc.P1 = vec2(j.at("P1"));
    bc.V0 = vec2(j.at("V0"));
    bc.V1 = vec2(j.at("V1"));
    bc.L = j.at("L").get<double>();
    return bc;
}

json decomposition_json(const FlatCoreDecomposition &d) {
    return {{"sigmas", d.sigmas}, {"segments", d.seg_lengths}, {"loop_arclength", d.loop_arclength}};
}

// A curve file, or a solver/make document with "curve", "bc", "p".
Subject load_subject(const std::string &path, const std::string &bc_kind, double p) {
    const json doc = read_json_file(path);
    Subject s;
    s.id = path;
    if (doc.contains("curve")) {
        s.curve = planar_from_json(doc["curve"]);
        try {
            s.bc = bc_from_json(doc.at("bc"));
            s.p = doc.at("p").get<double>();
        } catch (const json::exception &e) {
            fail(ErrorCode::SchemaError, path + ": " + e.what());
        }
        if (doc.contains("mode")) s.id = doc["mode"].get<std::string>();
        if (doc.contains("decomposition")) {
            const auto &d = doc["decomposition"];
            s.decomposition = FlatCoreDecomposition{d.at("sigmas").get<std::vector<int>>(),
                                                    d.at("segments").get<std::vector<double>>(),
                                                    d.at("loop_arclength").get<double>()};
        }
    } else {
        s.curve = planar_from_json(doc);
        s.bc = boundary_of(s.curve, parse_bc_kind(bc_kind.empty() ? "clamped" : bc_kind));
    }
    if (!bc_kind.empty()) {
        const BcKind k = parse_bc_kind(bc_kind);
        if (k != s.bc.kind) s.bc = boundary_of(s.curve, k);
    }
    if (p > 0) s.p = p;
    return s;
}

CriticalPoint critical_of(const Subject &s) {
    CriticalPoint cp;
    cp.curve = s.curve;
    cp.p = s.p;
    cp.bc = s.bc;
    cp.mode = s.id;
    return cp;
}

json subject_json(const Subject &s) {
    json j = to_json(critical_of(s));
    if (s.decomposition) j["decomposition"] = decomposition_json(*s.decomposition);
    return j;
}

// "arc-2", "loop-1", "circle-3", "figure-eight-2".
CriticalPoint solve_mode(const std::string &mode, const std::string &bc, double p, double r, std::size_t nodes,
                         SolveOptions opts) {
    const auto dash = mode.rfind('-');
    if (dash == std::string::npos) fail(ErrorCode::BadRange, "mode must look like arc-2");
    const std::string shape = mode.substr(0, dash);
    const int n = std::stoi(mode.substr(dash + 1));
    check_exponent(p, opts.force_p);
    if (shape == "arc" || shape == "loop") {
        if (bc != "pinned") fail(ErrorCode::BadRange, shape + " needs --bc pinned");
        return make_pinned_mode(p, r, n, shape == "arc" ? PinnedKind::Arc : PinnedKind::Loop, 1.0, nodes, opts);
    }
    if (bc != "closed") fail(ErrorCode::BadRange, shape + " needs --bc closed");
    if (shape == "circle") return make_circle(p, n, 1.0, nodes);
    if (shape == "figure-eight") return make_figure_eight(p, n, 1.0, nodes, opts);
    fail(ErrorCode::BadRange, "unknown mode '" + mode + "'");
}

std::vector<double> parse_list(const std::string &s) {
    std::vector<double> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');)
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

FlatCoreDecomposition parse_decomposition(const std::string &sigmas, const std::string &segments) {
    FlatCoreDecomposition d;
    for (double v : parse_list(sigmas)) d.sigmas.push_back(v < 0 ? -1 : 1);
    d.seg_lengths = parse_list(segments);
    if (d.seg_lengths.size() != d.sigmas.size() + 1)
        fail(ErrorCode::BadRange, "need one more segment length than loops");
    return d;
}

void print_suite(const SuiteReport &r) {
    std::printf("%s %s (%s): %s\n", r.id.c_str(), r.construction.c_str(), r.conditions.c_str(), r.verdict.c_str());
    for (const auto &row : r.rows)
        std::printf("  j=%-8.4g distance=%-12.6g margin=%-12.4g bar=%-10.3g regularity=%.6g\n", row.j, row.distance,
                    row.energy_margin, row.margin_bar, row.regularity);
    if (!r.rows.empty())
        std::printf("  order=%.4f noise=%.3g converges=%d energy_ok=%d regularity=%d admissible=%d\n", r.order,
                    r.noise_floor, r.converges, r.energy_ok, r.regularity_violated, r.admissible);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"p-elastica stability experiments"};
    app.require_subcommand(1);
    int status = 0;

    // make
    Outputs make_o;
    std::string shape = "circle";
    double make_p = 2, make_r = 0.3, make_L = 1, radius = 1, pitch = 0.8, turns = 2;
    int fold = 1;
    std::size_t make_nodes = 2001;
    std::string sigmas = "1", segments = "0,1";
    auto *make = app.add_subcommand("make", "build a curve");
    make->add_option("--shape", shape, "circle, figure-eight, arc, loop, flatcore, flatcore-loop, helix");
    make->add_option("--p", make_p);
    make->add_option("--r", make_r);
    make->add_option("--n", fold, "cover number or fold index");
    make->add_option("--L", make_L);
    make->add_option("--nodes", make_nodes);
    make->add_option("--sigmas", sigmas, "flat-core loop orientations, e.g. 1,-1");
    make->add_option("--segments", segments, "flat-core segment lengths, e.g. 0.5,0,0.5");
    make->add_option("--radius", radius);
    make->add_option("--pitch", pitch);
    make->add_option("--turns", turns);
    add_outputs(make, make_o);
    make->callback([&] {
        if (shape == "helix") {
            const auto h = make_helix(radius, pitch, turns, make_nodes);
            std::printf("helix length=%.17g energy=%.17g\n", h.length(), bending_energy_3d(h));
            emit(make_o, to_json(h), curve_csv(h));
            return;
        }
        if (shape == "flatcore-loop") {
            const auto loop = make_flatcore_loop(make_p, make_nodes);
            std::printf("flat-core loop p=%g chord=%.17g f2=%.3g f3=%.3g f4=%.3g\n", make_p, loop.chord,
                        loop.f2_residual, loop.f3_end_residual, loop.f4_residual);
            json j = to_json(loop.curve);
            j["chord"] = loop.chord;
            emit(make_o, j, curve_csv(loop.curve));
            return;
        }
        Subject s;
        if (shape == "flatcore") {
            const auto d = parse_decomposition(sigmas, segments);
            s.curve = assemble_flatcore(make_p, d, make_nodes);
            // An endpoint loop is the pinned case; the rest are clamped.
            const bool endpoint = d.seg_lengths.front() == 0 || d.seg_lengths.back() == 0;
            s.bc = boundary_of(s.curve, endpoint ? BcKind::Pinned : BcKind::Clamped);
            s.p = make_p;
            s.id = "flatcore";
            s.decomposition = d;
        } else {
            CriticalPoint cp;
            if (shape == "circle") cp = make_circle(make_p, fold, make_L, make_nodes);
            else if (shape == "figure-eight") cp = make_figure_eight(make_p, fold, make_L, make_nodes);
            else if (shape == "arc" || shape == "loop")
                cp = make_pinned_mode(make_p, make_r, fold, shape == "arc" ? PinnedKind::Arc : PinnedKind::Loop,
                                      make_L, make_nodes);
            else fail(ErrorCode::BadRange, "unknown shape '" + shape + "'");
            s = subject_of(cp);
        }
        std::printf("%s p=%g bc=%s L=%.17g energy=%.17g class=%s\n", s.id.c_str(), s.p, to_string(s.bc.kind).c_str(),
                    s.curve.length(), bending_energy(s.curve, s.p), to_string(classify_pelastica(s.curve)).c_str());
        emit(make_o, subject_json(s), curve_csv(s.curve));
    });

    // solve
    Outputs solve_o;
    std::string solve_bc = "pinned", mode = "arc-1";
    double solve_p = 2, solve_r = 0.3;
    std::size_t grid = 2001;
    SolveOptions sopts;
    auto *solve = app.add_subcommand("solve", "solve for a critical point");
    solve->add_option("--bc", solve_bc, "pinned or closed");
    solve->add_option("--p", solve_p);
    solve->add_option("--r", solve_r);
    solve->add_option("--mode", mode, "arc-N, loop-N, circle-M, figure-eight-N");
    solve->add_option("--grid", grid, "node count");
    solve->add_option("--tol", sopts.tol);
    solve->add_option("--max-iter", sopts.max_iter);
    solve->add_flag("--force-p", sopts.force_p, "allow p outside [1.05, 10]");
    add_outputs(solve, solve_o);
    solve->callback([&] {
        const auto cp = solve_mode(mode, solve_bc, solve_p, solve_r, grid, sopts);
        const auto adm = check_admissible(cp.curve, cp.bc);
        std::printf("%s p=%g residual=%.3g bc=%.3g iterations=%d energy=%.17g\n", cp.mode.c_str(), cp.p, cp.residual,
                    adm.constrained, cp.iterations, bending_energy(cp.curve, cp.p));
        emit(solve_o, to_json(cp), curve_csv(cp.curve));
    });

    // perturb
    Outputs pert_o;
    std::string pert_in, construction = "local-rot", pert_bc;
    double pert_p = 0, j = 20, s1 = -1, s2 = -1, s3 = -1;
    auto *perturb = app.add_subcommand("perturb", "build one competitor");
    perturb->add_option("--input", pert_in, "curve or solver JSON")->required();
    perturb->add_option("--construction", construction,
                        "global-rot, local-rot, pinned-shift, loop-rescale, flatcore-shift, flatcore-swap");
    perturb->add_option("--j", j, "cut offset is 1/j");
    perturb->add_option("--p", pert_p);
    perturb->add_option("--bc", pert_bc);
    perturb->add_option("--s1", s1, "first cut (rotations)");
    perturb->add_option("--s2", s2, "second cut (global-rot)");
    perturb->add_option("--s3", s3, "third zero (local-rot)");
    add_outputs(perturb, pert_o);
    perturb->callback([&] {
        const Subject s = load_subject(pert_in, pert_bc, pert_p);
        const EnergyDensity f = EnergyDensity::power(s.p);
        PlanarCompetitor c;
        if (construction == "global-rot" && s1 >= 0 && s2 > s1)
            c = global_rotation_competitor(s.curve, s1, s2, f, s.bc.kind);
        else if (construction == "local-rot" && s1 >= 0 && s3 > s1)
            c = local_rotation_family(s.curve, s1, s3, j, f, s.bc.kind);
        else
            c = make_family(s, construction)(j);
        const auto &r = c.report;
        std::printf("%s j=%g margin=%.6g bar=%.3g max_jump=%.6g noise=%.3g distance=%.6g bc=%.3g\n",
                    r.construction.c_str(), j, r.energy_margin, r.margin_bar, r.max_jump(), r.noise_floor, r.distance,
                    r.bc_residuals.constrained);
        emit(pert_o, {{"report", to_json(r)}, {"curve", to_json(c.curve)}}, curve_csv(c.curve));
    });

    // verify
    Outputs ver_o;
    std::string ver_in, ver_construction = "auto", conditions = "auto", ver_bc;
    double ver_p = 0, budget = 60;
    bool certify = false;
    auto *verify = app.add_subcommand("verify", "run a suite over j = 10, 20, 40, 80 (per unit length)");
    verify->add_option("--input", ver_in, "curve or solver JSON")->required();
    verify->add_option("--construction", ver_construction, "construction name, or auto for pinned curves");
    verify->add_option("--conditions", conditions, "C, Cp or auto");
    verify->add_option("--p", ver_p);
    verify->add_option("--bc", ver_bc);
    verify->add_flag("--certificate", certify, "follow a passed suite with gradient flow");
    verify->add_option("--budget", budget, "flow time budget in seconds");
    add_outputs(verify, ver_o);
    verify->callback([&] {
        const Subject s = load_subject(ver_in, ver_bc, ver_p);
        SuiteReport r;
        if (ver_construction == "auto") {
            if (s.bc.kind != BcKind::Pinned) fail(ErrorCode::BadRange, "auto needs a pinned curve; pass --construction");
            r = run_pinned_suite(s);
        }
        else if (conditions == "Cp" || (conditions == "auto" && s.bc.kind == BcKind::Pinned &&
                                        ver_construction != "local-rot"))
            r = run_suite_Cp(s, ver_construction);
        else r = run_suite_C(s, ver_construction);
        print_suite(r);
        json out = to_json(r);
        if (!r.passed()) {
            status = 3;
        } else if (certify) {
            CertificateOptions co;
            co.time_budget = budget;
            try {
                const auto cert = instability_certificate(s, r.construction, co);
                std::printf("certificate: drop=%.6g needed=%.6g seconds=%.2f\n", cert.drop,
                            cert.energy - cert.threshold, cert.seconds);
                out["certificate"] = to_json(cert);
            } catch (const Error &e) {
                if (e.code() != ErrorCode::NoDropFound) throw;
                std::printf("certificate: inconclusive (%s)\n", e.what());
                out["certificate"] = nullptr;
                status = 3;
            }
        }
        emit(ver_o, out, suite_csv(r));
    });

    // flow
    Outputs flow_o;
    std::string flow_in, flow_bc;
    double flow_p = 0;
    FlowOptions fopts;
    auto *flow = app.add_subcommand("flow", "projected gradient flow");
    flow->add_option("--input", flow_in, "curve or solver JSON")->required();
    flow->add_option("--p", flow_p);
    flow->add_option("--bc", flow_bc);
    flow->add_option("--budget", fopts.time_budget, "seconds");
    flow->add_option("--max-iter", fopts.max_iter);
    add_outputs(flow, flow_o);
    flow->callback([&] {
        const Subject s = load_subject(flow_in, flow_bc, flow_p);
        const auto tr = gradient_flow(s.curve, s.bc, s.p, fopts);
        std::printf("iterations=%d converged=%d energy %.17g -> %.17g seconds=%.2f\n", tr.iterations, tr.converged,
                    tr.energies.front(), tr.energies.back(), tr.seconds);
        emit(flow_o,
             {{"energies", tr.energies},
              {"residuals", tr.residuals},
              {"iterations", tr.iterations},
              {"converged", tr.converged},
              {"curve", to_json(tr.final_curve)}},
             curve_csv(tr.final_curve));
    });

    // table
    Outputs tab_o;
    std::string scenario = "closed";
    double tab_p = 2, tab_r = 0.3;
    TableOptions topts;
    bool no_cert = false;
    auto *table = app.add_subcommand("table", "stability table");
    table->add_option("--scenario", scenario, "closed, pinned or flatcore");
    table->add_option("--p", tab_p);
    table->add_option("--r", tab_r);
    table->add_option("--nodes", topts.nodes);
    table->add_option("--trials", topts.random_trials);
    table->add_option("--seed", topts.seed, "0 reads ELASTICA_SEED");
    table->add_flag("--no-certificates", no_cert);
    add_outputs(table, tab_o);
    table->callback([&] {
        topts.certificates = !no_cert;
        const auto t = stability_table(scenario, tab_p, tab_r, topts);
        std::string csv = "id,p,bc,predicted,observed,matches\n";
        for (const auto &r : t.rows) {
            std::printf("%-28s p=%-4g %-8s predicted=%-9s observed=%-18s %s\n", r.id.c_str(), r.p, r.bc.c_str(),
                        r.predicted.c_str(), r.observed.c_str(), r.matches() ? "ok" : "MISMATCH");
            csv += r.id + "," + std::to_string(r.p) + "," + r.bc + "," + r.predicted + "," + r.observed + "," +
                   (r.matches() ? "1" : "0") + "\n";
        }
        std::printf("mismatches: %d\n%s\n", t.mismatches(), t.disclosure.c_str());
        if (t.mismatches()) status = 3;
        emit(tab_o, to_json(t), csv);
    });

    // io
    Outputs io_o;
    std::string io_in;
    auto *io = app.add_subcommand("io", "read/write roundtrip of a curve file");
    io->add_option("--input", io_in)->required();
    add_outputs(io, io_o);
    io->callback([&] {
        const auto rt = io_roundtrip(io_in);
        std::printf("dim=%d identical=%d bytes=%zu\n", rt.dim, rt.identical, rt.first.size());
        if (!rt.identical) status = 3;
        const json j = json::parse(rt.first);
        const std::string csv = rt.dim == 3 ? curve_csv(space_from_json(j)) : curve_csv(planar_from_json(j));
        if (!io_o.json_out.empty()) write_file(io_o.json_out, rt.first);
        if (!io_o.csv_out.empty()) write_file(io_o.csv_out, csv);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const Error &e) {
        std::fprintf(stderr, "%s\n", e.what());
        switch (e.code()) {
        case ErrorCode::HypothesisViolated:
        case ErrorCode::RangeExceeded:
        case ErrorCode::NotFolded:
        case ErrorCode::NotWellPeriodic:
            return 2;
        case ErrorCode::NoDropFound:
            return 3;
        default:
            return 1;
        }
    } catch (const std::exception &e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    return status;
}
