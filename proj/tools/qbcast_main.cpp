// qbcast — command-line front end: scenario validation, feasibility decisions,
// structural analysis, and the corpus regression suite.
//
// Exit codes: 0 success/feasible, 1 validation or corpus mismatch, 2 parse or
// mode errors, 3 numerically infeasible, 4 inconclusive.

#include <qbcast/corpus.hpp>
#include <qbcast/scenario_io.hpp>
#include <qbcast/structure.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

using namespace qbcast;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInconclusive = 4;

struct SolverFlags {
    std::optional<double> tol_feasible;
    std::optional<double> tol_infeasible;
    std::optional<int> max_iter;
    std::optional<std::uint64_t> seed;

    void apply(SolverConfig& cfg) const {
        if (tol_feasible) cfg.tol_feasible = *tol_feasible;
        if (tol_infeasible) cfg.tol_infeasible_floor = *tol_infeasible;
        if (max_iter) cfg.max_iterations = *max_iter;
        if (seed) cfg.rng_seed = *seed;
    }
};

// default solver configuration: built-ins, then the QBCAST_CONFIG file, then
// the scenario file's solver section, then command-line flags
SolverConfig base_config() {
    SolverConfig cfg;
    if (const char* path = std::getenv("QBCAST_CONFIG")) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            std::cerr << "warning: QBCAST_CONFIG file not readable: " << path << "\n";
            return cfg;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        try {
            const json j = json::parse(ss.str());
            if (j.contains("tol_feasible")) cfg.tol_feasible = j["tol_feasible"].get<double>();
            if (j.contains("tol_infeasible_floor"))
                cfg.tol_infeasible_floor = j["tol_infeasible_floor"].get<double>();
            if (j.contains("max_iterations"))
                cfg.max_iterations = j["max_iterations"].get<int>();
            if (j.contains("stall_window")) cfg.stall_window = j["stall_window"].get<int>();
            if (j.contains("rng_seed")) cfg.rng_seed = j["rng_seed"].get<std::uint64_t>();
        } catch (const std::exception& e) {
            std::cerr << "warning: ignoring malformed QBCAST_CONFIG: " << e.what() << "\n";
        }
    }
    return cfg;
}

int run_validate(const std::string& path) {
    ScenarioFile f;
    try {
        f = load_scenario_file(path);
    } catch (const ScenarioParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }
    const ValidationReport rep = validate_scenario_file(f);
    if (rep.ok()) {
        std::cout << "valid: dim " << f.dim << ", " << f.states.size() << " states, "
                  << f.measurements_a.size() << "+" << f.measurements_b.size()
                  << " measurement collections, " << f.channels.size() << " channels\n";
        return kExitOk;
    }
    for (const auto& v : rep.violations)
        std::cout << "violation: " << v.what << " (margin " << v.margin << ")\n";
    return kExitInvalid;
}

json analyze_scenario_json(const Scenario& s) {
    json out;
    const FactorizationMap fa = factorization_of_povms(s.test_meas_a);
    const FactorizationMap fb = factorization_of_povms(s.test_meas_b);
    out["factorization_rank_a"] = fa.rank;
    out["factorization_rank_b"] = fb.rank;
    out["info_complete_a"] = is_info_complete(s.test_meas_a);
    out["info_complete_b"] = is_info_complete(s.test_meas_b);
    const auto ea = effects_of(s.test_meas_a);
    const auto eb = effects_of(s.test_meas_b);
    const auto st = matrices_of(s.test_states);
    const CommuteReport aa = mutually_commuting(ea, ea);
    const CommuteReport bb = mutually_commuting(eb, eb);
    const CommuteReport ab = mutually_commuting(ea, eb);
    const CommuteReport at = mutually_commuting(ea, st);
    out["commuting_a"] = aa.commuting;
    out["commuting_b"] = bb.commuting;
    out["commuting_ab"] = ab.commuting;
    out["commuting_a_states"] = at.commuting;
    out["max_commutator_a"] = aa.max_commutator_norm;
    out["max_commutator_b"] = bb.max_commutator_norm;
    out["max_commutator_ab"] = ab.max_commutator_norm;
    out["max_commutator_a_states"] = at.max_commutator_norm;
    out["states_classical"] = states_classical(s.test_states);
    return out;
}

int run_analyze(const std::string& path, bool as_json) {
    ScenarioFile f;
    try {
        f = load_scenario_file(path);
    } catch (const ScenarioParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }
    const ValidationReport rep = validate_scenario_file(f);
    if (!rep.ok()) {
        std::cerr << "invalid scenario file:\n" << rep.to_string();
        return kExitParse;
    }
    if (f.states.empty() || f.measurements_a.empty() || f.measurements_b.empty()) {
        std::cerr << "analyze requires states, measurements_a and measurements_b\n";
        return kExitParse;
    }
    const Scenario s = to_scenario(f);
    const json out = analyze_scenario_json(s);
    if (as_json) {
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    }
    std::cout << "factorization rank A: " << out["factorization_rank_a"]
              << "  (informationally complete: "
              << (out["info_complete_a"].get<bool>() ? "yes" : "no") << ")\n";
    std::cout << "factorization rank B: " << out["factorization_rank_b"]
              << "  (informationally complete: "
              << (out["info_complete_b"].get<bool>() ? "yes" : "no") << ")\n";
    std::cout << "commuting within A: " << (out["commuting_a"].get<bool>() ? "yes" : "no")
              << " (max commutator " << out["max_commutator_a"].get<double>() << ")\n";
    std::cout << "commuting within B: " << (out["commuting_b"].get<bool>() ? "yes" : "no")
              << " (max commutator " << out["max_commutator_b"].get<double>() << ")\n";
    std::cout << "commuting A vs B: " << (out["commuting_ab"].get<bool>() ? "yes" : "no")
              << " (max commutator " << out["max_commutator_ab"].get<double>() << ")\n";
    std::cout << "commuting A vs states: "
              << (out["commuting_a_states"].get<bool>() ? "yes" : "no") << " (max commutator "
              << out["max_commutator_a_states"].get<double>() << ")\n";
    std::cout << "states classical: " << (out["states_classical"].get<bool>() ? "yes" : "no")
              << "\n";
    return kExitOk;
}

int status_exit_code(FeasStatus s) {
    switch (s) {
        case FeasStatus::Feasible: return kExitOk;
        case FeasStatus::NumericallyInfeasible: return kExitInfeasible;
        case FeasStatus::Inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

int run_decide(const std::string& path, const std::string& mode, bool as_json,
               const SolverFlags& flags) {
    ScenarioFile f;
    try {
        f = load_scenario_file(path);
    } catch (const ScenarioParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }
    const ValidationReport vrep = validate_scenario_file(f);
    if (!vrep.ok()) {
        std::cerr << "invalid scenario file:\n" << vrep.to_string();
        return kExitParse;
    }
    SolverConfig cfg = base_config();
    if (f.has_solver) cfg = f.solver;
    flags.apply(cfg);

    AffineConstraintSystem sys;
    ConeBlocks blocks;
    std::vector<double> start;
    json structural;
    std::size_t witness_din = 0, witness_dout = 0;

    try {
        if (mode == "broadcast") {
            if (f.states.empty() || f.measurements_a.empty() || f.measurements_b.empty()) {
                std::cerr << "broadcast mode requires states, measurements_a, measurements_b\n";
                return kExitParse;
            }
            const Scenario s = to_scenario(f);
            sys = build_broadcast_constraints(s);
            blocks = broadcast_blocks(s.dim);
            start = choi_identity_start(s.dim, s.dim * s.dim);
            witness_din = s.dim;
            witness_dout = s.dim * s.dim;
            structural = analyze_scenario_json(s);
        } else if (mode == "compat" || mode == "channel-broadcast") {
            if (!f.channels.count("phi1") || !f.channels.count("phi2")) {
                std::cerr << mode << " mode requires channels named phi1 and phi2\n";
                return kExitParse;
            }
            const ChoiChannel phi1 = to_channel(f.channels.at("phi1"));
            const ChoiChannel phi2 = to_channel(f.channels.at("phi2"));
            std::vector<DensityMatrix> states;
            for (const auto& m : f.states) states.push_back(DensityMatrix(HermitianMatrix(m)));
            if (mode == "compat") {
                sys = build_compatibility_constraints(phi1, phi2,
                                                      states.empty() ? nullptr : &states);
                blocks = compatibility_blocks(phi1, phi2);
                witness_din = phi1.dim_in;
                witness_dout = phi1.dim_out * phi2.dim_out;
            } else {
                if (states.empty()) {
                    std::cerr << "channel-broadcast mode requires test states\n";
                    return kExitParse;
                }
                sys = build_channel_broadcast_constraints(states, phi1, phi2);
                blocks = channel_broadcast_blocks(phi1.dim_in);
                witness_din = phi1.dim_in;
                witness_dout = phi1.dim_in * phi1.dim_in;
            }
            start = choi_identity_start(witness_din, witness_dout);
            structural["factorization_rank_phi1"] = channel_factorization(phi1).rank;
            structural["factorization_rank_phi2"] = channel_factorization(phi2).rank;
        } else if (mode == "surrogate") {
            if (f.states.empty() || f.measurements_a.size() != 1) {
                std::cerr
                    << "surrogate mode requires states and exactly one POVM in measurements_a\n";
                return kExitParse;
            }
            std::vector<DensityMatrix> states;
            for (const auto& m : f.states) states.push_back(DensityMatrix(HermitianMatrix(m)));
            std::vector<HermitianMatrix> eff;
            for (const auto& e : f.measurements_a[0]) eff.push_back(HermitianMatrix(e));
            const Povm a(eff);
            sys = build_commuting_surrogate_constraints(states, a);
            blocks = surrogate_blocks(a.dim, a.n_outcomes());
            start = scaled_identity_start(blocks);
            structural["states_classical"] = states_classical(states);
        } else {
            std::cerr << "unknown mode: " << mode << "\n";
            return kExitParse;
        }
    } catch (const std::exception& e) {
        std::cerr << "cannot build constraints: " << e.what() << "\n";
        return kExitParse;
    }

    const FeasibilityVerdict verdict = dykstra_solve(sys, blocks, cfg, start);

    json out;
    out["mode"] = mode;
    out["status"] = to_string(verdict.status);
    out["residual"] = verdict.residual;
    out["iterations"] = verdict.iterations;
    out["linear_inconsistency"] = verdict.linear_inconsistency;
    out["constraint_rows"] = sys.rows.size();
    out["structural"] = structural;
    if (verdict.witness) {
        std::vector<double> x;
        for (const auto& w : *verdict.witness) {
            const auto v = vectorize(w);
            x.insert(x.end(), v.begin(), v.end());
        }
        json digest;
        double fro = 0.0, mineig = 0.0;
        for (const auto& w : *verdict.witness) {
            fro += w.frobenius_norm() * w.frobenius_norm();
            mineig = std::min(mineig, min_eigenvalue(w));
        }
        digest["frobenius_norm"] = std::sqrt(fro);
        digest["min_eigenvalue"] = mineig;
        if (verdict.witness->size() == 1 && witness_din > 0) {
            const HermitianMatrix marg =
                partial_trace((*verdict.witness)[0], witness_din, witness_dout, Keep::First);
            digest["tp_margin"] = op_norm(marg - HermitianMatrix::identity(witness_din));
        } else {
            HermitianMatrix sum = HermitianMatrix::zero((*verdict.witness)[0].dim());
            for (const auto& w : *verdict.witness) sum = sum + w;
            digest["tp_margin"] =
                op_norm(sum - HermitianMatrix::identity((*verdict.witness)[0].dim()));
        }
        out["witness"] = std::move(digest);
        out["max_constraint_deviation"] = max_row_violation(sys, x);
    } else {
        out["witness"] = nullptr;
    }

    if (as_json) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "status: " << out["status"].get<std::string>() << "\n";
        std::cout << "residual: " << verdict.residual << " after " << verdict.iterations
                  << " iterations (" << sys.rows.size() << " constraint rows)\n";
        if (verdict.witness) {
            std::cout << "witness: Frobenius norm "
                      << out["witness"]["frobenius_norm"].get<double>() << ", min eigenvalue "
                      << out["witness"]["min_eigenvalue"].get<double>() << ", trace margin "
                      << out["witness"]["tp_margin"].get<double>()
                      << ", max constraint deviation "
                      << out["max_constraint_deviation"].get<double>() << "\n";
        }
    }
    return status_exit_code(verdict.status);
}

json corpus_result_json(const CorpusResult& r) {
    json e;
    e["name"] = r.name;
    e["expected"] = r.expected;
    e["got"] = r.got;
    e["residual"] = r.residual;
    e["iterations"] = r.iterations;
    e["ok"] = r.ok();
    json facts = json::array();
    for (const auto& f : r.facts) {
        json fj;
        fj["name"] = f.name;
        fj["pass"] = f.pass;
        fj["value"] = f.value;
        facts.push_back(std::move(fj));
    }
    e["facts"] = std::move(facts);
    return e;
}

int run_corpus_cmd(const std::string& filter, int parallel, bool as_json,
                   const SolverFlags& flags) {
    SolverConfig cfg = base_config();
    flags.apply(cfg);
    std::vector<CorpusEntry> entries;
    for (auto& e : corpus_entries())
        if (filter.empty() || e.name.find(filter) != std::string::npos)
            entries.push_back(std::move(e));
    if (entries.empty()) {
        std::cerr << "no corpus entries match filter '" << filter << "'\n";
        return kExitInvalid;
    }

    std::vector<CorpusResult> results;
    if (as_json) {
        results = run_corpus(entries, cfg, parallel);
        for (const auto& r : results) std::cout << corpus_result_json(r).dump() << "\n";
    } else {
        std::vector<double> wall_ms(entries.size(), 0.0);
        results.resize(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            results[i] = entries[i].run(cfg);
            wall_ms[i] = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        }
        std::printf("%-38s %-22s %-22s %-10s %-9s %s\n", "entry", "expected", "got", "residual",
                    "time", "result");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const CorpusResult& r = results[i];
            std::printf("%-38s %-22s %-22s %-10.2e %7.0fms %s\n", r.name.c_str(),
                        r.expected.c_str(), r.got.c_str(), r.residual, wall_ms[i],
                        r.ok() ? "ok" : "MISMATCH");
            for (const auto& fct : r.facts)
                if (!fct.pass)
                    std::printf("    fact failed: %s (value %g)\n", fct.name.c_str(), fct.value);
        }
    }
    bool all_ok = true;
    for (const auto& r : results) all_ok = all_ok && r.ok();
    if (!as_json)
        std::printf("%zu entries, %s\n", results.size(),
                    all_ok ? "all reproduced" : "MISMATCHES PRESENT");
    return all_ok ? kExitOk : kExitInvalid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"broadcasting-test decision engine and certificate toolkit"};
    app.require_subcommand(1);

    std::string path, mode = "broadcast", filter;
    bool as_json = false;
    int parallel = 1;
    SolverFlags flags;
    double opt_tol_feasible = 0, opt_tol_infeasible = 0;
    int opt_max_iter = 0;
    std::uint64_t opt_seed = 0;

    auto add_solver_flags = [&](CLI::App* cmd) {
        cmd->add_option("--tol-feasible", opt_tol_feasible, "feasibility residual threshold")
            ->each([&](const std::string&) { flags.tol_feasible = opt_tol_feasible; });
        cmd->add_option("--tol-infeasible", opt_tol_infeasible,
                        "numerical-infeasibility residual floor")
            ->each([&](const std::string&) { flags.tol_infeasible = opt_tol_infeasible; });
        cmd->add_option("--max-iter", opt_max_iter, "iteration budget")
            ->each([&](const std::string&) { flags.max_iter = opt_max_iter; });
        cmd->add_option("--seed", opt_seed, "seed for randomized subroutines")
            ->each([&](const std::string&) { flags.seed = opt_seed; });
    };

    CLI::App* validate_cmd = app.add_subcommand("validate", "validate a scenario file");
    validate_cmd->add_option("file", path, "scenario file")->required();

    CLI::App* decide_cmd = app.add_subcommand("decide", "run a feasibility decision");
    decide_cmd->add_option("file", path, "scenario file")->required();
    decide_cmd->add_option("--mode", mode,
                           "broadcast | compat | channel-broadcast | surrogate");
    decide_cmd->add_flag("--json", as_json, "emit a JSON report");
    add_solver_flags(decide_cmd);

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "structural analysis, no solve");
    analyze_cmd->add_option("file", path, "scenario file")->required();
    analyze_cmd->add_flag("--json", as_json, "emit a JSON report");

    CLI::App* corpus_cmd = app.add_subcommand("corpus", "run the example regression suite");
    corpus_cmd->add_option("--filter", filter, "run only entries whose name contains this");
    corpus_cmd->add_option("--parallel", parallel, "worker threads");
    corpus_cmd->add_flag("--json", as_json, "one JSON document per entry");
    add_solver_flags(corpus_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (app.got_subcommand(validate_cmd)) return run_validate(path);
        if (app.got_subcommand(decide_cmd)) return run_decide(path, mode, as_json, flags);
        if (app.got_subcommand(analyze_cmd)) return run_analyze(path, as_json);
        if (app.got_subcommand(corpus_cmd))
            return run_corpus_cmd(filter, parallel, as_json, flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitParse;
}
