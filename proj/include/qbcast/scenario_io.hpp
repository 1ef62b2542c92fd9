// scenario_io.hpp — the scenario file format: a single JSON document holding
// states, measurement collections, and optional named Choi channels. Complex
// entries are [re, im] pairs, matrices dense row-major; unknown fields are
// rejected and no NaN/Inf values are permitted.

#pragma once

#include <qbcast/dykstra.hpp>
#include <qbcast/qobjects.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qbcast {

struct ScenarioParseError : std::runtime_error {
    explicit ScenarioParseError(const std::string& what) : std::runtime_error(what) {}
};

struct RawChannel {
    std::size_t dim_in = 0;
    std::size_t dim_out = 0;
    ComplexMatrix choi;
};

struct ScenarioFile {
    std::string schema_version;
    std::size_t dim = 0;
    std::string label;
    std::vector<ComplexMatrix> states;
    std::vector<std::vector<ComplexMatrix>> measurements_a;
    std::vector<std::vector<ComplexMatrix>> measurements_b;
    std::map<std::string, RawChannel> channels;
    bool has_solver = false;
    SolverConfig solver;
};

namespace io_detail {

using nlohmann::json;

inline double parse_finite_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ScenarioParseError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ScenarioParseError(where + ": NaN/Inf not permitted");
    return v;
}

inline ComplexMatrix parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ScenarioParseError(where + ": expected a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw ScenarioParseError(where + ": expected non-empty rows");
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ScenarioParseError(where + ": ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) {
            const json& e = j[r][c];
            if (!e.is_array() || e.size() != 2)
                throw ScenarioParseError(where + ": complex entries must be [re, im] pairs");
            m(r, c) = cx{parse_finite_number(e[0], where), parse_finite_number(e[1], where)};
        }
    }
    return m;
}

inline void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ScenarioParseError(where + ": unknown field '" + it.key() + "'");
    }
}

inline json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace io_detail

inline ScenarioFile parse_scenario_text(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " +
                                 e.what());
    }
    if (!j.is_object()) throw ScenarioParseError("top level: expected an object");
    io_detail::reject_unknown_keys(j,
                                   {"schema_version", "dim", "label", "states",
                                    "measurements_a", "measurements_b", "channels", "solver"},
                                   "top level");

    ScenarioFile f;
    if (!j.contains("schema_version") || !j["schema_version"].is_string())
        throw ScenarioParseError("schema_version: required string field");
    f.schema_version = j["schema_version"].get<std::string>();
    if (f.schema_version != "1")
        throw ScenarioParseError("schema_version: unsupported version '" + f.schema_version +
                                 "'");
    if (!j.contains("dim") || !j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0)
        throw ScenarioParseError("dim: required positive integer");
    f.dim = j["dim"].get<std::size_t>();
    if (j.contains("label")) {
        if (!j["label"].is_string()) throw ScenarioParseError("label: expected a string");
        f.label = j["label"].get<std::string>();
    }

    auto parse_matrix_list = [](const nlohmann::json& arr, const std::string& where) {
        if (!arr.is_array()) throw ScenarioParseError(where + ": expected an array");
        std::vector<ComplexMatrix> out;
        for (std::size_t i = 0; i < arr.size(); ++i)
            out.push_back(
                io_detail::parse_matrix(arr[i], where + "[" + std::to_string(i) + "]"));
        return out;
    };
    if (j.contains("states")) f.states = parse_matrix_list(j["states"], "states");
    auto parse_meas = [&](const char* key) {
        std::vector<std::vector<ComplexMatrix>> out;
        if (!j.contains(key)) return out;
        const auto& arr = j[key];
        if (!arr.is_array()) throw ScenarioParseError(std::string(key) + ": expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
            out.push_back(parse_matrix_list(
                arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
        return out;
    };
    f.measurements_a = parse_meas("measurements_a");
    f.measurements_b = parse_meas("measurements_b");

    if (j.contains("channels")) {
        if (!j["channels"].is_object())
            throw ScenarioParseError("channels: expected an object of named channels");
        for (auto it = j["channels"].begin(); it != j["channels"].end(); ++it) {
            const std::string where = "channels." + it.key();
            io_detail::reject_unknown_keys(*it, {"dim_in", "dim_out", "choi"}, where);
            RawChannel rc;
            if (!it->contains("dim_in") || !(*it)["dim_in"].is_number_unsigned())
                throw ScenarioParseError(where + ".dim_in: required positive integer");
            if (!it->contains("dim_out") || !(*it)["dim_out"].is_number_unsigned())
                throw ScenarioParseError(where + ".dim_out: required positive integer");
            rc.dim_in = (*it)["dim_in"].get<std::size_t>();
            rc.dim_out = (*it)["dim_out"].get<std::size_t>();
            if (rc.dim_in == 0 || rc.dim_out == 0)
                throw ScenarioParseError(where + ": dimensions must be positive");
            if (!it->contains("choi"))
                throw ScenarioParseError(where + ".choi: required matrix");
            rc.choi = io_detail::parse_matrix((*it)["choi"], where + ".choi");
            if (rc.choi.rows() != rc.dim_in * rc.dim_out)
                throw ScenarioParseError(where + ": Choi matrix dimension is not dim_in*dim_out");
            f.channels.emplace(it.key(), std::move(rc));
        }
    }

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        io_detail::reject_unknown_keys(
            s, {"tol_feasible", "tol_infeasible_floor", "max_iterations", "stall_window",
                "rng_seed"},
            "solver");
        f.has_solver = true;
        if (s.contains("tol_feasible"))
            f.solver.tol_feasible = io_detail::parse_finite_number(s["tol_feasible"],
                                                                   "solver.tol_feasible");
        if (s.contains("tol_infeasible_floor"))
            f.solver.tol_infeasible_floor =
                io_detail::parse_finite_number(s["tol_infeasible_floor"],
                                               "solver.tol_infeasible_floor");
        if (s.contains("max_iterations")) {
            if (!s["max_iterations"].is_number_integer())
                throw ScenarioParseError("solver.max_iterations: expected an integer");
            f.solver.max_iterations = s["max_iterations"].get<int>();
        }
        if (s.contains("stall_window")) {
            if (!s["stall_window"].is_number_integer())
                throw ScenarioParseError("solver.stall_window: expected an integer");
            f.solver.stall_window = s["stall_window"].get<int>();
        }
        if (s.contains("rng_seed")) {
            if (!s["rng_seed"].is_number_unsigned())
                throw ScenarioParseError("solver.rng_seed: expected a nonnegative integer");
            f.solver.rng_seed = s["rng_seed"].get<std::uint64_t>();
        }
    }

    // square shape checks (content checks are the validate command's job)
    for (std::size_t i = 0; i < f.states.size(); ++i)
        if (f.states[i].rows() != f.dim || f.states[i].cols() != f.dim)
            throw ScenarioParseError("states[" + std::to_string(i) +
                                     "]: matrix dimension differs from dim");
    auto check_meas = [&](const std::vector<std::vector<ComplexMatrix>>& meas, const char* key) {
        for (std::size_t i = 0; i < meas.size(); ++i)
            for (std::size_t e = 0; e < meas[i].size(); ++e)
                if (meas[i][e].rows() != f.dim || meas[i][e].cols() != f.dim)
                    throw ScenarioParseError(std::string(key) + "[" + std::to_string(i) + "][" +
                                             std::to_string(e) +
                                             "]: matrix dimension differs from dim");
    };
    check_meas(f.measurements_a, "measurements_a");
    check_meas(f.measurements_b, "measurements_b");
    return f;
}

inline ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

inline std::string write_scenario_text(const ScenarioFile& f) {
    using nlohmann::json;
    json j;
    j["schema_version"] = f.schema_version.empty() ? "1" : f.schema_version;
    j["dim"] = f.dim;
    if (!f.label.empty()) j["label"] = f.label;
    if (!f.states.empty()) {
        json arr = json::array();
        for (const auto& s : f.states) arr.push_back(io_detail::matrix_to_json(s));
        j["states"] = std::move(arr);
    }
    auto meas_json = [](const std::vector<std::vector<ComplexMatrix>>& meas) {
        json arr = json::array();
        for (const auto& povm : meas) {
            json eff = json::array();
            for (const auto& e : povm) eff.push_back(io_detail::matrix_to_json(e));
            arr.push_back(std::move(eff));
        }
        return arr;
    };
    if (!f.measurements_a.empty()) j["measurements_a"] = meas_json(f.measurements_a);
    if (!f.measurements_b.empty()) j["measurements_b"] = meas_json(f.measurements_b);
    if (!f.channels.empty()) {
        json ch = json::object();
        for (const auto& [name, rc] : f.channels) {
            json c;
            c["dim_in"] = rc.dim_in;
            c["dim_out"] = rc.dim_out;
            c["choi"] = io_detail::matrix_to_json(rc.choi);
            ch[name] = std::move(c);
        }
        j["channels"] = std::move(ch);
    }
    if (f.has_solver) {
        json s;
        s["tol_feasible"] = f.solver.tol_feasible;
        s["tol_infeasible_floor"] = f.solver.tol_infeasible_floor;
        s["max_iterations"] = f.solver.max_iterations;
        s["stall_window"] = f.solver.stall_window;
        s["rng_seed"] = f.solver.rng_seed;
        j["solver"] = std::move(s);
    }
    return j.dump(2) + "\n";
}

// ------------------------ typed views of a parsed file ------------------------

// structural validation of the raw matrices plus the object invariants
inline ValidationReport validate_scenario_file(const ScenarioFile& f,
                                               const Tolerances& tol = default_tolerances()) {
    ValidationReport rep;
    auto hermitian_or_report = [&](const ComplexMatrix& m,
                                   const std::string& where) -> std::optional<HermitianMatrix> {
        try {
            return HermitianMatrix(m, tol.herm);
        } catch (const DomainError&) {
            rep.add(where + ": matrix is not Hermitian",
                    (m - m.adjoint()).max_abs());
            return std::nullopt;
        }
    };
    for (std::size_t i = 0; i < f.states.size(); ++i) {
        const auto h = hermitian_or_report(f.states[i], "state " + std::to_string(i));
        if (!h) continue;
        const auto sub = validate(DensityMatrix(*h), tol);
        for (const auto& v : sub.violations)
            rep.add("state " + std::to_string(i) + ": " + v.what, v.margin);
    }
    auto check_meas = [&](const std::vector<std::vector<ComplexMatrix>>& meas,
                          const std::string& side) {
        for (std::size_t i = 0; i < meas.size(); ++i) {
            std::vector<HermitianMatrix> effects;
            bool all_hermitian = true;
            for (std::size_t e = 0; e < meas[i].size(); ++e) {
                const auto h = hermitian_or_report(meas[i][e], "measurement " + side +
                                                                   std::to_string(i) +
                                                                   ", effect " +
                                                                   std::to_string(e));
                if (!h) {
                    all_hermitian = false;
                    continue;
                }
                effects.push_back(*h);
            }
            if (!all_hermitian || effects.empty()) continue;
            Povm p;
            p.dim = f.dim;
            p.effects = std::move(effects);
            const auto sub = validate(p, tol);
            for (const auto& v : sub.violations)
                rep.add("measurement " + side + std::to_string(i) + ": " + v.what, v.margin);
        }
    };
    check_meas(f.measurements_a, "A");
    check_meas(f.measurements_b, "B");
    for (const auto& [name, rc] : f.channels) {
        const auto h = hermitian_or_report(rc.choi, "channel " + name);
        if (!h) continue;
        const auto sub = validate(ChoiChannel(rc.dim_in, rc.dim_out, *h), tol);
        for (const auto& v : sub.violations) rep.add("channel " + name + ": " + v.what, v.margin);
    }
    return rep;
}

inline Scenario to_scenario(const ScenarioFile& f) {
    Scenario s;
    s.dim = f.dim;
    s.label = f.label;
    for (const auto& m : f.states) s.test_states.push_back(DensityMatrix(HermitianMatrix(m)));
    for (const auto& povm : f.measurements_a) {
        std::vector<HermitianMatrix> eff;
        for (const auto& e : povm) eff.push_back(HermitianMatrix(e));
        s.test_meas_a.push_back(Povm(std::move(eff)));
    }
    for (const auto& povm : f.measurements_b) {
        std::vector<HermitianMatrix> eff;
        for (const auto& e : povm) eff.push_back(HermitianMatrix(e));
        s.test_meas_b.push_back(Povm(std::move(eff)));
    }
    return s;
}

inline ChoiChannel to_channel(const RawChannel& rc) {
    return ChoiChannel(rc.dim_in, rc.dim_out, HermitianMatrix(rc.choi));
}

inline ScenarioFile scenario_to_file(const Scenario& s) {
    ScenarioFile f;
    f.schema_version = "1";
    f.dim = s.dim;
    f.label = s.label;
    for (const auto& st : s.test_states) f.states.push_back(st.matrix.mat());
    for (const auto& p : s.test_meas_a) {
        std::vector<ComplexMatrix> eff;
        for (const auto& e : p.effects) eff.push_back(e.mat());
        f.measurements_a.push_back(std::move(eff));
    }
    for (const auto& p : s.test_meas_b) {
        std::vector<ComplexMatrix> eff;
        for (const auto& e : p.effects) eff.push_back(e.mat());
        f.measurements_b.push_back(std::move(eff));
    }
    return f;
}

} // namespace qbcast
