// decide.hpp — typed front ends over the feasibility engine, plus the direct
// pass-verification of a candidate broadcasting channel.

#pragma once

#include <qbcast/dykstra.hpp>

#include <optional>
#include <string>

namespace qbcast {

// ------------------------------- verify_pass ---------------------------------

struct PassReport {
    double max_deviation_a = 0.0;
    double max_deviation_b = 0.0;
    double tolerance = 0.0;
    bool passed = false;

    double max_deviation() const { return std::max(max_deviation_a, max_deviation_b); }
};

// Direct check of the defining conditions: for every test state and effect,
// the statistics of each output marginal match the input statistics.
inline PassReport verify_pass(const ChoiChannel& lambda, const Scenario& s,
                              double tol = default_tolerances().pass) {
    const std::size_t d = s.dim;
    if (lambda.dim_in != d || lambda.dim_out != d * d)
        throw ShapeError("verify_pass: channel must map d to d*d");
    PassReport rep;
    rep.tolerance = tol;
    for (const auto& rho : s.test_states) {
        const HermitianMatrix out = apply_channel(lambda, rho.matrix);
        const HermitianMatrix m1 = partial_trace(out, d, d, Keep::First);
        const HermitianMatrix m2 = partial_trace(out, d, d, Keep::Second);
        for (const auto& povm : s.test_meas_a)
            for (const auto& a : povm.effects) {
                const double dev = std::abs(herm_inner(a, m1) - herm_inner(a, rho.matrix));
                rep.max_deviation_a = std::max(rep.max_deviation_a, dev);
            }
        for (const auto& povm : s.test_meas_b)
            for (const auto& b : povm.effects) {
                const double dev = std::abs(herm_inner(b, m2) - herm_inner(b, rho.matrix));
                rep.max_deviation_b = std::max(rep.max_deviation_b, dev);
            }
    }
    rep.passed = rep.max_deviation() <= tol;
    return rep;
}

// ------------------------------ decide wrappers -------------------------------

struct BroadcastDecision {
    FeasibilityVerdict verdict;
    std::optional<ChoiChannel> witness; // Lambda: d -> d (x) d when feasible
};

inline BroadcastDecision decide_broadcast(const Scenario& s,
                                          const SolverConfig& cfg = SolverConfig{}) {
    const auto sys = build_broadcast_constraints(s);
    const auto blocks = broadcast_blocks(s.dim);
    BroadcastDecision out;
    out.verdict = dykstra_solve(sys, blocks, cfg, choi_identity_start(s.dim, s.dim * s.dim));
    if (out.verdict.status == FeasStatus::Feasible)
        out.witness = ChoiChannel(s.dim, s.dim * s.dim, out.verdict.witness_block());
    return out;
}

inline BroadcastDecision decide_compatibility(const ChoiChannel& phi1, const ChoiChannel& phi2,
                                              const std::vector<DensityMatrix>* test_states =
                                                  nullptr,
                                              const SolverConfig& cfg = SolverConfig{}) {
    const auto sys = build_compatibility_constraints(phi1, phi2, test_states);
    const auto blocks = compatibility_blocks(phi1, phi2);
    BroadcastDecision out;
    out.verdict = dykstra_solve(sys, blocks, cfg,
                                choi_identity_start(phi1.dim_in, phi1.dim_out * phi2.dim_out));
    if (out.verdict.status == FeasStatus::Feasible)
        out.witness = ChoiChannel(phi1.dim_in, phi1.dim_out * phi2.dim_out,
                                  out.verdict.witness_block());
    return out;
}

inline BroadcastDecision decide_channel_broadcast(const std::vector<DensityMatrix>& test_states,
                                                  const ChoiChannel& phi1,
                                                  const ChoiChannel& phi2,
                                                  const SolverConfig& cfg = SolverConfig{}) {
    const auto sys = build_channel_broadcast_constraints(test_states, phi1, phi2);
    const auto blocks = channel_broadcast_blocks(phi1.dim_in);
    BroadcastDecision out;
    out.verdict = dykstra_solve(sys, blocks, cfg,
                                choi_identity_start(phi1.dim_in, phi1.dim_in * phi1.dim_in));
    if (out.verdict.status == FeasStatus::Feasible)
        out.witness = ChoiChannel(phi1.dim_in, phi1.dim_in * phi1.dim_in,
                                  out.verdict.witness_block());
    return out;
}

struct SurrogateDecision {
    FeasibilityVerdict verdict;
    std::optional<Povm> witness; // the commuting surrogate measurement
};

inline SurrogateDecision decide_commuting_surrogate(const std::vector<DensityMatrix>& test_states,
                                                    const Povm& a,
                                                    const SolverConfig& cfg = SolverConfig{}) {
    const auto sys = build_commuting_surrogate_constraints(test_states, a);
    const auto blocks = surrogate_blocks(a.dim, a.n_outcomes());
    SurrogateDecision out;
    out.verdict = dykstra_solve(sys, blocks, cfg, scaled_identity_start(blocks));
    if (out.verdict.status == FeasStatus::Feasible) out.witness = Povm(*out.verdict.witness);
    return out;
}

} // namespace qbcast
