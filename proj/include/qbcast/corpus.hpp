// corpus.hpp — the worked examples, each paired with its expected verdict and
// certificate facts; together they form the regression suite driven by the
// CLI `corpus` command and the acceptance tests.

#pragma once

#include <qbcast/decide.hpp>
#include <qbcast/structure.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

namespace qbcast {

// ------------------------------- constructions -------------------------------

inline Povm pauli_measurement(const ComplexMatrix& sigma) {
    const ComplexMatrix id = ComplexMatrix::identity(2);
    return Povm({HermitianMatrix::symmetrized(cx{0.5, 0.0} * (id + sigma)),
                 HermitianMatrix::symmetrized(cx{0.5, 0.0} * (id - sigma))});
}

// Bloch-plane unit vectors of an equilateral triangle, optionally rotated
inline std::vector<std::array<double, 2>> trine_vectors(double rotation = 0.0) {
    std::vector<std::array<double, 2>> v;
    for (int k = 0; k < 3; ++k) {
        const double th = rotation + 2.0 * std::numbers::pi * k / 3.0;
        v.push_back({std::cos(th), std::sin(th)});
    }
    return v;
}

// Uniform antidiscrimination on a qubit: tr(rho_x A_y) = (1 - delta_xy)/(n-1).
// n=2: antipodal states with swapped projectors; n=3: trine; n=4: tetrahedron.
struct AntidiscriminationScenario {
    Scenario scenario;
    Povm measurement;
};

inline AntidiscriminationScenario antidiscrimination_scenario(int n) {
    AntidiscriminationScenario out;
    Scenario& s = out.scenario;
    s.dim = 2;
    std::vector<HermitianMatrix> eff;
    if (n == 2) {
        s.test_states = {DensityMatrix(HermitianMatrix(bloch_state(0, 0, 1))),
                         DensityMatrix(HermitianMatrix(bloch_state(0, 0, -1)))};
        eff = {HermitianMatrix(bloch_state(0, 0, -1)), HermitianMatrix(bloch_state(0, 0, 1))};
    } else if (n == 3) {
        for (const auto& u : trine_vectors()) {
            s.test_states.push_back(DensityMatrix(HermitianMatrix(bloch_state(u[0], u[1], 0))));
            ComplexMatrix e = ComplexMatrix::identity(2);
            e -= u[0] * sigma_x() + u[1] * sigma_y();
            eff.push_back(HermitianMatrix::symmetrized(cx{1.0 / 3.0, 0.0} * e));
        }
    } else if (n == 4) {
        const double c = 1.0 / std::sqrt(3.0);
        const double us[4][3] = {{c, c, c}, {c, -c, -c}, {-c, c, -c}, {-c, -c, c}};
        for (const auto& u : us) {
            s.test_states.push_back(
                DensityMatrix(HermitianMatrix(bloch_state(u[0], u[1], u[2]))));
            ComplexMatrix e = ComplexMatrix::identity(2);
            e -= u[0] * sigma_x() + u[1] * sigma_y() + u[2] * sigma_z();
            eff.push_back(HermitianMatrix::symmetrized(cx{0.25, 0.0} * e));
        }
    } else {
        throw DomainError("antidiscrimination_scenario: n must be 2, 3 or 4");
    }
    out.measurement = Povm(eff);
    s.test_meas_a = {out.measurement};
    s.test_meas_b = {out.measurement};
    s.label = "uniform antidiscrimination, n = " + std::to_string(n);
    return out;
}

// the copy channel of a projective measurement: rho -> sum tr(rho P_i) |ii><ii|
inline ChoiChannel projective_copy_channel(const Povm& proj) {
    const std::size_t d = proj.dim;
    std::vector<DensityMatrix> preps;
    for (std::size_t i = 0; i < proj.n_outcomes(); ++i) {
        const EigResult e = herm_eig(proj.effects[i]);
        std::vector<cx> doubled(d * d, cx{0.0, 0.0});
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t t = 0; t < d; ++t)
                doubled[r * d + t] = e.eigenvectors(r, d - 1) * e.eigenvectors(t, d - 1);
        preps.push_back(pure_state(doubled));
    }
    return measure_prepare_channel(proj, preps);
}

// dephasing onto the computational basis (an idempotent measure-and-prepare map)
inline ChoiChannel basis_dephasing_channel(std::size_t d) {
    std::vector<DensityMatrix> preps;
    for (std::size_t i = 0; i < d; ++i)
        preps.push_back(DensityMatrix(HermitianMatrix::symmetrized(projector(d, i))));
    return measure_prepare_channel(basis_povm(d), preps);
}

// Dimension-5 scenario with a single noncommuting measurement that is still
// broadcastable: A_i = |i><i| + M_i, the M_i a trine qubit measurement
// embedded on span{|3>,|4>}; the copy channel sum tr(rho A_i)|ii><ii| passes.
struct NoncommutingFrameExample {
    Scenario scenario;
    Povm measurement;
    std::vector<HermitianMatrix> embedded_blocks; // the M_i
    ChoiChannel channel;
};

inline NoncommutingFrameExample example_51_scenario(std::uint64_t seed = 0) {
    const std::size_t d = 5;
    const double rotation = 0.35 * static_cast<double>(seed % 17);
    std::vector<HermitianMatrix> effects, blocks;
    for (int i = 0; i < 3; ++i) {
        const auto u = trine_vectors(rotation)[i];
        // (I2 + u . sigma)/3 on the last two dimensions
        ComplexMatrix m(d, d);
        m(3, 3) = cx{1.0 / 3.0, 0.0};
        m(4, 4) = cx{1.0 / 3.0, 0.0};
        m(3, 4) = cx{u[0] / 3.0, -u[1] / 3.0};
        m(4, 3) = cx{u[0] / 3.0, u[1] / 3.0};
        blocks.push_back(HermitianMatrix::symmetrized(m));
        ComplexMatrix a = projector(d, static_cast<std::size_t>(i));
        a += m;
        effects.push_back(HermitianMatrix::symmetrized(a));
    }
    NoncommutingFrameExample out;
    out.measurement = Povm(effects);
    out.embedded_blocks = blocks;
    out.channel = measure_prepare_channel(
        out.measurement,
        [&] {
            std::vector<DensityMatrix> preps;
            for (std::size_t i = 0; i < 3; ++i) {
                std::vector<cx> psi(d * d, cx{0.0, 0.0});
                psi[i * d + i] = 1.0;
                preps.push_back(pure_state(psi));
            }
            return preps;
        }());
    out.scenario.dim = d;
    out.scenario.test_states = spanning_states(d);
    out.scenario.test_meas_a = {out.measurement};
    out.scenario.test_meas_b = {out.measurement};
    out.scenario.label = "dimension-5 noncommuting broadcastable measurement";
    return out;
}

// Dimension-6 example with two noncommuting measurements and an explicit
// passing channel. The first four dimensions carry a two-qubit split, the
// last two a qubit image under the embedding iota; the channel reroutes the
// two-qubit block and pushes the embedded block through a joint channel
// whose marginals realize the mu = 1/3 depolarizing map.
struct TwoMeasurementExample {
    Scenario scenario;
    Povm meas_a;
    Povm meas_b;
    ChoiChannel channel;
    ChoiChannel psi;          // the joint channel obtained from the engine
    double psi_residual = 0;  // feasibility residual of the psi solve
};

namespace detail {

// iota: 2x2 block placed on rows/columns {4, 5} of a 6x6 matrix
inline ComplexMatrix embed_tail_block(const ComplexMatrix& q) {
    ComplexMatrix out(6, 6);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) out(4 + i, 4 + j) = q(i, j);
    return out;
}

// rerouting map on B(C4): X1 (x) X2 -> X1 (x) I/2 (x) I/2 (x) X2, extended
// linearly; input index (a e), output factors ordered (a b c e)
inline ComplexMatrix reroute_two_qubit(const ComplexMatrix& y) {
    ComplexMatrix out(16, 16);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t e = 0; e < 2; ++e)
            for (std::size_t a2 = 0; a2 < 2; ++a2)
                for (std::size_t e2 = 0; e2 < 2; ++e2) {
                    const cx v = cx{0.25, 0.0} * y(a * 2 + e, a2 * 2 + e2);
                    if (v == cx{0.0, 0.0}) continue;
                    for (std::size_t b = 0; b < 2; ++b)
                        for (std::size_t c = 0; c < 2; ++c) {
                            const std::size_t row = ((a * 2 + b) * 2 + c) * 2 + e;
                            const std::size_t col = ((a2 * 2 + b) * 2 + c) * 2 + e2;
                            out(row, col) += v;
                        }
                }
    return out;
}

} // namespace detail

inline TwoMeasurementExample example_52_scenario(const SolverConfig& psi_cfg = [] {
    SolverConfig c;
    c.tol_feasible = 1e-9;
    return c;
}()) {
    TwoMeasurementExample out;
    const ChoiChannel delta = depolarizing_channel(1.0 / 3.0, 2);

    // joint channel for the mu = 1/3 self-compatible depolarizing map
    const BroadcastDecision psi_dec = decide_compatibility(delta, delta, nullptr, psi_cfg);
    if (psi_dec.verdict.status != FeasStatus::Feasible)
        throw ConvergenceError("example_52_scenario: joint-channel solve did not converge");
    out.psi_residual = psi_dec.verdict.residual;
    // clip to exact positivity and restore trace preservation
    {
        const HermitianMatrix clipped = psd_project(psi_dec.witness->choi);
        const HermitianMatrix marg = partial_trace(clipped, 2, 4, Keep::First);
        const ComplexMatrix w = kron(inv_sqrt_psd(marg).mat(), ComplexMatrix::identity(4));
        out.psi = ChoiChannel(2, 4, HermitianMatrix::symmetrized(w * clipped.mat() * w));
    }

    const ComplexMatrix a0 = projector(2, 0), a1 = projector(2, 1);
    const ComplexMatrix b0 = bloch_state(1, 0, 0), b1 = bloch_state(-1, 0, 0);
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    const ChoiChannel delta_for_effects = delta; // self-adjoint map
    auto delta_img = [&](const ComplexMatrix& x) {
        return apply_channel(delta_for_effects, HermitianMatrix::symmetrized(x)).mat();
    };
    auto embed_a = [&](const ComplexMatrix& ai) {
        ComplexMatrix full(6, 6);
        const ComplexMatrix head = kron(ai, id2);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) full(i, j) = head(i, j);
        full += detail::embed_tail_block(delta_img(ai));
        return HermitianMatrix::symmetrized(full);
    };
    auto embed_b = [&](const ComplexMatrix& bi) {
        ComplexMatrix full(6, 6);
        const ComplexMatrix head = kron(id2, bi);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) full(i, j) = head(i, j);
        full += detail::embed_tail_block(delta_img(bi));
        return HermitianMatrix::symmetrized(full);
    };
    out.meas_a = Povm({embed_a(a0), embed_a(a1)});
    out.meas_b = Povm({embed_b(b0), embed_b(b1)});

    const ChoiChannel psi = out.psi;
    out.channel = choi_from_map(6, 36, [&psi](const ComplexMatrix& m) {
        // two-qubit block
        ComplexMatrix head(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) head(i, j) = m(i, j);
        // embedded-qubit block
        ComplexMatrix tail(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) tail(i, j) = m(4 + i, 4 + j);
        const ComplexMatrix routed =
            detail::reroute_two_qubit(head) +
            detail::reroute_two_qubit(apply_channel_complex(psi, tail));
        // embed B(C4 (x) C4) into B(C6 (x) C6)
        ComplexMatrix full(36, 36);
        for (std::size_t p = 0; p < 4; ++p)
            for (std::size_t q = 0; q < 4; ++q)
                for (std::size_t p2 = 0; p2 < 4; ++p2)
                    for (std::size_t q2 = 0; q2 < 4; ++q2)
                        full(p * 6 + q, p2 * 6 + q2) = routed(p * 4 + q, p2 * 4 + q2);
        return full;
    });

    out.scenario.dim = 6;
    out.scenario.test_states = spanning_states(6);
    out.scenario.test_meas_a = {out.meas_a};
    out.scenario.test_meas_b = {out.meas_b};
    out.scenario.label = "dimension-6 noncommuting pair with explicit passing channel";
    return out;
}

// ------------------------------ corpus entries --------------------------------

struct CorpusCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
};

struct CorpusResult {
    std::string name;
    std::string expected;
    std::string got;
    double residual = 0.0;
    int iterations = 0;
    std::vector<CorpusCheck> facts;

    bool ok() const {
        if (expected != got) return false;
        for (const auto& f : facts)
            if (!f.pass) return false;
        return true;
    }
};

struct CorpusEntry {
    std::string name;
    std::string provenance;
    std::string expected;
    std::function<CorpusResult(const SolverConfig&)> run;
};

namespace detail {

inline CorpusResult solve_entry_result(const std::string& name, const std::string& expected,
                                       const FeasibilityVerdict& v) {
    CorpusResult r;
    r.name = name;
    r.expected = expected;
    r.got = to_string(v.status);
    r.residual = v.residual;
    r.iterations = v.iterations;
    return r;
}

} // namespace detail

inline std::vector<CorpusEntry> qubit_bloch_scenarios() {
    std::vector<CorpusEntry> entries;
    struct Setup {
        const char* name;
        std::vector<ComplexMatrix> paulis;
        std::size_t rank;
        bool info_complete;
        const char* expected;
    };
    const std::vector<Setup> setups = {
        {"bloch_x", {sigma_x()}, 2, false, "Feasible"},
        {"bloch_xy", {sigma_x(), sigma_y()}, 3, false, "NumericallyInfeasible"},
        {"bloch_xyz", {sigma_x(), sigma_y(), sigma_z()}, 4, true, "NumericallyInfeasible"},
    };
    for (const auto& setup : setups) {
        std::vector<Povm> meas;
        for (const auto& p : setup.paulis) meas.push_back(pauli_measurement(p));
        CorpusEntry e;
        e.name = setup.name;
        e.provenance = "qubit Bloch-component measurements";
        e.expected = setup.expected;
        const std::size_t want_rank = setup.rank;
        const bool want_ic = setup.info_complete;
        const std::string expected = setup.expected;
        const std::string name = setup.name;
        e.run = [meas, want_rank, want_ic, expected, name](const SolverConfig& cfg) {
            Scenario s;
            s.dim = 2;
            s.test_states = spanning_states(2);
            s.test_meas_a = meas;
            s.test_meas_b = meas;
            const BroadcastDecision dec = decide_broadcast(s, cfg);
            CorpusResult r = detail::solve_entry_result(name, expected, dec.verdict);
            const FactorizationMap f = factorization_of_povms(meas);
            r.facts.push_back({"factorization_rank", f.rank == want_rank,
                               static_cast<double>(f.rank)});
            r.facts.push_back(
                {"info_complete", is_info_complete(meas) == want_ic, want_ic ? 1.0 : 0.0});
            return r;
        };
        entries.push_back(std::move(e));
    }
    return entries;
}

inline CorpusEntry antidiscrimination_entry(int n) {
    CorpusEntry e;
    e.name = "antidiscrimination_n" + std::to_string(n);
    e.provenance = "uniform antidiscrimination of qubit states";
    e.expected = (n == 2) ? "Feasible" : "NumericallyInfeasible";
    const std::string expected = e.expected;
    const std::string name = e.name;
    e.run = [n, expected, name](const SolverConfig& cfg) {
        const AntidiscriminationScenario a = antidiscrimination_scenario(n);
        const BroadcastDecision dec = decide_broadcast(a.scenario, cfg);
        CorpusResult r = detail::solve_entry_result(name, expected, dec.verdict);
        // construction identity tr(rho_x A_y) = (1 - delta)/(n-1)
        double worst = 0.0;
        for (std::size_t x = 0; x < a.scenario.test_states.size(); ++x)
            for (std::size_t y = 0; y < a.measurement.n_outcomes(); ++y) {
                const double want = (x == y) ? 0.0 : 1.0 / (n - 1.0);
                worst = std::max(worst,
                                 std::abs(herm_inner(a.measurement.effects[y],
                                                     a.scenario.test_states[x].matrix) -
                                          want));
            }
        r.facts.push_back({"antidiscrimination_statistics", worst <= 1e-12, worst});
        r.facts.push_back({"states_classical", states_classical(a.scenario.test_states) ==
                                                   (n == 2),
                           n == 2 ? 1.0 : 0.0});
        if (n == 4)
            r.facts.push_back({"info_complete", is_info_complete({a.measurement}), 1.0});
        if (dec.witness) {
            const PassReport rep = verify_pass(*dec.witness, a.scenario, 1e-6);
            r.facts.push_back({"witness_passes", rep.passed, rep.max_deviation()});
        }
        return r;
    };
    return e;
}

inline CorpusEntry eq18_entry() {
    CorpusEntry e;
    e.name = "copy_channel_qutrit";
    e.provenance = "qutrit basis measurement with its copy channel";
    e.expected = "Feasible";
    e.run = [](const SolverConfig& cfg) {
        const std::size_t d = 3;
        Scenario s;
        s.dim = d;
        s.test_states = spanning_states(d);
        s.test_meas_a = {basis_povm(d)};
        s.test_meas_b = {basis_povm(d)};
        const BroadcastDecision dec = decide_broadcast(s, cfg);
        CorpusResult r = detail::solve_entry_result("copy_channel_qutrit", "Feasible",
                                                    dec.verdict);
        const ChoiChannel lam = projective_copy_channel(basis_povm(d));
        const PassReport rep = verify_pass(lam, s, 1e-12);
        r.facts.push_back({"explicit_channel_passes", rep.passed, rep.max_deviation()});
        const auto sys = build_broadcast_constraints(s);
        const auto x = vectorize(lam.choi);
        r.facts.push_back(
            {"explicit_channel_satisfies_rows", max_row_violation(sys, x) <= 1e-12,
             max_row_violation(sys, x)});
        const SaaExtraction ext = extract_saa_frame(lam, {basis_povm(d)}, 400, cfg.rng_seed + 7);
        r.facts.push_back({"frame_extracted", ext.certificate.has_value(),
                           static_cast<double>(ext.failed_step)});
        return r;
    };
    return e;
}

inline CorpusEntry example_51_entry(std::uint64_t seed = 0) {
    CorpusEntry e;
    e.name = "noncommuting_frame_dim5";
    e.provenance = "dimension-5 single-measurement example with embedded trine blocks";
    e.expected = "Pass";
    e.run = [seed](const SolverConfig& cfg) {
        const NoncommutingFrameExample ex = example_51_scenario(seed);
        CorpusResult r;
        r.name = "noncommuting_frame_dim5";
        r.expected = "Pass";
        const PassReport rep = verify_pass(ex.channel, ex.scenario, 1e-10);
        r.got = rep.passed ? "Pass" : "Fail";
        r.residual = rep.max_deviation();

        // block sum resolves the tail projector
        ComplexMatrix tail(5, 5);
        tail(3, 3) = 1.0;
        tail(4, 4) = 1.0;
        HermitianMatrix msum = HermitianMatrix::zero(5);
        for (const auto& m : ex.embedded_blocks) msum = msum + m;
        r.facts.push_back({"blocks_sum_to_tail_projector",
                           frobenius_distance(msum.mat(), tail) <= 1e-12,
                           frobenius_distance(msum.mat(), tail)});
        // tr(|i><i| A_j) = delta_ij
        double worst = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                const double want = i == j ? 1.0 : 0.0;
                worst = std::max(
                    worst, std::abs(ex.measurement.effects[j](i, i).real() - want));
            }
        r.facts.push_back({"head_statistics_exact", worst <= 1e-12, worst});
        // noncommuting blocks: ||[M_0, M_1]||_F = sqrt(6)/9 for the trine choice
        const double comm_norm =
            commutator(ex.embedded_blocks[0].mat(), ex.embedded_blocks[1].mat())
                .frobenius_norm();
        const double expected_comm = std::sqrt(6.0) / 9.0;
        r.facts.push_back({"block_commutator_value",
                           std::abs(comm_norm - expected_comm) <= 1e-12, comm_norm});
        r.facts.push_back({"block_commutator_large", comm_norm > 0.1, comm_norm});
        const CommuteReport cr =
            mutually_commuting(ex.scenario.test_meas_a, ex.scenario.test_meas_b);
        r.facts.push_back({"measurement_noncommuting", !cr.commuting, cr.max_commutator_norm});

        const SaaExtraction ext =
            extract_saa_frame(ex.channel, {ex.measurement}, 2000, cfg.rng_seed + 11);
        r.facts.push_back({"frame_extracted", ext.certificate.has_value(),
                           static_cast<double>(ext.failed_step)});
        if (ext.certificate) {
            const SaaVerification check =
                verify_saa_certificate({ex.measurement}, *ext.certificate);
            r.facts.push_back({"frame_verified", check.accepted, check.worst_norm_deviation});
            double norm_dev = 0.0;
            for (const auto& g : ext.certificate->frame.effects)
                norm_dev = std::max(norm_dev, std::abs(op_norm(g) - 1.0));
            r.facts.push_back({"frame_norms_one", norm_dev <= 1e-7, norm_dev});
        }
        return r;
    };
    return e;
}

inline CorpusEntry example_52_entry() {
    CorpusEntry e;
    e.name = "noncommuting_pair_dim6";
    e.provenance = "dimension-6 two-measurement example with rerouting channel";
    e.expected = "Pass";
    e.run = [](const SolverConfig& cfg) {
        (void)cfg;
        const TwoMeasurementExample ex = example_52_scenario();
        CorpusResult r;
        r.name = "noncommuting_pair_dim6";
        r.expected = "Pass";
        const PassReport rep = verify_pass(ex.channel, ex.scenario, 1e-6);
        r.got = rep.passed ? "Pass" : "Fail";
        r.residual = rep.max_deviation();

        r.facts.push_back({"psi_solve_converged", ex.psi_residual < 1e-7, ex.psi_residual});
        const double min_eig = min_eigenvalue(ex.channel.choi);
        r.facts.push_back({"channel_completely_positive", min_eig >= -1e-8, min_eig});
        const HermitianMatrix marg =
            partial_trace(ex.channel.choi, 6, 36, Keep::First);
        const double tp = op_norm(marg - HermitianMatrix::identity(6));
        r.facts.push_back({"channel_trace_preserving", tp <= 1e-7, tp});
        const CommuteReport cr = mutually_commuting({ex.meas_a}, {ex.meas_b});
        r.facts.push_back({"measurements_noncommuting", !cr.commuting, cr.max_commutator_norm});
        // the embedded blocks set the commutator scale: sqrt(2)/18
        const double comm = commutator(ex.meas_a.effects[0].mat(), ex.meas_b.effects[0].mat())
                                .frobenius_norm();
        r.facts.push_back({"pair_commutator_value",
                           std::abs(comm - std::sqrt(2.0) / 18.0) <= 1e-9, comm});
        return r;
    };
    return e;
}

inline std::vector<CorpusEntry> channel_pairs() {
    std::vector<CorpusEntry> entries;
    struct PairSetup {
        std::string name;
        std::function<ChoiChannel()> make;
        std::size_t dim;
        const char* compat_expected;
        const char* broadcast_expected;
    };
    const std::vector<PairSetup> setups = {
        {"identity", [] { return identity_channel(2); }, 2, "NumericallyInfeasible",
         "NumericallyInfeasible"},
        {"depolarizing_third", [] { return depolarizing_channel(1.0 / 3.0, 2); }, 2, "Feasible",
         "NumericallyInfeasible"},
        {"depolarizing_half", [] { return depolarizing_channel(0.5, 2); }, 2, "Feasible",
         "NumericallyInfeasible"},
        {"completely_depolarizing", [] { return completely_depolarizing_channel(2); }, 2,
         "Feasible", "Feasible"},
        {"basis_dephasing_d2", [] { return basis_dephasing_channel(2); }, 2, "Feasible",
         "Feasible"},
        {"basis_dephasing_d3", [] { return basis_dephasing_channel(3); }, 3, "Feasible",
         "Feasible"},
    };
    for (const auto& setup : setups) {
        {
            CorpusEntry e;
            e.name = "pair_" + setup.name + "_compat";
            e.provenance = "self-compatibility of the " + setup.name + " channel";
            e.expected = setup.compat_expected;
            auto make = setup.make;
            const std::string name = e.name;
            const std::string expected = e.expected;
            e.run = [make, name, expected](const SolverConfig& cfg) {
                const ChoiChannel c = make();
                const BroadcastDecision dec = decide_compatibility(c, c, nullptr, cfg);
                CorpusResult r = detail::solve_entry_result(name, expected, dec.verdict);
                return r;
            };
            entries.push_back(std::move(e));
        }
        {
            CorpusEntry e;
            e.name = "pair_" + setup.name + "_broadcast";
            e.provenance = "self-broadcastability of the " + setup.name + " channel";
            e.expected = setup.broadcast_expected;
            auto make = setup.make;
            const std::size_t dim = setup.dim;
            const std::string name = e.name;
            const std::string expected = e.expected;
            e.run = [make, dim, name, expected](const SolverConfig& cfg) {
                const ChoiChannel c = make();
                const BroadcastDecision dec =
                    decide_channel_broadcast(spanning_states(dim), c, c, cfg);
                CorpusResult r = detail::solve_entry_result(name, expected, dec.verdict);
                return r;
            };
            entries.push_back(std::move(e));
        }
    }
    return entries;
}

inline std::vector<CorpusEntry> surrogate_entries() {
    std::vector<CorpusEntry> entries;
    {
        CorpusEntry e;
        e.name = "surrogate_diagonal_states_x";
        e.provenance = "diagonal test states against the x-basis measurement";
        e.expected = "Feasible";
        e.run = [](const SolverConfig& cfg) {
            std::vector<DensityMatrix> states = {
                DensityMatrix(HermitianMatrix::symmetrized(projector(2, 0))),
                DensityMatrix(HermitianMatrix::symmetrized(projector(2, 1))),
                maximally_mixed(2)};
            const SurrogateDecision dec =
                decide_commuting_surrogate(states, pauli_measurement(sigma_x()), cfg);
            CorpusResult r = detail::solve_entry_result("surrogate_diagonal_states_x",
                                                        "Feasible", dec.verdict);
            if (dec.witness) {
                double dev = 0.0;
                for (const auto& eff : dec.witness->effects)
                    dev = std::max(dev, frobenius_distance(
                                            eff.mat(), 0.5 * ComplexMatrix::identity(2)));
                r.facts.push_back({"surrogate_is_half_identity", dev <= 1e-6, dev});
            }
            return r;
        };
        entries.push_back(std::move(e));
    }
    {
        CorpusEntry e;
        e.name = "surrogate_maximally_mixed_only";
        e.provenance = "single maximally mixed test state";
        e.expected = "Feasible";
        e.run = [](const SolverConfig& cfg) {
            const SurrogateDecision dec = decide_commuting_surrogate(
                {maximally_mixed(2)}, pauli_measurement(sigma_x()), cfg);
            return detail::solve_entry_result("surrogate_maximally_mixed_only", "Feasible",
                                              dec.verdict);
        };
        entries.push_back(std::move(e));
    }
    {
        CorpusEntry e;
        e.name = "surrogate_spanning_states_x";
        e.provenance = "spanning test states against the x-basis measurement";
        e.expected = "NumericallyInfeasible";
        e.run = [](const SolverConfig& cfg) {
            const SurrogateDecision dec = decide_commuting_surrogate(
                spanning_states(2), pauli_measurement(sigma_x()), cfg);
            return detail::solve_entry_result("surrogate_spanning_states_x",
                                              "NumericallyInfeasible", dec.verdict);
        };
        entries.push_back(std::move(e));
    }
    return entries;
}

inline std::vector<CorpusEntry> corpus_entries() {
    std::vector<CorpusEntry> all;
    for (auto& e : qubit_bloch_scenarios()) all.push_back(std::move(e));
    for (int n : {2, 3, 4}) all.push_back(antidiscrimination_entry(n));
    all.push_back(eq18_entry());
    all.push_back(example_51_entry());
    all.push_back(example_52_entry());
    for (auto& e : channel_pairs()) all.push_back(std::move(e));
    for (auto& e : surrogate_entries()) all.push_back(std::move(e));
    return all;
}

// square channels used by the fixed-point-projection contract checks
inline std::vector<std::pair<std::string, ChoiChannel>> corpus_channels() {
    std::vector<std::pair<std::string, ChoiChannel>> out;
    out.emplace_back("identity_d2", identity_channel(2));
    out.emplace_back("completely_depolarizing_d2", completely_depolarizing_channel(2));
    out.emplace_back("depolarizing_third", depolarizing_channel(1.0 / 3.0, 2));
    out.emplace_back("depolarizing_half", depolarizing_channel(0.5, 2));
    out.emplace_back("basis_dephasing_d2", basis_dephasing_channel(2));
    out.emplace_back("basis_dephasing_d3", basis_dephasing_channel(3));
    {
        ComplexMatrix u = ComplexMatrix::identity(2);
        u(1, 1) = std::polar(1.0, 1.0); // rotation by one radian
        out.emplace_back("irrational_rotation", unitary_channel(u));
    }
    {
        const NoncommutingFrameExample ex = example_51_scenario();
        out.emplace_back("marginal_dim5",
                         marginal_channel(swap_symmetrize(ex.channel), 5, 5, Keep::First));
    }
    {
        const ChoiChannel lam = projective_copy_channel(basis_povm(3));
        out.emplace_back("marginal_qutrit_copy",
                         marginal_channel(lam, 3, 3, Keep::First));
    }
    return out;
}

// ------------------------------- corpus runner --------------------------------

inline std::vector<CorpusResult> run_corpus(const std::vector<CorpusEntry>& entries,
                                            const SolverConfig& cfg, int parallel = 1) {
    std::vector<CorpusResult> results(entries.size());
    if (parallel <= 1) {
        for (std::size_t i = 0; i < entries.size(); ++i) results[i] = entries[i].run(cfg);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex mu;
        for (int w = 0; w < parallel; ++w)
            pool.emplace_back([&] {
                while (true) {
                    std::size_t i;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= entries.size()) return;
                        i = next++;
                    }
                    results[i] = entries[i].run(cfg);
                }
            });
        for (auto& t : pool) t.join();
    }
    std::sort(results.begin(), results.end(),
              [](const CorpusResult& a, const CorpusResult& b) { return a.name < b.name; });
    return results;
}

} // namespace qbcast
