#include <catch2/catch_amalgamated.hpp>

#include <qbcast/corpus.hpp>

#include "test_helpers.hpp"

using namespace qbcast;
using namespace qbcast::testing;

TEST_CASE("every corpus entry reproduces its expected verdict") {
    const auto entries = corpus_entries();
    const auto results = run_corpus(entries, SolverConfig{});
    REQUIRE(results.size() == entries.size());
    for (const auto& r : results) {
        INFO(r.name << ": expected " << r.expected << ", got " << r.got);
        REQUIRE(r.expected == r.got);
        REQUIRE(r.got != "Inconclusive");
        for (const auto& f : r.facts) {
            INFO(r.name << " fact " << f.name << " value " << f.value);
            REQUIRE(f.pass);
        }
    }
}

TEST_CASE("the parallel corpus runner matches the sequential one") {
    std::vector<CorpusEntry> entries;
    for (auto& e : corpus_entries())
        if (e.name.find("antidiscrimination") != std::string::npos ||
            e.name.find("pair_") != std::string::npos)
            entries.push_back(std::move(e));
    const auto seq = run_corpus(entries, SolverConfig{}, 1);
    const auto par = run_corpus(entries, SolverConfig{}, 4);
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        REQUIRE(seq[i].name == par[i].name);
        REQUIRE(seq[i].got == par[i].got);
        REQUIRE(seq[i].residual == par[i].residual);
    }
}

TEST_CASE("antidiscrimination constructions match the closed-form statistics") {
    for (int n : {2, 3, 4}) {
        const auto a = antidiscrimination_scenario(n);
        REQUIRE(validate(a.measurement).ok());
        for (const auto& st : a.scenario.test_states) REQUIRE(validate(st).ok());
        for (std::size_t x = 0; x < a.scenario.test_states.size(); ++x)
            for (std::size_t y = 0; y < a.measurement.n_outcomes(); ++y) {
                const double got = herm_inner(a.measurement.effects[y],
                                              a.scenario.test_states[x].matrix);
                const double want = (x == y) ? 0.0 : 1.0 / (n - 1.0);
                REQUIRE(got == Catch::Approx(want).margin(1e-12));
            }
    }
    REQUIRE_THROWS_AS(antidiscrimination_scenario(5), DomainError);
}

TEST_CASE("the dimension-5 example construction") {
    const NoncommutingFrameExample ex = example_51_scenario();
    REQUIRE(validate(ex.measurement).ok());
    REQUIRE(validate(ex.channel).ok());
    // the alternate-seed variants stay valid and noncommuting
    const NoncommutingFrameExample alt = example_51_scenario(3);
    REQUIRE(validate(alt.measurement).ok());
    REQUIRE_FALSE(mutually_commuting({alt.measurement}, {alt.measurement}).commuting);
    REQUIRE(verify_pass(alt.channel, alt.scenario, 1e-10).passed);
}

TEST_CASE("the dimension-6 example construction") {
    const TwoMeasurementExample ex = example_52_scenario();
    REQUIRE(validate(ex.meas_a).ok());
    REQUIRE(validate(ex.meas_b).ok());
    REQUIRE(ex.psi_residual < 1e-7);
    REQUIRE(validate(ex.psi).ok());
    // the joint channel's marginals both realize the one-third depolarizing map
    Rng rng(61);
    const ChoiChannel delta = depolarizing_channel(1.0 / 3.0, 2);
    const DensityMatrix rho = random_density(rng, 2);
    const HermitianMatrix out = apply_channel(ex.psi, rho.matrix);
    const HermitianMatrix want = apply_channel(delta, rho.matrix);
    REQUIRE(frobenius_distance(partial_trace(out, 2, 2, Keep::First).mat(), want.mat()) <= 1e-7);
    REQUIRE(frobenius_distance(partial_trace(out, 2, 2, Keep::Second).mat(), want.mat()) <= 1e-7);
    // trace preservation identity of the assembled channel
    const DensityMatrix rho6 = random_density(rng, 6);
    const HermitianMatrix big = apply_channel(ex.channel, rho6.matrix);
    REQUIRE(big.trace_real() == Catch::Approx(1.0).margin(1e-9));
    const PassReport rep = verify_pass(ex.channel, ex.scenario, 1e-6);
    REQUIRE(rep.passed);
}

TEST_CASE("channel pairs reduce to measurement scenarios") {
    // pushing an informationally complete measurement through the adjoints
    // turns a channel-broadcastability question into a measurement test with
    // the same verdict
    const Povm ic = ic_povm(2);
    auto pushed = [&](const ChoiChannel& phi) {
        std::vector<HermitianMatrix> eff;
        for (const auto& e : ic.effects) eff.push_back(adjoint_apply(phi, e));
        return Povm(eff);
    };
    const std::vector<ChoiChannel> channels = {
        identity_channel(2), depolarizing_channel(1.0 / 3.0, 2), depolarizing_channel(0.5, 2),
        completely_depolarizing_channel(2), basis_dephasing_channel(2)};
    const auto states = spanning_states(2);
    for (const auto& phi : channels) {
        REQUIRE(validate(pushed(phi)).ok());
        const auto direct = decide_channel_broadcast(states, phi, phi);
        Scenario s;
        s.dim = 2;
        s.test_states = states;
        s.test_meas_a = {pushed(phi)};
        s.test_meas_b = {pushed(phi)};
        const auto reduced = decide_broadcast(s);
        REQUIRE(to_string(direct.verdict.status) == to_string(reduced.verdict.status));
        REQUIRE(direct.verdict.status != FeasStatus::Inconclusive);
    }
}

TEST_CASE("fixed-point projections of the corpus channels satisfy the contract") {
    for (const auto& [name, phi] : corpus_channels()) {
        INFO(name);
        const FixedPointProjection fp = cesaro_projection(phi);
        const FixedPointMargins m = fixed_point_margins(fp);
        REQUIRE(m.idempotence <= 1e-7);
        REQUIRE(m.absorb_left <= 1e-7);
        REQUIRE(m.absorb_right <= 1e-7);
        REQUIRE(m.trace_preservation <= 1e-7);
    }
}

TEST_CASE("adjoints of corpus channels are contractions on the operator interval") {
    for (const auto& [name, phi] : corpus_channels()) {
        INFO(name);
        REQUIRE(adjoint_interval_norm_estimate(phi) <= 1.0 + 1e-9);
    }
}

TEST_CASE("bloch scenario facts") {
    const auto entries = qubit_bloch_scenarios();
    REQUIRE(entries.size() == 3);
    // ranks and info-completeness are checked inside the entries themselves;
    // spot-check the factorization coordinates against the Bloch components
    Rng rng(62);
    const FactorizationMap f = factorization_of_povms({pauli_measurement(sigma_x())});
    for (int trial = 0; trial < 5; ++trial) {
        const DensityMatrix rho = random_density(rng, 2);
        const DensityMatrix sig = random_density(rng, 2);
        const double rx_rho = (rho.matrix.mat() * sigma_x()).trace().real();
        const double rx_sig = (sig.matrix.mat() * sigma_x()).trace().real();
        REQUIRE(states_equivalent(f, rho, sig) == (std::abs(rx_rho - rx_sig) <= 1e-9));
    }
}
