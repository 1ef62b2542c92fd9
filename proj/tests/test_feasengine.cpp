#include <catch2/catch_amalgamated.hpp>

#include <qbcast/corpus.hpp>

#include "test_helpers.hpp"

using namespace qbcast;
using namespace qbcast::testing;

TEST_CASE("build_broadcast_constraints") {
    SECTION("trivial measurements bind nothing beyond trace preservation") {
        Scenario s;
        s.dim = 2;
        s.test_states = {maximally_mixed(2)};
        s.test_meas_a = {coin_toss_povm(2, {0.5, 0.5})};
        s.test_meas_b = {coin_toss_povm(2, {0.5, 0.5})};
        const auto sys = build_broadcast_constraints(s);
        // every trace-preserving channel satisfies the system
        Rng rng(41);
        for (int trial = 0; trial < 5; ++trial) {
            const ChoiChannel c = random_channel(rng, 2, 4);
            REQUIRE(max_row_violation(sys, vectorize(c.choi)) <= 1e-10);
        }
        const auto dec = decide_broadcast(s);
        REQUIRE(dec.verdict.status == FeasStatus::Feasible);
    }
    SECTION("the qutrit copy channel satisfies every row") {
        Scenario s;
        s.dim = 3;
        s.test_states = spanning_states(3);
        s.test_meas_a = {basis_povm(3)};
        s.test_meas_b = {basis_povm(3)};
        const auto sys = build_broadcast_constraints(s);
        const ChoiChannel lam = copy_basis_channel(3);
        REQUIRE(max_row_violation(sys, vectorize(lam.choi)) <= 1e-12);
    }
    SECTION("row count for the n=3 antidiscrimination scenario") {
        const auto a = antidiscrimination_scenario(3);
        REQUIRE(broadcast_row_count(a.scenario) == 22);
        const auto sys = build_broadcast_constraints(a.scenario);
        REQUIRE(sys.rows.size() <= 22);
        REQUIRE(sys.ambient_dim == 64);
    }
}

TEST_CASE("antidiscrimination verdicts") {
    const SolverConfig cfg;
    SECTION("n = 2 is broadcastable") {
        const auto a = antidiscrimination_scenario(2);
        const auto dec = decide_broadcast(a.scenario, cfg);
        REQUIRE(dec.verdict.status == FeasStatus::Feasible);
        REQUIRE(dec.verdict.residual < 1e-7);
        // witness re-validation
        REQUIRE(dec.witness.has_value());
        REQUIRE(min_eigenvalue(dec.witness->choi) >= -1e-8);
        const HermitianMatrix marg =
            partial_trace(dec.witness->choi, 2, 4, Keep::First);
        REQUIRE(op_norm(marg - HermitianMatrix::identity(2)) <= 1e-6);
        REQUIRE(verify_pass(*dec.witness, a.scenario, 1e-6).passed);
    }
    SECTION("n = 3 and n = 4 hit a residual floor") {
        for (int n : {3, 4}) {
            const auto a = antidiscrimination_scenario(n);
            const auto dec = decide_broadcast(a.scenario, cfg);
            REQUIRE(dec.verdict.status == FeasStatus::NumericallyInfeasible);
            REQUIRE(dec.verdict.residual > 1e-3);
        }
    }
    SECTION("the gap sequence is non-increasing up to jitter") {
        for (int n : {2, 3}) {
            const auto a = antidiscrimination_scenario(n);
            const auto dec = decide_broadcast(a.scenario, cfg);
            REQUIRE(dec.verdict.max_gap_increase <= 1e-12);
        }
    }
}

TEST_CASE("compatibility constraints") {
    SECTION("completely depolarizing channels are self-compatible") {
        const ChoiChannel dep = completely_depolarizing_channel(2);
        const auto dec = decide_compatibility(dep, dep);
        REQUIRE(dec.verdict.status == FeasStatus::Feasible);
        // witness marginals reproduce the channel
        Rng rng(42);
        const DensityMatrix rho = random_density(rng, 2);
        const HermitianMatrix out = apply_channel(*dec.witness, rho.matrix);
        REQUIRE(frobenius_distance(partial_trace(out, 2, 2, Keep::First).mat(),
                                   0.5 * ComplexMatrix::identity(2)) <= 1e-6);
        REQUIRE(frobenius_distance(partial_trace(out, 2, 2, Keep::Second).mat(),
                                   0.5 * ComplexMatrix::identity(2)) <= 1e-6);
    }
    SECTION("the identity channel is not self-compatible") {
        const ChoiChannel id = identity_channel(2);
        const auto dec = decide_compatibility(id, id);
        REQUIRE(dec.verdict.status == FeasStatus::NumericallyInfeasible);
    }
    SECTION("the one-third depolarizing channel is self-compatible") {
        const ChoiChannel c = depolarizing_channel(1.0 / 3.0, 2);
        const auto dec = decide_compatibility(c, c);
        REQUIRE(dec.verdict.status == FeasStatus::Feasible);
        Rng rng(43);
        const DensityMatrix rho = random_density(rng, 2);
        const HermitianMatrix out = apply_channel(*dec.witness, rho.matrix);
        const HermitianMatrix want = apply_channel(c, rho.matrix);
        REQUIRE(frobenius_distance(partial_trace(out, 2, 2, Keep::First).mat(), want.mat()) <=
                1e-6);
        REQUIRE(frobenius_distance(partial_trace(out, 2, 2, Keep::Second).mat(), want.mat()) <=
                1e-6);
    }
}

TEST_CASE("channel broadcastability") {
    SECTION("constant channels see nothing") {
        const ChoiChannel dep = completely_depolarizing_channel(2);
        const auto dec = decide_channel_broadcast(spanning_states(2), dep, dep);
        REQUIRE(dec.verdict.status == FeasStatus::Feasible);
    }
    SECTION("invertible depolarizing channels are not broadcastable") {
        for (double mu : {1.0 / 3.0, 0.5}) {
            const ChoiChannel c = depolarizing_channel(mu, 2);
            const auto dec = decide_channel_broadcast(spanning_states(2), c, c);
            REQUIRE(dec.verdict.status == FeasStatus::NumericallyInfeasible);
        }
    }
    SECTION("verdict matches the factorization-channel verdict") {
        Rng rng(44);
        const auto states = spanning_states(2);
        int feasible_seen = 0, infeasible_seen = 0;
        for (int trial = 0; trial < 20; ++trial) {
            ChoiChannel phi1, phi2;
            switch (trial % 4) {
                case 0:
                    phi1 = random_channel(rng, 2, 2);
                    phi2 = random_channel(rng, 2, 2);
                    break;
                case 1:
                    phi1 = completely_depolarizing_channel(2);
                    phi2 = random_channel(rng, 2, 2);
                    break;
                case 2:
                    phi1 = basis_dephasing_channel(2);
                    phi2 = basis_dephasing_channel(2);
                    break;
                default:
                    phi1 = completely_depolarizing_channel(2);
                    phi2 = basis_dephasing_channel(2);
                    break;
            }
            const auto direct = decide_channel_broadcast(states, phi1, phi2);
            const auto fact = decide_channel_broadcast(states, factorization_as_channel(phi1),
                                                       factorization_as_channel(phi2));
            REQUIRE(to_string(direct.verdict.status) == to_string(fact.verdict.status));
            if (direct.verdict.status == FeasStatus::Feasible) ++feasible_seen;
            if (direct.verdict.status == FeasStatus::NumericallyInfeasible) ++infeasible_seen;
        }
        REQUIRE(feasible_seen > 0);
        REQUIRE(infeasible_seen > 0);
    }
}

TEST_CASE("commuting surrogate systems") {
    SECTION("diagonal states against the x measurement: the half-identity works") {
        std::vector<DensityMatrix> states = {
            DensityMatrix(HermitianMatrix::symmetrized(projector(2, 0))),
            DensityMatrix(HermitianMatrix::symmetrized(projector(2, 1))), maximally_mixed(2)};
        const auto dec = decide_commuting_surrogate(states, pauli_povm(sigma_x()));
        REQUIRE(dec.verdict.status == FeasStatus::Feasible);
        for (const auto& eff : dec.witness->effects)
            REQUIRE(frobenius_distance(eff.mat(), 0.5 * ComplexMatrix::identity(2)) <= 1e-6);
    }
    SECTION("a single maximally mixed state is always satisfiable") {
        const auto dec =
            decide_commuting_surrogate({maximally_mixed(2)}, pauli_povm(sigma_x()));
        REQUIRE(dec.verdict.status == FeasStatus::Feasible);
    }
    SECTION("spanning states force the surrogate to equal the measurement") {
        // the linear system alone is already inconsistent: the statistics rows
        // pin the surrogate to the x effects while the commutation rows require
        // it to commute with everything
        const auto sys =
            build_commuting_surrogate_constraints(spanning_states(2), pauli_povm(sigma_x()));
        const AffineProjector proj(sys);
        REQUIRE(proj.inconsistency() > 0.1);
        const auto dec = decide_commuting_surrogate(spanning_states(2), pauli_povm(sigma_x()));
        REQUIRE(dec.verdict.status == FeasStatus::NumericallyInfeasible);
    }
}

TEST_CASE("verify_pass") {
    SECTION("constant maximally mixed output fails the n=2 test with deviation 1/2") {
        const auto a = antidiscrimination_scenario(2);
        const ChoiChannel junk = choi_from_map(2, 4, [](const ComplexMatrix& m) {
            ComplexMatrix out(4, 4);
            const cx t = m.trace() * cx{0.25, 0.0};
            for (std::size_t i = 0; i < 4; ++i) out(i, i) = t;
            return out;
        });
        const PassReport rep = verify_pass(junk, a.scenario);
        REQUIRE_FALSE(rep.passed);
        REQUIRE(rep.max_deviation() == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("a symmetrized channel passes whenever the original does") {
        const auto a = antidiscrimination_scenario(2);
        const auto dec = decide_broadcast(a.scenario);
        REQUIRE(dec.verdict.status == FeasStatus::Feasible);
        const ChoiChannel sym = swap_symmetrize(*dec.witness);
        REQUIRE(verify_pass(sym, a.scenario, 1e-6).passed);
    }
}

TEST_CASE("noise invariance of verdicts") {
    Rng rng(45);
    int feasible_seen = 0, infeasible_seen = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Scenario s;
        s.dim = 2;
        const std::size_t n_states = 2 + trial % 3;
        for (std::size_t i = 0; i < n_states; ++i) s.test_states.push_back(random_density(rng, 2));
        if (trial % 2 == 0) {
            s.test_meas_a = {random_povm(rng, 2, 2)};
            s.test_meas_b = {random_povm(rng, 2, 2)};
        } else {
            s.test_meas_a = {random_povm(rng, 2, 2), random_povm(rng, 2, 3)};
            s.test_meas_b = {random_povm(rng, 2, 2), random_povm(rng, 2, 3)};
        }
        Scenario noisy = s;
        noisy.test_meas_a = noisy_family(s.test_meas_a, 0.3);
        noisy.test_meas_b = noisy_family(s.test_meas_b, 0.3);
        const auto plain = decide_broadcast(s);
        const auto dressed = decide_broadcast(noisy);
        REQUIRE(to_string(plain.verdict.status) == to_string(dressed.verdict.status));
        if (plain.verdict.status == FeasStatus::Feasible) ++feasible_seen;
        if (plain.verdict.status == FeasStatus::NumericallyInfeasible) ++infeasible_seen;
    }
    REQUIRE(feasible_seen + infeasible_seen == 20);
}

TEST_CASE("broadcastable channels are compatible") {
    // a feasible channel-broadcast witness, pushed through the channel pair,
    // satisfies the compatibility constraints
    const ChoiChannel deph = basis_dephasing_channel(2);
    const auto states = spanning_states(2);
    const auto dec = decide_channel_broadcast(states, deph, deph);
    REQUIRE(dec.verdict.status == FeasStatus::Feasible);
    const ChoiChannel pushed = compose(channel_tensor(deph, deph), *dec.witness);
    const auto compat_sys = build_compatibility_constraints(deph, deph, &states);
    REQUIRE(max_row_violation(compat_sys, vectorize(pushed.choi)) <= 1e-6);
}

TEST_CASE("idempotent channels: compatibility equals broadcastability") {
    Rng rng(46);
    for (std::size_t d : {2, 3}) {
        // dephasing in a random basis is an idempotent measure-and-prepare map
        const Povm proj = random_projective_povm(rng, d);
        std::vector<DensityMatrix> preps;
        for (const auto& e : proj.effects) preps.push_back(DensityMatrix(e));
        const ChoiChannel pi = measure_prepare_channel(proj, preps);
        REQUIRE(frobenius_distance(compose(pi, pi).choi.mat(), pi.choi.mat()) <= 1e-10);
        const auto states = spanning_states(d);
        const auto compat = decide_compatibility(pi, pi, &states);
        const auto bcast = decide_channel_broadcast(states, pi, pi);
        REQUIRE(to_string(compat.verdict.status) == to_string(bcast.verdict.status));
        REQUIRE(compat.verdict.status == FeasStatus::Feasible);
    }
}

TEST_CASE("commutativity is sufficient for broadcastability") {
    Rng rng(47);
    SECTION("mutually commuting measurement collections") {
        for (std::size_t d : {2, 3}) {
            const Povm base = basis_povm(d);
            Scenario s;
            s.dim = d;
            s.test_states = spanning_states(d);
            s.test_meas_a = {random_post_processing(rng, base, 2),
                             random_post_processing(rng, base, 3)};
            s.test_meas_b = {random_post_processing(rng, base, 2)};
            REQUIRE(mutually_commuting(s.test_meas_a, s.test_meas_b).commuting);
            const auto dec = decide_broadcast(s);
            REQUIRE(dec.verdict.status == FeasStatus::Feasible);
        }
    }
    SECTION("measurements commuting with the test states") {
        Scenario s;
        s.dim = 2;
        s.test_states = {DensityMatrix(HermitianMatrix::symmetrized(projector(2, 0))),
                         DensityMatrix(HermitianMatrix::symmetrized(projector(2, 1))),
                         maximally_mixed(2)};
        s.test_meas_a = {random_post_processing(rng, basis_povm(2), 3)};
        s.test_meas_b = {ic_povm(2)};
        REQUIRE(mutually_commuting(effects_of(s.test_meas_a),
                                   matrices_of(s.test_states))
                    .commuting);
        const auto dec = decide_broadcast(s);
        REQUIRE(dec.verdict.status == FeasStatus::Feasible);
    }
}

TEST_CASE("solver configuration") {
    SECTION("tolerance ordering is enforced") {
        SolverConfig bad;
        bad.tol_feasible = 1e-2;
        bad.tol_infeasible_floor = 1e-3;
        const auto a = antidiscrimination_scenario(2);
        REQUIRE_THROWS_AS(decide_broadcast(a.scenario, bad), DomainError);
    }
    SECTION("ambient mismatch is rejected") {
        const auto a = antidiscrimination_scenario(2);
        const auto sys = build_broadcast_constraints(a.scenario);
        REQUIRE_THROWS_AS(dykstra_solve(sys, ConeBlocks{{3}}, SolverConfig{}), ShapeError);
    }
}
