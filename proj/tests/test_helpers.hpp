// shared generators for the unit and acceptance suites

#pragma once

#include <qbcast/decide.hpp>
#include <qbcast/factorize.hpp>
#include <qbcast/qobjects.hpp>
#include <qbcast/random_gen.hpp>

#include <cstddef>
#include <utility>
#include <vector>

namespace qbcast::testing {

inline std::vector<DensityMatrix> doubled_basis_preps(std::size_t d) {
    std::vector<DensityMatrix> preps;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<cx> psi(d * d, cx{0.0, 0.0});
        psi[i * d + i] = 1.0;
        preps.push_back(pure_state(psi));
    }
    return preps;
}

// rho -> sum_i tr(rho |i><i|) |ii><ii|
inline ChoiChannel copy_basis_channel(std::size_t d) {
    return measure_prepare_channel(basis_povm(d), doubled_basis_preps(d));
}

// projective measurement in the eigenbasis of a random unitary
inline Povm random_projective_povm(Rng& rng, std::size_t d) {
    const ComplexMatrix u = random_unitary(rng, d);
    std::vector<HermitianMatrix> eff;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<cx> col(d);
        for (std::size_t r = 0; r < d; ++r) col[r] = u(r, i);
        eff.push_back(HermitianMatrix::symmetrized(outer_projector(col)));
    }
    return Povm(std::move(eff));
}

// random post-processing of a POVM: effects A'_j = sum_i p(j|i) A_i
inline Povm random_post_processing(Rng& rng, const Povm& g, std::size_t n_out) {
    std::vector<std::vector<double>> p(g.n_outcomes(), std::vector<double>(n_out, 0.0));
    for (auto& row : p) {
        double total = 0.0;
        for (auto& v : row) {
            v = rng.uniform() + 1e-3;
            total += v;
        }
        for (auto& v : row) v /= total;
    }
    std::vector<HermitianMatrix> eff;
    for (std::size_t j = 0; j < n_out; ++j) {
        HermitianMatrix e = HermitianMatrix::zero(g.dim);
        for (std::size_t i = 0; i < g.n_outcomes(); ++i) e = e + p[i][j] * g.effects[i];
        eff.push_back(std::move(e));
    }
    return Povm(std::move(eff));
}

inline Scenario random_scenario(Rng& rng, std::size_t d, std::size_t n_states,
                                std::size_t n_povms, std::size_t n_out) {
    Scenario s;
    s.dim = d;
    for (std::size_t i = 0; i < n_states; ++i) s.test_states.push_back(random_density(rng, d));
    for (std::size_t i = 0; i < n_povms; ++i) s.test_meas_a.push_back(random_povm(rng, d, n_out));
    for (std::size_t i = 0; i < n_povms; ++i) s.test_meas_b.push_back(random_povm(rng, d, n_out));
    return s;
}

// a scenario/channel pair where the channel passes by construction: the frame
// copy channel of a random projective measurement, tested with post-processed
// measurements of that frame
inline std::pair<Scenario, ChoiChannel> random_passing_pair(Rng& rng, std::size_t d) {
    const Povm g = random_projective_povm(rng, d);
    std::vector<DensityMatrix> preps;
    for (std::size_t i = 0; i < d; ++i) {
        // |g_i g_i><g_i g_i| built from the frame eigenvectors
        const HermitianMatrix gi = g.effects[i];
        const ComplexMatrix pr = kron(gi.mat(), gi.mat());
        preps.push_back(DensityMatrix(HermitianMatrix::symmetrized(pr)));
    }
    const ChoiChannel lam = measure_prepare_channel(g, preps);
    Scenario s;
    s.dim = d;
    for (std::size_t i = 0; i < 3; ++i) s.test_states.push_back(random_density(rng, d));
    s.test_meas_a = {random_post_processing(rng, g, 2), random_post_processing(rng, g, 3)};
    s.test_meas_b = {random_post_processing(rng, g, 2)};
    return {s, lam};
}

// Def. 1 predicate and the factorization-map predicate for the same pair
inline bool def1_pass_predicate(const ChoiChannel& lam, const Scenario& s, double tol = 1e-8) {
    return verify_pass(lam, s, tol).passed;
}

inline bool factorization_pass_predicate(const ChoiChannel& lam, const Scenario& s) {
    const FactorizationMap fa = factorization_of_povms(s.test_meas_a);
    const FactorizationMap fb = factorization_of_povms(s.test_meas_b);
    for (const auto& rho : s.test_states) {
        const HermitianMatrix out = apply_channel(lam, rho.matrix);
        const DensityMatrix m1(partial_trace(out, s.dim, s.dim, Keep::First));
        const DensityMatrix m2(partial_trace(out, s.dim, s.dim, Keep::Second));
        if (!states_equivalent(fa, rho, m1)) return false;
        if (!states_equivalent(fb, rho, m2)) return false;
    }
    return true;
}

// Pauli measurements on a qubit
inline Povm pauli_povm(const ComplexMatrix& sigma) {
    const ComplexMatrix id = ComplexMatrix::identity(2);
    return Povm({HermitianMatrix::symmetrized(cx{0.5, 0.0} * (id + sigma)),
                 HermitianMatrix::symmetrized(cx{0.5, 0.0} * (id - sigma))});
}

// A measure-and-prepare channel with the same factorization map as the given
// channel: its POVM spans exactly the adjoint range (which always contains
// the identity), its outputs are orthogonal flags.
inline ChoiChannel factorization_as_channel(const ChoiChannel& phi) {
    const FactorizationMap f = channel_factorization(phi);
    std::vector<HermitianMatrix> raw;
    HermitianMatrix total = HermitianMatrix::zero(phi.dim_in);
    for (const auto& w : f.basis) {
        const HermitianMatrix shifted = w + (op_norm(w) + 0.1) * HermitianMatrix::identity(
                                                                     phi.dim_in);
        total = total + shifted;
        raw.push_back(shifted);
    }
    const double scale = 2.0 * std::max(1.0, op_norm(total));
    std::vector<HermitianMatrix> eff;
    HermitianMatrix sum = HermitianMatrix::zero(phi.dim_in);
    for (const auto& r : raw) {
        eff.push_back((1.0 / scale) * r);
        sum = sum + eff.back();
    }
    eff.push_back(HermitianMatrix::identity(phi.dim_in) - sum);
    const Povm povm(eff);
    std::vector<DensityMatrix> preps;
    for (std::size_t i = 0; i < povm.n_outcomes(); ++i)
        preps.push_back(DensityMatrix(
            HermitianMatrix::symmetrized(projector(povm.n_outcomes(), i))));
    return measure_prepare_channel(povm, preps);
}

} // namespace qbcast::testing
