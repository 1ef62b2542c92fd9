// random_gen.hpp — seeded generators for states, POVMs, and channels.
// Every generator takes an explicit Rng so runs are reproducible.

#pragma once

#include <qbcast/eig.hpp>
#include <qbcast/qobjects.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace qbcast {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double gaussian() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    cx gaussian_cx() { return cx{gaussian(), gaussian()}; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline ComplexMatrix random_ginibre(Rng& rng, std::size_t rows, std::size_t cols) {
    ComplexMatrix g(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.gaussian_cx();
    return g;
}

inline HermitianMatrix random_hermitian(Rng& rng, std::size_t d) {
    const ComplexMatrix g = random_ginibre(rng, d, d);
    return HermitianMatrix::symmetrized(cx{0.5, 0.0} * (g + g.adjoint()));
}

inline HermitianMatrix random_psd(Rng& rng, std::size_t d, std::size_t rank = 0) {
    if (rank == 0) rank = d;
    const ComplexMatrix g = random_ginibre(rng, d, rank);
    return HermitianMatrix::symmetrized(g * g.adjoint());
}

inline std::vector<cx> random_unit_vector(Rng& rng, std::size_t d) {
    std::vector<cx> psi(d);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (auto& c : psi) {
            c = rng.gaussian_cx();
            n2 += std::norm(c);
        }
    } while (n2 < 1e-12);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : psi) c *= inv;
    return psi;
}

inline DensityMatrix random_pure_state(Rng& rng, std::size_t d) {
    return pure_state(random_unit_vector(rng, d));
}

inline DensityMatrix random_density(Rng& rng, std::size_t d, std::size_t rank = 0) {
    const HermitianMatrix p = random_psd(rng, d, rank);
    const double tr = p.trace_real();
    return DensityMatrix(HermitianMatrix::symmetrized(cx{1.0 / tr, 0.0} * p.mat()));
}

// random POVM: Ginibre blocks renormalized by the inverse square root of their sum
inline Povm random_povm(Rng& rng, std::size_t d, std::size_t n_outcomes) {
    std::vector<HermitianMatrix> blocks;
    blocks.reserve(n_outcomes);
    HermitianMatrix sum = HermitianMatrix::zero(d);
    for (std::size_t i = 0; i < n_outcomes; ++i) {
        blocks.push_back(random_psd(rng, d));
        sum = sum + blocks.back();
    }
    const HermitianMatrix w = inv_sqrt_psd(sum);
    std::vector<HermitianMatrix> eff;
    eff.reserve(n_outcomes);
    for (const auto& b : blocks)
        eff.push_back(HermitianMatrix::symmetrized(w.mat() * b.mat() * w.mat()));
    return Povm(std::move(eff));
}

// random channel: Ginibre Choi matrix renormalized to trace preservation
inline ChoiChannel random_channel(Rng& rng, std::size_t din, std::size_t dout) {
    const std::size_t n = din * dout;
    const HermitianMatrix j0 = random_psd(rng, n);
    const HermitianMatrix s = partial_trace(j0, din, dout, Keep::First);
    const ComplexMatrix w = kron(inv_sqrt_psd(s).mat(), ComplexMatrix::identity(dout));
    return ChoiChannel(din, dout, HermitianMatrix::symmetrized(w * j0.mat() * w));
}

inline ComplexMatrix random_unitary(Rng& rng, std::size_t d) {
    // Gram-Schmidt on a Ginibre matrix
    ComplexMatrix g = random_ginibre(rng, d, d);
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t prev = 0; prev < c; ++prev) {
            cx overlap{0.0, 0.0};
            for (std::size_t r = 0; r < d; ++r) overlap += std::conj(g(r, prev)) * g(r, c);
            for (std::size_t r = 0; r < d; ++r) g(r, c) -= overlap * g(r, prev);
        }
        double n2 = 0.0;
        for (std::size_t r = 0; r < d; ++r) n2 += std::norm(g(r, c));
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t r = 0; r < d; ++r) g(r, c) *= inv;
    }
    return g;
}

} // namespace qbcast
