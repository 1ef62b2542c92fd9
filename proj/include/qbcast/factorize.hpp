// factorize.hpp — factorization maps of measurement collections and channels,
// state-equivalence tests, informational completeness, noise families.
//
// A factorization map is represented by an orthonormal Hermitian basis of the
// real span of the generating effects (or of a channel's adjoint range); the
// map itself sends rho to its coordinate vector (tr(rho basis_k))_k. Two
// states are equivalent exactly when no generating measurement separates
// them, i.e. when their coordinate vectors agree.

#pragma once

#include <qbcast/eig.hpp>
#include <qbcast/gram_schmidt.hpp>
#include <qbcast/qobjects.hpp>
#include <qbcast/tolerances.hpp>

#include <cmath>
#include <vector>

namespace qbcast {

struct FactorizationMap {
    std::size_t dim = 0;
    std::vector<HermitianMatrix> basis; // pairwise Frobenius-orthonormal
    std::size_t rank = 0;

    std::vector<double> coords(const HermitianMatrix& rho) const {
        if (rho.dim() != dim) throw ShapeError("FactorizationMap: dimension mismatch");
        std::vector<double> c(rank);
        for (std::size_t k = 0; k < rank; ++k) c[k] = herm_inner(rho, basis[k]);
        return c;
    }

    std::vector<double> coords(const DensityMatrix& rho) const { return coords(rho.matrix); }

    // residual of X against span(basis)
    double span_residual(const HermitianMatrix& x) const {
        HermitianMatrix proj = HermitianMatrix::zero(dim);
        for (const auto& b : basis) proj = proj + herm_inner(x, b) * b;
        return frobenius_distance(proj.mat(), x.mat());
    }
};

// Orthonormal basis of the real span of a list of Hermitian matrices.
// Rank decisions use a singular-value cutoff relative to the largest one.
inline FactorizationMap orthonormal_span(std::size_t dim,
                                         const std::vector<HermitianMatrix>& generators,
                                         double rank_cutoff = default_tolerances().rank_cutoff) {
    FactorizationMap f;
    f.dim = dim;
    if (generators.empty()) return f;

    std::vector<std::vector<double>> rows;
    rows.reserve(generators.size());
    for (const auto& g : generators) {
        if (g.dim() != dim) throw ShapeError("orthonormal_span: mixed dimensions");
        rows.push_back(vectorize(g));
    }
    const RowBasis basis = pivoted_orthonormalize(std::move(rows), rank_cutoff);
    f.basis.reserve(basis.q.size());
    for (const auto& q : basis.q) f.basis.push_back(devectorize(dim, q));
    f.rank = f.basis.size();
    return f;
}

inline FactorizationMap factorization_of_povms(
    const std::vector<Povm>& meas, double rank_cutoff = default_tolerances().rank_cutoff) {
    if (meas.empty()) throw DomainError("factorization_of_povms: empty measurement collection");
    const std::size_t dim = meas.front().dim;
    std::vector<HermitianMatrix> gens;
    for (const auto& p : meas) {
        if (p.dim != dim) throw ShapeError("factorization_of_povms: mixed dimensions");
        for (const auto& e : p.effects) gens.push_back(e);
    }
    return orthonormal_span(dim, gens, rank_cutoff);
}

inline bool states_equivalent(const FactorizationMap& f, const DensityMatrix& rho,
                              const DensityMatrix& sigma,
                              double tol_equiv = default_tolerances().equiv) {
    if (rho.dim != f.dim || sigma.dim != f.dim)
        throw ShapeError("states_equivalent: dimension mismatch");
    const auto a = f.coords(rho), b = f.coords(sigma);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s) <= tol_equiv;
}

inline bool is_info_complete(const std::vector<Povm>& meas) {
    if (meas.empty()) return false;
    const FactorizationMap f = factorization_of_povms(meas);
    return f.rank == vec_length(f.dim);
}

// Mixes each POVM with a coin-toss measurement: effect -> (1-s) effect + s c_i I.
// One probability distribution per POVM; empty list selects uniform coins.
inline std::vector<Povm> noisy_family(const std::vector<Povm>& meas, double s,
                                      const std::vector<std::vector<double>>& coins = {}) {
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("noisy_family: s outside (0,1]");
    if (!coins.empty() && coins.size() != meas.size())
        throw ShapeError("noisy_family: one coin distribution per POVM required");
    std::vector<Povm> out;
    out.reserve(meas.size());
    for (std::size_t m = 0; m < meas.size(); ++m) {
        const Povm& p = meas[m];
        std::vector<double> coin;
        if (coins.empty()) {
            coin.assign(p.n_outcomes(), 1.0 / static_cast<double>(p.n_outcomes()));
        } else {
            coin = coins[m];
            if (coin.size() != p.n_outcomes())
                throw ShapeError("noisy_family: coin distribution size mismatch");
            double total = 0.0;
            for (double c : coin) {
                if (c < 0.0) throw DomainError("noisy_family: negative coin probability");
                total += c;
            }
            if (std::abs(total - 1.0) > 1e-10)
                throw DomainError("noisy_family: coin probabilities do not sum to 1");
        }
        std::vector<HermitianMatrix> eff;
        eff.reserve(p.n_outcomes());
        for (std::size_t i = 0; i < p.n_outcomes(); ++i) {
            ComplexMatrix e = cx{1.0 - s, 0.0} * p.effects[i].mat();
            e += cx{s * coin[i], 0.0} * ComplexMatrix::identity(p.dim);
            eff.push_back(HermitianMatrix::symmetrized(e));
        }
        out.push_back(Povm(std::move(eff)));
    }
    return out;
}

// Factorization map of a single channel, via its adjoint range: the span of
// {Phi*(E) : E Hermitian}. Phi(rho) = Phi(sigma) iff the coordinates agree.
inline FactorizationMap channel_factorization(
    const ChoiChannel& phi, double rank_cutoff = default_tolerances().rank_cutoff) {
    std::vector<HermitianMatrix> gens;
    gens.reserve(vec_length(phi.dim_out));
    for (std::size_t beta = 0; beta < vec_length(phi.dim_out); ++beta)
        gens.push_back(adjoint_apply(phi, vec_basis_element(phi.dim_out, beta)));
    return orthonormal_span(phi.dim_in, gens, rank_cutoff);
}

// Coordinates of each effect in the factorization basis; row i gives A_i as a
// functional on coordinate vectors, so that A_i(rho) equals the row dotted
// with coords(rho).
inline std::vector<std::vector<double>> induced_outcome_map(const FactorizationMap& f,
                                                            const Povm& p) {
    if (p.dim != f.dim) throw ShapeError("induced_outcome_map: dimension mismatch");
    std::vector<std::vector<double>> rows;
    rows.reserve(p.n_outcomes());
    for (const auto& e : p.effects) {
        std::vector<double> r(f.rank);
        for (std::size_t k = 0; k < f.rank; ++k) r[k] = herm_inner(e, f.basis[k]);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace qbcast
