// constraints.hpp — real-linear equality constraints over vectorized Hermitian
// unknowns, and the builders for the four feasibility questions the engine
// answers: broadcasting tests, channel compatibility, channel broadcasting,
// commuting surrogates.
//
// Every constraint used here is of the form tr(C X_b) = rhs with C Hermitian
// and X_b one unknown block, so a row's coefficients are concatenated
// vectorizations of per-block coefficient matrices.

#pragma once

#include <qbcast/factorize.hpp>
#include <qbcast/qobjects.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace qbcast {

struct ConstraintRow {
    std::vector<double> coeffs;
    double rhs = 0.0;
    std::string description;
};

struct AffineConstraintSystem {
    std::size_t ambient_dim = 0;
    std::vector<ConstraintRow> rows;
};

// Product-PSD-cone structure of the unknown: one Hermitian block per entry.
struct ConeBlocks {
    std::vector<std::size_t> dims;

    std::size_t ambient() const {
        std::size_t n = 0;
        for (auto d : dims) n += vec_length(d);
        return n;
    }

    std::size_t offset(std::size_t block) const {
        std::size_t n = 0;
        for (std::size_t b = 0; b < block; ++b) n += vec_length(dims[b]);
        return n;
    }
};

namespace detail {

// assemble a row from Hermitian coefficient matrices attached to blocks
inline ConstraintRow make_row(const ConeBlocks& blocks,
                              const std::map<std::size_t, HermitianMatrix>& coeff_per_block,
                              double rhs, std::string description) {
    ConstraintRow row;
    row.coeffs.assign(blocks.ambient(), 0.0);
    row.rhs = rhs;
    row.description = std::move(description);
    for (const auto& [b, h] : coeff_per_block) {
        const std::vector<double> v = vectorize(h);
        const std::size_t off = blocks.offset(b);
        for (std::size_t k = 0; k < v.size(); ++k) row.coeffs[off + k] = v[k];
    }
    return row;
}

// merge rows whose augmented (coeffs, rhs) vectors are parallel
inline void deduplicate_rows(AffineConstraintSystem& sys,
                             double merge_tol = default_tolerances().row_merge) {
    std::vector<ConstraintRow> kept;
    std::vector<std::vector<double>> kept_units;
    for (auto& row : sys.rows) {
        std::vector<double> aug = row.coeffs;
        aug.push_back(row.rhs);
        double norm2 = 0.0;
        for (double v : aug) norm2 += v * v;
        const double norm = std::sqrt(norm2);
        if (norm < 1e-13) continue; // trivially satisfied
        double sign = 1.0;
        for (double v : aug)
            if (v != 0.0) {
                sign = v > 0.0 ? 1.0 : -1.0;
                break;
            }
        for (double& v : aug) v *= sign / norm;
        bool duplicate = false;
        for (const auto& u : kept_units) {
            double dot = 0.0;
            for (std::size_t k = 0; k < aug.size(); ++k) dot += aug[k] * u[k];
            if (dot > 1.0 - merge_tol) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            kept_units.push_back(std::move(aug));
            kept.push_back(std::move(row));
        }
    }
    sys.rows = std::move(kept);
}

// orthonormal Hermitian basis of the span of a state list; empty input yields
// the full vectorization basis
inline std::vector<HermitianMatrix> span_basis_or_full(std::size_t dim,
                                                       const std::vector<DensityMatrix>* states) {
    std::vector<HermitianMatrix> basis;
    if (states && !states->empty()) {
        std::vector<HermitianMatrix> gens;
        gens.reserve(states->size());
        for (const auto& s : *states) {
            if (s.dim != dim) throw ShapeError("constraint builder: state dimension mismatch");
            gens.push_back(s.matrix);
        }
        basis = orthonormal_span(dim, gens).basis;
    } else {
        basis.reserve(vec_length(dim));
        for (std::size_t a = 0; a < vec_length(dim); ++a)
            basis.push_back(vec_basis_element(dim, a));
    }
    return basis;
}

inline HermitianMatrix transpose_herm(const HermitianMatrix& h) {
    return HermitianMatrix::symmetrized(h.mat().transpose());
}

inline HermitianMatrix kron_herm(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix::symmetrized(kron(a.mat(), b.mat()));
}

// trace-preservation rows for a Choi block: tr((G (x) I_out) J) = tr(G) for a
// Hermitian basis G of the input space
inline void add_tp_rows(AffineConstraintSystem& sys, const ConeBlocks& blocks, std::size_t block,
                        std::size_t din, std::size_t dout) {
    const HermitianMatrix id_out = HermitianMatrix::identity(dout);
    for (std::size_t a = 0; a < vec_length(din); ++a) {
        const HermitianMatrix g = vec_basis_element(din, a);
        sys.rows.push_back(make_row(blocks, {{block, kron_herm(g, id_out)}}, g.trace_real(),
                                    "trace preservation " + std::to_string(a)));
    }
}

} // namespace detail

// ------------------------- broadcasting test (Def. 1) -------------------------
//
// Unknown: Choi matrix of Lambda: d -> d (x) d. Rows: trace preservation, and
// for every test state rho and effect A (side one) / B (side two):
//   tr[(A (x) I) Lambda(rho)] = tr(A rho),  tr[(I (x) B) Lambda(rho)] = tr(B rho),
// each expressed as tr[(rho^T (x) E) J] = rhs.

inline ConeBlocks broadcast_blocks(std::size_t d) { return ConeBlocks{{d * d * d}}; }

inline AffineConstraintSystem build_broadcast_constraints(const Scenario& s) {
    const std::size_t d = s.dim;
    const ConeBlocks blocks = broadcast_blocks(d);
    AffineConstraintSystem sys;
    sys.ambient_dim = blocks.ambient();

    detail::add_tp_rows(sys, blocks, 0, d, d * d);

    const HermitianMatrix id = HermitianMatrix::identity(d);
    for (std::size_t si = 0; si < s.test_states.size(); ++si) {
        const HermitianMatrix rho_t = detail::transpose_herm(s.test_states[si].matrix);
        for (std::size_t mi = 0; mi < s.test_meas_a.size(); ++mi)
            for (std::size_t ei = 0; ei < s.test_meas_a[mi].effects.size(); ++ei) {
                const HermitianMatrix& a = s.test_meas_a[mi].effects[ei];
                const HermitianMatrix coeff =
                    detail::kron_herm(rho_t, detail::kron_herm(a, id));
                const double rhs = herm_inner(a, s.test_states[si].matrix);
                sys.rows.push_back(detail::make_row(
                    blocks, {{0, coeff}}, rhs,
                    "side A: state " + std::to_string(si) + ", measurement " +
                        std::to_string(mi) + ", effect " + std::to_string(ei)));
            }
        for (std::size_t mi = 0; mi < s.test_meas_b.size(); ++mi)
            for (std::size_t ei = 0; ei < s.test_meas_b[mi].effects.size(); ++ei) {
                const HermitianMatrix& b = s.test_meas_b[mi].effects[ei];
                const HermitianMatrix coeff =
                    detail::kron_herm(rho_t, detail::kron_herm(id, b));
                const double rhs = herm_inner(b, s.test_states[si].matrix);
                sys.rows.push_back(detail::make_row(
                    blocks, {{0, coeff}}, rhs,
                    "side B: state " + std::to_string(si) + ", measurement " +
                        std::to_string(mi) + ", effect " + std::to_string(ei)));
            }
    }
    detail::deduplicate_rows(sys);
    return sys;
}

// row count before deduplication, for diagnostics
inline std::size_t broadcast_row_count(const Scenario& s) {
    std::size_t effects_total_a = 0, effects_total_b = 0;
    for (const auto& p : s.test_meas_a) effects_total_a += p.n_outcomes();
    for (const auto& p : s.test_meas_b) effects_total_b += p.n_outcomes();
    return vec_length(s.dim) + s.test_states.size() * (effects_total_a + effects_total_b);
}

// --------------------- channel compatibility (Eqs. 14-15) ---------------------
//
// Unknown: Choi of Lambda: d -> out1 (x) out2 whose marginals reproduce Phi1
// and Phi2 on all states (or on span(T) when a state list is given).

inline ConeBlocks compatibility_blocks(const ChoiChannel& phi1, const ChoiChannel& phi2) {
    return ConeBlocks{{phi1.dim_in * phi1.dim_out * phi2.dim_out}};
}

inline AffineConstraintSystem build_compatibility_constraints(
    const ChoiChannel& phi1, const ChoiChannel& phi2,
    const std::vector<DensityMatrix>* test_states = nullptr) {
    if (phi1.dim_in != phi2.dim_in)
        throw ShapeError("build_compatibility_constraints: input dimensions differ");
    const std::size_t d = phi1.dim_in;
    const std::size_t o1 = phi1.dim_out, o2 = phi2.dim_out;
    const ConeBlocks blocks = compatibility_blocks(phi1, phi2);
    AffineConstraintSystem sys;
    sys.ambient_dim = blocks.ambient();

    detail::add_tp_rows(sys, blocks, 0, d, o1 * o2);

    const std::vector<HermitianMatrix> in_basis = detail::span_basis_or_full(d, test_states);
    const HermitianMatrix id1 = HermitianMatrix::identity(o1);
    const HermitianMatrix id2 = HermitianMatrix::identity(o2);
    for (std::size_t xi = 0; xi < in_basis.size(); ++xi) {
        const HermitianMatrix& x = in_basis[xi];
        const HermitianMatrix xt = detail::transpose_herm(x);
        const HermitianMatrix phi1_x = apply_channel(phi1, x);
        const HermitianMatrix phi2_x = apply_channel(phi2, x);
        for (std::size_t b = 0; b < vec_length(o1); ++b) {
            const HermitianMatrix g = vec_basis_element(o1, b);
            const HermitianMatrix coeff = detail::kron_herm(xt, detail::kron_herm(g, id2));
            sys.rows.push_back(detail::make_row(
                blocks, {{0, coeff}}, herm_inner(g, phi1_x),
                "marginal 1, input " + std::to_string(xi) + ", coord " + std::to_string(b)));
        }
        for (std::size_t b = 0; b < vec_length(o2); ++b) {
            const HermitianMatrix g = vec_basis_element(o2, b);
            const HermitianMatrix coeff = detail::kron_herm(xt, detail::kron_herm(id1, g));
            sys.rows.push_back(detail::make_row(
                blocks, {{0, coeff}}, herm_inner(g, phi2_x),
                "marginal 2, input " + std::to_string(xi) + ", coord " + std::to_string(b)));
        }
    }
    detail::deduplicate_rows(sys);
    return sys;
}

// --------------------- channel broadcastability (Def. 2) ----------------------
//
// Unknown: Choi of Lambda: d -> d (x) d with
//   Phi1(Tr_2 Lambda(rho)) = Phi1(rho),  Phi2(Tr_1 Lambda(rho)) = Phi2(rho)
// for rho in a basis of span(T), plus trace preservation. Pulled back through
// the adjoints the rows read tr[(rho^T (x) Phi1*(G) (x) I) J] = tr(G Phi1(rho)).

inline ConeBlocks channel_broadcast_blocks(std::size_t d) { return ConeBlocks{{d * d * d}}; }

inline AffineConstraintSystem build_channel_broadcast_constraints(
    const std::vector<DensityMatrix>& test_states, const ChoiChannel& phi1,
    const ChoiChannel& phi2) {
    if (phi1.dim_in != phi2.dim_in)
        throw ShapeError("build_channel_broadcast_constraints: input dimensions differ");
    const std::size_t d = phi1.dim_in;
    const ConeBlocks blocks = channel_broadcast_blocks(d);
    AffineConstraintSystem sys;
    sys.ambient_dim = blocks.ambient();

    detail::add_tp_rows(sys, blocks, 0, d, d * d);

    const std::vector<HermitianMatrix> in_basis =
        detail::span_basis_or_full(d, test_states.empty() ? nullptr : &test_states);
    const HermitianMatrix id = HermitianMatrix::identity(d);
    for (std::size_t xi = 0; xi < in_basis.size(); ++xi) {
        const HermitianMatrix& x = in_basis[xi];
        const HermitianMatrix xt = detail::transpose_herm(x);
        const HermitianMatrix phi1_x = apply_channel(phi1, x);
        const HermitianMatrix phi2_x = apply_channel(phi2, x);
        for (std::size_t b = 0; b < vec_length(phi1.dim_out); ++b) {
            const HermitianMatrix g = vec_basis_element(phi1.dim_out, b);
            const HermitianMatrix coeff =
                detail::kron_herm(xt, detail::kron_herm(adjoint_apply(phi1, g), id));
            sys.rows.push_back(detail::make_row(
                blocks, {{0, coeff}}, herm_inner(g, phi1_x),
                "side 1, input " + std::to_string(xi) + ", coord " + std::to_string(b)));
        }
        for (std::size_t b = 0; b < vec_length(phi2.dim_out); ++b) {
            const HermitianMatrix g = vec_basis_element(phi2.dim_out, b);
            const HermitianMatrix coeff =
                detail::kron_herm(xt, detail::kron_herm(id, adjoint_apply(phi2, g)));
            sys.rows.push_back(detail::make_row(
                blocks, {{0, coeff}}, herm_inner(g, phi2_x),
                "side 2, input " + std::to_string(xi) + ", coord " + std::to_string(b)));
        }
    }
    detail::deduplicate_rows(sys);
    return sys;
}

// ------------------- commuting surrogate measurement (Thm) --------------------
//
// Unknowns: one Hermitian block per outcome, constrained PSD by the cone.
// Rows: completeness (sum = identity), statistics agreement on span(T), and
// [A~_i, rho] = 0 expressed as tr(i[rho, G] A~_i) = 0 over a Hermitian basis G.

inline ConeBlocks surrogate_blocks(std::size_t d, std::size_t n_outcomes) {
    return ConeBlocks{std::vector<std::size_t>(n_outcomes, d)};
}

inline AffineConstraintSystem build_commuting_surrogate_constraints(
    const std::vector<DensityMatrix>& test_states, const Povm& a) {
    if (test_states.empty())
        throw DomainError("build_commuting_surrogate_constraints: empty state list");
    const std::size_t d = a.dim;
    const std::size_t k = a.n_outcomes();
    const ConeBlocks blocks = surrogate_blocks(d, k);
    AffineConstraintSystem sys;
    sys.ambient_dim = blocks.ambient();

    // completeness
    for (std::size_t alpha = 0; alpha < vec_length(d); ++alpha) {
        const HermitianMatrix g = vec_basis_element(d, alpha);
        std::map<std::size_t, HermitianMatrix> coeff;
        for (std::size_t i = 0; i < k; ++i) coeff.emplace(i, g);
        sys.rows.push_back(detail::make_row(blocks, coeff, g.trace_real(),
                                            "completeness coord " + std::to_string(alpha)));
    }

    const std::vector<HermitianMatrix> span = detail::span_basis_or_full(d, &test_states);
    for (std::size_t xi = 0; xi < span.size(); ++xi) {
        const HermitianMatrix& x = span[xi];
        for (std::size_t i = 0; i < k; ++i) {
            sys.rows.push_back(detail::make_row(
                blocks, {{i, x}}, herm_inner(a.effects[i], x),
                "statistics: input " + std::to_string(xi) + ", outcome " + std::to_string(i)));
            for (std::size_t alpha = 0; alpha < vec_length(d); ++alpha) {
                const HermitianMatrix g = vec_basis_element(d, alpha);
                // i[x, g] is Hermitian; tr(i[x,g] A~_i) = 0 for all g says [A~_i, x] = 0
                const ComplexMatrix comm = commutator(x.mat(), g.mat());
                const HermitianMatrix coeff =
                    HermitianMatrix::symmetrized(cx{0.0, 1.0} * comm);
                sys.rows.push_back(detail::make_row(
                    blocks, {{i, coeff}}, 0.0,
                    "commutation: input " + std::to_string(xi) + ", outcome " +
                        std::to_string(i) + ", coord " + std::to_string(alpha)));
            }
        }
    }
    detail::deduplicate_rows(sys);
    return sys;
}

// max |<a_i, x> - b_i| over all rows
inline double max_row_violation(const AffineConstraintSystem& sys, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& row : sys.rows) {
        double dot = 0.0;
        for (std::size_t k = 0; k < row.coeffs.size(); ++k) dot += row.coeffs[k] * x[k];
        worst = std::max(worst, std::abs(dot - row.rhs));
    }
    return worst;
}

} // namespace qbcast
