// qobjects.hpp — states, POVMs, channels in Choi form; their actions, adjoints,
// explicit constructors, and validation.
//
// Choi convention: for a channel L: B(C^din) -> B(C^dout), the Choi matrix is
//   J = sum_{i,j} |i><j| (x) L(|i><j|)
// with the input factor as the slow index: row (i,k) = i*dout + k. Then
//   L(rho)[k,l] = sum_{i,j} rho[i,j] J[(i,k),(j,l)]
// and trace preservation reads Tr_out J = I_din.

#pragma once

#include <qbcast/eig.hpp>
#include <qbcast/hermitian.hpp>
#include <qbcast/tolerances.hpp>

#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qbcast {

// ------------------------------- domain types --------------------------------

struct DensityMatrix {
    std::size_t dim = 0;
    HermitianMatrix matrix;

    DensityMatrix() = default;
    explicit DensityMatrix(HermitianMatrix m) : dim(m.dim()), matrix(std::move(m)) {}
};

struct Povm {
    std::size_t dim = 0;
    std::vector<HermitianMatrix> effects;

    Povm() = default;
    explicit Povm(std::vector<HermitianMatrix> eff) : effects(std::move(eff)) {
        if (!effects.empty()) dim = effects.front().dim();
        for (const auto& e : effects)
            if (e.dim() != dim) throw ShapeError("Povm: effects of mixed dimension");
    }

    std::size_t n_outcomes() const { return effects.size(); }
};

struct ChoiChannel {
    std::size_t dim_in = 0;
    std::size_t dim_out = 0;
    HermitianMatrix choi;

    ChoiChannel() = default;
    ChoiChannel(std::size_t din, std::size_t dout, HermitianMatrix j)
        : dim_in(din), dim_out(dout), choi(std::move(j)) {
        if (choi.dim() != dim_in * dim_out)
            throw ShapeError("ChoiChannel: Choi dimension is not dim_in*dim_out");
    }
};

struct Scenario {
    std::size_t dim = 0;
    std::vector<DensityMatrix> test_states;
    std::vector<Povm> test_meas_a;
    std::vector<Povm> test_meas_b;
    std::string label;
};

// ------------------------------ channel action -------------------------------

// complex-linear extension of the channel action; used when assembling Choi
// matrices of composed maps
inline ComplexMatrix apply_channel_complex(const ChoiChannel& c, const ComplexMatrix& rho) {
    if (!rho.square() || rho.rows() != c.dim_in)
        throw ShapeError("apply_channel: input dimension mismatch");
    const std::size_t din = c.dim_in, dout = c.dim_out;
    ComplexMatrix out(dout, dout);
    for (std::size_t i = 0; i < din; ++i)
        for (std::size_t j = 0; j < din; ++j) {
            const cx r = rho(i, j);
            if (r == cx{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < dout; ++k)
                for (std::size_t l = 0; l < dout; ++l)
                    out(k, l) += r * c.choi(i * dout + k, j * dout + l);
        }
    return out;
}

inline HermitianMatrix apply_channel(const ChoiChannel& c, const HermitianMatrix& rho) {
    return HermitianMatrix::symmetrized(apply_channel_complex(c, rho.mat()));
}

inline DensityMatrix apply_channel(const ChoiChannel& c, const DensityMatrix& rho) {
    return DensityMatrix(apply_channel(c, rho.matrix));
}

// Heisenberg-picture action: the unique X with tr(X rho) = tr(e L(rho)).
inline HermitianMatrix adjoint_apply(const ChoiChannel& c, const HermitianMatrix& e) {
    if (e.dim() != c.dim_out) throw ShapeError("adjoint_apply: effect dimension mismatch");
    const std::size_t din = c.dim_in, dout = c.dim_out;
    ComplexMatrix out(din, din);
    for (std::size_t a = 0; a < din; ++a)
        for (std::size_t b = 0; b < din; ++b) {
            cx s{0.0, 0.0};
            for (std::size_t k = 0; k < dout; ++k)
                for (std::size_t l = 0; l < dout; ++l)
                    s += e(k, l) * c.choi(b * dout + l, a * dout + k);
            out(a, b) = s;
        }
    return HermitianMatrix::symmetrized(out);
}

// --------------------------- channel constructors ----------------------------

inline ChoiChannel choi_from_map(std::size_t din, std::size_t dout,
                                 const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
    ComplexMatrix j(din * dout, din * dout);
    for (std::size_t i = 0; i < din; ++i)
        for (std::size_t jj = 0; jj < din; ++jj) {
            const ComplexMatrix block = f(basis_op(din, i, jj));
            if (block.rows() != dout || block.cols() != dout)
                throw ShapeError("choi_from_map: map output has wrong dimension");
            for (std::size_t k = 0; k < dout; ++k)
                for (std::size_t l = 0; l < dout; ++l) j(i * dout + k, jj * dout + l) = block(k, l);
        }
    return ChoiChannel(din, dout, HermitianMatrix::symmetrized(j));
}

inline ChoiChannel identity_channel(std::size_t d) {
    return choi_from_map(d, d, [](const ComplexMatrix& m) { return m; });
}

inline ChoiChannel unitary_channel(const ComplexMatrix& u) {
    if (!u.square()) throw ShapeError("unitary_channel: non-square matrix");
    return choi_from_map(u.rows(), u.rows(),
                         [&u](const ComplexMatrix& m) { return u * m * u.adjoint(); });
}

// L(rho) = mu rho + (1-mu) tr(rho) I/d. mu=1 is the identity, mu=0 the
// completely depolarizing channel.
inline ChoiChannel depolarizing_channel(double mu, std::size_t d = 2) {
    if (mu < 0.0 || mu > 1.0) throw DomainError("depolarizing_channel: mu outside [0,1]");
    return choi_from_map(d, d, [mu, d](const ComplexMatrix& m) {
        ComplexMatrix out = mu * m;
        const cx t = m.trace() * cx{(1.0 - mu) / static_cast<double>(d), 0.0};
        for (std::size_t i = 0; i < d; ++i) out(i, i) += t;
        return out;
    });
}

inline ChoiChannel completely_depolarizing_channel(std::size_t d) {
    return depolarizing_channel(0.0, d);
}

// L(rho) = sum_k tr(rho G_k) prep_k; Choi matrix sum_k G_k^T (x) prep_k.
inline ChoiChannel measure_prepare_channel(const Povm& g,
                                           const std::vector<DensityMatrix>& preps) {
    if (g.n_outcomes() != preps.size())
        throw ShapeError("measure_prepare_channel: one preparation per effect required");
    if (preps.empty()) throw ShapeError("measure_prepare_channel: empty measurement");
    const std::size_t din = g.dim;
    const std::size_t dout = preps.front().dim;
    ComplexMatrix j(din * dout, din * dout);
    for (std::size_t lam = 0; lam < preps.size(); ++lam) {
        if (preps[lam].dim != dout)
            throw ShapeError("measure_prepare_channel: preparations of mixed dimension");
        const ComplexMatrix gt = g.effects[lam].mat().transpose();
        const ComplexMatrix& p = preps[lam].matrix.mat();
        for (std::size_t i = 0; i < din; ++i)
            for (std::size_t jj = 0; jj < din; ++jj) {
                const cx v = gt(i, jj);
                if (v == cx{0.0, 0.0}) continue;
                for (std::size_t k = 0; k < dout; ++k)
                    for (std::size_t l = 0; l < dout; ++l)
                        j(i * dout + k, jj * dout + l) += v * p(k, l);
            }
    }
    return ChoiChannel(din, dout, HermitianMatrix::symmetrized(j));
}

// (L + swap . L)/2 for a broadcasting channel L: d -> d (x) d.
inline ChoiChannel swap_symmetrize(const ChoiChannel& c) {
    const std::size_t d = c.dim_in;
    if (c.dim_out != d * d) throw ShapeError("swap_symmetrize: dim_out is not dim_in^2");
    const ComplexMatrix s = kron(ComplexMatrix::identity(d), swap_operator(d));
    const ComplexMatrix j = c.choi.mat();
    const ComplexMatrix sym = cx{0.5, 0.0} * (j + s * j * s);
    return ChoiChannel(d, d * d, HermitianMatrix::symmetrized(sym));
}

// ---------------------------- composite channels -----------------------------

// traces out the middle factor of A (x) B (x) C
inline ComplexMatrix trace_middle_factor(const ComplexMatrix& m, std::size_t da, std::size_t db,
                                         std::size_t dc) {
    if (m.rows() != da * db * dc) throw ShapeError("trace_middle_factor: dimension mismatch");
    ComplexMatrix out(da * dc, da * dc);
    for (std::size_t a = 0; a < da; ++a)
        for (std::size_t a2 = 0; a2 < da; ++a2)
            for (std::size_t c = 0; c < dc; ++c)
                for (std::size_t c2 = 0; c2 < dc; ++c2) {
                    cx s{0.0, 0.0};
                    for (std::size_t b = 0; b < db; ++b)
                        s += m((a * db + b) * dc + c, (a2 * db + b) * dc + c2);
                    out(a * dc + c, a2 * dc + c2) = s;
                }
    return out;
}

// marginal of a channel into a bipartite output: rho -> Tr_discard L(rho)
inline ChoiChannel marginal_channel(const ChoiChannel& c, std::size_t d1, std::size_t d2,
                                    Keep keep) {
    if (c.dim_out != d1 * d2) throw ShapeError("marginal_channel: output is not d1*d2");
    const ComplexMatrix& j = c.choi.mat();
    ComplexMatrix jm = (keep == Keep::First)
                           ? partial_trace(j, c.dim_in * d1, d2, Keep::First)
                           : trace_middle_factor(j, c.dim_in, d1, d2);
    const std::size_t dkeep = (keep == Keep::First) ? d1 : d2;
    return ChoiChannel(c.dim_in, dkeep, HermitianMatrix::symmetrized(jm));
}

// after . before
inline ChoiChannel compose(const ChoiChannel& after, const ChoiChannel& before) {
    if (before.dim_out != after.dim_in) throw ShapeError("compose: inner dimensions mismatch");
    return choi_from_map(before.dim_in, after.dim_out, [&](const ComplexMatrix& m) {
        return apply_channel_complex(after, apply_channel_complex(before, m));
    });
}

// (L1 (x) L2)(rho1 (x) rho2) = L1(rho1) (x) L2(rho2)
inline ChoiChannel channel_tensor(const ChoiChannel& c1, const ChoiChannel& c2) {
    const std::size_t di1 = c1.dim_in, do1 = c1.dim_out;
    const std::size_t di2 = c2.dim_in, do2 = c2.dim_out;
    const std::size_t din = di1 * di2, dout = do1 * do2;
    ComplexMatrix j(din * dout, din * dout);
    const ComplexMatrix& j1 = c1.choi.mat();
    const ComplexMatrix& j2 = c2.choi.mat();
    for (std::size_t i1 = 0; i1 < di1; ++i1)
        for (std::size_t i2 = 0; i2 < di2; ++i2)
            for (std::size_t jj1 = 0; jj1 < di1; ++jj1)
                for (std::size_t jj2 = 0; jj2 < di2; ++jj2)
                    for (std::size_t k1 = 0; k1 < do1; ++k1)
                        for (std::size_t k2 = 0; k2 < do2; ++k2)
                            for (std::size_t l1 = 0; l1 < do1; ++l1)
                                for (std::size_t l2 = 0; l2 < do2; ++l2) {
                                    const cx v = j1(i1 * do1 + k1, jj1 * do1 + l1) *
                                                 j2(i2 * do2 + k2, jj2 * do2 + l2);
                                    if (v == cx{0.0, 0.0}) continue;
                                    const std::size_t row =
                                        (i1 * di2 + i2) * dout + (k1 * do2 + k2);
                                    const std::size_t col =
                                        (jj1 * di2 + jj2) * dout + (l1 * do2 + l2);
                                    j(row, col) += v;
                                }
    return ChoiChannel(din, dout, HermitianMatrix::symmetrized(j));
}

// -------------------------- real superoperator form --------------------------
//
// A channel maps Hermitian to Hermitian, so on the real vectorization it is a
// real matrix. With the isometric vectorization the adjoint channel is the
// plain transpose.

struct RealSuperOp {
    std::size_t dim_in = 0;  // operator dimension, not coordinate length
    std::size_t dim_out = 0;
    std::vector<double> m;   // row-major, vec_length(dim_out) x vec_length(dim_in)

    std::size_t rows() const { return vec_length(dim_out); }
    std::size_t cols() const { return vec_length(dim_in); }
    double& at(std::size_t r, std::size_t c) { return m[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return m[r * cols() + c]; }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(rows(), 0.0);
        for (std::size_t r = 0; r < rows(); ++r) {
            double s = 0.0;
            const double* row = m.data() + r * cols();
            for (std::size_t c = 0; c < cols(); ++c) s += row[c] * x[c];
            y[r] = s;
        }
        return y;
    }

    HermitianMatrix apply(const HermitianMatrix& h) const {
        return devectorize(dim_out, apply(vectorize(h)));
    }

    RealSuperOp transpose() const {
        RealSuperOp t;
        t.dim_in = dim_out;
        t.dim_out = dim_in;
        t.m.assign(m.size(), 0.0);
        for (std::size_t r = 0; r < rows(); ++r)
            for (std::size_t c = 0; c < cols(); ++c) t.at(c, r) = at(r, c);
        return t;
    }

    static RealSuperOp identity(std::size_t d) {
        RealSuperOp s;
        s.dim_in = s.dim_out = d;
        s.m.assign(vec_length(d) * vec_length(d), 0.0);
        for (std::size_t k = 0; k < vec_length(d); ++k) s.at(k, k) = 1.0;
        return s;
    }

    friend RealSuperOp operator*(const RealSuperOp& l, const RealSuperOp& r) {
        if (l.dim_in != r.dim_out) throw ShapeError("RealSuperOp: composition mismatch");
        RealSuperOp out;
        out.dim_in = r.dim_in;
        out.dim_out = l.dim_out;
        out.m.assign(out.rows() * out.cols(), 0.0);
        for (std::size_t i = 0; i < l.rows(); ++i)
            for (std::size_t k = 0; k < l.cols(); ++k) {
                const double v = l.at(i, k);
                if (v == 0.0) continue;
                for (std::size_t j = 0; j < r.cols(); ++j) out.at(i, j) += v * r.at(k, j);
            }
        return out;
    }

    friend RealSuperOp operator+(const RealSuperOp& l, const RealSuperOp& r) {
        if (l.dim_in != r.dim_in || l.dim_out != r.dim_out)
            throw ShapeError("RealSuperOp: shape mismatch");
        RealSuperOp out = l;
        for (std::size_t k = 0; k < out.m.size(); ++k) out.m[k] += r.m[k];
        return out;
    }

    friend RealSuperOp operator*(double s, RealSuperOp r) {
        for (auto& v : r.m) v *= s;
        return r;
    }

    double frobenius_distance_to(const RealSuperOp& o) const {
        double s = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
            const double d = m[k] - o.m[k];
            s += d * d;
        }
        return std::sqrt(s);
    }
};

inline RealSuperOp channel_real_rep(const ChoiChannel& c) {
    RealSuperOp s;
    s.dim_in = c.dim_in;
    s.dim_out = c.dim_out;
    s.m.assign(s.rows() * s.cols(), 0.0);
    for (std::size_t beta = 0; beta < vec_length(c.dim_in); ++beta) {
        const HermitianMatrix image = apply_channel(c, vec_basis_element(c.dim_in, beta));
        const std::vector<double> col = vectorize(image);
        for (std::size_t r = 0; r < s.rows(); ++r) s.at(r, beta) = col[r];
    }
    return s;
}

inline ChoiChannel real_rep_to_choi(const RealSuperOp& s) {
    const std::size_t din = s.dim_in, dout = s.dim_out;
    const double rt2 = std::sqrt(2.0);
    ComplexMatrix j(din * dout, din * dout);
    auto put_block = [&](std::size_t i, std::size_t jj, const ComplexMatrix& block) {
        for (std::size_t k = 0; k < dout; ++k)
            for (std::size_t l = 0; l < dout; ++l) j(i * dout + k, jj * dout + l) = block(k, l);
    };
    for (std::size_t i = 0; i < din; ++i) put_block(i, i, s.apply(vec_basis_element(din, i)).mat());
    std::size_t idx = din;
    for (std::size_t i = 0; i < din; ++i)
        for (std::size_t jj = i + 1; jj < din; ++jj) {
            const ComplexMatrix re = s.apply(vec_basis_element(din, idx++)).mat();
            const ComplexMatrix im = s.apply(vec_basis_element(din, idx++)).mat();
            // E_ij = (H_re - i H_im)/sqrt(2), E_ji its adjoint
            ComplexMatrix upper = re;
            upper -= cx{0.0, 1.0} * im;
            upper *= cx{1.0 / rt2, 0.0};
            put_block(i, jj, upper);
            put_block(jj, i, upper.adjoint());
        }
    return ChoiChannel(din, dout, HermitianMatrix::symmetrized(j));
}

// ------------------------------ standard objects ------------------------------

inline DensityMatrix maximally_mixed(std::size_t d) {
    return DensityMatrix(HermitianMatrix::symmetrized(
        cx{1.0 / static_cast<double>(d), 0.0} * ComplexMatrix::identity(d)));
}

inline DensityMatrix pure_state(const std::vector<cx>& psi) {
    return DensityMatrix(HermitianMatrix::symmetrized(outer_projector(psi)));
}

// projective measurement in the computational basis
inline Povm basis_povm(std::size_t d) {
    std::vector<HermitianMatrix> eff;
    eff.reserve(d);
    for (std::size_t i = 0; i < d; ++i) eff.push_back(HermitianMatrix::symmetrized(projector(d, i)));
    return Povm(std::move(eff));
}

inline Povm coin_toss_povm(std::size_t d, const std::vector<double>& weights) {
    std::vector<HermitianMatrix> eff;
    eff.reserve(weights.size());
    for (double w : weights)
        eff.push_back(HermitianMatrix::symmetrized(cx{w, 0.0} * ComplexMatrix::identity(d)));
    return Povm(std::move(eff));
}

// d^2 pure states spanning the Hermitian space: basis projectors plus the
// +-superposition and +i-superposition projectors for every pair
inline std::vector<DensityMatrix> spanning_states(std::size_t d) {
    std::vector<DensityMatrix> out;
    out.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<cx> psi(d, cx{0.0, 0.0});
        psi[i] = 1.0;
        out.push_back(pure_state(psi));
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            std::vector<cx> plus(d, cx{0.0, 0.0}), plusi(d, cx{0.0, 0.0});
            plus[i] = 1.0;
            plus[j] = 1.0;
            plusi[i] = 1.0;
            plusi[j] = cx{0.0, 1.0};
            out.push_back(pure_state(plus));
            out.push_back(pure_state(plusi));
        }
    return out;
}

// informationally complete POVM: spanning projectors P_k renormalized as
// S^{-1/2} P_k S^{-1/2}, S = sum_k P_k
inline Povm ic_povm(std::size_t d) {
    const auto states = spanning_states(d);
    HermitianMatrix s = HermitianMatrix::zero(d);
    for (const auto& st : states) s = s + st.matrix;
    const HermitianMatrix w = inv_sqrt_psd(s);
    std::vector<HermitianMatrix> eff;
    eff.reserve(states.size());
    for (const auto& st : states)
        eff.push_back(HermitianMatrix::symmetrized(w.mat() * st.matrix.mat() * w.mat()));
    return Povm(std::move(eff));
}

// --------------------------------- validation --------------------------------

struct Violation {
    std::string what;
    double margin = 0.0;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }

    void add(const std::string& what, double margin) { violations.push_back({what, margin}); }

    std::string to_string() const {
        std::ostringstream os;
        for (const auto& v : violations) os << v.what << " (margin " << v.margin << ")\n";
        return os.str();
    }
};

inline ValidationReport validate(const DensityMatrix& rho,
                                 const Tolerances& tol = default_tolerances()) {
    ValidationReport rep;
    if (rho.dim == 0 || rho.matrix.dim() != rho.dim) {
        rep.add("density matrix: dimension mismatch", 0.0);
        return rep;
    }
    const double mineig = min_eigenvalue(rho.matrix);
    if (mineig < -tol.psd) rep.add("density matrix: not PSD", mineig);
    const double tr = rho.matrix.trace_real();
    if (std::abs(tr - 1.0) > tol.trace) rep.add("density matrix: trace differs from 1", tr - 1.0);
    return rep;
}

inline ValidationReport validate(const Povm& p, const Tolerances& tol = default_tolerances()) {
    ValidationReport rep;
    if (p.effects.empty()) {
        rep.add("POVM: no effects", 0.0);
        return rep;
    }
    HermitianMatrix sum = HermitianMatrix::zero(p.dim);
    for (std::size_t i = 0; i < p.effects.size(); ++i) {
        const double mineig = min_eigenvalue(p.effects[i]);
        if (mineig < -tol.psd)
            rep.add("POVM: effect " + std::to_string(i) + " not PSD", mineig);
        sum = sum + p.effects[i];
    }
    const double gap =
        frobenius_distance(sum.mat(), ComplexMatrix::identity(p.dim));
    if (gap > tol.trace) rep.add("POVM: effects do not sum to the identity", gap);
    return rep;
}

inline ValidationReport validate(const ChoiChannel& c,
                                 const Tolerances& tol = default_tolerances()) {
    ValidationReport rep;
    if (c.choi.dim() != c.dim_in * c.dim_out) {
        rep.add("channel: Choi dimension mismatch", 0.0);
        return rep;
    }
    const double mineig = min_eigenvalue(c.choi);
    if (mineig < -tol.psd) rep.add("channel: Choi matrix not PSD", mineig);
    const HermitianMatrix marg = partial_trace(c.choi, c.dim_in, c.dim_out, Keep::First);
    const double tp_gap = op_norm(marg - HermitianMatrix::identity(c.dim_in));
    if (tp_gap > tol.tp) rep.add("channel: not trace preserving", tp_gap);
    return rep;
}

inline ValidationReport validate(const Scenario& s,
                                 const Tolerances& tol = default_tolerances()) {
    ValidationReport rep;
    if (s.test_states.empty()) rep.add("scenario: no test states", 0.0);
    if (s.test_meas_a.empty()) rep.add("scenario: measurement collection A empty", 0.0);
    if (s.test_meas_b.empty()) rep.add("scenario: measurement collection B empty", 0.0);
    auto absorb = [&rep](const ValidationReport& sub, const std::string& where) {
        for (const auto& v : sub.violations) rep.add(where + ": " + v.what, v.margin);
    };
    for (std::size_t i = 0; i < s.test_states.size(); ++i) {
        if (s.test_states[i].dim != s.dim) rep.add("scenario: state dimension mismatch", 0.0);
        absorb(validate(s.test_states[i], tol), "state " + std::to_string(i));
    }
    for (std::size_t i = 0; i < s.test_meas_a.size(); ++i) {
        if (s.test_meas_a[i].dim != s.dim) rep.add("scenario: POVM dimension mismatch (A)", 0.0);
        absorb(validate(s.test_meas_a[i], tol), "measurement A" + std::to_string(i));
    }
    for (std::size_t i = 0; i < s.test_meas_b.size(); ++i) {
        if (s.test_meas_b[i].dim != s.dim) rep.add("scenario: POVM dimension mismatch (B)", 0.0);
        absorb(validate(s.test_meas_b[i], tol), "measurement B" + std::to_string(i));
    }
    return rep;
}

} // namespace qbcast
