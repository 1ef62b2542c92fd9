// hermitian.hpp — Hermitian matrices, their real vectorization, partial traces.

#pragma once

#include <qbcast/complex_matrix.hpp>
#include <qbcast/tolerances.hpp>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace qbcast {

// Square complex matrix kept exactly Hermitian: construction symmetrizes to
// (M + M†)/2 (mirrored entries, real diagonal) and rejects inputs whose
// anti-Hermitian part exceeds the tolerance.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(const ComplexMatrix& m,
                             double tol_herm = default_tolerances().herm) {
        if (!m.square()) throw ShapeError("HermitianMatrix: non-square input");
        const double scale = 1.0 + m.frobenius_norm();
        double worst = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = i; j < m.cols(); ++j)
                worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
        if (worst > tol_herm * scale)
            throw DomainError("HermitianMatrix: input is not Hermitian (deviation " +
                              std::to_string(worst) + ")");
        m_ = ComplexMatrix(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            m_(i, i) = cx{m(i, i).real(), 0.0};
            for (std::size_t j = i + 1; j < m.cols(); ++j) {
                const cx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
                m_(i, j) = v;
                m_(j, i) = std::conj(v);
            }
        }
    }

    // symmetrize without a Hermiticity check (for results of arithmetic that
    // are Hermitian up to rounding)
    static HermitianMatrix symmetrized(const ComplexMatrix& m) {
        HermitianMatrix h;
        if (!m.square()) throw ShapeError("HermitianMatrix: non-square input");
        h.m_ = ComplexMatrix(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            h.m_(i, i) = cx{m(i, i).real(), 0.0};
            for (std::size_t j = i + 1; j < m.cols(); ++j) {
                const cx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
                h.m_(i, j) = v;
                h.m_(j, i) = std::conj(v);
            }
        }
        return h;
    }

    static HermitianMatrix zero(std::size_t dim) {
        return HermitianMatrix::symmetrized(ComplexMatrix(dim, dim));
    }

    static HermitianMatrix identity(std::size_t dim) {
        return HermitianMatrix::symmetrized(ComplexMatrix::identity(dim));
    }

    std::size_t dim() const { return m_.rows(); }
    const ComplexMatrix& mat() const { return m_; }
    const cx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    double trace_real() const { return m_.trace().real(); }
    double frobenius_norm() const { return m_.frobenius_norm(); }

    // closed under real-linear combinations
    friend HermitianMatrix operator+(const HermitianMatrix& l, const HermitianMatrix& r) {
        return HermitianMatrix::symmetrized(l.m_ + r.m_);
    }
    friend HermitianMatrix operator-(const HermitianMatrix& l, const HermitianMatrix& r) {
        return HermitianMatrix::symmetrized(l.m_ - r.m_);
    }
    friend HermitianMatrix operator*(double s, const HermitianMatrix& h) {
        return HermitianMatrix::symmetrized(cx{s, 0.0} * h.m_);
    }

private:
    ComplexMatrix m_;
};

// tr(A B) for Hermitian A, B — real.
inline double herm_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw ShapeError("herm_inner: dimension mismatch");
    cx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t k = 0; k < a.dim(); ++k) s += a(i, k) * b(k, i);
    return s.real();
}

// ------------------------------- vectorization ------------------------------
//
// Real coordinates of a Hermitian matrix: the d diagonal entries first, then
// sqrt(2)*Re and sqrt(2)*Im of each strict upper-triangle entry in row-major
// order. The sqrt(2) weight makes the map a linear isometry: <A,B>_F equals
// the Euclidean inner product of the coordinate vectors.

inline std::size_t vec_length(std::size_t dim) { return dim * dim; }

inline std::vector<double> vectorize(const HermitianMatrix& h) {
    const std::size_t d = h.dim();
    std::vector<double> c(vec_length(d));
    const double rt2 = std::sqrt(2.0);
    std::size_t k = d;
    for (std::size_t i = 0; i < d; ++i) c[i] = h(i, i).real();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            c[k++] = rt2 * h(i, j).real();
            c[k++] = rt2 * h(i, j).imag();
        }
    return c;
}

inline HermitianMatrix devectorize(std::size_t dim, const std::vector<double>& c) {
    if (c.size() != vec_length(dim)) throw ShapeError("devectorize: coordinate count mismatch");
    ComplexMatrix m(dim, dim);
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    std::size_t k = dim;
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = cx{c[i], 0.0};
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double re = c[k++] * inv_rt2;
            const double im = c[k++] * inv_rt2;
            m(i, j) = cx{re, im};
            m(j, i) = cx{re, -im};
        }
    return HermitianMatrix::symmetrized(m);
}

// The Hermitian basis element whose vectorization is the alpha-th standard
// basis vector.
inline HermitianMatrix vec_basis_element(std::size_t dim, std::size_t alpha) {
    std::vector<double> c(vec_length(dim), 0.0);
    if (alpha >= c.size()) throw ShapeError("vec_basis_element: index out of range");
    c[alpha] = 1.0;
    return devectorize(dim, c);
}

// ------------------------------- partial trace -------------------------------

enum class Keep { First, Second };

inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t d1, std::size_t d2,
                                   Keep keep) {
    if (m.rows() != d1 * d2 || m.cols() != d1 * d2)
        throw ShapeError("partial_trace: matrix dimension is not d1*d2");
    if (keep == Keep::First) {
        ComplexMatrix out(d1, d1);
        for (std::size_t a = 0; a < d1; ++a)
            for (std::size_t b = 0; b < d1; ++b) {
                cx s{0.0, 0.0};
                for (std::size_t k = 0; k < d2; ++k) s += m(a * d2 + k, b * d2 + k);
                out(a, b) = s;
            }
        return out;
    }
    ComplexMatrix out(d2, d2);
    for (std::size_t k = 0; k < d2; ++k)
        for (std::size_t l = 0; l < d2; ++l) {
            cx s{0.0, 0.0};
            for (std::size_t a = 0; a < d1; ++a) s += m(a * d2 + k, a * d2 + l);
            out(k, l) = s;
        }
    return out;
}

inline HermitianMatrix partial_trace(const HermitianMatrix& m, std::size_t d1, std::size_t d2,
                                     Keep keep) {
    return HermitianMatrix::symmetrized(partial_trace(m.mat(), d1, d2, keep));
}

} // namespace qbcast
