// complex_matrix.hpp — dense complex matrices, row-major, value semantics.

#pragma once

#include <qbcast/errors.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qbcast {

using cx = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cx{0.0, 0.0}) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cx> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (a_.size() != rows_ * cols_)
            throw ShapeError("ComplexMatrix: entry count does not match dimensions");
    }

    // nested initializer list, row by row
    ComplexMatrix(std::initializer_list<std::initializer_list<cx>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw ShapeError("ComplexMatrix: ragged initializer");
            for (const auto& v : r) a_.push_back(v);
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cx>& data() const { return a_; }
    std::vector<cx>& data() { return a_; }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        check_same_shape(o, "operator+=");
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        check_same_shape(o, "operator-=");
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    ComplexMatrix& operator*=(cx s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix l, const ComplexMatrix& r) { return l += r; }
    friend ComplexMatrix operator-(ComplexMatrix l, const ComplexMatrix& r) { return l -= r; }
    friend ComplexMatrix operator*(cx s, ComplexMatrix m) { return m *= s; }
    friend ComplexMatrix operator*(ComplexMatrix m, cx s) { return m *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& l, const ComplexMatrix& r) {
        if (l.cols_ != r.rows_) throw ShapeError("ComplexMatrix: product dimension mismatch");
        ComplexMatrix out(l.rows_, r.cols_);
        for (std::size_t i = 0; i < l.rows_; ++i) {
            for (std::size_t k = 0; k < l.cols_; ++k) {
                const cx lik = l(i, k);
                if (lik == cx{0.0, 0.0}) continue;
                for (std::size_t j = 0; j < r.cols_; ++j) out(i, j) += lik * r(k, j);
            }
        }
        return out;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    ComplexMatrix conjugate() const {
        ComplexMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = std::conj(a_[k]);
        return out;
    }

    cx trace() const {
        if (!square()) throw ShapeError("ComplexMatrix: trace of non-square matrix");
        cx t{0.0, 0.0};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    void check_same_shape(const ComplexMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw ShapeError(std::string("ComplexMatrix: shape mismatch in ") + op);
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cx> a_;
};

// Kronecker product; the first factor is the slow index: (i1*rb + i2, j1*cb + j2).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i1 = 0; i1 < a.rows(); ++i1)
        for (std::size_t j1 = 0; j1 < a.cols(); ++j1) {
            const cx v = a(i1, j1);
            if (v == cx{0.0, 0.0}) continue;
            for (std::size_t i2 = 0; i2 < b.rows(); ++i2)
                for (std::size_t j2 = 0; j2 < b.cols(); ++j2)
                    out(i1 * b.rows() + i2, j1 * b.cols() + j2) = v * b(i2, j2);
        }
    return out;
}

inline ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y) {
    return x * y - y * x;
}

inline double frobenius_distance(const ComplexMatrix& x, const ComplexMatrix& y) {
    return (x - y).frobenius_norm();
}

inline bool approx_equal(const ComplexMatrix& x, const ComplexMatrix& y, double tol) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    return frobenius_distance(x, y) <= tol;
}

// --------------------------- small constructors -----------------------------

inline ComplexMatrix basis_op(std::size_t dim, std::size_t i, std::size_t j) {
    if (i >= dim || j >= dim) throw ShapeError("basis_op: index out of range");
    ComplexMatrix m(dim, dim);
    m(i, j) = 1.0;
    return m;
}

inline ComplexMatrix projector(std::size_t dim, std::size_t i) { return basis_op(dim, i, i); }

// |psi><psi| for an arbitrary (non-normalized) coefficient vector
inline ComplexMatrix outer_projector(const std::vector<cx>& psi) {
    const std::size_t d = psi.size();
    double n2 = 0.0;
    for (const auto& c : psi) n2 += std::norm(c);
    if (n2 <= 0.0) throw DomainError("outer_projector: zero vector");
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = psi[i] * std::conj(psi[j]) / n2;
    return m;
}

inline ComplexMatrix sigma_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix sigma_y() { return {{0.0, cx{0.0, -1.0}}, {cx{0.0, 1.0}, 0.0}}; }
inline ComplexMatrix sigma_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

// (I + r . sigma)/2 for a Bloch vector r
inline ComplexMatrix bloch_state(double rx, double ry, double rz) {
    ComplexMatrix m = ComplexMatrix::identity(2);
    m += rx * sigma_x() + ry * sigma_y() + rz * sigma_z();
    return 0.5 * m;
}

// swap operator on a d (x) d bipartite space
inline ComplexMatrix swap_operator(std::size_t d) {
    ComplexMatrix s(d * d, d * d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) s(a * d + b, b * d + a) = 1.0;
    return s;
}

} // namespace qbcast
