// eig.hpp — Hermitian eigendecomposition by cyclic Jacobi rotations, and the
// spectral operations built on it (PSD projection, operator norms, matrix
// square roots).

#pragma once

#include <qbcast/hermitian.hpp>
#include <qbcast/tolerances.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qbcast {

struct EigResult {
    std::vector<double> eigenvalues; // ascending
    ComplexMatrix eigenvectors;      // orthonormal columns, h = V diag V†
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += std::norm(a(i, j));
    return std::sqrt(2.0 * s);
}

} // namespace detail

// Cyclic Jacobi sweeps. Each rotation U = [[c, -s e^{i phi}], [s e^{-i phi}, c]]
// annihilates one off-diagonal pair; A <- U† A U, V <- V U.
inline EigResult herm_eig(const HermitianMatrix& h,
                          int max_sweeps = default_tolerances().eig_max_sweeps,
                          double off_rel = default_tolerances().eig_off_rel) {
    const std::size_t n = h.dim();
    ComplexMatrix a = h.mat();
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double norm = a.frobenius_norm();
    const double threshold = off_rel * norm;

    if (n > 1 && norm > 0.0) {
        bool converged = detail::off_diagonal_norm(a) <= threshold;
        int sweep = 0;
        while (!converged) {
            if (sweep++ >= max_sweeps)
                throw NumericalError("herm_eig: no convergence after sweep limit");
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    const cx apq = a(p, q);
                    const double absq = std::abs(apq);
                    if (absq == 0.0) continue;
                    const cx phase = apq / absq; // e^{i phi}
                    const double app = a(p, p).real();
                    const double aqq = a(q, q).real();
                    const double theta = (aqq - app) / (2.0 * absq);
                    // smaller root of t^2 - 2 theta t - 1 = 0
                    const double t = (theta >= 0.0)
                                         ? -1.0 / (theta + std::sqrt(theta * theta + 1.0))
                                         : 1.0 / (-theta + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;
                    const cx sp = s * phase;             // s e^{i phi}
                    const cx spc = s * std::conj(phase); // s e^{-i phi}

                    for (std::size_t r = 0; r < n; ++r) { // A <- A U
                        const cx ap = a(r, p), aq = a(r, q);
                        a(r, p) = c * ap + spc * aq;
                        a(r, q) = -sp * ap + c * aq;
                    }
                    for (std::size_t r = 0; r < n; ++r) { // A <- U† A
                        const cx ap = a(p, r), aq = a(q, r);
                        a(p, r) = c * ap + sp * aq;
                        a(q, r) = -spc * ap + c * aq;
                    }
                    for (std::size_t r = 0; r < n; ++r) { // V <- V U
                        const cx vp = v(r, p), vq = v(r, q);
                        v(r, p) = c * vp + spc * vq;
                        v(r, q) = -sp * vp + c * vq;
                    }
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    a(p, p) = cx{a(p, p).real(), 0.0};
                    a(q, q) = cx{a(q, q).real(), 0.0};
                }
            }
            converged = detail::off_diagonal_norm(a) <= threshold;
        }
    }

    EigResult res;
    res.eigenvalues.resize(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    res.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        res.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) res.eigenvectors(r, k) = v(r, order[k]);
    }
    return res;
}

// V f(diag) V† for a spectral function f applied entrywise to the eigenvalues.
template <typename F>
inline HermitianMatrix spectral_map(const HermitianMatrix& h, F&& f) {
    const EigResult e = herm_eig(h);
    const std::size_t n = h.dim();
    ComplexMatrix scaled = e.eigenvectors;
    for (std::size_t k = 0; k < n; ++k) {
        const double fv = f(e.eigenvalues[k]);
        for (std::size_t r = 0; r < n; ++r) scaled(r, k) *= fv;
    }
    return HermitianMatrix::symmetrized(scaled * e.eigenvectors.adjoint());
}

// Frobenius-nearest PSD matrix: clip the spectrum at zero.
inline HermitianMatrix psd_project(const HermitianMatrix& h) {
    return spectral_map(h, [](double x) { return x > 0.0 ? x : 0.0; });
}

inline double min_eigenvalue(const HermitianMatrix& h) {
    if (h.dim() == 0) return 0.0;
    return herm_eig(h).eigenvalues.front();
}

// operator (spectral) norm of a Hermitian matrix
inline double op_norm(const HermitianMatrix& h) {
    if (h.dim() == 0) return 0.0;
    const EigResult e = herm_eig(h);
    return std::max(std::abs(e.eigenvalues.front()), std::abs(e.eigenvalues.back()));
}

inline HermitianMatrix sqrt_psd(const HermitianMatrix& h) {
    return spectral_map(h, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

// pseudo-inverse square root; eigenvalues below cutoff (relative to the
// largest) are treated as zero
inline HermitianMatrix inv_sqrt_psd(const HermitianMatrix& h, double rel_cutoff = 1e-12) {
    const double top = op_norm(h);
    const double cut = rel_cutoff * std::max(top, 1e-300);
    return spectral_map(h, [cut](double x) { return x > cut ? 1.0 / std::sqrt(x) : 0.0; });
}

// ----------------------- real symmetric convenience --------------------------
// Used by the affine-projection machinery; reuses the complex path.

struct SymEigResult {
    std::vector<double> eigenvalues;        // ascending
    std::vector<std::vector<double>> eigenvectors; // eigenvectors[k] is the k-th vector
};

inline SymEigResult sym_eig(const std::vector<double>& a_row_major, std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = cx{a_row_major[i * n + j], 0.0};
    const EigResult e = herm_eig(HermitianMatrix::symmetrized(m));
    SymEigResult out;
    out.eigenvalues = e.eigenvalues;
    out.eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors[k][r] = e.eigenvectors(r, k).real();
    return out;
}

} // namespace qbcast
