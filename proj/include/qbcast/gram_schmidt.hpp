// gram_schmidt.hpp — rank-revealing orthonormalization of real row vectors
// (pivoted modified Gram-Schmidt with reorthogonalization). Works on the
// un-squared rows, so the relative cutoff acts on singular-value scale
// rather than its square.

#pragma once

#include <qbcast/errors.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

namespace qbcast {

struct RowBasis {
    std::vector<std::vector<double>> q; // orthonormal rows spanning the row space
    std::vector<double> c;              // rhs carried through the same eliminations
};

// Orthonormalizes `rows` (optionally carrying one rhs scalar per row through
// the identical operations, so that {x : rows x = rhs} = {x : q x = c}).
// Rows whose residual drops below rel_cutoff times the largest row norm are
// treated as dependent.
inline RowBasis pivoted_orthonormalize(std::vector<std::vector<double>> rows,
                                       std::vector<double> rhs, double rel_cutoff) {
    RowBasis out;
    if (rows.empty()) return out;
    const std::size_t n = rows.front().size();
    const bool with_rhs = !rhs.empty();
    if (with_rhs && rhs.size() != rows.size())
        throw ShapeError("pivoted_orthonormalize: rhs count mismatch");

    std::vector<char> used(rows.size(), 0);
    auto norm_of = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };

    double sigma0 = 0.0;
    for (const auto& r : rows) sigma0 = std::max(sigma0, norm_of(r));
    if (sigma0 <= 0.0) return out;
    const double cutoff = rel_cutoff * sigma0;

    while (true) {
        std::size_t pick = rows.size();
        double best = cutoff;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (used[i]) continue;
            const double nrm = norm_of(rows[i]);
            if (nrm > best) {
                best = nrm;
                pick = i;
            }
        }
        if (pick == rows.size()) break;
        used[pick] = 1;

        std::vector<double> q = rows[pick];
        double c = with_rhs ? rhs[pick] : 0.0;
        // second orthogonalization pass against the accepted basis
        for (std::size_t j = 0; j < out.q.size(); ++j) {
            double alpha = 0.0;
            for (std::size_t k = 0; k < n; ++k) alpha += q[k] * out.q[j][k];
            for (std::size_t k = 0; k < n; ++k) q[k] -= alpha * out.q[j][k];
            c -= alpha * out.c[j];
        }
        const double nrm = norm_of(q);
        if (nrm <= cutoff) continue;
        for (double& v : q) v /= nrm;
        c /= nrm;

        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (used[i]) continue;
            double alpha = 0.0;
            for (std::size_t k = 0; k < n; ++k) alpha += rows[i][k] * q[k];
            for (std::size_t k = 0; k < n; ++k) rows[i][k] -= alpha * q[k];
            if (with_rhs) rhs[i] -= alpha * c;
        }
        out.q.push_back(std::move(q));
        out.c.push_back(c);
    }
    return out;
}

inline RowBasis pivoted_orthonormalize(std::vector<std::vector<double>> rows,
                                       double rel_cutoff) {
    return pivoted_orthonormalize(std::move(rows), std::vector<double>{}, rel_cutoff);
}

// Dense Gaussian elimination with partial pivoting; throws on (near-)singular
// systems. Sized for the small vertex/frame systems, not for bulk numerics.
inline std::vector<double> solve_linear_system(std::vector<std::vector<double>> a,
                                               std::vector<double> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw ShapeError("solve_linear_system: size mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-13)
            throw NumericalError("solve_linear_system: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
        x[r] = s / a[r][r];
    }
    return x;
}

} // namespace qbcast
