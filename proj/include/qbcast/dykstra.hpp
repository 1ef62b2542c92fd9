// dykstra.hpp — feasibility of (product PSD cone) ∩ (affine subspace) by
// Dykstra's alternating projections, with the correction term carried on the
// cone side only (projections onto affine subspaces need none).

#pragma once

#include <qbcast/constraints.hpp>
#include <qbcast/eig.hpp>
#include <qbcast/gram_schmidt.hpp>

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qbcast {

enum class FeasStatus { Feasible, NumericallyInfeasible, Inconclusive };

inline std::string to_string(FeasStatus s) {
    switch (s) {
        case FeasStatus::Feasible: return "Feasible";
        case FeasStatus::NumericallyInfeasible: return "NumericallyInfeasible";
        case FeasStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct SolverConfig {
    double tol_feasible = 1e-7;
    double tol_infeasible_floor = 1e-3;
    int max_iterations = 20000;
    int stall_window = 500;
    std::uint64_t rng_seed = 0; // reserved for perturbed restarts and sampling

    void check() const {
        if (!(tol_feasible < tol_infeasible_floor))
            throw DomainError("SolverConfig: tol_feasible must be below tol_infeasible_floor");
    }
};

struct FeasibilityVerdict {
    FeasStatus status = FeasStatus::Inconclusive;
    std::optional<std::vector<HermitianMatrix>> witness; // one matrix per cone block
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    double max_gap_increase = 0.0;  // largest residual uptick observed in the run
    double linear_inconsistency = 0.0; // distance of rhs from the row space image

    const HermitianMatrix& witness_block(std::size_t b = 0) const {
        if (!witness) throw PreconditionError("FeasibilityVerdict: no witness present");
        return (*witness)[b];
    }
};

// Projection onto {x : Ax = b} via a rank-revealing orthonormalization of the
// rows, computed once. Redundant rows are eliminated by the relative cutoff;
// an inconsistent system projects onto the consistent part and reports the
// residual gap.
class AffineProjector {
public:
    AffineProjector(const AffineConstraintSystem& sys,
                    double rel_cutoff = default_tolerances().pinv_cutoff)
        : n_(sys.ambient_dim) {
        if (sys.rows.empty()) {
            x0_.assign(n_, 0.0);
            return;
        }
        std::vector<std::vector<double>> rows;
        std::vector<double> rhs;
        rows.reserve(sys.rows.size());
        rhs.reserve(sys.rows.size());
        for (const auto& r : sys.rows) {
            rows.push_back(r.coeffs);
            rhs.push_back(r.rhs);
        }
        RowBasis rb = pivoted_orthonormalize(std::move(rows), std::move(rhs), rel_cutoff);
        basis_ = std::move(rb.q);
        basis_rhs_ = std::move(rb.c);
        x0_.assign(n_, 0.0);
        for (std::size_t k = 0; k < basis_.size(); ++k)
            for (std::size_t kk = 0; kk < n_; ++kk) x0_[kk] += basis_rhs_[k] * basis_[k][kk];
        // residual of the particular solution against the full row list
        inconsistency_ = max_row_violation(sys, x0_);
    }

    std::size_t ambient_dim() const { return n_; }
    double inconsistency() const { return inconsistency_; }
    const std::vector<double>& particular_solution() const { return x0_; }

    void project_in_place(std::vector<double>& x) const {
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            const auto& u = basis_[k];
            double dot = -basis_rhs_[k];
            for (std::size_t kk = 0; kk < n_; ++kk) dot += u[kk] * x[kk];
            for (std::size_t kk = 0; kk < n_; ++kk) x[kk] -= dot * u[kk];
        }
    }

private:
    std::size_t n_;
    std::vector<std::vector<double>> basis_; // orthonormal row-space vectors
    std::vector<double> basis_rhs_;          // their target coordinates
    std::vector<double> x0_;
    double inconsistency_ = 0.0;
};

namespace detail {

inline void psd_project_blocks(std::vector<double>& x, const ConeBlocks& blocks) {
    std::size_t off = 0;
    for (std::size_t b = 0; b < blocks.dims.size(); ++b) {
        const std::size_t d = blocks.dims[b];
        const std::size_t len = vec_length(d);
        if (d == 1) {
            if (x[off] < 0.0) x[off] = 0.0;
        } else {
            std::vector<double> coords(x.begin() + off, x.begin() + off + len);
            const HermitianMatrix proj = psd_project(devectorize(d, coords));
            const std::vector<double> back = vectorize(proj);
            for (std::size_t k = 0; k < len; ++k) x[off + k] = back[k];
        }
        off += len;
    }
}

inline double euclid_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

inline std::vector<HermitianMatrix> split_blocks(const std::vector<double>& x,
                                                 const ConeBlocks& blocks) {
    std::vector<HermitianMatrix> out;
    out.reserve(blocks.dims.size());
    std::size_t off = 0;
    for (std::size_t b = 0; b < blocks.dims.size(); ++b) {
        const std::size_t d = blocks.dims[b];
        const std::size_t len = vec_length(d);
        out.push_back(devectorize(d, std::vector<double>(x.begin() + off, x.begin() + off + len)));
        off += len;
    }
    return out;
}

} // namespace detail

// Identity blocks scaled so a Choi unknown starts trace preserving and a
// multi-block unknown starts summing to the identity.
inline std::vector<double> scaled_identity_start(const ConeBlocks& blocks) {
    std::vector<double> x;
    x.reserve(blocks.ambient());
    const double inv_blocks = 1.0 / static_cast<double>(blocks.dims.size());
    for (std::size_t b = 0; b < blocks.dims.size(); ++b) {
        const std::size_t d = blocks.dims[b];
        const HermitianMatrix h = inv_blocks * HermitianMatrix::identity(d);
        const auto v = vectorize(h);
        x.insert(x.end(), v.begin(), v.end());
    }
    return x;
}

// Choi-specific start: J = I/(dim_out), which is trace preserving.
inline std::vector<double> choi_identity_start(std::size_t din, std::size_t dout) {
    const HermitianMatrix h =
        (1.0 / static_cast<double>(dout)) * HermitianMatrix::identity(din * dout);
    return vectorize(h);
}

inline FeasibilityVerdict dykstra_solve(const AffineConstraintSystem& sys,
                                        const ConeBlocks& blocks,
                                        const SolverConfig& cfg = SolverConfig{},
                                        std::optional<std::vector<double>> initial = {}) {
    cfg.check();
    if (sys.ambient_dim != blocks.ambient())
        throw ShapeError("dykstra_solve: ambient dimension does not match the blocks");

    const AffineProjector affine(sys);
    FeasibilityVerdict verdict;
    verdict.linear_inconsistency = affine.inconsistency();
    if (affine.inconsistency() > cfg.tol_infeasible_floor) {
        verdict.status = FeasStatus::NumericallyInfeasible;
        verdict.residual = affine.inconsistency();
        return verdict;
    }

    std::vector<double> x = initial ? std::move(*initial) : affine.particular_solution();
    if (x.size() != sys.ambient_dim) throw ShapeError("dykstra_solve: bad initial point");
    affine.project_in_place(x);

    const std::size_t n = sys.ambient_dim;
    std::vector<double> correction(n, 0.0);
    std::vector<double> y(n, 0.0);
    std::deque<double> history;
    double best_residual = std::numeric_limits<double>::infinity();
    std::vector<double> best_x = x;
    double prev_residual = std::numeric_limits<double>::infinity();

    int k = 0;
    for (; k < cfg.max_iterations; ++k) {
        // cone step with correction
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + correction[i];
        detail::psd_project_blocks(y, blocks);
        for (std::size_t i = 0; i < n; ++i) correction[i] = x[i] + correction[i] - y[i];
        // affine step
        x = y;
        affine.project_in_place(x);

        const double residual = detail::euclid_dist(x, y);
        if (residual < best_residual) {
            best_residual = residual;
            best_x = x;
        }
        if (k > 0 && residual > prev_residual)
            verdict.max_gap_increase = std::max(verdict.max_gap_increase, residual - prev_residual);
        prev_residual = residual;

        if (residual <= cfg.tol_feasible) {
            ++k;
            break;
        }
        history.push_back(residual);
        if (static_cast<int>(history.size()) > cfg.stall_window + 1) history.pop_front();
        if (residual >= cfg.tol_infeasible_floor &&
            static_cast<int>(history.size()) > cfg.stall_window) {
            const double old = history.front();
            if (old - residual < 1e-4 * old) {
                verdict.status = FeasStatus::NumericallyInfeasible;
                verdict.residual = residual;
                verdict.iterations = k + 1;
                return verdict;
            }
        }
    }

    verdict.iterations = k;
    verdict.residual = best_residual;
    if (best_residual <= cfg.tol_feasible) {
        // polish: plain alternating projections sharpen both cone and affine
        // margins of the accepted witness
        std::vector<double> px = best_x;
        double pr = best_residual;
        for (int round = 0; round < 200 && pr > 1e-14; ++round) {
            std::vector<double> py = px;
            detail::psd_project_blocks(py, blocks);
            std::vector<double> pz = py;
            affine.project_in_place(pz);
            const double r = detail::euclid_dist(pz, py);
            if (r >= pr) break;
            pr = r;
            px = pz;
        }
        verdict.residual = pr;
        verdict.status = FeasStatus::Feasible;
        verdict.witness = detail::split_blocks(px, blocks);
    } else if (best_residual >= cfg.tol_infeasible_floor) {
        verdict.status = FeasStatus::NumericallyInfeasible;
    } else {
        verdict.status = FeasStatus::Inconclusive;
    }
    return verdict;
}

} // namespace qbcast
