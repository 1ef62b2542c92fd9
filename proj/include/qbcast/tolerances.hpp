// tolerances.hpp — one record holding every numerical tolerance used by the library.
//
// Functions take individual tolerances as defaulted parameters; the values here
// are the single source for those defaults.

#pragma once

namespace qbcast {

struct Tolerances {
    // construction / validation
    double herm = 1e-12;        // Hermiticity check at HermitianMatrix construction
    double psd = 1e-10;         // min eigenvalue floor for states, effects, Choi matrices
    double trace = 1e-10;       // |tr(rho) - 1| for density matrices, POVM completeness
    double tp = 1e-8;           // trace-preservation margin for Choi matrices

    // eigensolver
    int eig_max_sweeps = 100;   // cyclic Jacobi sweep limit
    double eig_off_rel = 1e-12; // off-diagonal convergence threshold, relative to ||h||_F

    // factorization / equivalence
    double rank_cutoff = 1e-9;  // singular-value cutoff relative to the largest
    double equiv = 1e-9;        // ||F(rho) - F(sigma)||_2 threshold for state equivalence

    // structural checks
    double commute = 1e-10;     // max ||[X,Y]||_F for "mutually commuting"
    double pass = 1e-8;         // max statistics deviation for verify_pass
    double cesaro = 1e-8;       // fixed-point projection convergence target
    double fixpoint = 1e-7;     // idempotence / absorption margins of the projection
    double cond_exp = 1e-6;     // multiplicativity margin for conditional expectations
    double range_commute = 1e-8;// commuting-ranges threshold
    double saa = 1e-7;          // frame norm and post-processing margins

    // affine projections
    double pinv_cutoff = 1e-10; // relative singular-value cutoff for row-space factorizations
    double row_merge = 1e-12;   // 1 - cosine similarity below which rows are merged
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

} // namespace qbcast
