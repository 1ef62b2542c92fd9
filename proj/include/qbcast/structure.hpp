// structure.hpp — structural certificates: commutativity tests, the fixed-point
// projection of a channel, conditional-expectation and commuting-range checks,
// norm-one frame extraction with verification, and commuting-surrogate
// extraction.

#pragma once

#include <qbcast/decide.hpp>
#include <qbcast/dykstra.hpp>
#include <qbcast/factorize.hpp>
#include <qbcast/gram_schmidt.hpp>
#include <qbcast/qobjects.hpp>
#include <qbcast/random_gen.hpp>

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qbcast {

// ------------------------------- commutativity -------------------------------

struct CommuteReport {
    bool commuting = true;
    double max_commutator_norm = 0.0;
};

inline CommuteReport mutually_commuting(const std::vector<HermitianMatrix>& lhs,
                                        const std::vector<HermitianMatrix>& rhs,
                                        double tol = default_tolerances().commute) {
    CommuteReport rep;
    for (const auto& x : lhs)
        for (const auto& y : rhs) {
            if (x.dim() != y.dim()) throw ShapeError("mutually_commuting: dimension mismatch");
            rep.max_commutator_norm = std::max(
                rep.max_commutator_norm, commutator(x.mat(), y.mat()).frobenius_norm());
        }
    rep.commuting = rep.max_commutator_norm <= tol;
    return rep;
}

inline std::vector<HermitianMatrix> effects_of(const std::vector<Povm>& meas) {
    std::vector<HermitianMatrix> out;
    for (const auto& p : meas)
        for (const auto& e : p.effects) out.push_back(e);
    return out;
}

inline std::vector<HermitianMatrix> matrices_of(const std::vector<DensityMatrix>& states) {
    std::vector<HermitianMatrix> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.matrix);
    return out;
}

inline CommuteReport mutually_commuting(const std::vector<Povm>& lhs,
                                        const std::vector<Povm>& rhs,
                                        double tol = default_tolerances().commute) {
    return mutually_commuting(effects_of(lhs), effects_of(rhs), tol);
}

// Pairwise-commuting states are simultaneously diagonalizable, hence contained
// in a simplex of jointly distinguishable states.
inline bool states_classical(const std::vector<DensityMatrix>& states,
                             double tol = default_tolerances().commute) {
    if (states.empty()) throw DomainError("states_classical: empty state list");
    const auto mats = matrices_of(states);
    return mutually_commuting(mats, mats, tol).commuting;
}

// --------------------------- fixed-point projection ---------------------------

struct FixedPointProjection {
    ChoiChannel channel;  // the idempotent projection, Schroedinger picture
    ChoiChannel source;   // the channel it was built from
    int iterations_used = 0;
    double convergence_gap = 0.0;
    std::vector<HermitianMatrix> fixed_point_basis; // basis of Fix(source*) = range(channel*)
};

// Averaged-power limit of a square channel. The iterate is M^(2^k) for
// M = (identity + source)/2, a running average of channel powers with the
// same limit as the plain arithmetic means: eigenvalue 1 is fixed while every
// other peripheral eigenvalue of (1+z)/2 has modulus < 1, so the iteration
// reaches the ergodic projection geometrically. The doubling gap
// ||Pi_n - Pi_2n|| is the convergence test.
inline FixedPointProjection cesaro_projection(const ChoiChannel& phi,
                                              double tol = default_tolerances().cesaro,
                                              long max_n = 1 << 16) {
    if (phi.dim_in != phi.dim_out) throw ShapeError("cesaro_projection: channel is not square");
    const std::size_t d = phi.dim_in;
    const RealSuperOp r_phi = channel_real_rep(phi);
    RealSuperOp m = 0.5 * (RealSuperOp::identity(d) + r_phi);

    RealSuperOp p = m;
    long n = 1;
    double gap = 0.0;
    bool converged = false;
    while (true) {
        const RealSuperOp next = p * p;
        gap = next.frobenius_distance_to(p);
        p = next;
        n *= 2;
        if (gap <= tol) {
            converged = true;
            break;
        }
        if (n >= max_n) break;
    }
    if (!converged && gap > 100.0 * tol)
        throw ConvergenceError("cesaro_projection: gap " + std::to_string(gap) +
                               " after n = " + std::to_string(n));
    // extra squarings sharpen the idempotent once the geometric regime is reached
    for (int extra = 0; extra < 12 && gap > 1e-15; ++extra) {
        const RealSuperOp next = p * p;
        const double g = next.frobenius_distance_to(p);
        if (g >= gap) break;
        p = next;
        gap = g;
        n *= 2;
    }

    FixedPointProjection out;
    out.source = phi;
    out.channel = real_rep_to_choi(p);
    out.iterations_used = static_cast<int>(std::min<long>(n, 1L << 30));
    out.convergence_gap = gap;

    // rows of the real form span range(Pi*)
    std::vector<std::vector<double>> rows;
    rows.reserve(p.rows());
    for (std::size_t r = 0; r < p.rows(); ++r)
        rows.emplace_back(p.m.begin() + r * p.cols(), p.m.begin() + (r + 1) * p.cols());
    const RowBasis rb = pivoted_orthonormalize(std::move(rows), 1e-7);
    for (const auto& q : rb.q) out.fixed_point_basis.push_back(devectorize(d, q));
    return out;
}

// contract margins of a fixed-point projection, Frobenius norms on Choi matrices
struct FixedPointMargins {
    double idempotence = 0.0;  // ||Pi . Pi - Pi||
    double absorb_left = 0.0;  // ||Pi . Phi - Pi||
    double absorb_right = 0.0; // ||Phi . Pi - Pi||
    double trace_preservation = 0.0;

    double worst() const {
        return std::max(std::max(idempotence, absorb_left),
                        std::max(absorb_right, trace_preservation));
    }
};

inline FixedPointMargins fixed_point_margins(const FixedPointProjection& fp) {
    FixedPointMargins m;
    const ChoiChannel& pi = fp.channel;
    const ChoiChannel& phi = fp.source;
    m.idempotence = frobenius_distance(compose(pi, pi).choi.mat(), pi.choi.mat());
    m.absorb_left = frobenius_distance(compose(pi, phi).choi.mat(), pi.choi.mat());
    m.absorb_right = frobenius_distance(compose(phi, pi).choi.mat(), pi.choi.mat());
    const HermitianMatrix marg = partial_trace(pi.choi, pi.dim_in, pi.dim_out, Keep::First);
    m.trace_preservation =
        frobenius_distance(marg.mat(), ComplexMatrix::identity(pi.dim_in));
    return m;
}

// --------------------------- conditional expectation --------------------------

namespace detail {

// adjoint action extended to arbitrary complex matrices
inline ComplexMatrix adjoint_apply_complex(const ChoiChannel& c, const ComplexMatrix& m) {
    const HermitianMatrix h1 = HermitianMatrix::symmetrized(0.5 * (m + m.adjoint()));
    const HermitianMatrix h2 =
        HermitianMatrix::symmetrized(cx{0.0, -0.5} * (m - m.adjoint()));
    return adjoint_apply(c, h1).mat() + cx{0.0, 1.0} * adjoint_apply(c, h2).mat();
}

inline std::vector<HermitianMatrix> adjoint_range_basis(const ChoiChannel& c,
                                                        double rel_cutoff = 1e-7) {
    const RealSuperOp r = channel_real_rep(c);
    std::vector<std::vector<double>> rows;
    rows.reserve(r.rows());
    for (std::size_t i = 0; i < r.rows(); ++i)
        rows.emplace_back(r.m.begin() + i * r.cols(), r.m.begin() + (i + 1) * r.cols());
    const RowBasis rb = pivoted_orthonormalize(std::move(rows), rel_cutoff);
    std::vector<HermitianMatrix> basis;
    basis.reserve(rb.q.size());
    for (const auto& q : rb.q) basis.push_back(devectorize(c.dim_in, q));
    return basis;
}

} // namespace detail

struct CondExpReport {
    bool is_conditional_expectation = false;
    double max_violation = 0.0;
};

// Checks that the adjoint of an idempotent channel is multiplicative on its
// range and satisfies the sandwich property on random triples, i.e. that the
// range is an algebra and the adjoint a conditional expectation onto it.
inline CondExpReport is_conditional_expectation(const ChoiChannel& pi,
                                                double tol = default_tolerances().cond_exp,
                                                std::uint64_t seed = 1) {
    if (pi.dim_in != pi.dim_out)
        throw ShapeError("is_conditional_expectation: channel is not square");
    const double idem =
        frobenius_distance(compose(pi, pi).choi.mat(), pi.choi.mat());
    if (idem > 1e-6)
        throw PreconditionError("is_conditional_expectation: channel is not idempotent (gap " +
                                std::to_string(idem) + ")");

    CondExpReport rep;
    const auto range = detail::adjoint_range_basis(pi);
    for (const auto& x : range)
        for (const auto& y : range) {
            const ComplexMatrix prod = x.mat() * y.mat();
            const ComplexMatrix mapped = detail::adjoint_apply_complex(pi, prod);
            rep.max_violation =
                std::max(rep.max_violation, frobenius_distance(mapped, prod));
        }
    Rng rng(seed);
    for (int trial = 0; trial < 10; ++trial) {
        const HermitianMatrix x = random_hermitian(rng, pi.dim_in);
        const HermitianMatrix y = random_hermitian(rng, pi.dim_in);
        const HermitianMatrix z = random_hermitian(rng, pi.dim_in);
        const ComplexMatrix px = detail::adjoint_apply_complex(pi, x.mat());
        const ComplexMatrix py = detail::adjoint_apply_complex(pi, y.mat());
        const ComplexMatrix pz = detail::adjoint_apply_complex(pi, z.mat());
        const ComplexMatrix lhs = detail::adjoint_apply_complex(pi, px * z.mat() * py);
        const ComplexMatrix rhs = px * pz * py;
        rep.max_violation = std::max(rep.max_violation, frobenius_distance(lhs, rhs));
    }
    rep.is_conditional_expectation = rep.max_violation <= tol;
    return rep;
}

inline CommuteReport commuting_ranges(const ChoiChannel& phi, const ChoiChannel& pi,
                                      double tol = default_tolerances().range_commute) {
    if (phi.dim_in != pi.dim_in) throw ShapeError("commuting_ranges: domain mismatch");
    const auto range_phi = detail::adjoint_range_basis(phi);
    const auto range_pi = detail::adjoint_range_basis(pi);
    return mutually_commuting(range_phi, range_pi, tol);
}

// Estimate of the operator-interval norm of the adjoint channel:
// sup { ||Phi*(X)||  :  -I <= X <= I }, sampled over X = 2E - I with random
// effects E plus the interval endpoints. For a channel the adjoint is unital
// and positive, so the estimate should never exceed 1.
inline double adjoint_interval_norm_estimate(const ChoiChannel& c, int n_samples = 50,
                                             std::uint64_t seed = 3) {
    Rng rng(seed);
    double worst = op_norm(adjoint_apply(c, HermitianMatrix::identity(c.dim_out)));
    for (int trial = 0; trial < n_samples; ++trial) {
        // clip a random Hermitian to an effect, then stretch to the interval
        const HermitianMatrix h = random_hermitian(rng, c.dim_out);
        const HermitianMatrix e =
            spectral_map(h, [](double x) { return std::clamp(x, 0.0, 1.0); });
        const HermitianMatrix x =
            2.0 * e - HermitianMatrix::identity(c.dim_out);
        worst = std::max(worst, op_norm(adjoint_apply(c, x)));
    }
    return worst;
}

// ------------------------- norm-one frame certificates ------------------------

struct SaaCertificate {
    Povm frame; // the norm-one measurement G
    // post[m][lambda][i] = p(i | A_m, lambda); each lambda-row sums to 1
    std::vector<std::vector<std::vector<double>>> post;
};

struct SaaExtraction {
    std::optional<SaaCertificate> certificate;
    int failed_step = 0; // 0 when a certificate was produced
    std::string diagnostics;
};

struct SaaVerification {
    bool accepted = false;
    double worst_norm_deviation = 0.0; // max | ||G|| - 1 | over nonzero effects
    double worst_post_residual = 0.0;  // reconstruction + row-sum margins
    double pass_deviation = 0.0;       // frame channel on (S, A, A)
    std::string failure;
};

namespace detail {

// greedy farthest-point simplex vertex recovery in affine coordinates;
// the samples must fill a simplex whose vertices appear among them
struct SimplexVertices {
    bool ok = false;
    std::string why;
    std::vector<std::size_t> indices;
};

inline SimplexVertices recover_simplex_vertices(const std::vector<std::vector<double>>& pts,
                                                std::size_t affine_dim, double merge_tol = 1e-6,
                                                double containment_tol = 1e-6) {
    SimplexVertices out;
    const std::size_t want = affine_dim + 1;
    if (pts.empty()) {
        out.why = "no samples";
        return out;
    }
    const std::size_t r = pts.front().size();
    if (r != affine_dim) {
        out.why = "affine dimension mismatch";
        return out;
    }

    auto dist2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
        return s;
    };

    std::vector<double> centroid(r, 0.0);
    for (const auto& p : pts)
        for (std::size_t k = 0; k < r; ++k) centroid[k] += p[k] / pts.size();

    std::vector<std::size_t> chosen;
    std::vector<std::vector<double>> frame; // orthonormal edge directions
    // first vertex: farthest from the centroid (a hull vertex)
    std::size_t first = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d2 = dist2(pts[i], centroid);
        if (d2 > best) {
            best = d2;
            first = i;
        }
    }
    chosen.push_back(first);

    auto hull_residual = [&](const std::vector<double>& p) {
        std::vector<double> v(r);
        for (std::size_t k = 0; k < r; ++k) v[k] = p[k] - pts[chosen[0]][k];
        for (const auto& f : frame) {
            double alpha = 0.0;
            for (std::size_t k = 0; k < r; ++k) alpha += v[k] * f[k];
            for (std::size_t k = 0; k < r; ++k) v[k] -= alpha * f[k];
        }
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };

    while (chosen.size() < want) {
        std::size_t pick = pts.size();
        double best_res = merge_tol;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double res = hull_residual(pts[i]);
            if (res > best_res) {
                best_res = res;
                pick = i;
            }
        }
        if (pick == pts.size()) {
            out.why = "fewer affinely independent extreme points than expected";
            return out;
        }
        // extend the orthonormal edge frame
        std::vector<double> v(r);
        for (std::size_t k = 0; k < r; ++k) v[k] = pts[pick][k] - pts[chosen[0]][k];
        for (const auto& f : frame) {
            double alpha = 0.0;
            for (std::size_t k = 0; k < r; ++k) alpha += v[k] * f[k];
            for (std::size_t k = 0; k < r; ++k) v[k] -= alpha * f[k];
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (double& x : v) x /= nrm;
        frame.push_back(std::move(v));
        chosen.push_back(pick);
    }

    // containment: all samples must have nonnegative barycentric coordinates
    if (affine_dim > 0) {
        std::vector<std::vector<double>> edge(affine_dim, std::vector<double>(affine_dim));
        for (std::size_t j = 0; j < affine_dim; ++j)
            for (std::size_t k = 0; k < affine_dim; ++k)
                edge[k][j] = pts[chosen[j + 1]][k] - pts[chosen[0]][k];
        for (const auto& p : pts) {
            std::vector<double> rhs(affine_dim);
            for (std::size_t k = 0; k < affine_dim; ++k) rhs[k] = p[k] - pts[chosen[0]][k];
            std::vector<double> w;
            try {
                w = solve_linear_system(edge, rhs);
            } catch (const NumericalError&) {
                out.why = "degenerate vertex configuration";
                return out;
            }
            double w0 = 1.0;
            for (double x : w) w0 -= x;
            double low = w0;
            for (double x : w) low = std::min(low, x);
            if (low < -containment_tol) {
                out.why = "samples fall outside the recovered simplex";
                return out;
            }
        }
    }
    out.ok = true;
    out.indices = std::move(chosen);
    return out;
}

inline Scenario full_space_scenario(std::size_t d, const std::vector<Povm>& meas) {
    Scenario s;
    s.dim = d;
    s.test_states = spanning_states(d);
    s.test_meas_a = meas;
    s.test_meas_b = meas;
    return s;
}

// range(Pi) basis (Schroedinger picture): column space of the real form
inline std::vector<HermitianMatrix> image_basis(const ChoiChannel& pi, double rel_cutoff = 1e-7) {
    const RealSuperOp r = channel_real_rep(pi);
    std::vector<std::vector<double>> cols(r.cols(), std::vector<double>(r.rows()));
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j) cols[j][i] = r.at(i, j);
    const RowBasis rb = pivoted_orthonormalize(std::move(cols), rel_cutoff);
    std::vector<HermitianMatrix> basis;
    for (const auto& q : rb.q) basis.push_back(devectorize(pi.dim_out, q));
    return basis;
}

} // namespace detail

inline SaaVerification verify_saa_certificate(const std::vector<Povm>& meas,
                                              const SaaCertificate& cert,
                                              double tol = default_tolerances().saa);

// Constructive frame extraction from a channel that passes (S, A, A):
// symmetrize, take the output marginal, project onto its fixed points, sample
// the image simplex, recover its vertices, solve for the dual frame inside
// Fix(Phi*), and post-process every tested measurement from it. The result is
// verified before it is returned; failures return diagnostics instead.
inline SaaExtraction extract_saa_frame(const ChoiChannel& lambda, const std::vector<Povm>& meas,
                                       std::size_t n_samples = 2000, std::uint64_t seed = 7,
                                       const SolverConfig& post_cfg = SolverConfig{}) {
    SaaExtraction out;
    auto fail = [&out](int step, std::string why) -> SaaExtraction& {
        out.failed_step = step;
        out.diagnostics = std::move(why);
        return out;
    };

    const std::size_t d = lambda.dim_in;
    if (lambda.dim_out != d * d) {
        fail(1, "channel does not map d to d*d");
        return out;
    }
    // step 1: the channel must pass the test it certifies
    const Scenario scen = detail::full_space_scenario(d, meas);
    const PassReport pass = verify_pass(lambda, scen);
    if (!pass.passed) {
        fail(1, "channel does not pass the broadcasting test (deviation " +
                    std::to_string(pass.max_deviation()) + ")");
        return out;
    }

    // steps 2-3: symmetrize and take the output marginal
    const ChoiChannel sym = swap_symmetrize(lambda);
    const ChoiChannel phi = marginal_channel(sym, d, d, Keep::First);

    // step 4: fixed-point projection
    FixedPointProjection fp;
    try {
        fp = cesaro_projection(phi);
    } catch (const ConvergenceError& e) {
        fail(4, e.what());
        return out;
    }
    const std::vector<HermitianMatrix> fix_basis = fp.fixed_point_basis; // Fix(Phi*)
    const std::vector<HermitianMatrix> img_basis = detail::image_basis(fp.channel);
    const std::size_t k = img_basis.size();
    if (k == 0 || fix_basis.size() != k) {
        fail(4, "fixed-point rank mismatch");
        return out;
    }

    // step 5: sample the image of the projection
    std::vector<DensityMatrix> inputs = spanning_states(d);
    auto add_eigenvector_states = [&](const std::vector<HermitianMatrix>& basis) {
        for (const auto& w : basis) {
            const EigResult e = herm_eig(w);
            for (std::size_t c = 0; c < d; ++c) {
                std::vector<cx> psi(d);
                for (std::size_t rr = 0; rr < d; ++rr) psi[rr] = e.eigenvectors(rr, c);
                inputs.push_back(pure_state(psi));
            }
        }
    };
    add_eigenvector_states(img_basis);
    add_eigenvector_states(fix_basis);
    Rng rng(seed);
    for (std::size_t i = 0; i < n_samples; ++i) inputs.push_back(random_pure_state(rng, d));

    const RealSuperOp pi_rep = channel_real_rep(fp.channel);
    std::vector<std::vector<double>> coords; // coordinates in the image basis
    coords.reserve(inputs.size());
    std::vector<std::vector<double>> img_vecs;
    for (const auto& w : img_basis) img_vecs.push_back(vectorize(w));
    for (const auto& rho : inputs) {
        const std::vector<double> y = pi_rep.apply(vectorize(rho.matrix));
        std::vector<double> c(k, 0.0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t t = 0; t < y.size(); ++t) c[a] += img_vecs[a][t] * y[t];
        coords.push_back(std::move(c));
    }

    // affine coordinates: center and reduce to the simplex hyperplane
    std::vector<double> mean(k, 0.0);
    for (const auto& c : coords)
        for (std::size_t a = 0; a < k; ++a) mean[a] += c[a] / coords.size();
    std::vector<std::vector<double>> centered = coords;
    for (auto& c : centered)
        for (std::size_t a = 0; a < k; ++a) c[a] -= mean[a];
    const RowBasis affine = pivoted_orthonormalize(centered, 1e-6);
    if (affine.q.size() + 1 != k) {
        fail(5, "affine dimension " + std::to_string(affine.q.size()) +
                    " does not match fixed-point rank " + std::to_string(k));
        return out;
    }
    const std::size_t adim = affine.q.size();
    std::vector<std::vector<double>> pts;
    pts.reserve(coords.size());
    for (const auto& c : centered) {
        std::vector<double> y(adim, 0.0);
        for (std::size_t j = 0; j < adim; ++j)
            for (std::size_t a = 0; a < k; ++a) y[j] += affine.q[j][a] * c[a];
        pts.push_back(std::move(y));
    }

    // step 6: simplex vertices and the dual frame in Fix(Phi*)
    const detail::SimplexVertices sv = detail::recover_simplex_vertices(pts, adim);
    if (!sv.ok) {
        fail(6, sv.why);
        return out;
    }
    std::vector<HermitianMatrix> vertex_states;
    for (const std::size_t idx : sv.indices) {
        std::vector<double> full(vec_length(d), 0.0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t t = 0; t < full.size(); ++t)
                full[t] += coords[idx][a] * img_vecs[a][t];
        vertex_states.push_back(devectorize(d, full));
    }

    // tr(rho_mu G_lambda) = delta, G_lambda expanded in the Fix(Phi*) basis
    std::vector<std::vector<double>> t(k, std::vector<double>(k));
    for (std::size_t mu = 0; mu < k; ++mu)
        for (std::size_t a = 0; a < k; ++a) t[mu][a] = herm_inner(vertex_states[mu], fix_basis[a]);
    std::vector<HermitianMatrix> frame_effects;
    HermitianMatrix frame_sum = HermitianMatrix::zero(d);
    for (std::size_t lam = 0; lam < k; ++lam) {
        std::vector<double> rhs(k, 0.0);
        rhs[lam] = 1.0;
        std::vector<double> g;
        try {
            g = solve_linear_system(t, rhs);
        } catch (const NumericalError&) {
            fail(6, "vertex states are not distinguishable (singular dual system)");
            return out;
        }
        HermitianMatrix eff = HermitianMatrix::zero(d);
        for (std::size_t a = 0; a < k; ++a) eff = eff + g[a] * fix_basis[a];
        frame_sum = frame_sum + eff;
        frame_effects.push_back(std::move(eff));
    }
    if (frobenius_distance(frame_sum.mat(), ComplexMatrix::identity(d)) > 1e-6) {
        fail(6, "dual frame does not resolve the identity");
        return out;
    }
    for (const auto& g : frame_effects)
        if (min_eigenvalue(g) < -1e-7) {
            fail(6, "dual frame has a non-positive effect");
            return out;
        }

    // step 7: post-process every tested measurement from the frame
    SaaCertificate cert;
    cert.frame = Povm(frame_effects);
    for (const auto& a : meas) {
        const std::size_t n_out = a.n_outcomes();
        ConeBlocks blocks{std::vector<std::size_t>(n_out * k, 1)};
        AffineConstraintSystem sys;
        sys.ambient_dim = blocks.ambient();
        // reconstruction rows: sum_lambda p(i,lambda) G_lambda = A_i, coordinatewise
        std::vector<std::vector<double>> gvec;
        for (const auto& g : frame_effects) gvec.push_back(vectorize(g));
        for (std::size_t i = 0; i < n_out; ++i) {
            const std::vector<double> avec = vectorize(a.effects[i]);
            for (std::size_t alpha = 0; alpha < vec_length(d); ++alpha) {
                ConstraintRow row;
                row.coeffs.assign(sys.ambient_dim, 0.0);
                for (std::size_t lam = 0; lam < k; ++lam)
                    row.coeffs[i * k + lam] = gvec[lam][alpha];
                row.rhs = avec[alpha];
                row.description = "reconstruction";
                sys.rows.push_back(std::move(row));
            }
        }
        // stochasticity rows: sum_i p(i,lambda) = 1
        for (std::size_t lam = 0; lam < k; ++lam) {
            ConstraintRow row;
            row.coeffs.assign(sys.ambient_dim, 0.0);
            for (std::size_t i = 0; i < n_out; ++i) row.coeffs[i * k + lam] = 1.0;
            row.rhs = 1.0;
            row.description = "stochasticity";
            sys.rows.push_back(std::move(row));
        }
        detail::deduplicate_rows(sys);
        const FeasibilityVerdict v = dykstra_solve(sys, blocks, post_cfg);
        if (v.status != FeasStatus::Feasible) {
            fail(7, "no nonnegative post-processing found for a tested measurement");
            return out;
        }
        std::vector<std::vector<double>> p(k, std::vector<double>(n_out, 0.0));
        for (std::size_t i = 0; i < n_out; ++i)
            for (std::size_t lam = 0; lam < k; ++lam) {
                double val = (*v.witness)[i * k + lam](0, 0).real();
                p[lam][i] = std::max(0.0, val);
            }
        for (auto& row : p) {
            double s = 0.0;
            for (double x : row) s += x;
            if (s > 0.0)
                for (double& x : row) x /= s;
        }
        cert.post.push_back(std::move(p));
    }

    // final gate: the certificate must verify, otherwise report the failure
    const SaaVerification check = verify_saa_certificate(meas, cert);
    if (!check.accepted) {
        fail(9, "certificate rejected: " + check.failure);
        return out;
    }
    out.certificate = std::move(cert);
    return out;
}

inline SaaVerification verify_saa_certificate(const std::vector<Povm>& meas,
                                              const SaaCertificate& cert, double tol) {
    SaaVerification v;
    const std::size_t d = cert.frame.dim;
    const std::size_t k = cert.frame.n_outcomes();

    // frame is a measurement
    HermitianMatrix sum = HermitianMatrix::zero(d);
    for (const auto& g : cert.frame.effects) {
        if (min_eigenvalue(g) < -tol) {
            v.failure = "frame effect not positive";
            return v;
        }
        sum = sum + g;
    }
    if (frobenius_distance(sum.mat(), ComplexMatrix::identity(d)) > tol) {
        v.failure = "frame does not sum to the identity";
        return v;
    }

    // every nonzero effect has operator norm 1
    std::vector<std::optional<std::vector<cx>>> peak_vectors(k);
    for (std::size_t lam = 0; lam < k; ++lam) {
        const HermitianMatrix& g = cert.frame.effects[lam];
        const EigResult e = herm_eig(g);
        const double norm = std::max(std::abs(e.eigenvalues.front()), e.eigenvalues.back());
        if (norm <= tol) continue; // a zero effect
        v.worst_norm_deviation = std::max(v.worst_norm_deviation, std::abs(norm - 1.0));
        std::vector<cx> psi(d);
        for (std::size_t r = 0; r < d; ++r) psi[r] = e.eigenvectors(r, d - 1);
        peak_vectors[lam] = std::move(psi);
    }
    if (v.worst_norm_deviation > tol) {
        v.failure = "a nonzero frame effect does not have operator norm 1";
        return v;
    }

    // post-processings reproduce the tested measurements
    if (cert.post.size() != meas.size()) {
        v.failure = "post-processing count mismatch";
        return v;
    }
    for (std::size_t m = 0; m < meas.size(); ++m) {
        const auto& p = cert.post[m];
        if (p.size() != k) {
            v.failure = "post-processing row count mismatch";
            return v;
        }
        for (std::size_t lam = 0; lam < k; ++lam) {
            double s = 0.0;
            for (double x : p[lam]) {
                if (x < -1e-9) {
                    v.failure = "negative post-processing probability";
                    return v;
                }
                s += x;
            }
            v.worst_post_residual = std::max(v.worst_post_residual, std::abs(s - 1.0));
        }
        for (std::size_t i = 0; i < meas[m].n_outcomes(); ++i) {
            HermitianMatrix recon = HermitianMatrix::zero(d);
            for (std::size_t lam = 0; lam < k; ++lam)
                recon = recon + p[lam][i] * cert.frame.effects[lam];
            v.worst_post_residual =
                std::max(v.worst_post_residual,
                         frobenius_distance(recon.mat(), meas[m].effects[i].mat()));
        }
    }
    if (v.worst_post_residual > tol) {
        v.failure = "post-processing does not reproduce the tested measurements";
        return v;
    }

    // the frame's copy channel passes the test
    std::vector<DensityMatrix> preps;
    for (std::size_t lam = 0; lam < k; ++lam) {
        std::vector<cx> doubled(d * d, cx{0.0, 0.0});
        if (peak_vectors[lam]) {
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t t = 0; t < d; ++t)
                    doubled[r * d + t] = (*peak_vectors[lam])[r] * (*peak_vectors[lam])[t];
        } else {
            doubled[0] = 1.0; // zero effect: the preparation never fires
        }
        preps.push_back(pure_state(doubled));
    }
    const ChoiChannel frame_channel = measure_prepare_channel(cert.frame, preps);
    const PassReport pass =
        verify_pass(frame_channel, detail::full_space_scenario(d, meas), 10.0 * tol);
    v.pass_deviation = pass.max_deviation();
    if (!pass.passed) {
        v.failure = "frame channel does not pass the broadcasting test";
        return v;
    }
    v.accepted = true;
    return v;
}

// ------------------------- commuting surrogate (adjoint) ----------------------

struct TaoSurrogateReport {
    double povm_margin = 0.0;    // worst PSD / completeness violation
    double max_commutator = 0.0; // over all test states
    double max_stats_deviation = 0.0;
    bool valid(double tol = default_tolerances().saa) const {
        return povm_margin <= tol && max_commutator <= tol && max_stats_deviation <= tol;
    }
};

// A~_i = Pi2*(Phi1*(A_i)) after restricting both channels to the support of
// the test states and replacing the second by its fixed-point idempotent; the
// complement of the support is distributed uniformly so the result is a POVM
// on the full space.
inline std::pair<Povm, TaoSurrogateReport> extract_tao_surrogate(
    const ChoiChannel& phi1, const ChoiChannel& phi2, const Povm& a,
    const std::vector<DensityMatrix>& test_states) {
    if (test_states.empty()) throw DomainError("extract_tao_surrogate: empty state list");
    const std::size_t d = phi2.dim_in;
    if (phi2.dim_out != d || phi1.dim_in != d)
        throw ShapeError("extract_tao_surrogate: channels must share the input space");
    if (a.dim != phi1.dim_out)
        throw ShapeError("extract_tao_surrogate: measurement acts on the wrong space");

    // support of the average test state (it has maximal support by convexity)
    HermitianMatrix sigma = HermitianMatrix::zero(d);
    for (const auto& rho : test_states) sigma = sigma + rho.matrix;
    sigma = (1.0 / static_cast<double>(test_states.size())) * sigma;
    const EigResult es = herm_eig(sigma);
    const double top = std::max(1e-300, es.eigenvalues.back());
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < d; ++i)
        if (es.eigenvalues[i] > 1e-10 * top) support.push_back(i);
    const std::size_t r = support.size();

    ComplexMatrix isometry(d, r); // columns: support eigenvectors
    for (std::size_t c = 0; c < r; ++c)
        for (std::size_t row = 0; row < d; ++row)
            isometry(row, c) = es.eigenvectors(row, support[c]);
    const ComplexMatrix isometry_adj = isometry.adjoint();

    auto compress_in = [&](const ChoiChannel& c, std::size_t dout) {
        return choi_from_map(r, dout, [&](const ComplexMatrix& m) {
            return apply_channel_complex(c, isometry * m * isometry_adj);
        });
    };
    // Phi2 restricted to the support block on both sides
    const ChoiChannel phi2_hat = choi_from_map(r, r, [&](const ComplexMatrix& m) {
        return isometry_adj * apply_channel_complex(phi2, isometry * m * isometry_adj) * isometry;
    });
    {
        const HermitianMatrix marg =
            partial_trace(phi2_hat.choi, r, r, Keep::First);
        if (op_norm(marg - HermitianMatrix::identity(r)) > 1e-8)
            throw PreconditionError(
                "extract_tao_surrogate: the second channel does not preserve the support of the "
                "test states");
    }
    const ChoiChannel phi1_hat = compress_in(phi1, phi1.dim_out);

    FixedPointProjection fp = cesaro_projection(phi2_hat);
    const HermitianMatrix fixed_state =
        apply_channel(fp.channel, maximally_mixed(r).matrix);
    if (min_eigenvalue(fixed_state) < 1e-8 * std::max(1.0, op_norm(fixed_state)))
        throw PreconditionError(
            "extract_tao_surrogate: fixed-point idempotent has no full-rank fixed state on the "
            "support");

    // surrogate effects, embedded back with a uniform share of the complement
    const double share = 1.0 / static_cast<double>(a.n_outcomes());
    ComplexMatrix complement = ComplexMatrix::identity(d);
    complement -= isometry * isometry_adj;
    std::vector<HermitianMatrix> eff;
    for (const auto& ai : a.effects) {
        const HermitianMatrix pulled = adjoint_apply(phi1_hat, ai);
        const HermitianMatrix z = adjoint_apply(fp.channel, pulled);
        ComplexMatrix full = isometry * z.mat() * isometry_adj;
        full += cx{share, 0.0} * complement;
        eff.push_back(HermitianMatrix::symmetrized(full));
    }
    Povm surrogate(std::move(eff));

    TaoSurrogateReport rep;
    HermitianMatrix sum = HermitianMatrix::zero(d);
    for (const auto& e : surrogate.effects) {
        rep.povm_margin = std::max(rep.povm_margin, std::max(0.0, -min_eigenvalue(e)));
        sum = sum + e;
    }
    rep.povm_margin = std::max(
        rep.povm_margin, frobenius_distance(sum.mat(), ComplexMatrix::identity(d)));
    for (const auto& rho : test_states)
        for (std::size_t i = 0; i < surrogate.n_outcomes(); ++i) {
            rep.max_commutator =
                std::max(rep.max_commutator,
                         commutator(surrogate.effects[i].mat(), rho.matrix.mat())
                             .frobenius_norm());
            rep.max_stats_deviation =
                std::max(rep.max_stats_deviation,
                         std::abs(herm_inner(surrogate.effects[i], rho.matrix) -
                                  herm_inner(a.effects[i], rho.matrix)));
        }
    return {std::move(surrogate), rep};
}

} // namespace qbcast
