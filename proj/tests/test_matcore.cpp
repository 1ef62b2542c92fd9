#include <catch2/catch_amalgamated.hpp>

#include <qbcast/eig.hpp>
#include <qbcast/hermitian.hpp>
#include <qbcast/random_gen.hpp>

#include <cmath>

using namespace qbcast;

TEST_CASE("herm_eig: identity and Pauli spectra") {
    SECTION("identity, dim 3") {
        const auto e = herm_eig(HermitianMatrix::identity(3));
        for (double v : e.eigenvalues) REQUIRE(v == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("sigma_x has spectrum {-1, 1}") {
        const auto e = herm_eig(HermitianMatrix(sigma_x()));
        REQUIRE(e.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-12));
        REQUIRE(e.eigenvalues[1] == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("herm_eig: residuals and orthonormality on random 8x8 input") {
    Rng rng(42);
    const HermitianMatrix h = random_hermitian(rng, 8);
    const auto e = herm_eig(h);
    const double scale = h.frobenius_norm();

    // eigenpair residuals ||h v - lambda v||
    for (std::size_t k = 0; k < 8; ++k) {
        ComplexMatrix v(8, 1);
        for (std::size_t r = 0; r < 8; ++r) v(r, 0) = e.eigenvectors(r, k);
        const ComplexMatrix resid = h.mat() * v - e.eigenvalues[k] * v;
        REQUIRE(resid.frobenius_norm() <= 1e-9 * (1.0 + scale));
    }

    // V† V = I
    const ComplexMatrix gram = e.eigenvectors.adjoint() * e.eigenvectors;
    REQUIRE(frobenius_distance(gram, ComplexMatrix::identity(8)) <= 1e-10);

    // reconstruction
    ComplexMatrix scaled = e.eigenvectors;
    for (std::size_t k = 0; k < 8; ++k)
        for (std::size_t r = 0; r < 8; ++r) scaled(r, k) *= e.eigenvalues[k];
    const ComplexMatrix recon = scaled * e.eigenvectors.adjoint();
    REQUIRE(frobenius_distance(recon, h.mat()) <= 1e-10 * (1.0 + scale));

    // ascending order
    for (std::size_t k = 1; k < 8; ++k) REQUIRE(e.eigenvalues[k - 1] <= e.eigenvalues[k]);
}

TEST_CASE("herm_eig: 2x2 eigenvalues match the characteristic polynomial") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianMatrix h = random_hermitian(rng, 2);
        const double tr = h.trace_real();
        const double det = (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)).real();
        const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
        const double lo = 0.5 * (tr - disc), hi = 0.5 * (tr + disc);
        const auto e = herm_eig(h);
        REQUIRE(e.eigenvalues[0] == Catch::Approx(lo).margin(1e-10 * (1 + std::abs(lo))));
        REQUIRE(e.eigenvalues[1] == Catch::Approx(hi).margin(1e-10 * (1 + std::abs(hi))));
    }
}

TEST_CASE("psd_project") {
    SECTION("PSD input is a fixed point") {
        Rng rng(3);
        const HermitianMatrix rho = random_density(rng, 4).matrix;
        REQUIRE(frobenius_distance(psd_project(rho).mat(), rho.mat()) <= 1e-10);
    }
    SECTION("diag(2,-3) -> diag(2,0)") {
        const HermitianMatrix h({{2.0, 0.0}, {0.0, -3.0}});
        const HermitianMatrix p = psd_project(h);
        REQUIRE(p(0, 0).real() == Catch::Approx(2.0).margin(1e-12));
        REQUIRE(p(1, 1).real() == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(std::abs(p(0, 1)) <= 1e-12);
    }
    SECTION("sigma_z -> (I + sigma_z)/2") {
        const HermitianMatrix p = psd_project(HermitianMatrix(sigma_z()));
        const ComplexMatrix expect = 0.5 * (ComplexMatrix::identity(2) + sigma_z());
        REQUIRE(frobenius_distance(p.mat(), expect) <= 1e-12);
    }
    SECTION("result is the Frobenius-nearest PSD matrix") {
        Rng rng(11);
        const HermitianMatrix h = random_hermitian(rng, 3);
        const HermitianMatrix p = psd_project(h);
        REQUIRE(min_eigenvalue(p) >= -1e-10);
        const double dist = frobenius_distance(p.mat(), h.mat());
        for (int trial = 0; trial < 100; ++trial) {
            const HermitianMatrix q = random_psd(rng, 3);
            REQUIRE(dist <= frobenius_distance(q.mat(), h.mat()) + 1e-12);
        }
    }
}

TEST_CASE("kron") {
    SECTION("I2 (x) I2 = I4") {
        const auto k = kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2));
        REQUIRE(frobenius_distance(k, ComplexMatrix::identity(4)) == 0.0);
    }
    SECTION("sigma_x (x) sigma_x maps |00> to |11>") {
        const auto k = kron(sigma_x(), sigma_x());
        ComplexMatrix v00(4, 1);
        v00(0, 0) = 1.0;
        const auto out = k * v00;
        REQUIRE(std::abs(out(3, 0) - cx{1.0, 0.0}) <= 1e-15);
        REQUIRE(std::abs(out(0, 0)) + std::abs(out(1, 0)) + std::abs(out(2, 0)) <= 1e-15);
    }
    SECTION("trace is multiplicative") {
        Rng rng(5);
        for (int trial = 0; trial < 5; ++trial) {
            const ComplexMatrix a = random_hermitian(rng, 3).mat();
            const ComplexMatrix b = random_hermitian(rng, 3).mat();
            const cx lhs = kron(a, b).trace();
            const cx rhs = a.trace() * b.trace();
            REQUIRE(std::abs(lhs - rhs) <= 1e-12);
        }
    }
}

namespace {
// index-summation oracle for the partial trace
ComplexMatrix ptrace_oracle(const ComplexMatrix& m, std::size_t d1, std::size_t d2, Keep keep) {
    if (keep == Keep::First) {
        ComplexMatrix out(d1, d1);
        for (std::size_t a = 0; a < d1; ++a)
            for (std::size_t b = 0; b < d1; ++b)
                for (std::size_t k = 0; k < d2; ++k) out(a, b) += m(a * d2 + k, b * d2 + k);
        return out;
    }
    ComplexMatrix out(d2, d2);
    for (std::size_t k = 0; k < d2; ++k)
        for (std::size_t l = 0; l < d2; ++l)
            for (std::size_t a = 0; a < d1; ++a) out(k, l) += m(a * d2 + k, a * d2 + l);
    return out;
}
} // namespace

TEST_CASE("partial_trace") {
    Rng rng(9);
    SECTION("product input factorizes") {
        const HermitianMatrix rho = random_density(rng, 2).matrix;
        const HermitianMatrix sig = random_psd(rng, 3);
        const HermitianMatrix prod = HermitianMatrix::symmetrized(kron(rho.mat(), sig.mat()));
        const auto left = partial_trace(prod, 2, 3, Keep::First);
        REQUIRE(frobenius_distance(left.mat(), sig.trace_real() * rho.mat()) <= 1e-12);
        const auto right = partial_trace(prod, 2, 3, Keep::Second);
        REQUIRE(frobenius_distance(right.mat(), rho.trace_real() * sig.mat()) <= 1e-12);
    }
    SECTION("maximally entangled state has maximally mixed marginals") {
        ComplexMatrix omega(4, 4);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) omega(i * 2 + i, j * 2 + j) = 0.5;
        const HermitianMatrix w = HermitianMatrix(omega);
        const ComplexMatrix half = 0.5 * ComplexMatrix::identity(2);
        REQUIRE(frobenius_distance(partial_trace(w, 2, 2, Keep::First).mat(), half) <= 1e-14);
        REQUIRE(frobenius_distance(partial_trace(w, 2, 2, Keep::Second).mat(), half) <= 1e-14);
    }
    SECTION("agrees with the index-summation oracle; trace preserved") {
        for (int trial = 0; trial < 5; ++trial) {
            const HermitianMatrix m = random_hermitian(rng, 6);
            for (Keep keep : {Keep::First, Keep::Second}) {
                const auto got = partial_trace(m, 2, 3, keep);
                const auto want = ptrace_oracle(m.mat(), 2, 3, keep);
                REQUIRE(frobenius_distance(got.mat(), want) <= 1e-12);
                REQUIRE(std::abs(got.trace_real() - m.trace_real()) <= 1e-12);
            }
        }
    }
    SECTION("linearity") {
        for (int trial = 0; trial < 5; ++trial) {
            const HermitianMatrix x = random_hermitian(rng, 6);
            const HermitianMatrix y = random_hermitian(rng, 6);
            const double a = 0.7, b = -1.3;
            const auto lhs = partial_trace(a * x + b * y, 2, 3, Keep::First);
            const auto rhs = a * partial_trace(x, 2, 3, Keep::First) +
                             b * partial_trace(y, 2, 3, Keep::First);
            REQUIRE(frobenius_distance(lhs.mat(), rhs.mat()) <= 1e-12);
        }
    }
    SECTION("dimension mismatch throws") {
        REQUIRE_THROWS_AS(partial_trace(HermitianMatrix::identity(5), 2, 3, Keep::First),
                          ShapeError);
    }
}

TEST_CASE("vectorization") {
    Rng rng(13);
    SECTION("round trip is the identity") {
        for (std::size_t d : {2, 3, 5}) {
            const HermitianMatrix h = random_hermitian(rng, d);
            const HermitianMatrix back = devectorize(d, vectorize(h));
            REQUIRE(frobenius_distance(back.mat(), h.mat()) <= 1e-14 * (1 + h.frobenius_norm()));
        }
    }
    SECTION("isometry: Frobenius inner product equals Euclidean product") {
        for (int trial = 0; trial < 10; ++trial) {
            const HermitianMatrix a = random_hermitian(rng, 4);
            const HermitianMatrix b = random_hermitian(rng, 4);
            const auto va = vectorize(a), vb = vectorize(b);
            double dot = 0.0;
            for (std::size_t k = 0; k < va.size(); ++k) dot += va[k] * vb[k];
            REQUIRE(dot == Catch::Approx(herm_inner(a, b)).margin(1e-12 * (1 + std::abs(dot))));
        }
    }
}

TEST_CASE("HermitianMatrix construction") {
    SECTION("non-Hermitian input rejected") {
        ComplexMatrix m(2, 2);
        m(0, 1) = 1.0; // m(1,0) stays 0
        REQUIRE_THROWS_AS(HermitianMatrix(m), DomainError);
    }
    SECTION("stored exactly Hermitian after symmetrization") {
        ComplexMatrix m(2, 2);
        m(0, 1) = cx{0.5, 0.25};
        m(1, 0) = cx{0.5, -0.25 + 1e-14};
        m(0, 0) = cx{1.0, 1e-14};
        const HermitianMatrix h(m);
        REQUIRE(h(0, 1) == std::conj(h(1, 0)));
        REQUIRE(h(0, 0).imag() == 0.0);
    }
}
