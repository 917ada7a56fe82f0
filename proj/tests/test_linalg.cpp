#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"
#include "wdistill/linalg.hpp"

using namespace wdistill;

namespace {

Mat2 random_mat(Rng& rng) {
    Mat2 m;
    for (auto& e : m.e) e = rng.gaussian_complex();
    return m;
}

}  // namespace

TEST_CASE("hermitian eigen decomposition reconstructs and orders") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const Mat2 a = random_mat(rng);
        const Mat2 h = adjoint(a) * a;  // Hermitian PSD
        const HermitianEigen eig = hermitian_eigen(h);
        CHECK(eig.values[0] >= eig.values[1]);
        CHECK(testing::is_unitary(eig.vectors, 1e-12));
        const Mat2 rebuilt =
            eig.vectors * Mat2::diag(eig.values[0], eig.values[1]) * adjoint(eig.vectors);
        CHECK(frobenius_norm(rebuilt - h) < 1e-12 * (1 + frobenius_norm(h)));
    }
}

TEST_CASE("svd2 reconstructs with unitary factors and sorted singular values") {
    Rng rng(12);
    for (int i = 0; i < 500; ++i) {
        Mat2 m = random_mat(rng);
        if (i % 5 == 0) {  // force a singular matrix
            m(1, 0) = m(0, 0) * Complex(2);
            m(1, 1) = m(0, 1) * Complex(2);
        }
        if (i % 31 == 0) m = Mat2::zero();
        const Svd2 svd = svd2(m);
        CHECK(svd.singular[0] >= svd.singular[1]);
        CHECK(svd.singular[1] >= 0);
        CHECK(testing::is_unitary(svd.u, 1e-12));
        CHECK(testing::is_unitary(svd.v, 1e-12));
        const Mat2 rebuilt = svd.u * Mat2::diag(svd.singular[0], svd.singular[1]) * adjoint(svd.v);
        CHECK(frobenius_norm(rebuilt - m) < 1e-12 * (1 + frobenius_norm(m)));
    }
}

TEST_CASE("psd_sqrt squares back") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const Mat2 a = random_mat(rng);
        const Mat2 h = adjoint(a) * a;
        const Mat2 r = psd_sqrt(h);
        CHECK(frobenius_norm(r * r - h) < 1e-11 * (1 + frobenius_norm(h)));
        CHECK(frobenius_norm(r - adjoint(r)) < 1e-12 * (1 + frobenius_norm(r)));
    }
}

TEST_CASE("gram_max_eigenvalue matches the eigen decomposition") {
    Rng rng(14);
    for (int i = 0; i < 200; ++i) {
        const Mat2 m = random_mat(rng);
        const HermitianEigen eig = hermitian_eigen(adjoint(m) * m);
        CHECK(gram_max_eigenvalue(m) == doctest::Approx(eig.values[0]).epsilon(1e-12));
    }
}

TEST_CASE("mixed_det expands det(xA + B)") {
    Rng rng(15);
    for (int i = 0; i < 100; ++i) {
        const Mat2 a = random_mat(rng), b = random_mat(rng);
        const Complex x = rng.gaussian_complex();
        const Complex lhs = det(x * a + b);
        const Complex rhs = x * x * det(a) + x * mixed_det(a, b) + det(b);
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("rng streams are deterministic") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(42), d(43);
    CHECK(c.next_u64() != d.next_u64());
}
