#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace wdistill {

using Complex = std::complex<double>;

/// Dense 2x2 complex matrix, row-major. Small enough that everything is by value.
struct Mat2 {
    std::array<Complex, 4> e{};  // e[2*row + col]

    Complex& operator()(int r, int c) { return e[2 * r + c]; }
    const Complex& operator()(int r, int c) const { return e[2 * r + c]; }

    static Mat2 identity() { return Mat2{{Complex(1), Complex(0), Complex(0), Complex(1)}}; }
    static Mat2 zero() { return Mat2{}; }
    static Mat2 diag(Complex d0, Complex d1) { return Mat2{{d0, Complex(0), Complex(0), d1}}; }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    r(0, 0) = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0);
    r(0, 1) = a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1);
    r(1, 0) = a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0);
    r(1, 1) = a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
    return r;
}

inline Mat2 operator*(Complex s, const Mat2& m) {
    Mat2 r = m;
    for (auto& x : r.e) x *= s;
    return r;
}

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

inline Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}

inline Mat2 adjoint(const Mat2& m) {
    return Mat2{{std::conj(m.e[0]), std::conj(m.e[2]), std::conj(m.e[1]), std::conj(m.e[3])}};
}

inline Mat2 transpose(const Mat2& m) { return Mat2{{m.e[0], m.e[2], m.e[1], m.e[3]}}; }

inline Complex det(const Mat2& m) { return m.e[0] * m.e[3] - m.e[1] * m.e[2]; }

inline Complex trace(const Mat2& m) { return m.e[0] + m.e[3]; }

/// Bilinear companion of det: det(x*A + B) = x^2 det(A) + x * mixed_det(A, B) + det(B).
inline Complex mixed_det(const Mat2& a, const Mat2& b) {
    return a.e[0] * b.e[3] + a.e[3] * b.e[0] - a.e[1] * b.e[2] - a.e[2] * b.e[1];
}

inline double frobenius_norm(const Mat2& m) {
    double s = 0;
    for (const auto& x : m.e) s += std::norm(x);
    return std::sqrt(s);
}

inline double max_abs(const Mat2& m) {
    double s = 0;
    for (const auto& x : m.e) s = std::max(s, std::abs(x));
    return s;
}

/// Eigen-decomposition of a Hermitian 2x2 matrix. Eigenvalues descending,
/// eigenvectors are the columns of `vectors` (unitary).
struct HermitianEigen {
    std::array<double, 2> values{};
    Mat2 vectors = Mat2::identity();
};

namespace detail {

// Rotate a unit 2-vector so its largest-magnitude component is real positive.
inline void canonical_phase(Complex& x, Complex& y) {
    const Complex& lead = std::abs(x) >= std::abs(y) ? x : y;
    double m = std::abs(lead);
    if (m < 1e-300) return;
    Complex ph = std::conj(lead) / m;
    x *= ph;
    y *= ph;
}

}  // namespace detail

inline HermitianEigen hermitian_eigen(const Mat2& h) {
    const double h00 = h.e[0].real();
    const double h11 = h.e[3].real();
    const Complex off = h.e[1];  // h(0,1); h(1,0) = conj by assumption
    const double mid = 0.5 * (h00 + h11);
    const double delta = 0.5 * (h00 - h11);
    const double r = std::hypot(delta, std::abs(off));

    HermitianEigen out;
    out.values = {mid + r, mid - r};
    if (r < 1e-300) return out;  // scalar matrix, any basis

    // Eigenvector for the larger eigenvalue: of the two row-equation
    // candidates, take the one with the larger norm.
    Complex v0, v1;
    const double n1 = std::norm(off) + (out.values[0] - h00) * (out.values[0] - h00);
    const double n2 = (out.values[0] - h11) * (out.values[0] - h11) + std::norm(off);
    if (n1 >= n2) {
        v0 = off;
        v1 = Complex(out.values[0] - h00);
    } else {
        v0 = Complex(out.values[0] - h11);
        v1 = std::conj(off);
    }
    double n = std::sqrt(std::norm(v0) + std::norm(v1));
    if (n < 1e-300) {
        v0 = Complex(1);
        v1 = Complex(0);
        n = 1;
    }
    v0 /= n;
    v1 /= n;
    detail::canonical_phase(v0, v1);

    out.vectors(0, 0) = v0;
    out.vectors(1, 0) = v1;
    // Orthogonal complement is the second eigenvector.
    out.vectors(0, 1) = -std::conj(v1);
    out.vectors(1, 1) = std::conj(v0);
    return out;
}

/// SVD of a 2x2 complex matrix: m = u * diag(singular[0], singular[1]) * adjoint(v),
/// singular values descending and nonnegative, u and v unitary.
struct Svd2 {
    Mat2 u = Mat2::identity();
    std::array<double, 2> singular{};
    Mat2 v = Mat2::identity();
};

inline Svd2 svd2(const Mat2& m) {
    Svd2 out;
    const Mat2 gram = adjoint(m) * m;
    const HermitianEigen eig = hermitian_eigen(gram);
    out.singular[0] = std::sqrt(std::max(0.0, eig.values[0]));
    // The small singular value via the determinant avoids the cancellation in
    // mid - r, which only carries sqrt(eps) accuracy near rank one.
    out.singular[1] =
        out.singular[0] > 1e-300 ? std::min(std::abs(det(m)) / out.singular[0], out.singular[0])
                                 : 0.0;
    out.v = eig.vectors;

    // Left vectors: u_i = m * v_i / s_i, completing by orthogonality when a
    // singular value is (numerically) zero. Phase normalization of a u column
    // co-rotates its v column to keep m = u * S * adjoint(v) exact.
    const double floor0 = 1e-14 * (1.0 + max_abs(m));
    const auto phase_fix_pair = [&out](Complex& x, Complex& y, int col) {
        const Complex& lead = std::abs(x) >= std::abs(y) ? x : y;
        const double mag = std::abs(lead);
        if (mag < 1e-300) return;
        const Complex ph = std::conj(lead) / mag;
        x *= ph;
        y *= ph;
        out.v(0, col) *= ph;
        out.v(1, col) *= ph;
    };

    Complex u00, u10;
    if (out.singular[0] > floor0) {
        u00 = (m(0, 0) * out.v(0, 0) + m(0, 1) * out.v(1, 0)) / out.singular[0];
        u10 = (m(1, 0) * out.v(0, 0) + m(1, 1) * out.v(1, 0)) / out.singular[0];
        const double n = std::sqrt(std::norm(u00) + std::norm(u10));
        u00 /= n;
        u10 /= n;
        phase_fix_pair(u00, u10, 0);
    } else {
        u00 = Complex(1);
        u10 = Complex(0);
    }

    Complex u01, u11;
    if (out.singular[1] > floor0 * 10) {
        u01 = (m(0, 0) * out.v(0, 1) + m(0, 1) * out.v(1, 1)) / out.singular[1];
        u11 = (m(1, 0) * out.v(0, 1) + m(1, 1) * out.v(1, 1)) / out.singular[1];
        // Re-orthogonalize against the first column.
        const Complex proj = std::conj(u00) * u01 + std::conj(u10) * u11;
        u01 -= proj * u00;
        u11 -= proj * u10;
        const double n = std::sqrt(std::norm(u01) + std::norm(u11));
        if (n > 1e-12) {
            u01 /= n;
            u11 /= n;
            phase_fix_pair(u01, u11, 1);
        } else {
            u01 = -std::conj(u10);
            u11 = std::conj(u00);
        }
    } else {
        u01 = -std::conj(u10);
        u11 = std::conj(u00);
    }

    out.u(0, 0) = u00;
    out.u(1, 0) = u10;
    out.u(0, 1) = u01;
    out.u(1, 1) = u11;
    return out;
}

/// Positive-semidefinite square root of a Hermitian PSD matrix; negative
/// eigenvalues within roundoff are clamped to zero.
inline Mat2 psd_sqrt(const Mat2& h) {
    const HermitianEigen eig = hermitian_eigen(h);
    const double s0 = std::sqrt(std::max(0.0, eig.values[0]));
    const double s1 = std::sqrt(std::max(0.0, eig.values[1]));
    const Mat2& v = eig.vectors;
    return v * Mat2::diag(s0, s1) * adjoint(v);
}

/// Largest eigenvalue of adjoint(m) * m, i.e. the squared operator norm.
inline double gram_max_eigenvalue(const Mat2& m) {
    const Mat2 g = adjoint(m) * m;
    const double tr = g.e[0].real() + g.e[3].real();
    const double dd = g.e[0].real() - g.e[3].real();
    return 0.5 * (tr + std::hypot(dd, 2.0 * std::abs(g.e[1])));
}

/// Deterministic pseudo-random source. Transforms are hand-rolled so that a
/// given seed yields the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        // xorshift* variant
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dULL;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Complex gaussian_complex() {
        const double re = gaussian();
        const double im = gaussian();
        return Complex(re, im);
    }

    int sign() { return (next_u64() & 1) ? 1 : -1; }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0;
};

/// Stable seed mixing for derived substreams (per-restart, per-party, ...).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace wdistill
