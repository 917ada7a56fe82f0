#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "wdistill/linalg.hpp"

namespace wdistill {

struct ZeroVectorError : std::runtime_error {
    ZeroVectorError() : std::runtime_error("input vector has (numerically) zero norm") {}
};

struct ZeroBranchError : std::runtime_error {
    ZeroBranchError() : std::runtime_error("measurement branch annihilates the state") {}
};

/// Pure state of three qubits. Amplitude of |ijk> lives at index i*4 + j*2 + k;
/// party 1 is the leftmost label.
struct ThreeQubitState {
    std::array<Complex, 8> amps{};

    Complex& at(int i, int j, int k) { return amps[4 * i + 2 * j + k]; }
    const Complex& at(int i, int j, int k) const { return amps[4 * i + 2 * j + k]; }
};

inline double norm_squared(const ThreeQubitState& s) {
    double n = 0;
    for (const auto& a : s.amps) n += std::norm(a);
    return n;
}

/// Squared overlap |<a|b>|^2; 1 means equal up to a global phase.
inline double state_overlap(const ThreeQubitState& a, const ThreeQubitState& b) {
    Complex ip(0);
    for (int n = 0; n < 8; ++n) ip += std::conj(a.amps[n]) * b.amps[n];
    return std::norm(ip);
}

struct NormalizedState {
    ThreeQubitState state;
    double factor = 1.0;  // multiplier that was applied to the raw amplitudes
};

inline NormalizedState make_state(std::span<const Complex, 8> raw) {
    double n2 = 0;
    for (const auto& a : raw) n2 += std::norm(a);
    const double n = std::sqrt(n2);
    if (n < 1e-14) throw ZeroVectorError{};
    NormalizedState out;
    out.factor = 1.0 / n;
    for (int i = 0; i < 8; ++i) out.state.amps[i] = raw[i] * out.factor;
    return out;
}

inline NormalizedState make_state(const std::array<Complex, 8>& raw) {
    return make_state(std::span<const Complex, 8>(raw));
}

/// One-qubit operator tagged with the party (1, 2 or 3) it acts on.
struct LocalOperator {
    Mat2 m = Mat2::identity();
    int party = 1;
};

inline LocalOperator identity_op(int party) { return LocalOperator{Mat2::identity(), party}; }

/// Whether op is an admissible POVM element: largest eigenvalue of A^dag A <= 1.
inline bool povm_element_valid(const Mat2& m, double tol = 1e-10) {
    return gram_max_eigenvalue(m) <= 1.0 + tol;
}

/// Triangular real POVM element. Party 1 uses the lower-triangular shape
/// a|0><0| + off|1><0| + d|1><1|; parties 2 and 3 use the upper-triangular
/// shape a|0><0| + off|0><1| + d|1><1|.
struct TriangularPovm {
    int party = 1;
    double a = 1;
    double off = 0;
    double d = 1;

    Mat2 matrix() const {
        if (party == 1) return Mat2{{Complex(a), Complex(0), Complex(off), Complex(d)}};
        return Mat2{{Complex(a), Complex(off), Complex(0), Complex(d)}};
    }

    LocalOperator op() const { return LocalOperator{matrix(), party}; }
};

struct PovmTriple {
    TriangularPovm a;  // party 1
    TriangularPovm b;  // party 2
    TriangularPovm c;  // party 3
};

/// Closed-form validity test for a triangular element:
///   a^2 + off^2 + d^2 + sqrt(((a-d)^2 + off^2) ((a+d)^2 + off^2)) <= 2.
/// Equivalent to the largest eigenvalue of the Gram matrix being <= 1.
inline double povm_constraint_value(const TriangularPovm& t) {
    const double s = t.a * t.a + t.off * t.off + t.d * t.d;
    const double minus = (t.a - t.d) * (t.a - t.d) + t.off * t.off;
    const double plus = (t.a + t.d) * (t.a + t.d) + t.off * t.off;
    return s + std::sqrt(minus * plus);
}

inline bool povm_valid(const TriangularPovm& t, double tol = 1e-10) {
    return povm_constraint_value(t) <= 2.0 + tol;
}

namespace detail {

inline void apply_single(ThreeQubitState& s, const Mat2& m, int party) {
    const int stride = party == 1 ? 4 : (party == 2 ? 2 : 1);
    for (int base = 0; base < 8; ++base) {
        if (base & stride) continue;
        const Complex lo = s.amps[base];
        const Complex hi = s.amps[base + stride];
        s.amps[base] = m(0, 0) * lo + m(0, 1) * hi;
        s.amps[base + stride] = m(1, 0) * lo + m(1, 1) * hi;
    }
}

}  // namespace detail

struct MeasuredState {
    ThreeQubitState state;      // renormalized post-measurement state
    double probability = 1.0;   // <psi| A^dag A (x) B^dag B (x) C^dag C |psi>
};

/// Applies A (x) B (x) C and renormalizes. Throws ZeroBranchError when the
/// branch probability is below 1e-14.
inline MeasuredState apply_local(const ThreeQubitState& s, const LocalOperator& a,
                                 const LocalOperator& b, const LocalOperator& c) {
    ThreeQubitState out = s;
    detail::apply_single(out, a.m, 1);
    detail::apply_single(out, b.m, 2);
    detail::apply_single(out, c.m, 3);
    const double p = norm_squared(out);
    if (p < 1e-14) throw ZeroBranchError{};
    const double inv = 1.0 / std::sqrt(p);
    for (auto& x : out.amps) x *= inv;
    return MeasuredState{out, p};
}

/// Partial trace onto one party; Hermitian, trace one, PSD.
inline Mat2 reduced_density(const ThreeQubitState& s, int party) {
    const int stride = party == 1 ? 4 : (party == 2 ? 2 : 1);
    Mat2 rho = Mat2::zero();
    for (int base = 0; base < 8; ++base) {
        if (base & stride) continue;
        const Complex lo = s.amps[base];
        const Complex hi = s.amps[base + stride];
        rho(0, 0) += lo * std::conj(lo);
        rho(0, 1) += lo * std::conj(hi);
        rho(1, 0) += hi * std::conj(lo);
        rho(1, 1) += hi * std::conj(hi);
    }
    return rho;
}

/// Number of eigenvalues of a Hermitian 2x2 matrix above eps.
inline int rank_eps(const Mat2& h, double eps = 1e-8) {
    const HermitianEigen eig = hermitian_eigen(h);
    int r = 0;
    if (eig.values[0] > eps) ++r;
    if (eig.values[1] > eps) ++r;
    return r;
}

/// Rotation-invariant random pure state: normalized complex-Gaussian amplitudes.
inline ThreeQubitState random_state(std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0xabcdef));
    std::array<Complex, 8> raw;
    for (auto& a : raw) a = rng.gaussian_complex();
    return make_state(raw).state;
}

/// Haar-ish random unitary from Gram-Schmidt on a Gaussian matrix.
inline LocalOperator random_local_unitary(std::uint64_t seed, int party) {
    Rng rng(mix_seed(seed, 0x55aa00 + static_cast<std::uint64_t>(party)));
    Complex a = rng.gaussian_complex(), b = rng.gaussian_complex();
    Complex c = rng.gaussian_complex(), d = rng.gaussian_complex();
    double n = std::sqrt(std::norm(a) + std::norm(c));
    while (n < 1e-8) {
        a = rng.gaussian_complex();
        c = rng.gaussian_complex();
        n = std::sqrt(std::norm(a) + std::norm(c));
    }
    a /= n;
    c /= n;
    const Complex proj = std::conj(a) * b + std::conj(c) * d;
    b -= proj * a;
    d -= proj * c;
    double n2 = std::sqrt(std::norm(b) + std::norm(d));
    if (n2 < 1e-8) {
        b = -std::conj(c);
        d = std::conj(a);
        n2 = 1;
    }
    b /= n2;
    d /= n2;
    return LocalOperator{Mat2{{a, b, c, d}}, party};
}

/// Random valid triangular POVM element: raw entries rescaled so the operator
/// norm lands uniformly in (0, 1].
inline TriangularPovm random_triangular_povm(std::uint64_t seed, int party) {
    Rng rng(mix_seed(seed, 0x77cc11 + static_cast<std::uint64_t>(party)));
    TriangularPovm t;
    t.party = party;
    t.a = rng.uniform(-1, 1);
    t.off = rng.uniform(-1, 1);
    t.d = rng.uniform(-1, 1);
    double top = std::sqrt(gram_max_eigenvalue(t.matrix()));
    if (top < 1e-12) {
        t.a = 1;
        t.off = 0;
        t.d = 1;
        top = 1;
    }
    const double target = rng.uniform(0.2, 1.0);
    const double scale = target / top;
    t.a *= scale;
    t.off *= scale;
    t.d *= scale;
    return t;
}

}  // namespace wdistill
