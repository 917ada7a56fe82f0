#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wdistill/state.hpp"

namespace wdistill {

struct DegenerateStateError : std::runtime_error {
    DegenerateStateError()
        : std::runtime_error("state is a product across some cut; no canonical reduction") {}
};

struct NotWClassError : std::runtime_error {
    NotWClassError() : std::runtime_error("state is not of W class") {}
};

/// The pair of 2x2 slices of the amplitude tensor along party 1:
/// t0(j,k) = amplitude of |0jk>, t1(j,k) = amplitude of |1jk>.
struct TMatrixPair {
    Mat2 t0;
    Mat2 t1;
};

inline TMatrixPair t_matrices(const ThreeQubitState& s) {
    TMatrixPair out;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            out.t0(j, k) = s.at(0, j, k);
            out.t1(j, k) = s.at(1, j, k);
        }
    return out;
}

inline ThreeQubitState state_from_t_matrices(const TMatrixPair& t) {
    ThreeQubitState s;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            s.at(0, j, k) = t.t0(j, k);
            s.at(1, j, k) = t.t1(j, k);
        }
    return s;
}

/// Five-coefficient normal form under local unitaries:
///   l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>,  l_i >= 0.
/// u1, u2, u3 map the input into this frame.
struct CanonicalForm {
    std::array<double, 5> lambda{};
    double phi = 0;  // in [0, 2*pi)
    LocalOperator u1, u2, u3;
};

inline double three_tangle(const CanonicalForm& cf) { return cf.lambda[0] * cf.lambda[4]; }

/// Normal form of a W-class state with the parties ordered so that
/// l0 >= l2 >= l3 (l4 = 0 and the l1 phase is absorbed). perm[m] is the
/// original party sitting in slot m+1 after reordering; u1, u2, u3 act after
/// the permutation.
struct WCanonicalForm {
    std::array<double, 4> lambda{};  // l0, l1, l2, l3
    std::array<int, 3> perm{1, 2, 3};
    LocalOperator u1, u2, u3;
};

enum class EntanglementClass { GHZ, W, BiseparableP1, BiseparableP2, BiseparableP3, Product };

inline const char* to_string(EntanglementClass c) {
    switch (c) {
        case EntanglementClass::GHZ: return "GHZ";
        case EntanglementClass::W: return "W";
        case EntanglementClass::BiseparableP1: return "BiseparableP1";
        case EntanglementClass::BiseparableP2: return "BiseparableP2";
        case EntanglementClass::BiseparableP3: return "BiseparableP3";
        case EntanglementClass::Product: return "Product";
    }
    return "?";
}

/// perm[m] = original party placed in slot m+1. permute({3,2,1}) swaps
/// parties 1 and 3.
inline ThreeQubitState permute_parties(const ThreeQubitState& s, const std::array<int, 3>& perm) {
    ThreeQubitState out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                std::array<int, 3> old{};
                old[perm[0] - 1] = i;
                old[perm[1] - 1] = j;
                old[perm[2] - 1] = k;
                out.at(i, j, k) = s.at(old[0], old[1], old[2]);
            }
    return out;
}

namespace detail {

// Unit row (u00, u01) of the party-1 unitary, phase-fixed for determinism.
struct DetRoot {
    Complex u00, u01;
};

inline DetRoot normalize_root(Complex p, Complex q) {
    const double n = std::sqrt(std::norm(p) + std::norm(q));
    p /= n;
    q /= n;
    canonical_phase(p, q);
    return DetRoot{p, q};
}

// Solutions of det(u00*T0 + u01*T1) = 0 on the projective line, i.e. of
// qa*x^2 + qb*x + qc = 0 for x = u00/u01 including the root at infinity.
// A double root (relative discriminant below 1e-10) yields one entry; an
// identically vanishing quadratic means a product cut.
inline std::vector<DetRoot> det_zero_roots(const Complex qa, const Complex qb, const Complex qc) {
    const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc)});
    if (scale < 1e-14) throw DegenerateStateError{};

    const Complex disc = qb * qb - 4.0 * qa * qc;
    if (std::abs(disc) <= 1e-10 * scale * scale) {
        // Double root at the projective midpoint.
        if (std::abs(qa) >= std::abs(qc)) return {normalize_root(-qb, 2.0 * qa)};
        return {normalize_root(2.0 * qc, -qb)};
    }

    if (std::abs(qa) <= 1e-14 * scale) {
        // Root at infinity plus the linear root of qb*x + qc = 0.
        std::vector<DetRoot> roots{normalize_root(Complex(1), Complex(0))};
        if (std::abs(qb) > 1e-14 * scale) roots.push_back(normalize_root(-qc, qb));
        return roots;
    }

    Complex sq = std::sqrt(disc);
    if ((std::conj(qb) * sq).real() < 0) sq = -sq;
    const Complex q = -0.5 * (qb + sq);
    std::vector<DetRoot> roots;
    roots.push_back(normalize_root(q, qa));
    if (std::abs(q) > 1e-14 * scale) {
        roots.push_back(normalize_root(qc, q));
    } else {
        roots.push_back(normalize_root(-qb, qa));
    }
    return roots;
}

inline double arg_or_zero(const Complex& z, double floor = 1e-12) {
    return std::abs(z) <= floor ? 0.0 : std::arg(z);
}

inline double wrap_angle(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0) a += two_pi;
    if (a >= two_pi) a -= two_pi;
    return a;
}

inline CanonicalForm canonical_form_for_root(const ThreeQubitState& s, const TMatrixPair& t,
                                             const DetRoot& root) {
    const Mat2 u1{{root.u00, root.u01, -std::conj(root.u01), std::conj(root.u00)}};
    const Mat2 t0p = root.u00 * t.t0 + root.u01 * t.t1;

    const Svd2 svd = svd2(t0p);
    const Mat2 v2 = adjoint(svd.u);
    const Mat2 v3 = transpose(svd.v);

    ThreeQubitState c = s;
    apply_single(c, u1, 1);
    apply_single(c, v2, 2);
    apply_single(c, v3, 3);

    // Diagonal phase corrections: make |101>, |110>, |111> real nonnegative;
    // the residual phase sits on |100>. With |111| ~ 0 the leftover freedom
    // absorbs the |100> phase as well.
    const double p000 = arg_or_zero(c.at(0, 0, 0));
    const double p100 = arg_or_zero(c.at(1, 0, 0));
    const double p101 = arg_or_zero(c.at(1, 0, 1));
    const double p110 = arg_or_zero(c.at(1, 1, 0));
    const double p111 = arg_or_zero(c.at(1, 1, 1));

    double alpha1;
    if (std::abs(c.at(1, 1, 1)) > 1e-12) {
        alpha1 = p111 - p110 - p101;
    } else {
        alpha1 = -p100;
    }
    const double alpha0 = -p000;
    const double beta1 = -p110 - alpha1;
    const double gamma1 = -p101 - alpha1;

    const Mat2 d1 = Mat2::diag(std::polar(1.0, alpha0), std::polar(1.0, alpha1));
    const Mat2 d2 = Mat2::diag(Complex(1), std::polar(1.0, beta1));
    const Mat2 d3 = Mat2::diag(Complex(1), std::polar(1.0, gamma1));

    apply_single(c, d1, 1);
    apply_single(c, d2, 2);
    apply_single(c, d3, 3);

    CanonicalForm out;
    auto clamp = [](double x) { return x < 1e-12 ? 0.0 : x; };
    out.lambda[0] = clamp(std::abs(c.at(0, 0, 0)));
    out.lambda[1] = clamp(std::abs(c.at(1, 0, 0)));
    out.lambda[2] = clamp(std::abs(c.at(1, 0, 1)));
    out.lambda[3] = clamp(std::abs(c.at(1, 1, 0)));
    out.lambda[4] = clamp(std::abs(c.at(1, 1, 1)));
    out.phi = out.lambda[1] > 0 ? wrap_angle(std::arg(c.at(1, 0, 0))) : 0.0;
    out.u1 = LocalOperator{d1 * u1, 1};
    out.u2 = LocalOperator{d2 * v2, 2};
    out.u3 = LocalOperator{d3 * v3, 3};
    return out;
}

}  // namespace detail

/// Reduces a normalized state to canonical form. Generic states yield two
/// forms (sorted by descending l0); W-class states yield exactly one.
/// Throws DegenerateStateError when the construction collapses (product or
/// biseparable input).
inline std::vector<CanonicalForm> canonicalize(const ThreeQubitState& s) {
    const TMatrixPair t = t_matrices(s);
    const Complex qa = det(t.t0);
    const Complex qb = mixed_det(t.t0, t.t1);
    const Complex qc = det(t.t1);

    const std::vector<detail::DetRoot> roots = detail::det_zero_roots(qa, qb, qc);
    std::vector<CanonicalForm> forms;
    forms.reserve(roots.size());
    for (const auto& r : roots) forms.push_back(detail::canonical_form_for_root(s, t, r));
    std::sort(forms.begin(), forms.end(),
              [](const CanonicalForm& x, const CanonicalForm& y) { return x.lambda[0] > y.lambda[0]; });
    return forms;
}

struct Classification {
    EntanglementClass tag = EntanglementClass::Product;
    double tangle = 0;
    std::array<int, 3> ranks{1, 1, 1};
};

inline Classification classify_full(const ThreeQubitState& s) {
    Classification out;
    for (int p = 1; p <= 3; ++p) out.ranks[p - 1] = rank_eps(reduced_density(s, p), 1e-8);

    const int ones = static_cast<int>(std::count(out.ranks.begin(), out.ranks.end(), 1));
    if (ones == 0) {
        double tangle = 0;
        for (const auto& f : canonicalize(s)) tangle = std::max(tangle, three_tangle(f));
        out.tangle = tangle;
        out.tag = tangle > 1e-8 ? EntanglementClass::GHZ : EntanglementClass::W;
        return out;
    }
    if (ones >= 3) {
        out.tag = EntanglementClass::Product;
    } else if (ones == 1) {
        if (out.ranks[0] == 1)
            out.tag = EntanglementClass::BiseparableP1;
        else if (out.ranks[1] == 1)
            out.tag = EntanglementClass::BiseparableP2;
        else
            out.tag = EntanglementClass::BiseparableP3;
    } else {
        // Two rank-one cuts force the third, so treat as product.
        out.tag = EntanglementClass::Product;
    }
    return out;
}

inline EntanglementClass classify(const ThreeQubitState& s) { return classify_full(s).tag; }

namespace detail {

inline constexpr std::array<std::array<int, 3>, 6> kAllPerms{{{1, 2, 3},
                                                              {1, 3, 2},
                                                              {2, 1, 3},
                                                              {2, 3, 1},
                                                              {3, 1, 2},
                                                              {3, 2, 1}}};

}  // namespace detail

/// Ordered W canonical form. Tries party permutations in lexicographic order
/// (identity first) and returns the first whose re-canonicalization satisfies
/// l0 >= l2 >= l3 exactly.
inline WCanonicalForm w_canonicalize(const ThreeQubitState& s) {
    if (classify(s) != EntanglementClass::W) throw NotWClassError{};

    auto pick_form = [](std::vector<CanonicalForm> forms) {
        // W-class states produce a single form; under threshold noise prefer
        // the branch with the smallest l4.
        std::size_t best = 0;
        for (std::size_t i = 1; i < forms.size(); ++i)
            if (forms[i].lambda[4] < forms[best].lambda[4]) best = i;
        return forms[best];
    };

    std::optional<WCanonicalForm> fallback;
    double fallback_violation = 1e300;
    for (const auto& perm : detail::kAllPerms) {
        const ThreeQubitState ps = permute_parties(s, perm);
        const CanonicalForm cf = pick_form(canonicalize(ps));
        WCanonicalForm w;
        w.lambda = {cf.lambda[0], cf.lambda[1], cf.lambda[2], cf.lambda[3]};
        w.perm = perm;
        w.u1 = cf.u1;
        w.u2 = cf.u2;
        w.u3 = cf.u3;
        if (cf.lambda[0] >= cf.lambda[2] && cf.lambda[2] >= cf.lambda[3]) return w;
        const double viol = std::max(cf.lambda[2] - cf.lambda[0], cf.lambda[3] - cf.lambda[2]);
        if (viol < fallback_violation) {
            fallback_violation = viol;
            fallback = w;
        }
    }
    // Unreachable for exact arithmetic; keep the least-violating order.
    return *fallback;
}

/// State with the canonical amplitudes of a W form (in its own frame).
inline ThreeQubitState state_from_w_lambda(const std::array<double, 4>& lambda) {
    ThreeQubitState s;
    s.at(0, 0, 0) = lambda[0];
    s.at(1, 0, 0) = lambda[1];
    s.at(1, 0, 1) = lambda[2];
    s.at(1, 1, 0) = lambda[3];
    return s;
}

/// W form with an identity frame, for coefficient vectors already in
/// canonical order.
inline WCanonicalForm w_form_from_lambda(const std::array<double, 4>& lambda) {
    WCanonicalForm w;
    w.lambda = lambda;
    w.u1 = identity_op(1);
    w.u2 = identity_op(2);
    w.u3 = identity_op(3);
    return w;
}

}  // namespace wdistill
