#pragma once

#include <array>
#include <cmath>

#include "wdistill/wdistill.hpp"

namespace wdistill::testing {

inline ThreeQubitState basis_state(int i, int j, int k) {
    ThreeQubitState s;
    s.at(i, j, k) = Complex(1);
    return s;
}

inline ThreeQubitState symmetric_w() {
    std::array<Complex, 8> raw{};
    raw[1] = raw[2] = raw[4] = Complex(1);
    return make_state(raw).state;
}

inline ThreeQubitState ghz() {
    std::array<Complex, 8> raw{};
    raw[0] = raw[7] = Complex(1);
    return make_state(raw).state;
}

/// Random local unitaries on all three parties.
inline ThreeQubitState scramble(const ThreeQubitState& s, std::uint64_t seed) {
    return apply_local(s, random_local_unitary(mix_seed(seed, 1), 1),
                       random_local_unitary(mix_seed(seed, 2), 2),
                       random_local_unitary(mix_seed(seed, 3), 3))
        .state;
}

/// W-class state with known ordered coefficients, hidden behind random local
/// unitaries and a random party permutation.
struct WTestCase {
    std::array<double, 4> lambda{};
    ThreeQubitState state;
};

inline WTestCase random_w_state(std::uint64_t seed, bool lambda1_zero = false) {
    Rng rng(mix_seed(seed, 0x57a7e));
    WTestCase out;
    out.lambda = random_w_lambda(rng, lambda1_zero);
    ThreeQubitState s = state_from_w_lambda(out.lambda);
    const auto& perms = detail::kAllPerms;
    s = permute_parties(s, perms[rng.next_u64() % 6]);
    out.state = scramble(s, mix_seed(seed, 0xbead));
    return out;
}

inline double max_lambda_diff(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    double m = 0;
    for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline bool is_identity(const Mat2& m, double tol) {
    return std::abs(m(0, 0) - Complex(1)) < tol && std::abs(m(0, 1)) < tol &&
           std::abs(m(1, 0)) < tol && std::abs(m(1, 1) - Complex(1)) < tol;
}

inline bool is_unitary(const Mat2& m, double tol) {
    return is_identity(adjoint(m) * m, tol);
}

}  // namespace wdistill::testing
