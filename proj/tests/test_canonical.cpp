#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "test_helpers.hpp"
#include "wdistill/canonical.hpp"

using namespace wdistill;
using namespace wdistill::testing;

namespace {

const double kR3 = 1.0 / std::sqrt(3.0);
const double kR2 = 1.0 / std::sqrt(2.0);

// Ideal canonical amplitude vector of a form.
ThreeQubitState canonical_vector(const CanonicalForm& f) {
    ThreeQubitState s;
    s.at(0, 0, 0) = f.lambda[0];
    s.at(1, 0, 0) = std::polar(f.lambda[1], f.phi);
    s.at(1, 0, 1) = f.lambda[2];
    s.at(1, 1, 0) = f.lambda[3];
    s.at(1, 1, 1) = f.lambda[4];
    return s;
}

double reconstruction_error(const ThreeQubitState& input, const CanonicalForm& f) {
    const auto applied = apply_local(input, f.u1, f.u2, f.u3);
    const ThreeQubitState ideal = canonical_vector(f);
    double err = 0;
    for (int i = 0; i < 8; ++i) err = std::max(err, std::abs(applied.state.amps[i] - ideal.amps[i]));
    return err;
}

ThreeQubitState asym_variant_agrawal() {
    std::array<Complex, 8> raw{};
    raw[1] = Complex(kR2);
    raw[2] = Complex(0.5);
    raw[4] = Complex(0.5);
    return make_state(raw).state;
}

ThreeQubitState asym_variant_zheng() {
    std::array<Complex, 8> raw{};
    raw[1] = Complex(0.5);
    raw[2] = Complex(0.5);
    raw[4] = Complex(kR2);
    return make_state(raw).state;
}

}  // namespace

TEST_CASE("t_matrices: slices and round trip") {
    const TMatrixPair basis = t_matrices(basis_state(0, 0, 0));
    CHECK(basis.t0(0, 0) == Complex(1));
    CHECK(frobenius_norm(basis.t1) == 0);

    const TMatrixPair w = t_matrices(symmetric_w());
    CHECK(std::abs(w.t0(0, 1) - Complex(kR3)) < 1e-15);
    CHECK(std::abs(w.t0(1, 0) - Complex(kR3)) < 1e-15);
    CHECK(std::abs(w.t0(0, 0)) < 1e-15);
    CHECK(std::abs(w.t1(0, 0) - Complex(kR3)) < 1e-15);

    const ThreeQubitState s = random_state(3);
    const ThreeQubitState rt = state_from_t_matrices(t_matrices(s));
    for (int i = 0; i < 8; ++i) CHECK(rt.amps[i] == s.amps[i]);
}

TEST_CASE("canonicalize: symmetric W gives the single corrected form") {
    const auto forms = canonicalize(symmetric_w());
    REQUIRE(forms.size() == 1);
    CHECK(forms[0].lambda[0] == doctest::Approx(kR3).epsilon(1e-12));
    CHECK(forms[0].lambda[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(forms[0].lambda[2] == doctest::Approx(kR3).epsilon(1e-12));
    CHECK(forms[0].lambda[3] == doctest::Approx(kR3).epsilon(1e-12));
    CHECK(forms[0].lambda[4] == 0.0);
    CHECK(reconstruction_error(symmetric_w(), forms[0]) < 1e-9);
}

TEST_CASE("canonicalize: asymmetric resource state before ordering") {
    const auto forms = canonicalize(asym_variant_agrawal());
    REQUIRE(forms.size() == 1);
    CHECK(forms[0].lambda[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(forms[0].lambda[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(forms[0].lambda[2] == doctest::Approx(kR2).epsilon(1e-12));
    CHECK(forms[0].lambda[3] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(forms[0].lambda[4] == 0.0);
}

TEST_CASE("canonicalize: GHZ returns two forms with nonzero tangle") {
    const auto forms = canonicalize(ghz());
    REQUIRE(forms.size() == 2);
    for (const auto& f : forms) {
        CHECK(three_tangle(f) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(reconstruction_error(ghz(), f) < 1e-9);
    }
    CHECK(forms[0].lambda[0] >= forms[1].lambda[0]);
}

TEST_CASE("canonicalize: product state is degenerate") {
    CHECK_THROWS_AS(canonicalize(basis_state(0, 0, 0)), DegenerateStateError);
}

TEST_CASE("three_tangle: direct values") {
    CanonicalForm f;
    f.lambda = {kR2, 0, 0, 0, kR2};
    CHECK(three_tangle(f) == doctest::Approx(0.5).epsilon(1e-15));
    f.lambda = {0.8, 0, 0.5, 0.33166, 0};
    CHECK(three_tangle(f) == 0.0);
}

TEST_CASE("classify: representatives of every class") {
    CHECK(classify(symmetric_w()) == EntanglementClass::W);
    CHECK(classify(ghz()) == EntanglementClass::GHZ);

    // |0> (x) EPR pair on parties 2, 3
    std::array<Complex, 8> raw{};
    raw[0] = raw[3] = Complex(kR2);
    CHECK(classify(make_state(raw).state) == EntanglementClass::BiseparableP1);

    raw.fill(Complex(0));
    raw[0] = raw[5] = Complex(kR2);  // |000> + |101>: party 2 factors out
    CHECK(classify(make_state(raw).state) == EntanglementClass::BiseparableP2);

    raw.fill(Complex(0));
    raw[0] = raw[6] = Complex(kR2);  // |000> + |110>: party 3 factors out
    CHECK(classify(make_state(raw).state) == EntanglementClass::BiseparableP3);

    CHECK(classify(basis_state(0, 0, 0)) == EntanglementClass::Product);

    const auto full = classify_full(symmetric_w());
    CHECK(full.ranks == std::array<int, 3>{2, 2, 2});
    CHECK(full.tangle <= 1e-8);
}

TEST_CASE("classify survives local unitary scrambling") {
    for (int i = 0; i < 50; ++i) {
        CHECK(classify(scramble(symmetric_w(), mix_seed(40, i))) == EntanglementClass::W);
        CHECK(classify(scramble(ghz(), mix_seed(41, i))) == EntanglementClass::GHZ);
    }
}

TEST_CASE("w_canonicalize: the two asymmetric resource variants coincide") {
    const WCanonicalForm a = w_canonicalize(asym_variant_agrawal());
    const WCanonicalForm z = w_canonicalize(asym_variant_zheng());
    const std::array<double, 4> want{kR2, 0, 0.5, 0.5};
    CHECK(max_lambda_diff(a.lambda, want) < 1e-12);
    CHECK(max_lambda_diff(z.lambda, want) < 1e-12);
    CHECK(a.lambda[0] >= a.lambda[2]);
    CHECK(a.lambda[2] >= a.lambda[3]);
}

TEST_CASE("w_canonicalize: symmetric W and precondition") {
    const WCanonicalForm w = w_canonicalize(symmetric_w());
    CHECK(max_lambda_diff(w.lambda, {kR3, 0, kR3, kR3}) < 1e-12);
    CHECK_THROWS_AS(w_canonicalize(ghz()), NotWClassError);
}

TEST_CASE("w_canonicalize: frame reproduces the ordered canonical vector") {
    for (int i = 0; i < 100; ++i) {
        const WTestCase tc = random_w_state(mix_seed(42, i), i % 3 == 0);
        const WCanonicalForm w = w_canonicalize(tc.state);
        CHECK(max_lambda_diff(w.lambda, tc.lambda) < 1e-9);

        const ThreeQubitState permuted = permute_parties(tc.state, w.perm);
        const auto applied = apply_local(permuted, w.u1, w.u2, w.u3);
        const ThreeQubitState ideal = state_from_w_lambda(w.lambda);
        for (int n = 0; n < 8; ++n)
            CHECK(std::abs(applied.state.amps[n] - ideal.amps[n]) < 1e-9);
    }
}

TEST_CASE("permute_parties: examples and group laws") {
    const ThreeQubitState s = random_state(17);
    const ThreeQubitState id = permute_parties(s, {1, 2, 3});
    for (int i = 0; i < 8; ++i) CHECK(id.amps[i] == s.amps[i]);

    const ThreeQubitState swapped = permute_parties(basis_state(0, 0, 1), {3, 2, 1});
    CHECK(swapped.at(1, 0, 0) == Complex(1));

    // transpositions are involutions
    for (const auto& perm : {std::array<int, 3>{2, 1, 3}, {3, 2, 1}, {1, 3, 2}}) {
        const ThreeQubitState twice = permute_parties(permute_parties(s, perm), perm);
        for (int i = 0; i < 8; ++i) CHECK(twice.amps[i] == s.amps[i]);
    }
}

TEST_CASE("w canonical lambda vector is invariant under party permutations") {
    for (int i = 0; i < 30; ++i) {
        const WTestCase tc = random_w_state(mix_seed(43, i));
        const WCanonicalForm base = w_canonicalize(tc.state);
        for (const auto& perm : detail::kAllPerms) {
            const WCanonicalForm p = w_canonicalize(permute_parties(tc.state, perm));
            CHECK(max_lambda_diff(p.lambda, base.lambda) < 1e-9);
            CHECK(std::abs(p.lambda[1] - base.lambda[1]) < 1e-10);
        }
    }
}

TEST_CASE("canonical lambda multiset is a local-unitary invariant") {
    for (int i = 0; i < 200; ++i) {
        const ThreeQubitState s = random_state(mix_seed(44, i));
        const ThreeQubitState v = scramble(s, mix_seed(45, i));
        const auto fs = canonicalize(s);
        const auto fv = canonicalize(v);
        REQUIRE(fs.size() == fv.size());
        for (std::size_t k = 0; k < fs.size(); ++k) {
            for (int n = 0; n < 5; ++n)
                CHECK(std::abs(fs[k].lambda[n] - fv[k].lambda[n]) < 1e-9);
        }
        CHECK(std::abs(three_tangle(fs[0]) - three_tangle(fv[0])) < 1e-9);
    }
}

TEST_CASE("canonicalize reconstruction holds for random states") {
    for (int i = 0; i < 1000; ++i) {
        const ThreeQubitState s = random_state(mix_seed(46, i));
        for (const auto& f : canonicalize(s)) {
            CHECK(reconstruction_error(s, f) < 1e-9);
            double norm2 = 0;
            for (const double l : f.lambda) norm2 += l * l;
            CHECK(std::abs(norm2 - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("W-class states canonicalize to exactly one form, exactly ordered") {
    for (int i = 0; i < 100; ++i) {
        const WTestCase tc = random_w_state(mix_seed(47, i), i % 3 == 1);
        CHECK(canonicalize(tc.state).size() == 1);
        const WCanonicalForm w = w_canonicalize(tc.state);
        CHECK(w.lambda[0] >= w.lambda[2]);
        CHECK(w.lambda[2] >= w.lambda[3]);
        CHECK(w.lambda[3] > 0);
    }
}
