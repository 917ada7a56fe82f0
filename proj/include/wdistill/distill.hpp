#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wdistill/canonical.hpp"

namespace wdistill {

enum class TargetKind { Asymmetric, Symmetric };

inline const char* to_string(TargetKind t) {
    return t == TargetKind::Asymmetric ? "asym" : "sym";
}

/// Canonical coefficient vectors of the two distillation targets.
inline std::array<double, 4> target_lambda(TargetKind t) {
    if (t == TargetKind::Asymmetric) return {1.0 / std::sqrt(2.0), 0.0, 0.5, 0.5};
    const double r = 1.0 / std::sqrt(3.0);
    return {r, 0.0, r, r};
}

/// Two selectable evaluations of the closed-form probability curve.
///
/// LinearRadicand reproduces the published expression verbatim: the cross
/// term K = l1 * sqrt(y (1-y) (l2 - l3^2 y)) and the published sign of the
/// K-coupling term inside the outer radicand. SquaredRadicand is the
/// consistent form: K = l1 * sqrt(y (1-y) (l2^2 - l3^2 y)) together with the
/// sign-corrected coupling, which makes the outer radicand an exact square of
/// the annihilation-condition discriminant. Only the latter agrees with the
/// constructive solver and the brute-force optimizer (they coincide whenever
/// l1 = 0 or y = 1, where K vanishes); see docs/k-reading-report.md.
enum class CrossTermReading { LinearRadicand, SquaredRadicand };

struct CurveRangeError : std::out_of_range {
    CurveRangeError() : std::out_of_range("curve parameter y must lie in (0, 1]") {}
};

struct CurveDomainError : std::domain_error {
    CurveDomainError() : std::domain_error("closed-form radicand is negative at this y") {}
};

struct NoFeasiblePointError : std::runtime_error {
    NoFeasiblePointError() : std::runtime_error("no feasible point on the probability curve") {}
};

struct ConstructionMismatchError : std::runtime_error {
    explicit ConstructionMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Intermediate quantities of a closed-form curve evaluation: the
/// lambda1-weighted square-root cross term and the two halves of the outer
/// radicand.
struct ClosedCurveTerms {
    double cross = 0;     // K (asymmetric) / Q (symmetric)
    double quartic = 0;   // L / R
    double coupling = 0;  // M / S
};

namespace detail {

inline void check_curve_y(double y) {
    if (!(y > 0.0) || !(y <= 1.0)) throw CurveRangeError{};
}

/// Fully parameterized closed-curve evaluator; the two knobs of
/// CrossTermReading are independent here so the adjudication harness can
/// probe mixed combinations.
inline double closed_curve_eval(const std::array<double, 4>& l, double y, TargetKind target,
                                bool squared_radicand, bool corrected_coupling,
                                ClosedCurveTerms* terms) {
    check_curve_y(y);
    const double l0_2 = l[0] * l[0], l1_2 = l[1] * l[1], l2_2 = l[2] * l[2], l3_2 = l[3] * l[3];

    const double inner = squared_radicand ? l2_2 - l3_2 * y : l[2] - l3_2 * y;
    const double cross_rad = y * (1.0 - y) * inner;
    if (cross_rad < -1e-10) throw CurveDomainError{};
    const double k = l[1] * std::sqrt(std::max(0.0, cross_rad));

    double quartic, coupling, bracket, mult;
    if (target == TargetKind::Asymmetric) {
        // Corrected coupling -4y(l1^2 + l3^2 + l3^2 y)K makes quartic+coupling
        // the exact discriminant C^2 - 8 l0^2 l3^2 y^2 of the annihilation
        // quadratic; the published sign pattern is (l1^2 - l3^2 - l3^2 y).
        const double k_coupling = corrected_coupling ? -4 * y * (l1_2 + l3_2 + l3_2 * y) * k
                                                     : -4 * y * (l1_2 - l3_2 - l3_2 * y) * k;
        quartic = l2_2 * l2_2 * (1 - y) * (1 - y) + l0_2 * l0_2 * y * y + l1_2 * l1_2 * y * y -
                  2 * l1_2 * l3_2 * y * y + l3_2 * l3_2 * y * y + 6 * l1_2 * l3_2 * y * y * y +
                  2 * l3_2 * l3_2 * y * y * y + l3_2 * l3_2 * y * y * y * y + k_coupling;
        coupling = 2 * l2_2 * (1 - y) * (l0_2 * y + 3 * l1_2 * y + l3_2 * y + l3_2 * y * y - 2 * k) +
                   2 * l0_2 * (l1_2 * y * y + l3_2 * (y - 3) * y * y - 2 * y * k);
        bracket = l2_2 + l0_2 * y + l1_2 * y - l2_2 * y + l3_2 * y + l3_2 * y * y - 2 * k;
        mult = 1.0;
    } else {
        // Corrected coupling -4 l3^2 y^2 Q (published: +4 l3^2 y^2 Q); with it
        // quartic+coupling equals C^2 - 4 l0^2 l3^2 y^2.
        const double q_coupling =
            corrected_coupling ? -4 * l3_2 * y * y * k : 4 * l3_2 * y * y * k;
        quartic = l2_2 * l2_2 * (1 - y) * (1 - y) + l0_2 * l0_2 * y * y + l1_2 * l1_2 * y * y -
                  4 * l1_2 * l3_2 * y * y + 6 * l1_2 * l3_2 * y * y * y +
                  l3_2 * l3_2 * y * y * y * y - 4 * l1_2 * y * k + q_coupling;
        coupling = 2 * l2_2 * (1 - y) * (l0_2 * y + 3 * l1_2 * y + l3_2 * y * y - 2 * k) +
                   l0_2 * (2 * l1_2 * y * y + 2 * l3_2 * (y - 2) * y * y - 4 * y * k);
        bracket = l2_2 + l0_2 * y + l1_2 * y - l2_2 * y + l3_2 * y * y - 2 * k;
        mult = 1.5;
    }

    double rad = quartic + coupling;
    if (rad < -1e-10) throw CurveDomainError{};
    rad = std::max(0.0, rad);
    if (terms) *terms = ClosedCurveTerms{k, quartic, coupling};
    return mult * (bracket - std::sqrt(rad));
}

}  // namespace detail

/// Closed-form P(y) for the asymmetric target.
inline double asym_curve_closed(const WCanonicalForm& lam, double y,
                                CrossTermReading reading = CrossTermReading::SquaredRadicand,
                                ClosedCurveTerms* terms = nullptr) {
    const bool corrected = reading == CrossTermReading::SquaredRadicand;
    return detail::closed_curve_eval(lam.lambda, y, TargetKind::Asymmetric, corrected, corrected,
                                     terms);
}

/// Closed-form P(y) for the symmetric target.
inline double sym_curve_closed(const WCanonicalForm& lam, double y,
                               CrossTermReading reading = CrossTermReading::SquaredRadicand,
                               ClosedCurveTerms* terms = nullptr) {
    const bool corrected = reading == CrossTermReading::SquaredRadicand;
    return detail::closed_curve_eval(lam.lambda, y, TargetKind::Symmetric, corrected, corrected,
                                     terms);
}

inline double curve_closed(const WCanonicalForm& lam, double y, TargetKind target,
                           CrossTermReading reading = CrossTermReading::SquaredRadicand,
                           ClosedCurveTerms* terms = nullptr) {
    return target == TargetKind::Asymmetric ? asym_curve_closed(lam, y, reading, terms)
                                            : sym_curve_closed(lam, y, reading, terms);
}

struct ConstructivePoint {
    double a1 = 0;
    PovmTriple povms;
    double p = 0;
};

/// Independent constructive evaluation of the curve at one y: party 2 stays
/// passive, party 3 is pinned by the target ratio, the boundary conditions
/// fix the off-diagonal magnitudes, and the |100>-annihilation condition
///   (l0 c1 + l1 d1) a3 + l2 d1 b3 = 0     (b3 <= 0)
/// is solved for a1 by bisection. The condition determines the sign of c1:
/// nonnegative while l2|b3| >= l1 a3, negative beyond. Empty only when the
/// residual cannot be brought down (never for a W-class coefficient vector).
inline std::optional<ConstructivePoint> curve_constructive(const WCanonicalForm& lam, double y,
                                                           TargetKind target) {
    detail::check_curve_y(y);
    const auto& l = lam.lambda;
    if (!(l[0] > 0) || !(l[2] > 0) || !(l[3] > 0))
        throw std::invalid_argument("constructive curve needs a W-class coefficient vector");

    const double ratio = target == TargetKind::Asymmetric ? std::sqrt(2.0) : 1.0;
    const double mult = target == TargetKind::Asymmetric ? 2.0 : 3.0;

    const double a3 = std::sqrt(y);
    const double d3 = (l[3] / l[2]) * a3;
    const double b3_mag = std::sqrt(std::max(0.0, (1 - a3 * a3) * (1 - d3 * d3)));

    const double kappa = l[0] / (ratio * l[3]);
    const double a1_max = std::min(1.0, 1.0 / kappa);

    // c1 required by the annihilation condition is d1 * slope; the remaining
    // equation |c1| = sqrt((1-a1^2)(1-d1^2)) is monotone in a1. d1 equals one
    // exactly at a1_max, so clamp away the roundoff of kappa * (1/kappa).
    const double slope = (l[2] * b3_mag - l[1] * a3) / (l[0] * a3);
    const auto residual = [&](double a1) {
        const double d1 = std::min(kappa * a1, 1.0);
        const double c1_mag = std::sqrt(std::max(0.0, 1 - a1 * a1) * std::max(0.0, 1 - d1 * d1));
        return c1_mag - d1 * std::abs(slope);
    };

    double root;
    // c1 vanishes exactly at a1_max (a1 = 1 or d1 = 1), so the endpoint
    // residual is -d1 |slope| without roundoff from the generic formula.
    const double f_hi = -std::min(kappa * a1_max, 1.0) * std::abs(slope);
    if (f_hi >= -1e-13) {
        root = a1_max;
    } else {
        double lo = 0.0, hi = a1_max;  // residual(0) = 1 > 0 > residual(a1_max)
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f = residual(mid);
            if (std::abs(f) < 1e-13 || hi - lo < 1e-16) {
                lo = hi = mid;
                break;
            }
            (f > 0 ? lo : hi) = mid;
        }
        root = 0.5 * (lo + hi);
    }

    ConstructivePoint out;
    out.a1 = root;
    const double d1 = std::min(kappa * root, 1.0);
    // At the root the annihilation condition reads c1 = d1 * slope exactly;
    // using it directly zeroes the |100> amplitude to machine precision.
    const double c1 = root >= a1_max ? 0.0 : d1 * slope;
    out.povms.a = TriangularPovm{1, root, c1, d1};
    out.povms.b = TriangularPovm{2, 1.0, 0.0, 1.0};
    out.povms.c = TriangularPovm{3, a3, b3_mag > 0.0 ? -b3_mag : 0.0, d3};
    out.p = mult * l[0] * l[0] * root * root * y;
    return out;
}

struct CurveMaximum {
    double y_star = 1;
    double p_star = 0;
};

/// Maximum of the constructive curve over (0, 1]: dense scan at 4096 points
/// (the endpoint y = 1 always included) followed by golden-section refinement
/// of the best bracket.
inline CurveMaximum maximize(const WCanonicalForm& lam, TargetKind target) {
    constexpr int kGrid = 4096;
    const auto value = [&](double y) -> double {
        const auto pt = curve_constructive(lam, y, target);
        return pt ? pt->p : -1.0;
    };

    CurveMaximum best{0, -1};
    int best_idx = -1;
    for (int i = 1; i <= kGrid; ++i) {
        const double y = static_cast<double>(i) / kGrid;
        const double p = value(y);
        if (p > best.p_star) {
            best = {y, p};
            best_idx = i;
        }
    }
    if (best_idx < 0) throw NoFeasiblePointError{};

    double lo = std::max(static_cast<double>(best_idx - 1) / kGrid, 1e-12);
    double hi = std::min(static_cast<double>(best_idx + 1) / kGrid, 1.0);
    const double inv_gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - (hi - lo) * inv_gr;
    double d = lo + (hi - lo) * inv_gr;
    double fc = value(c), fd = value(d);
    while (hi - lo > 1e-10) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) * inv_gr;
            fc = value(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) * inv_gr;
            fd = value(d);
        }
        if (fc > best.p_star) best = {c, fc};
        if (fd > best.p_star) best = {d, fd};
    }
    return best;
}

/// Closed-form optimum and POVMs for coefficient vectors with lambda1 = 0;
/// the maximum sits at y = 1.
inline std::pair<double, PovmTriple> special_case_lambda1_zero(const WCanonicalForm& lam,
                                                               TargetKind target) {
    const auto& l = lam.lambda;
    if (!(l[1] < 1e-12))
        throw std::invalid_argument("special case requires lambda1 = 0");

    PovmTriple povms;
    povms.b = TriangularPovm{2, 1.0, 0.0, 1.0};
    povms.c = TriangularPovm{3, 1.0, 0.0, l[3] / l[2]};
    double p;
    if (target == TargetKind::Asymmetric) {
        const double s2l3 = std::sqrt(2.0) * l[3];
        p = l[0] * l[0] + 2 * l[3] * l[3] - std::abs(l[0] * l[0] - 2 * l[3] * l[3]);
        if (s2l3 <= l[0]) {
            povms.a = TriangularPovm{1, s2l3 / l[0], 0.0, 1.0};
        } else {
            povms.a = TriangularPovm{1, 1.0, 0.0, l[0] / s2l3};
        }
    } else {
        p = 3 * l[3] * l[3];
        povms.a = TriangularPovm{1, l[3] / l[0], 0.0, 1.0};
    }
    return {p, povms};
}

struct ProbabilityCurve {
    TargetKind target = TargetKind::Asymmetric;
    std::vector<std::pair<double, double>> samples;  // (y, p), y increasing
    int omitted = 0;                                 // infeasible sample points
};

inline ProbabilityCurve sample_curve(const WCanonicalForm& lam, TargetKind target, int n) {
    if (n < 2) throw std::invalid_argument("sample_curve needs n >= 2");
    ProbabilityCurve curve;
    curve.target = target;
    curve.samples.reserve(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        const double y = static_cast<double>(j) / n;
        if (const auto pt = curve_constructive(lam, y, target)) {
            curve.samples.emplace_back(y, pt->p);
        } else {
            ++curve.omitted;
        }
    }
    return curve;
}

/// Complete optimal single-copy distillation plan for a raw W-class input.
struct DistillationPlan {
    TargetKind target = TargetKind::Asymmetric;
    WCanonicalForm lambdas;
    double y_star = 1;
    double p_star = 0;
    PovmTriple povms;                        // act in the canonical frame
    std::array<LocalOperator, 3> composed_ops;  // act on the raw input, by party
    ThreeQubitState predicted_output;
    double prob_error = 0;    // |measured - p_star|
    double target_error = 0;  // max |lambda - target lambda|
};

/// Builds, composes with the canonical frame, and validates the optimal plan.
inline DistillationPlan build_plan(const ThreeQubitState& state, TargetKind target) {
    if (classify(state) != EntanglementClass::W) throw NotWClassError{};

    DistillationPlan plan;
    plan.target = target;
    plan.lambdas = w_canonicalize(state);
    const CurveMaximum m = maximize(plan.lambdas, target);
    const auto point = curve_constructive(plan.lambdas, m.y_star, target);
    if (!point) throw ConstructionMismatchError("optimal y is infeasible on re-evaluation");
    plan.y_star = m.y_star;
    plan.p_star = point->p;
    plan.povms = point->povms;

    // Slot operators composed with the frame unitaries, routed back to the
    // raw party that occupies each slot.
    const std::array<const LocalOperator*, 3> frame{&plan.lambdas.u1, &plan.lambdas.u2,
                                                    &plan.lambdas.u3};
    const std::array<Mat2, 3> slot_ops{point->povms.a.matrix(), point->povms.b.matrix(),
                                       point->povms.c.matrix()};
    for (int slot = 0; slot < 3; ++slot) {
        const int raw_party = plan.lambdas.perm[slot];
        plan.composed_ops[raw_party - 1] = LocalOperator{slot_ops[slot] * frame[slot]->m, raw_party};
    }

    const MeasuredState measured =
        apply_local(state, plan.composed_ops[0], plan.composed_ops[1], plan.composed_ops[2]);
    plan.predicted_output = measured.state;
    plan.prob_error = std::abs(measured.probability - plan.p_star);

    const WCanonicalForm out_form = w_canonicalize(measured.state);
    const std::array<double, 4> want = target_lambda(target);
    double terr = 0;
    for (int i = 0; i < 4; ++i) terr = std::max(terr, std::abs(out_form.lambda[i] - want[i]));
    plan.target_error = terr;

    if (plan.prob_error >= 1e-9)
        throw ConstructionMismatchError("measured probability differs from p_star");
    if (plan.target_error >= 1e-9)
        throw ConstructionMismatchError("output state does not match the target canonical form");
    return plan;
}

}  // namespace wdistill
