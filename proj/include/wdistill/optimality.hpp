#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wdistill/distill.hpp"

namespace wdistill {

struct InvalidElementError : std::runtime_error {
    InvalidElementError() : std::runtime_error("operator is not a valid POVM element") {}
};

struct DegenerateOperatorError : std::runtime_error {
    DegenerateOperatorError()
        : std::runtime_error("general POVM has b^2 + d^2 ~ 0; reduction undefined") {}
};

/// General one-qubit POVM element with nonnegative magnitudes and free phases:
///   e^{i t1} a|0><0| + e^{i t2} b|0><1| + e^{i t3} c|1><0| + e^{i t4} d|1><1|.
struct GeneralPovm {
    double a = 1, b = 0, c = 0, d = 1;
    double theta1 = 0, theta2 = 0, theta3 = 0, theta4 = 0;

    Mat2 matrix() const {
        return Mat2{{std::polar(a, theta1), std::polar(b, theta2), std::polar(c, theta3),
                     std::polar(d, theta4)}};
    }
};

/// Triangular real element with the same action on a W canonical state as the
/// general element (up to local unitaries) and the same success probability.
inline TriangularPovm reduce_general_povm(const GeneralPovm& g, const WCanonicalForm& lam) {
    const double bd2 = g.b * g.b + g.d * g.d;
    if (bd2 <= 1e-14) throw DegenerateOperatorError{};
    const double bd = std::sqrt(bd2);

    const Complex det_term = std::polar(g.a * g.d, g.theta1 + g.theta4) -
                             std::polar(g.b * g.c, g.theta2 + g.theta3);
    const Complex cross = (std::polar(g.a * g.b, g.theta1 - g.theta2) +
                           std::polar(g.c * g.d, g.theta3 - g.theta4)) /
                          bd;
    const double shift = lam.lambda[1] * bd / lam.lambda[0];

    TriangularPovm out;
    out.party = 1;
    out.a = std::abs(det_term) / bd;
    out.off = std::abs(cross + shift) - shift;
    out.d = bd;
    return out;
}

/// One two-outcome POVM split on party 1 checked against the monotonicity
/// inequality P(psi) >= p1 P(psi1) + p2 P(psi2).
struct SplitTestRecord {
    LocalOperator a1, a2;
    double p1 = 0, p2 = 0;
    double p_parent = 0, p_branch1 = 0, p_branch2 = 0;
    double lhs = 0, rhs = 0;
    bool holds = false;
};

namespace detail {

inline double branch_distill_max(const ThreeQubitState& unnorm, double p, TargetKind target) {
    if (p < 1e-14) return 0.0;
    ThreeQubitState s = unnorm;
    const double inv = 1.0 / std::sqrt(p);
    for (auto& x : s.amps) x *= inv;
    if (classify(s) != EntanglementClass::W) return 0.0;
    return maximize(w_canonicalize(s), target).p_star;
}

}  // namespace detail

/// `parent_max` lets sweeps over many splits of the same state skip the
/// recomputation of the parent optimum.
inline SplitTestRecord two_outcome_split_test(const ThreeQubitState& state,
                                              const LocalOperator& a1, TargetKind target,
                                              std::optional<double> parent_max = std::nullopt) {
    if (!povm_element_valid(a1.m)) throw InvalidElementError{};

    SplitTestRecord rec;
    rec.a1 = LocalOperator{a1.m, 1};
    // The complement is completed with the positive square root; p2 and the
    // canonical form of psi2 depend only on A2^dag A2, so any unitary
    // completion gives the same record.
    Mat2 gap = Mat2::identity() - adjoint(a1.m) * a1.m;
    rec.a2 = LocalOperator{psd_sqrt(gap), 1};

    ThreeQubitState branch1 = state;
    detail::apply_single(branch1, rec.a1.m, 1);
    rec.p1 = norm_squared(branch1);
    ThreeQubitState branch2 = state;
    detail::apply_single(branch2, rec.a2.m, 1);
    rec.p2 = norm_squared(branch2);

    if (parent_max) {
        rec.p_parent = *parent_max;
    } else {
        if (classify(state) != EntanglementClass::W) throw NotWClassError{};
        rec.p_parent = maximize(w_canonicalize(state), target).p_star;
    }
    rec.p_branch1 = detail::branch_distill_max(branch1, rec.p1, target);
    rec.p_branch2 = detail::branch_distill_max(branch2, rec.p2, target);

    rec.lhs = rec.p_parent;
    rec.rhs = rec.p1 * rec.p_branch1 + rec.p2 * rec.p_branch2;
    rec.holds = rec.rhs <= rec.lhs + 1e-8;
    return rec;
}

/// Brute-force search over one-successful-branch protocols. The det-zero
/// boundary conditions and the two target-ratio conditions are enforced
/// exactly inside the evaluator; the |100>-annihilation condition and the
/// derived-entry bounds are driven to zero by a quadratic penalty.
struct OptimalityReport {
    WCanonicalForm lam;
    TargetKind target = TargetKind::Asymmetric;
    double p_closed = 0;
    double p_oracle = 0;
    double gap = 0;  // p_oracle - p_closed
    int restarts = 0;
    int discarded = 0;  // restarts that ended infeasible
    std::uint64_t seed = 0;
    double party2_deviation = 0;  // max(|a2-1|, |b2|, |d2-1|) at the optimum
};

namespace detail {

struct OsbpPoint {
    // The six diagonal entries; the off-diagonal magnitudes follow from the
    // det-zero boundary conditions, with free signs.
    std::array<double, 6> diag{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};  // a1, d1, a2, d2, a3, d3
    std::array<int, 3> signs{1, 1, 1};                         // signs of c1, b2, b3
};

struct OsbpEval {
    double objective = -1e18;  // probability minus penalty
    double probability = 0;
    double violation = 0;  // |h1| + |h2| + |h3|
    double b2 = 0;
};

inline OsbpEval osbp_eval(const std::array<double, 4>& l, double ratio, const OsbpPoint& x,
                          double mu) {
    OsbpEval ev;
    const double a1 = x.diag[0], d1 = x.diag[1], a2 = x.diag[2], d2 = x.diag[3], a3 = x.diag[4],
                 d3 = x.diag[5];
    const auto osbp_off = [](double a, double d) {
        return std::sqrt(std::max(0.0, 1 - a * a) * std::max(0.0, 1 - d * d));
    };
    const double c1 = x.signs[0] * osbp_off(a1, d1);
    const double b2 = x.signs[1] * osbp_off(a2, d2);
    const double b3 = x.signs[2] * osbp_off(a3, d3);
    ev.b2 = b2;

    const double c000 = l[0] * a1 * a2 * a3;
    const double c100 = (l[0] * c1 + l[1] * d1) * a2 * a3 + l[2] * d1 * a2 * b3 + l[3] * d1 * b2 * a3;
    const double c101 = l[2] * d1 * a2 * d3;
    const double c110 = l[3] * d1 * d2 * a3;

    const double h1 = c000 - ratio * c101;
    const double h2 = c000 - ratio * c110;
    const double h3 = c100;

    ev.probability = c000 * c000 + c100 * c100 + c101 * c101 + c110 * c110;
    ev.violation = std::abs(h1) + std::abs(h2) + std::abs(h3);
    ev.objective = ev.probability - mu * (h1 * h1 + h2 * h2 + h3 * h3);
    return ev;
}

}  // namespace detail

inline OptimalityReport oracle_max(const WCanonicalForm& lam, TargetKind target, int restarts,
                                   std::uint64_t seed, int max_evals_per_restart = 50000) {
    if (restarts < 1) throw std::invalid_argument("oracle_max needs restarts >= 1");
    const auto& l = lam.lambda;
    if (!(l[0] > 0) || !(l[2] > 0) || !(l[3] > 0))
        throw std::invalid_argument("oracle_max needs a W-class coefficient vector");
    const double ratio = target == TargetKind::Asymmetric ? std::sqrt(2.0) : 1.0;

    OptimalityReport report;
    report.lam = lam;
    report.target = target;
    report.restarts = restarts;
    report.seed = seed;
    report.p_closed = maximize(lam, target).p_star;

    // Sequential penalty: the valley around the feasible surface is wide at
    // small mu, so coordinate descent tracks it. Each stage resets the step
    // to break zigzag lock-in. The nominal weight is 1e6; two tightening
    // stages follow so the incumbent ends essentially feasible and the
    // reported probability carries no penalty-equilibrium inflation.
    constexpr std::array<double, 7> kMuStages{1e2, 1e3, 1e4, 1e5, 1e6, 1e8, 1e10};

    double best_objective = -1e18;
    detail::OsbpEval best_eval;
    detail::OsbpPoint best_point;

    // After the random restarts, a few dozen jittered re-descents from the
    // incumbent deepen the terminal convergence on stiff instances.
    const int polish_rounds = std::max(8, restarts / 25);

    for (int r = 0; r < restarts + polish_rounds; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        const bool polishing = r >= restarts && best_objective > -1e17;
        detail::OsbpPoint x;
        if (polishing) {
            x = best_point;
            for (auto& v : x.diag) v = std::clamp(v + 0.02 * (rng.uniform() - 0.5), 0.0, 1.0);
        } else {
            for (auto& v : x.diag) v = rng.uniform(0.05, 1.0);
            x.signs = {rng.sign(), rng.sign(), rng.sign()};
        }

        detail::OsbpEval cur;
        for (std::size_t stage = 0; stage < kMuStages.size(); ++stage) {
            const double mu = kMuStages[stage];
            const int stage_budget = max_evals_per_restart / static_cast<int>(kMuStages.size());
            cur = detail::osbp_eval(l, ratio, x, mu);
            double step = stage == 0 ? 0.25 : (stage + 1 < kMuStages.size() ? 0.05 : 0.02);
            int stage_evals = 1;
            while (step >= 1e-9 && stage_evals < stage_budget) {
                const std::array<double, 6> before = x.diag;
                bool improved = false;
                for (int coord = 0; coord < 6; ++coord) {
                    const double saved = x.diag[coord];
                    for (const double dir : {+1.0, -1.0}) {
                        x.diag[coord] = std::clamp(saved + dir * step, 0.0, 1.0);
                        if (x.diag[coord] == saved) continue;
                        const detail::OsbpEval ev = detail::osbp_eval(l, ratio, x, mu);
                        ++stage_evals;
                        if (ev.objective > cur.objective) {
                            cur = ev;
                            improved = true;
                            break;
                        }
                        x.diag[coord] = saved;
                    }
                }
                for (int sbit = 0; sbit < 3; ++sbit) {
                    x.signs[sbit] = -x.signs[sbit];
                    const detail::OsbpEval ev = detail::osbp_eval(l, ratio, x, mu);
                    ++stage_evals;
                    if (ev.objective > cur.objective) {
                        cur = ev;
                        improved = true;
                    } else {
                        x.signs[sbit] = -x.signs[sbit];
                    }
                }
                if (improved) {
                    // Pattern move: extrapolating the net sweep displacement
                    // tracks the penalty valley instead of zigzagging along it.
                    for (int boost = 0; boost < 8 && stage_evals < stage_budget; ++boost) {
                        std::array<double, 6> trial;
                        for (int i = 0; i < 6; ++i)
                            trial[i] = std::clamp(2.0 * x.diag[i] - before[i], 0.0, 1.0);
                        if (trial == x.diag) break;
                        const std::array<double, 6> prev = x.diag;
                        x.diag = trial;
                        const detail::OsbpEval ev = detail::osbp_eval(l, ratio, x, mu);
                        ++stage_evals;
                        if (ev.objective > cur.objective) {
                            cur = ev;
                        } else {
                            x.diag = prev;
                            break;
                        }
                    }
                } else {
                    step *= 0.5;
                }
            }
        }

        if (cur.violation > 1e-5) {
            if (!polishing) ++report.discarded;
            continue;
        }
        if (cur.objective > best_objective) {
            best_objective = cur.objective;
            best_eval = cur;
            best_point = x;
        }
    }

    if (best_objective > -1e17) {
        report.p_oracle = best_eval.probability;
        report.party2_deviation =
            std::max({std::abs(best_point.diag[2] - 1.0), std::abs(best_eval.b2),
                      std::abs(best_point.diag[3] - 1.0)});
    }
    report.gap = report.p_oracle - report.p_closed;
    return report;
}

/// Random valid general POVM element, bounded away from singular so that the
/// transformed state stays W class.
inline GeneralPovm random_general_povm(std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x6a09e667));
    GeneralPovm g;
    for (int tries = 0; tries < 256; ++tries) {
        g.a = rng.uniform(0.05, 1.0);
        g.b = rng.uniform(0.05, 1.0);
        g.c = rng.uniform(0.05, 1.0);
        g.d = rng.uniform(0.05, 1.0);
        g.theta1 = rng.uniform(0, 2 * std::numbers::pi);
        g.theta2 = rng.uniform(0, 2 * std::numbers::pi);
        g.theta3 = rng.uniform(0, 2 * std::numbers::pi);
        g.theta4 = rng.uniform(0, 2 * std::numbers::pi);
        const Mat2 m = g.matrix();
        const double top = std::sqrt(gram_max_eigenvalue(m));
        const double scale = rng.uniform(0.4, 1.0) / top;
        g.a *= scale;
        g.b *= scale;
        g.c *= scale;
        g.d *= scale;
        if (std::abs(det(g.matrix())) > 0.03) break;
    }
    return g;
}

/// Random W-class coefficient vector (normalized, ordered, bounded away from
/// the biseparable boundary).
inline std::array<double, 4> random_w_lambda(Rng& rng, bool lambda1_zero, double floor = 0.05) {
    for (;;) {
        std::array<double, 4> l{};
        for (auto& v : l) v = std::abs(rng.gaussian());
        if (lambda1_zero) l[1] = 0;
        double n = 0;
        for (const double v : l) n += v * v;
        n = std::sqrt(n);
        for (auto& v : l) v /= n;
        std::array<double, 3> trio{l[0], l[2], l[3]};
        std::sort(trio.begin(), trio.end(), std::greater<>());
        l[0] = trio[0];
        l[2] = trio[1];
        l[3] = trio[2];
        if (l[3] >= floor) return l;
    }
}

/// One adjudication instance: the closed-form evaluator variants compared
/// against the constructive curve across sampled y values. "printed" is the
/// published expression verbatim, "hybrid" squares the cross-term radicand
/// but keeps the published coupling sign, "corrected" is the shipped
/// SquaredRadicand evaluator.
struct AdjudicationRow {
    std::array<double, 4> lambda{};
    TargetKind target = TargetKind::Asymmetric;
    int points = 0;
    double max_dev_corrected = 0;
    double max_dev_hybrid = 0;
    double max_dev_printed = 0;
    int printed_domain_errors = 0;
    bool oracle_ran = false;
    double p_constructive = 0;
    double p_oracle = 0;
};

struct AdjudicationReport {
    std::vector<AdjudicationRow> rows;
    double worst_corrected = 0;
    double worst_hybrid = 0;
    double worst_printed = 0;
    double worst_oracle_gap = 0;     // max |p_oracle - p_constructive| on oracle rows
    double worst_oracle_excess = 0;  // max (p_oracle - p_constructive)
    bool corrected_consistent = false;
    bool hybrid_refuted = false;
    bool printed_refuted = false;
};

/// Runs the cross-term adjudication experiment: `instances` random W-class
/// coefficient vectors, both targets alternating, with the oracle engaged on
/// every `oracle_stride`-th row.
inline AdjudicationReport run_cross_term_adjudication(int instances, std::uint64_t seed,
                                                      int oracle_stride = 8,
                                                      int oracle_restarts = 300) {
    AdjudicationReport report;
    Rng rng(mix_seed(seed, 0x41444a55));
    for (int i = 0; i < instances; ++i) {
        AdjudicationRow row;
        // Keep a few lambda1 = 0 rows; all variants coincide there and serve
        // as agreement controls.
        row.lambda = random_w_lambda(rng, i % 10 == 9);
        row.target = (i % 2 == 0) ? TargetKind::Asymmetric : TargetKind::Symmetric;
        const WCanonicalForm lam = w_form_from_lambda(row.lambda);

        constexpr int kProbes = 64;
        for (int j = 1; j <= kProbes; ++j) {
            const double y = static_cast<double>(j) / kProbes;
            const auto pt = curve_constructive(lam, y, row.target);
            if (!pt) continue;
            ++row.points;
            const double corrected =
                detail::closed_curve_eval(row.lambda, y, row.target, true, true, nullptr);
            row.max_dev_corrected = std::max(row.max_dev_corrected, std::abs(corrected - pt->p));
            try {
                const double hybrid =
                    detail::closed_curve_eval(row.lambda, y, row.target, true, false, nullptr);
                row.max_dev_hybrid = std::max(row.max_dev_hybrid, std::abs(hybrid - pt->p));
            } catch (const CurveDomainError&) {
            }
            try {
                const double printed =
                    detail::closed_curve_eval(row.lambda, y, row.target, false, false, nullptr);
                row.max_dev_printed = std::max(row.max_dev_printed, std::abs(printed - pt->p));
            } catch (const CurveDomainError&) {
                ++row.printed_domain_errors;
            }
        }

        if (i % oracle_stride == 0) {
            row.oracle_ran = true;
            row.p_constructive = maximize(lam, row.target).p_star;
            row.p_oracle =
                oracle_max(lam, row.target, oracle_restarts, mix_seed(seed, 1000 + i)).p_oracle;
            report.worst_oracle_gap =
                std::max(report.worst_oracle_gap, std::abs(row.p_oracle - row.p_constructive));
            report.worst_oracle_excess =
                std::max(report.worst_oracle_excess, row.p_oracle - row.p_constructive);
        }

        report.worst_corrected = std::max(report.worst_corrected, row.max_dev_corrected);
        report.worst_hybrid = std::max(report.worst_hybrid, row.max_dev_hybrid);
        report.worst_printed = std::max(report.worst_printed, row.max_dev_printed);
        report.rows.push_back(row);
    }
    report.corrected_consistent = report.worst_corrected <= 1e-8;
    report.hybrid_refuted = report.worst_hybrid > 1e-6;
    report.printed_refuted = report.worst_printed > 1e-6;
    return report;
}

}  // namespace wdistill
