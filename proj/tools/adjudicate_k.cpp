// Generates docs/k-reading-report.md: the data comparing the closed-form
// probability-curve variants against the constructive solver and the
// brute-force optimizer.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wdistill/wdistill.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cross-term adjudication report generator"};
    int instances = 60;
    std::uint64_t seed = 20240601;
    int oracle_stride = 8;
    int oracle_restarts = 400;
    std::string out;
    app.add_option("--instances", instances, "number of coefficient vectors (default 60)");
    app.add_option("--seed", seed, "corpus seed");
    app.add_option("--oracle-stride", oracle_stride, "run the optimizer on every n-th row");
    app.add_option("--oracle-restarts", oracle_restarts, "optimizer restarts per engaged row");
    app.add_option("--out", out, "output path (default: stdout)");
    CLI11_PARSE(app, argc, argv);

    const auto rep =
        wdistill::run_cross_term_adjudication(instances, seed, oracle_stride, oracle_restarts);

    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3e", v);
        return std::string(buf);
    };

    std::string s;
    s += "# Closed-form curve adjudication\n\n";
    s += "The closed-form success-probability curve P(y) is evaluated in three variants and\n";
    s += "compared against the constructive solver, which builds the actual POVM triple at\n";
    s += "each y and whose output is verified end to end by dense matrix application:\n\n";
    s += "- **printed**: the published expression verbatim; the cross term uses the radicand\n";
    s += "  `y (1-y) (l2 - l3^2 y)` and the published coupling sign.\n";
    s += "- **hybrid**: the dimensionally consistent radicand `y (1-y) (l2^2 - l3^2 y)`, with\n";
    s += "  the published coupling sign kept.\n";
    s += "- **corrected**: the consistent radicand together with the sign-corrected coupling\n";
    s += "  term, i.e. `-4y(l1^2 + l3^2 + l3^2 y)K` (asymmetric) and `-4 l3^2 y^2 Q`\n";
    s += "  (symmetric). This makes the outer radicand the exact discriminant of the\n";
    s += "  annihilation-condition quadratic and is what `CrossTermReading::SquaredRadicand`\n";
    s += "  evaluates.\n\n";
    s += "Corpus: " + std::to_string(instances) + " random W-class coefficient vectors, both\n";
    s += "targets alternating, 64 y-samples each, seed " + std::to_string(seed) + ". Every " +
         std::to_string(oracle_stride) + "-th row also runs the independent\n";
    s += "penalty-search optimizer (" + std::to_string(oracle_restarts) + " restarts).\n\n";
    s += "| # | lambda (l0, l1, l2, l3) | target | pts | dev corrected | dev hybrid | dev "
         "printed | optimizer gap |\n";
    s += "|---|---|---|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        char lam[96];
        std::snprintf(lam, sizeof(lam), "(%.4f, %.4f, %.4f, %.4f)", r.lambda[0], r.lambda[1],
                      r.lambda[2], r.lambda[3]);
        s += "| " + std::to_string(i + 1) + " | " + lam + " | " + wdistill::to_string(r.target) +
             " | " + std::to_string(r.points) + " | " + fmt(r.max_dev_corrected) + " | " +
             fmt(r.max_dev_hybrid) + " | " + fmt(r.max_dev_printed) + " | " +
             (r.oracle_ran ? fmt(r.p_oracle - r.p_constructive) : std::string("-")) + " |\n";
    }
    s += "\n## Aggregate\n\n";
    s += "- worst corrected-vs-constructive deviation: **" + fmt(rep.worst_corrected) + "**\n";
    s += "- worst hybrid-vs-constructive deviation: " + fmt(rep.worst_hybrid) + "\n";
    s += "- worst printed-vs-constructive deviation: " + fmt(rep.worst_printed) + "\n";
    s += "- worst |optimizer - constructive| on engaged rows: " + fmt(rep.worst_oracle_gap) + "\n";
    s += "- worst optimizer excess over constructive: " + fmt(rep.worst_oracle_excess) + "\n\n";
    s += "## Conclusion\n\n";
    s += "All variants coincide when l1 = 0 or y = 1 (the cross term vanishes there, which is\n";
    s += "also where the quoted special-case values live). Away from that set only the\n";
    s += "corrected variant tracks the constructive curve (to ~1e-12); the printed and hybrid\n";
    s += "variants deviate at the 1e-2 scale and are refuted by both the constructive solver\n";
    s += "and the optimizer. The library therefore ships SquaredRadicand (= corrected) as the\n";
    s += "default reading, and keeps LinearRadicand (= printed) selectable for reference.\n";

    if (out.empty()) {
        std::cout << s;
    } else {
        std::ofstream f(out);
        if (!f) {
            std::cerr << "cannot open " << out << "\n";
            return 1;
        }
        f << s;
    }
    const bool ok = rep.corrected_consistent && rep.printed_refuted && rep.hybrid_refuted;
    if (!ok) {
        std::cerr << "adjudication data does not support the shipped default\n";
        return 1;
    }
    return 0;
}
