// wdistill: canonical forms, SLOCC classification, and optimal single-copy
// distillation protocols for three-qubit W states, with JSON/CSV output.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdistill/wdistill.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;      // malformed input document
constexpr int kExitDegenerate = 3;  // zero vector / product state
constexpr int kExitClass = 4;       // class precondition (not W)
constexpr int kExitInternal = 5;    // internal consistency failure

// All JSON numbers are emitted with 17 significant digits, which round-trips
// IEEE doubles exactly and keeps reports byte-stable.
std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string num12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string real_mat(const wdistill::TriangularPovm& t) {
    const wdistill::Mat2 m = t.matrix();
    std::string s = "[[" + num(m(0, 0).real()) + ", " + num(m(0, 1).real()) + "], [" +
                    num(m(1, 0).real()) + ", " + num(m(1, 1).real()) + "]]";
    return s;
}

std::string complex_entry(const wdistill::Complex& z) {
    return "[" + num(z.real()) + ", " + num(z.imag()) + "]";
}

std::string complex_mat(const wdistill::Mat2& m) {
    return "[[" + complex_entry(m(0, 0)) + ", " + complex_entry(m(0, 1)) + "], [" +
           complex_entry(m(1, 0)) + ", " + complex_entry(m(1, 1)) + "]]";
}

std::string lambda_list(const std::array<double, 4>& l) {
    return "[" + num(l[0]) + ", " + num(l[1]) + ", " + num(l[2]) + ", " + num(l[3]) + "]";
}

std::string perm_string(const std::array<int, 3>& p) {
    return std::to_string(p[0]) + std::to_string(p[1]) + std::to_string(p[2]);
}

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

wdistill::NormalizedState parse_state(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("amps")) throw SchemaError("missing \"amps\" field");
    const auto& amps = doc["amps"];
    if (!amps.is_array() || amps.size() != 8)
        throw SchemaError("\"amps\" must be an array of exactly 8 [re, im] pairs");
    std::array<wdistill::Complex, 8> raw;
    for (std::size_t i = 0; i < 8; ++i) {
        const auto& pair = amps[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw SchemaError("amplitude " + std::to_string(i) + " is not a [re, im] pair");
        const double re = pair[0].get<double>();
        const double im = pair[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im))
            throw SchemaError("amplitude " + std::to_string(i) + " is not finite");
        raw[i] = wdistill::Complex(re, im);
    }
    return wdistill::make_state(raw);
}

wdistill::TargetKind parse_target(const std::string& t) {
    if (t == "asym") return wdistill::TargetKind::Asymmetric;
    if (t == "sym") return wdistill::TargetKind::Symmetric;
    throw SchemaError("--target must be \"sym\" or \"asym\"");
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw SchemaError("cannot open output file: " + out_path);
    f << text;
}

// In strict mode (CI) every randomized command must pin its seed explicitly.
void check_seed_required(bool seed_given) {
    const char* env = std::getenv("WDISTILL_REQUIRE_SEED");
    if (env && *env && std::string(env) != "0" && !seed_given)
        throw SchemaError("WDISTILL_REQUIRE_SEED is set: pass an explicit --seed");
}

int cmd_canonicalize(const std::string& input, const std::string& out) {
    const auto state = parse_state(read_input(input));
    const auto forms = wdistill::canonicalize(state.state);
    std::string s = "{\n  \"forms\": [\n";
    for (std::size_t i = 0; i < forms.size(); ++i) {
        const auto& f = forms[i];
        s += "    {\n      \"lambda\": [" + num(f.lambda[0]) + ", " + num(f.lambda[1]) + ", " +
             num(f.lambda[2]) + ", " + num(f.lambda[3]) + ", " + num(f.lambda[4]) + "],\n";
        s += "      \"phi\": " + num(f.phi) + ",\n";
        s += "      \"tangle\": " + num(wdistill::three_tangle(f)) + ",\n";
        s += "      \"U1\": " + complex_mat(f.u1.m) + ",\n";
        s += "      \"U2\": " + complex_mat(f.u2.m) + ",\n";
        s += "      \"U3\": " + complex_mat(f.u3.m) + "\n    }";
        s += (i + 1 < forms.size()) ? ",\n" : "\n";
    }
    s += "  ]\n}\n";
    write_output(s, out);
    return kExitOk;
}

int cmd_classify(const std::string& input, const std::string& out) {
    const auto state = parse_state(read_input(input));
    const auto c = wdistill::classify_full(state.state);
    std::string s = "{\n";
    s += "  \"class\": \"" + std::string(wdistill::to_string(c.tag)) + "\",\n";
    s += "  \"tangle\": " + num(c.tangle) + ",\n";
    s += "  \"ranks\": [" + std::to_string(c.ranks[0]) + ", " + std::to_string(c.ranks[1]) + ", " +
         std::to_string(c.ranks[2]) + "]\n}\n";
    write_output(s, out);
    return kExitOk;
}

int cmd_distill(const std::string& input, const std::string& target, const std::string& out) {
    const auto state = parse_state(read_input(input));
    const auto plan = wdistill::build_plan(state.state, parse_target(target));
    std::string s = "{\n";
    s += "  \"target\": \"" + std::string(wdistill::to_string(plan.target)) + "\",\n";
    s += "  \"lambdas\": " + lambda_list(plan.lambdas.lambda) + ",\n";
    s += "  \"perm\": \"" + perm_string(plan.lambdas.perm) + "\",\n";
    s += "  \"y_star\": " + num(plan.y_star) + ",\n";
    s += "  \"p_star\": " + num(plan.p_star) + ",\n";
    s += "  \"povms\": {\n";
    s += "    \"A\": " + real_mat(plan.povms.a) + ",\n";
    s += "    \"B\": " + real_mat(plan.povms.b) + ",\n";
    s += "    \"C\": " + real_mat(plan.povms.c) + "\n  },\n";
    s += "  \"composed_ops\": {\n";
    s += "    \"A\": " + complex_mat(plan.composed_ops[0].m) + ",\n";
    s += "    \"B\": " + complex_mat(plan.composed_ops[1].m) + ",\n";
    s += "    \"C\": " + complex_mat(plan.composed_ops[2].m) + "\n  },\n";
    s += "  \"validation\": {\n";
    s += "    \"prob_error\": " + num(plan.prob_error) + ",\n";
    s += "    \"target_error\": " + num(plan.target_error) + "\n  }\n}\n";
    write_output(s, out);
    return kExitOk;
}

int cmd_curve(const std::string& input, const std::string& target, int samples,
              const std::string& out) {
    if (samples < 2) throw SchemaError("--samples must be >= 2");
    const auto state = parse_state(read_input(input));
    const auto lam = wdistill::w_canonicalize(state.state);
    const auto curve = wdistill::sample_curve(lam, parse_target(target), samples);
    std::string s = "y,p\n";
    for (const auto& [y, p] : curve.samples) s += num12(y) + "," + num12(p) + "\n";
    write_output(s, out);
    if (curve.omitted > 0)
        std::cerr << "omitted " << curve.omitted << " infeasible sample points\n";
    return kExitOk;
}

int cmd_verify(const std::string& input, const std::string& target, int restarts,
               std::uint64_t seed, bool seed_given, const std::string& out) {
    check_seed_required(seed_given);
    const auto state = parse_state(read_input(input));
    const auto lam = wdistill::w_canonicalize(state.state);
    const auto rep = wdistill::oracle_max(lam, parse_target(target), restarts, seed);
    std::string s = "{\n";
    s += "  \"target\": \"" + std::string(wdistill::to_string(rep.target)) + "\",\n";
    s += "  \"lambdas\": " + lambda_list(rep.lam.lambda) + ",\n";
    s += "  \"p_closed\": " + num(rep.p_closed) + ",\n";
    s += "  \"p_oracle\": " + num(rep.p_oracle) + ",\n";
    s += "  \"gap\": " + num(rep.gap) + ",\n";
    s += "  \"restarts\": " + std::to_string(rep.restarts) + ",\n";
    s += "  \"discarded\": " + std::to_string(rep.discarded) + ",\n";
    s += "  \"seed\": " + std::to_string(rep.seed) + ",\n";
    s += "  \"party2_deviation\": " + num(rep.party2_deviation) + "\n}\n";
    write_output(s, out);
    return kExitOk;
}

int cmd_split_test(const std::string& input, const std::string& target, int trials,
                   std::uint64_t seed, bool seed_given, const std::string& out) {
    check_seed_required(seed_given);
    if (trials < 1) throw SchemaError("--trials must be >= 1");
    const auto state = parse_state(read_input(input));
    const auto kind = parse_target(target);
    if (wdistill::classify(state.state) != wdistill::EntanglementClass::W)
        throw wdistill::NotWClassError{};
    const double parent =
        wdistill::maximize(wdistill::w_canonicalize(state.state), kind).p_star;

    int holds = 0;
    double max_excess = -1e300;
    for (int i = 0; i < trials; ++i) {
        wdistill::Rng rng(wdistill::mix_seed(seed, static_cast<std::uint64_t>(i)));
        wdistill::Mat2 m;
        for (auto& e : m.e) e = rng.gaussian_complex();
        const double top = std::sqrt(wdistill::gram_max_eigenvalue(m));
        const double scale = rng.uniform(0.1, 1.0) / top;
        for (auto& e : m.e) e *= scale;
        const auto rec = wdistill::two_outcome_split_test(
            state.state, wdistill::LocalOperator{m, 1}, kind, parent);
        if (rec.holds) ++holds;
        max_excess = std::max(max_excess, rec.rhs - rec.lhs);
    }
    std::string s = "{\n";
    s += "  \"target\": \"" + std::string(wdistill::to_string(kind)) + "\",\n";
    s += "  \"trials\": " + std::to_string(trials) + ",\n";
    s += "  \"holds\": " + std::to_string(holds) + ",\n";
    s += "  \"violations\": " + std::to_string(trials - holds) + ",\n";
    s += "  \"max_excess\": " + num(max_excess) + ",\n";
    s += "  \"seed\": " + std::to_string(seed) + "\n}\n";
    write_output(s, out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"three-qubit W-state canonical forms, classification, and optimal distillation"};
    app.require_subcommand(1);

    std::string input, out, target = "asym";
    int samples = 64, restarts = 1000, trials = 1000;
    std::uint64_t seed = 12345;

    auto* canon = app.add_subcommand("canonicalize", "reduce a state to canonical form");
    canon->add_option("input", input, "state JSON file (default: stdin)");
    canon->add_option("--out", out, "output path (default: stdout)");

    auto* cls = app.add_subcommand("classify", "SLOCC class, tangle, reduced ranks");
    cls->add_option("input", input, "state JSON file (default: stdin)");
    cls->add_option("--out", out, "output path (default: stdout)");

    auto* dist = app.add_subcommand("distill", "optimal single-copy distillation plan");
    dist->add_option("input", input, "state JSON file (default: stdin)");
    dist->add_option("--target", target, "sym or asym")->required();
    dist->add_option("--out", out, "output path (default: stdout)");

    auto* curve = app.add_subcommand("curve", "sample the probability curve P(y) as CSV");
    curve->add_option("input", input, "state JSON file (default: stdin)");
    curve->add_option("--target", target, "sym or asym")->required();
    curve->add_option("--samples", samples, "number of y samples (default 64)");
    curve->add_option("--out", out, "output path (default: stdout)");

    auto* verify = app.add_subcommand("verify", "brute-force check of the optimal probability");
    verify->add_option("input", input, "state JSON file (default: stdin)");
    verify->add_option("--target", target, "sym or asym")->required();
    verify->add_option("--restarts", restarts, "random restarts (default 1000)");
    auto* vseed = verify->add_option("--seed", seed, "search seed (default 12345)");
    verify->add_option("--out", out, "output path (default: stdout)");

    auto* split = app.add_subcommand("split-test", "Monte Carlo two-outcome monotonicity test");
    split->add_option("input", input, "state JSON file (default: stdin)");
    split->add_option("--target", target, "sym or asym (default asym)");
    split->add_option("--trials", trials, "number of random splits (default 1000)");
    auto* sseed = split->add_option("--seed", seed, "trial seed (default 12345)");
    split->add_option("--out", out, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(canon)) return cmd_canonicalize(input, out);
        if (app.got_subcommand(cls)) return cmd_classify(input, out);
        if (app.got_subcommand(dist)) return cmd_distill(input, target, out);
        if (app.got_subcommand(curve)) return cmd_curve(input, target, samples, out);
        if (app.got_subcommand(verify))
            return cmd_verify(input, target, restarts, seed, vseed->count() > 0, out);
        if (app.got_subcommand(split))
            return cmd_split_test(input, target, trials, seed, sseed->count() > 0, out);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const wdistill::ZeroVectorError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const wdistill::DegenerateStateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const wdistill::NotWClassError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitClass;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitSchema;
}
