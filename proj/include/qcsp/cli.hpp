#pragma once

// Command dispatch for the qcsp tool. Decision commands exit 0 for true and
// 1 for false; 2 is a usage error, 3 a validation, parse or budget error.

#include <filesystem>
#include <iomanip>

#include "qcsp/algebra.hpp"
#include "qcsp/gallery.hpp"
#include "qcsp/io.hpp"
#include "qcsp/reduction.hpp"
#include "qcsp/semantics.hpp"

namespace qcsp::cli {

enum ExitCode : int { kTrue = 0, kFalse = 1, kUsage = 2, kInvalid = 3 };

struct CommandConfig {
    std::string subcommand;
    std::string action;  // example4: decide | gadget | emit-structures

    std::optional<std::string> structure_path;
    std::optional<std::string> formula_path;
    std::optional<std::string> algebra_path;
    std::optional<std::string> seed_path;
    std::optional<std::string> check_path;
    std::optional<std::string> output_path;

    std::string generators = "minimal";  // identity | minimal | full | file:<path>
    std::size_t max_poly_arity = 2;
    std::size_t max_n = 3;
    std::size_t power = 1;
    std::size_t arity = 2;
    std::size_t budget = Limits{}.power_elements;
    bool verify_oracle = false;
    bool report = false;
    std::vector<std::string> assignments;  // name=value
};

struct CommandResult {
    int exit_code = kTrue;
    std::string output;
    std::string error;
};

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"eval",    "expand",      "rank",    "reduce",
                                                "dseq",    "gens",        "closure", "poly",
                                                "collapsible", "classify", "bipartite-p", "example4"};
    return names;
}

namespace detail {

struct UsageError : Error {
    using Error::Error;
};

inline void need(const std::optional<std::string>& path, const char* flag) {
    if (!path) throw UsageError(std::string("missing required option ") + flag);
}

inline std::optional<std::string> generator_file(const std::string& spec) {
    if (spec.rfind("file:", 0) == 0) return spec.substr(5);
    return std::nullopt;
}

}  // namespace detail

/// Flag checks that need no file access. Returns a usage diagnostic.
inline std::optional<std::string> validate_config(const CommandConfig& cfg) {
    using detail::need;
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), cfg.subcommand) == names.end())
        return "unknown subcommand '" + cfg.subcommand + "'";
    try {
        const auto& c = cfg.subcommand;
        if (c == "eval" || c == "reduce") {
            need(cfg.structure_path, "--structure");
            need(cfg.formula_path, "--formula");
        }
        if (c == "expand" || c == "poly" || c == "bipartite-p") need(cfg.structure_path, "--structure");
        if (c == "rank") need(cfg.formula_path, "--formula");
        if (c == "dseq" || c == "classify" || c == "closure") need(cfg.algebra_path, "--algebra");
        if (c == "closure") need(cfg.seed_path, "--seed");
        if (c == "gens" || c == "collapsible") {
            if (!cfg.algebra_path && !cfg.structure_path) return "one of --algebra or --structure is required";
        }
        if (c == "reduce" || c == "gens") {
            const auto& g = cfg.generators;
            if (g != "identity" && g != "minimal" && g != "full" && !detail::generator_file(g))
                return "--generators must be identity, minimal, full or file:<path>";
            if (cfg.max_poly_arity < 1) return "--max-poly-arity must be >= 1";
        }
        if ((c == "dseq" || c == "classify") && cfg.max_n < 1) return "--max-n must be >= 1";
        if (c == "gens" && cfg.power < 1) return "--power must be >= 1";
        if (c == "poly" && cfg.arity < 1) return "--arity must be >= 1";
        if (c == "example4") {
            if (cfg.action == "decide" || cfg.action == "gadget")
                need(cfg.formula_path, "--formula");
            else if (cfg.action == "emit-structures")
                need(cfg.output_path, "--output");
            else
                return "example4 needs an action: decide, gadget or emit-structures";
        }
        for (const auto& a : cfg.assignments) {
            auto eq = a.find('=');
            if (eq == std::string::npos || eq == 0 || !qcsp::detail::is_number(a.substr(eq + 1)))
                return "--assign expects name=value, got '" + a + "'";
        }
    } catch (const detail::UsageError& e) {
        return e.what();
    }
    return std::nullopt;
}

namespace detail {

inline std::string tuple_text(const Tuple& t) {
    std::string s;
    for (auto e : t) s += (s.empty() ? "" : " ") + std::to_string(e);
    return s;
}

inline Limits limits_of(const CommandConfig& cfg) {
    Limits l;
    l.power_elements = cfg.budget;
    return l;
}

inline Assignment parse_assignments(const CommandConfig& cfg) {
    Assignment a;
    for (const auto& s : cfg.assignments) {
        auto eq = s.find('=');
        a[s.substr(0, eq)] = static_cast<Element>(std::stoul(s.substr(eq + 1)));
    }
    return a;
}

inline Algebra load_algebra(const CommandConfig& cfg) {
    if (cfg.algebra_path) return parse_algebra(read_file(*cfg.algebra_path));
    auto s = parse_structure(read_file(*cfg.structure_path));
    return algebra_of_structure(s, cfg.max_poly_arity, limits_of(cfg));
}

// true iff f and g agree on every assignment to the free variables
inline bool oracle_equivalent(const Structure& s, const QCFormula& f, const QCFormula& g) {
    bool same = true;
    for_each_assignment(f.free_vars, s.universe_size(), [&](const Assignment& a) {
        if (same && eval_qcsp(s, f, a) != eval_csp(s, g, a).truth) same = false;
    });
    return same;
}

inline GeneratorProvider provider_for(const CommandConfig& cfg, const Algebra& a) {
    auto file = generator_file(cfg.generators);
    GeneratorStrategy strategy = file                             ? GeneratorStrategy::UserFile
                                 : cfg.generators == "identity"   ? GeneratorStrategy::Identity
                                 : cfg.generators == "full"       ? GeneratorStrategy::Full
                                                                  : GeneratorStrategy::Minimal;
    return make_generator_provider(a, strategy, file, ValidationMode::Verify, limits_of(cfg));
}

inline void write_output(const CommandConfig& cfg, CommandResult& r) {
    if (!cfg.output_path || cfg.subcommand == "example4") return;
    std::ofstream out(*cfg.output_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + *cfg.output_path + "'");
    out << r.output;
}

inline CommandResult run(const CommandConfig& cfg) {
    CommandResult r;
    std::ostringstream out;
    const auto& c = cfg.subcommand;

    if (c == "eval") {
        auto s = parse_structure(read_file(*cfg.structure_path));
        auto f = parse_formula(read_file(*cfg.formula_path));
        require_valid(s, f);
        auto a = parse_assignments(cfg);
        bool truth;
        if (f.is_existential()) {
            auto res = eval_csp(s, f, a);
            truth = res.truth;
            out << (truth ? "TRUE" : "FALSE") << "\n";
            if (res.witness)
                for (const auto& b : f.prefix) out << b.variable << " = " << res.witness->at(b.variable) << "\n";
        } else {
            truth = eval_qcsp(s, f, a);
            out << (truth ? "TRUE" : "FALSE") << "\n";
        }
        r.exit_code = truth ? kTrue : kFalse;
    } else if (c == "expand") {
        out << print_structure(expand_with_constants(parse_structure(read_file(*cfg.structure_path))));
    } else if (c == "rank") {
        out << prefix_alternation_rank(parse_formula(read_file(*cfg.formula_path))) << "\n";
    } else if (c == "reduce") {
        auto sstar = expand_with_constants(parse_structure(read_file(*cfg.structure_path)));
        auto f = parse_formula(read_file(*cfg.formula_path));
        require_valid(sstar, f);
        auto algebra = algebra_of_structure(sstar, cfg.max_poly_arity, limits_of(cfg));
        auto provider = provider_for(cfg, algebra);
        auto reduction = reduce_qcsp(sstar, f, provider);
        out << print_formula(reduction.formula) << "\n";
        if (cfg.report) {
            out << "stage power generators in_vars in_atoms out_vars out_atoms\n";
            for (std::size_t i = 0; i < reduction.report.stages.size(); ++i) {
                const auto& st = reduction.report.stages[i];
                out << i + 1 << " " << st.power << " " << st.generators << " " << st.input_vars << " "
                    << st.input_atoms << " " << st.output_vars << " " << st.output_atoms << "\n";
            }
            out << "blowup " << std::fixed << std::setprecision(2) << reduction.report.blowup() << "\n";
        }
        if (cfg.verify_oracle) {
            bool same = oracle_equivalent(sstar, f, reduction.formula);
            out << (same ? "EQUIVALENT" : "NOT EQUIVALENT") << "\n";
            r.exit_code = same ? kTrue : kFalse;
        }
    } else if (c == "dseq") {
        auto a = parse_algebra(read_file(*cfg.algebra_path));
        auto seq = d_sequence(a, cfg.max_n, limits_of(cfg));
        out << "n d\n";
        for (std::size_t i = 0; i < seq.values.size(); ++i) out << i + 1 << " " << seq.values[i] << "\n";
        if (seq.truncated) out << "truncated at n=" << seq.values.size() + 1 << ": " << *seq.truncation_reason << "\n";
    } else if (c == "gens") {
        auto a = load_algebra(cfg);
        auto g = provider_for(cfg, a).generators(cfg.power);
        out << "# " << to_string(g.provenance) << " generators of power " << g.power << ", " << g.tuples.size()
            << " tuples, " << (g.verified ? "verified" : "unverified") << "\n";
        out << print_generators(g.tuples);
    } else if (c == "closure") {
        auto a = parse_algebra(read_file(*cfg.algebra_path));
        auto seed = parse_generators(read_file(*cfg.seed_path), a.universe_size());
        if (seed.empty()) throw ValidationError("seed file is empty; the power cannot be inferred");
        auto n = seed.begin()->size();
        out << print_generators(generate_subpower(a, n, seed));
    } else if (c == "poly") {
        auto s = parse_structure(read_file(*cfg.structure_path));
        if (cfg.check_path) {
            auto a = parse_algebra(read_file(*cfg.check_path));
            bool all = true;
            for (const auto& op : a.operations()) {
                auto cx = check_polymorphism(s, op);
                if (!cx) {
                    out << op.name() << " ok\n";
                    continue;
                }
                all = false;
                out << op.name() << " fails on " << cx->relation << ":";
                for (const auto& t : cx->tuples) out << " (" << tuple_text(t) << ")";
                out << " -> (" << tuple_text(cx->image) << ")\n";
            }
            r.exit_code = all ? kTrue : kFalse;
        } else {
            Algebra a(s.universe_size(), enumerate_idempotent_polymorphisms(s, cfg.arity));
            out << print_algebra(a);
        }
    } else if (c == "collapsible") {
        auto a = load_algebra(cfg);
        auto w = collapsibility_witness(a);
        if (w) {
            out << "COLLAPSIBLE " << w->operation << " a=" << w->element << "\n";
            for (std::size_t i = 0; i < w->images.size(); ++i) {
                out << "image " << i + 1 << ":";
                for (auto e : w->images[i]) out << " " << e;
                out << "\n";
            }
        } else {
            out << "NO WITNESS\n";
        }
        r.exit_code = w ? kTrue : kFalse;
    } else if (c == "classify") {
        auto a = parse_algebra(read_file(*cfg.algebra_path));
        auto rep = classify_growth(a, cfg.max_n, limits_of(cfg));
        out << "operations " << rep.operation_count << "\n";
        out << "n d\n";
        for (std::size_t i = 0; i < rep.d_values.values.size(); ++i)
            out << i + 1 << " " << rep.d_values.values[i] << "\n";
        if (rep.d_values.truncated) out << "truncated at n=" << rep.d_values.values.size() + 1 << "\n";
        if (rep.pgp_witness)
            out << "pgp-witness " << rep.pgp_witness->operation << " identity=" << rep.pgp_witness->identity
                << " bound=n*|B|\n";
        if (rep.egp_witness)
            out << "egp-witness a=" << rep.egp_witness->first << " b=" << rep.egp_witness->second << " base=2\n";
        out << "verdict " << to_string(rep.verdict) << "\n";
    } else if (c == "bipartite-p") {
        auto s = parse_structure(read_file(*cfg.structure_path));
        std::optional<Bipartition> part;
        const auto& syms = s.signature().symbols();
        if (syms.size() == 1 && syms.front().arity == 2) part = detect_bipartition(s);
        if (!part) part = detect_disconnection(s);
        if (!part) {
            out << "NO PARTITION\n";
            r.exit_code = kFalse;
        } else {
            auto p = build_bipartite_p(*part);
            out << "# sides:";
            for (auto side : part->side) out << " " << int(side);
            out << "\n" << print_algebra(Algebra(s.universe_size(), {p}));
        }
    } else if (c == "example4") {
        if (cfg.action == "decide") {
            bool truth = example4_decide(parse_formula(read_file(*cfg.formula_path)));
            out << (truth ? "TRUE" : "FALSE") << "\n";
            r.exit_code = truth ? kTrue : kFalse;
        } else if (cfg.action == "gadget") {
            out << print_formula(example4_gadget(parse_formula(read_file(*cfg.formula_path)))) << "\n";
        } else {
            auto st = example4_structures();
            std::filesystem::create_directories(*cfg.output_path);
            const std::pair<const char*, const Structure*> files[] = {
                {"A.struct", &st.a}, {"B.struct", &st.b}, {"Astar.struct", &st.astar}, {"Bstar.struct", &st.bstar}};
            for (const auto& [name, s] : files) {
                auto path = std::filesystem::path(*cfg.output_path) / name;
                std::ofstream f(path, std::ios::binary);
                if (!f) throw ValidationError("cannot write '" + path.string() + "'");
                f << print_structure(*s);
                out << path.string() << "\n";
            }
        }
    }
    r.output = out.str();
    write_output(cfg, r);
    return r;
}

}  // namespace detail

inline CommandResult run_command(const CommandConfig& cfg) {
    if (auto usage = validate_config(cfg)) return {kUsage, "", *usage};
    try {
        return detail::run(cfg);
    } catch (const detail::UsageError& e) {
        return {kUsage, "", e.what()};
    } catch (const Error& e) {
        return {kInvalid, "", e.what()};
    }
}

}  // namespace qcsp::cli
