#include <iostream>

#include <CLI11.hpp>

#include "qcsp/cli.hpp"

int main(int argc, char** argv) {
    using qcsp::cli::CommandConfig;
    CLI::App app{"Quantified constraint satisfaction over finite structures"};
    app.require_subcommand(1);
    CommandConfig cfg;

    auto structure = [&](CLI::App* sub, bool required = true) {
        auto* o = sub->add_option("--structure", cfg.structure_path, ".struct file");
        if (required) o->required();
    };
    auto formula = [&](CLI::App* sub) { sub->add_option("--formula", cfg.formula_path, ".qcf file")->required(); };
    auto algebra = [&](CLI::App* sub, bool required = true) {
        auto* o = sub->add_option("--algebra", cfg.algebra_path, ".alg file");
        if (required) o->required();
    };
    auto budget = [&](CLI::App* sub) {
        sub->add_option("--budget", cfg.budget, "max |B|^n for minimal generating set search");
    };
    auto output = [&](CLI::App* sub) { sub->add_option("--output", cfg.output_path, "write the report here"); };

    auto* eval = app.add_subcommand("eval", "evaluate a formula on a structure (exit 0 true, 1 false)");
    structure(eval);
    formula(eval);
    eval->add_option("--assign", cfg.assignments, "free variable value, name=value");

    auto* expand = app.add_subcommand("expand", "add a constant relation for every element");
    structure(expand);
    output(expand);

    auto* rank = app.add_subcommand("rank", "least k such that the prefix is Pi_2k");
    formula(rank);

    auto* reduce = app.add_subcommand("reduce", "translate a formula into an equivalent existential formula");
    structure(reduce);
    formula(reduce);
    reduce->add_option("--generators", cfg.generators, "identity | minimal | full | file:<path>");
    reduce->add_option("--max-poly-arity", cfg.max_poly_arity, "arity bound for the polymorphism algebra");
    reduce->add_flag("--verify-oracle", cfg.verify_oracle, "check equivalence by brute force");
    reduce->add_flag("--report", cfg.report, "print per-stage sizes");
    budget(reduce);
    output(reduce);

    auto* dseq = app.add_subcommand("dseq", "minimal generating set sizes of A^1..A^n");
    algebra(dseq);
    dseq->add_option("--max-n", cfg.max_n, "largest power");
    budget(dseq);
    output(dseq);

    auto* gens = app.add_subcommand("gens", "print a generating set of a power");
    algebra(gens, false);
    structure(gens, false);
    gens->add_option("--power", cfg.power, "power n")->required();
    gens->add_option("--generators", cfg.generators, "identity | minimal | full | file:<path>");
    gens->add_option("--max-poly-arity", cfg.max_poly_arity, "arity bound when deriving the algebra");
    budget(gens);
    output(gens);

    auto* closure = app.add_subcommand("closure", "subpower generated by a seed set");
    algebra(closure);
    closure->add_option("--seed", cfg.seed_path, "generator file")->required();
    output(closure);

    auto* poly = app.add_subcommand("poly", "enumerate or check idempotent polymorphisms");
    structure(poly);
    poly->add_option("--arity", cfg.arity, "arity to enumerate");
    poly->add_option("--check", cfg.check_path, "check the operations of this .alg file instead");
    output(poly);

    auto* collapsible = app.add_subcommand("collapsible", "search for a surjective fixed-argument witness");
    algebra(collapsible, false);
    structure(collapsible, false);
    collapsible->add_option("--max-poly-arity", cfg.max_poly_arity, "arity bound when deriving the algebra");

    auto* classify = app.add_subcommand("classify", "growth report for the d-sequence");
    algebra(classify);
    classify->add_option("--max-n", cfg.max_n, "largest power");
    budget(classify);
    output(classify);

    auto* bip = app.add_subcommand("bipartite-p", "5-ary majority/middle polymorphism of a bipartite or disconnected structure");
    structure(bip);
    output(bip);

    auto* ex4 = app.add_subcommand("example4", "the jump example: decide | gadget | emit-structures");
    ex4->add_option("action", cfg.action, "decide | gadget | emit-structures")->required();
    ex4->add_option("--formula", cfg.formula_path, ".qcf file");
    ex4->add_option("--output", cfg.output_path, "directory for emit-structures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : qcsp::cli::kUsage;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();

    auto result = qcsp::cli::run_command(cfg);
    if (!result.error.empty()) std::cerr << "error: " << result.error << "\n";
    if (!cfg.output_path || cfg.subcommand == "example4" ) std::cout << result.output;
    return result.exit_code;
}
