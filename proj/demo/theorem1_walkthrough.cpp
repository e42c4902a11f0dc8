// Reduces a rank-2 formula over the two-element order to an existential one,
// printing each intermediate object, then checks both sides agree.

#include <iostream>

#include "qcsp/qcsp.hpp"

using namespace qcsp;

int main() {
    Structure leq(2);
    leq.add_relation("LEQ", 2, {{0, 0}, {0, 1}, {1, 1}});
    auto sstar = expand_with_constants(leq);
    std::cout << "structure with constants:\n" << print_structure(sstar) << "\n";

    auto f = parse_formula("A y1 E x1 A y2 E x2 : LEQ(y1,x1) & LEQ(x1,y2) & LEQ(y2,x2)");
    std::cout << "formula: " << print_formula(f) << "\n";
    std::cout << "rank: " << prefix_alternation_rank(f) << "\n\n";

    auto algebra = algebra_of_structure(sstar, 2);
    std::cout << "idempotent polymorphisms up to arity 2:\n" << print_algebra(algebra) << "\n";

    GeneratorProvider provider(algebra, GeneratorStrategy::Minimal);
    for (std::size_t n = 1; n <= 3; ++n) {
        auto g = provider.generators(n);
        std::cout << "minimal generators of power " << n << " (" << g.tuples.size() << "):\n"
                  << print_generators(g.tuples);
    }

    auto r = reduce_qcsp(sstar, f, provider);
    std::cout << "\nreduced: " << print_formula(r.formula) << "\n\n";
    std::cout << "stage power generators in_atoms out_atoms\n";
    for (std::size_t i = 0; i < r.report.stages.size(); ++i) {
        const auto& s = r.report.stages[i];
        std::cout << i + 1 << " " << s.power << " " << s.generators << " " << s.input_atoms << " "
                  << s.output_atoms << "\n";
    }

    bool original = eval_qcsp(sstar, f);
    auto reduced = eval_csp(sstar, r.formula);
    std::cout << "\noriginal " << (original ? "TRUE" : "FALSE") << ", reduced " << (reduced.truth ? "TRUE" : "FALSE")
              << "\n";
    return original == reduced.truth ? 0 : 1;
}
