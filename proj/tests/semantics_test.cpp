#include <algorithm>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace qcsp {
namespace {

using testing::load_formula;
using testing::load_structure;

TEST(EvalQcsp, ExampleFourSentences) {
    auto b = load_structure("example4_B.struct");
    EXPECT_TRUE(eval_qcsp(b, load_formula("example4_true.qcf")));
    EXPECT_FALSE(eval_qcsp(b, load_formula("example4_false.qcf")));
}

TEST(EvalQcsp, EmptyConjunctionIsTrue) {
    auto b = load_structure("triangle.struct");
    QCFormula f{{}, {{Quantifier::Forall, "y"}, {Quantifier::Exists, "x"}}, {}};
    EXPECT_TRUE(eval_qcsp(b, f));
    EXPECT_TRUE(eval_qcsp(b, QCFormula{}));
}

TEST(EvalQcsp, FreeVariables) {
    auto k2 = expand_with_constants(load_structure("k2.struct"));
    auto f = load_formula("k2_free.qcf");
    // A y E x : E(u,x) & E(y,x) needs x adjacent to every y, impossible in K2
    EXPECT_FALSE(eval_qcsp(k2, f, {{"u", 0}}));
    EXPECT_FALSE(eval_qcsp(k2, f, {{"u", 1}}));
    QCFormula g{{"u"}, {{Quantifier::Exists, "x"}}, {{"E", {"u", "x"}}}};
    EXPECT_TRUE(eval_qcsp(k2, g, {{"u", 1}}));
}

TEST(EvalQcsp, RejectsBadAssignment) {
    auto k2 = load_structure("k2.struct");
    QCFormula g{{"u"}, {{Quantifier::Exists, "x"}}, {{"E", {"u", "x"}}}};
    EXPECT_THROW(eval_qcsp(k2, g), ValidationError);
    EXPECT_THROW(eval_qcsp(k2, g, {{"u", 5}}), ValidationError);
    EXPECT_THROW(eval_qcsp(k2, g, {{"u", 0}, {"w", 0}}), ValidationError);
    QCFormula bad{{}, {{Quantifier::Exists, "x"}}, {{"Q", {"x"}}}};
    EXPECT_THROW(eval_qcsp(k2, bad), ValidationError);
}

TEST(EvalCsp, LeastWitness) {
    auto eq = load_structure("eq2.struct");
    QCFormula f{{}, {{Quantifier::Exists, "x"}}, {{"EQ", {"x", "x"}}}};
    auto r = eval_csp(eq, f);
    EXPECT_TRUE(r.truth);
    ASSERT_TRUE(r.witness);
    EXPECT_EQ(*r.witness, (Assignment{{"x", 0}}));
}

TEST(EvalCsp, ContradictoryConstants) {
    for (const char* name : {"k2.struct", "triangle.struct", "example4_B.struct"}) {
        auto s = expand_with_constants(load_structure(name));
        QCFormula f{{}, {{Quantifier::Exists, "x"}}, {{*s.constant_name(0), {"x"}}, {*s.constant_name(1), {"x"}}}};
        auto r = eval_csp(s, f);
        EXPECT_FALSE(r.truth) << name;
        EXPECT_FALSE(r.witness) << name;
    }
}

TEST(EvalCsp, RejectsUniversalPrefix) {
    auto k2 = load_structure("k2.struct");
    QCFormula f{{}, {{Quantifier::Forall, "y"}}, {{"E", {"y", "y"}}}};
    EXPECT_THROW(eval_csp(k2, f), ValidationError);
}

TEST(EvalCsp, TriangleIsNotTwoColourable) {
    auto k2 = load_structure("k2.struct");
    QCFormula f{{}, {{Quantifier::Exists, "a"}, {Quantifier::Exists, "b"}, {Quantifier::Exists, "c"}},
                {{"E", {"a", "b"}}, {"E", {"b", "c"}}, {"E", {"c", "a"}}}};
    EXPECT_FALSE(eval_csp(k2, f).truth);
    f.atoms.pop_back();
    auto r = eval_csp(k2, f);
    ASSERT_TRUE(r.truth);
    EXPECT_EQ(*r.witness, (Assignment{{"a", 0}, {"b", 1}, {"c", 0}}));
}

// Least witness in prefix order: brute force over all assignments.
TEST(EvalCsp, WitnessIsLexicographicallyLeast) {
    std::mt19937 rng(11);
    testing::FormulaShape shape;
    shape.existential_only = true;
    shape.max_free = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto s = testing::random_structure(rng, 2 + trial % 2, 2, 3, 0.5);
        auto f = testing::random_formula(rng, s, shape);
        auto r = eval_csp(s, f);
        std::vector<Variable> vars;
        for (const auto& b : f.prefix) vars.push_back(b.variable);
        std::optional<Assignment> least;
        for_each_assignment(vars, s.universe_size(), [&](const Assignment& a) {
            if (least) return;
            QCFormula ground{vars, {}, f.atoms};
            if (testing::naive_truth(s, ground, a)) least = a;
        });
        ASSERT_EQ(r.truth, least.has_value());
        if (least) {
            EXPECT_EQ(*r.witness, *least);
        }
    }
}

TEST(EvalCsp, AgreesWithGameTreeOnRandomExistentialSentences) {
    std::mt19937 rng(7);
    testing::FormulaShape shape;
    shape.existential_only = true;
    shape.max_bound = 6;
    shape.max_atoms = 6;
    int agree = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto s = testing::random_structure(rng, 2 + trial % 3, 3, 3, 0.4);
        auto f = testing::random_formula(rng, s, shape);
        for_each_assignment(f.free_vars, s.universe_size(), [&](const Assignment& a) {
            bool expected = testing::naive_truth(s, f, a);
            EXPECT_EQ(eval_qcsp(s, f, a), expected);
            auto r = eval_csp(s, f, a);
            EXPECT_EQ(r.truth, expected);
            if (r.truth) {
                Assignment full = a;
                full.insert(r.witness->begin(), r.witness->end());
                QCFormula ground{{}, {}, f.atoms};
                for (const auto& [v, e] : full) ground.free_vars.push_back(v);
                EXPECT_TRUE(testing::naive_truth(s, ground, full));
            }
        });
        ++agree;
    }
    EXPECT_EQ(agree, 500);
}

TEST(EvalQcsp, MatchesNaiveSemanticsOnRandomFormulas) {
    std::mt19937 rng(3);
    testing::FormulaShape shape;
    for (int trial = 0; trial < 300; ++trial) {
        auto s = testing::random_structure(rng, 2 + trial % 2, 2, 3, 0.6);
        auto f = testing::random_formula(rng, s, shape);
        for_each_assignment(f.free_vars, s.universe_size(), [&](const Assignment& a) {
            EXPECT_EQ(eval_qcsp(s, f, a), testing::naive_truth(s, f, a)) << print_formula(f);
        });
    }
}

TEST(EvalQcsp, InvariantUnderStandardizeApartAndAtomOrder) {
    std::mt19937 rng(5);
    testing::FormulaShape shape;
    for (int trial = 0; trial < 200; ++trial) {
        auto s = testing::random_structure(rng, 3, 2, 2, 0.5);
        auto f = testing::random_formula(rng, s, shape);
        auto renamed = standardize_apart({f}).front();
        auto shuffled = f;
        std::shuffle(shuffled.atoms.begin(), shuffled.atoms.end(), rng);
        for_each_assignment(f.free_vars, s.universe_size(), [&](const Assignment& a) {
            bool truth = eval_qcsp(s, f, a);
            EXPECT_EQ(eval_qcsp(s, renamed, a), truth);
            EXPECT_EQ(eval_qcsp(s, shuffled, a), truth);
        });
    }
}

TEST(EvalQcsp, WeakeningUniversalNeverFalsifies) {
    std::mt19937 rng(9);
    testing::FormulaShape shape;
    shape.max_free = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto s = testing::random_structure(rng, 2 + trial % 2, 2, 3, 0.6);
        auto f = testing::random_formula(rng, s, shape);
        if (!eval_qcsp(s, f)) continue;
        for (std::size_t i = 0; i < f.prefix.size(); ++i) {
            if (f.prefix[i].quantifier != Quantifier::Forall) continue;
            auto g = f;
            g.prefix[i].quantifier = Quantifier::Exists;
            EXPECT_TRUE(eval_qcsp(s, g)) << print_formula(f);
        }
    }
}

TEST(ForEachAssignment, LexicographicOrder) {
    std::vector<Assignment> seen;
    for_each_assignment({"a", "b"}, 2, [&](const Assignment& a) { seen.push_back(a); });
    ASSERT_EQ(seen.size(), 4u);
    EXPECT_EQ(seen[1], (Assignment{{"a", 0}, {"b", 1}}));
    EXPECT_EQ(seen[2], (Assignment{{"a", 1}, {"b", 0}}));
    int calls = 0;
    for_each_assignment({}, 3, [&](const Assignment&) { ++calls; });
    EXPECT_EQ(calls, 1);
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Closed form: for k variables there are 2^k prefixes and sum_sym k^arity
// atom shapes, of which 1..max_atoms distinct ones are chosen.
std::size_t expected_count(const Signature& sig, std::size_t max_vars, std::size_t max_atoms, bool existential) {
    std::size_t total = 0;
    for (std::size_t k = 1; k <= max_vars; ++k) {
        std::size_t shapes = 0;
        for (const auto& sym : sig.symbols()) shapes += detail::checked_pow(k, sym.arity);
        std::size_t combos = 0;
        for (std::size_t m = 1; m <= max_atoms; ++m) combos += binomial(shapes, m);
        total += (existential ? 1 : (std::size_t{1} << k)) * combos;
    }
    return total;
}

TEST(EnumerateSentences, SingleTernarySymbol) {
    Signature sig;
    sig.add("S", 3);
    auto all = enumerate_sentences(sig, {1, 1, false});
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(print_formula(all[0]), "A v1 : S(v1,v1,v1)");
    EXPECT_EQ(print_formula(all[1]), "E v1 : S(v1,v1,v1)");
}

TEST(EnumerateSentences, CountsMatchClosedForm) {
    Signature binary;
    binary.add("E", 2);
    EXPECT_EQ(enumerate_sentences(binary, {2, 1, false}).size(), 18u);
    Signature mixed;
    mixed.add("R", 1);
    mixed.add("E", 2);
    for (std::size_t v = 1; v <= 3; ++v)
        for (std::size_t a = 1; a <= 2; ++a)
            for (bool ex : {false, true})
                EXPECT_EQ(enumerate_sentences(mixed, {v, a, ex}).size(), expected_count(mixed, v, a, ex));
}

TEST(EnumerateSentences, DuplicateFreeSentencesAndStoppable) {
    Signature sig;
    sig.add("S", 3);
    std::set<std::string> seen;
    std::size_t count = 0;
    enumerate_sentences(sig, {3, 2, false}, [&](const QCFormula& f) {
        EXPECT_TRUE(f.is_sentence());
        seen.insert(print_formula(f));
        ++count;
    });
    EXPECT_EQ(seen.size(), count);

    std::size_t visited = 0;
    enumerate_sentences(sig, {3, 2, false}, [&](const QCFormula&) { return ++visited < 10; });
    EXPECT_EQ(visited, 10u);
    EXPECT_THROW(enumerate_sentences(sig, {0, 1, false}), ValidationError);
}

}  // namespace
}  // namespace qcsp
