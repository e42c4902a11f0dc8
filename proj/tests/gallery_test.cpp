#include <gtest/gtest.h>

#include "test_support.hpp"

namespace qcsp {
namespace {

Bipartition sides(std::vector<std::uint8_t> s) { return Bipartition{std::move(s)}; }

TEST(Mid, Examples) {
    EXPECT_EQ(mid_op({1, 4, 5}), 4);
    EXPECT_EQ(mid_op({1, 2, 4, 5}), 2);
    EXPECT_EQ(mid_op({3}), 3);
    EXPECT_EQ(mid_op({1, 2, 3, 4, 5}), 3);
    EXPECT_THROW(mid_op({}), ValidationError);
    EXPECT_THROW(mid_op({0, 2}), ValidationError);
}

TEST(Majority, Examples) {
    EXPECT_EQ(majority5({1, 1, 1, 0, 0}), 1);
    EXPECT_EQ(majority5({0, 0, 0, 0, 0}), 0);
    EXPECT_EQ(majority5({0, 1, 0, 1, 0}), 0);
}

TEST(BipartiteP, Examples) {
    auto part = sides({0, 1});
    auto p = build_bipartite_p(part);
    EXPECT_EQ(p.arity(), 5u);
    EXPECT_EQ(p.name(), "p");
    Tuple a{1, 1, 0, 1, 1};
    EXPECT_EQ(bipartite_p_coordinate(part, a), 2);
    EXPECT_EQ(p(a), 1u);
    Tuple b{0, 1, 0, 1, 1};
    EXPECT_EQ(bipartite_p_coordinate(part, b), 4);
    EXPECT_EQ(p(b), 1u);
    EXPECT_TRUE(p.is_idempotent());
    EXPECT_TRUE(build_bipartite_p(sides({0, 1, 1, 0})).is_idempotent());
}

// Oracle: the projection index written out from the definition, compared on
// every argument tuple of a 3-element partition.
TEST(BipartiteP, MatchesDefinition) {
    auto part = sides({0, 1, 0});
    auto p = build_bipartite_p(part);
    for (const auto& t : testing::all_tuples(3, 5)) {
        int ones = 0;
        for (auto e : t) ones += part.side[e];
        int winner = ones >= 3 ? 1 : 0;
        std::vector<int> support;
        for (int i = 0; i < 5; ++i)
            if (part.side[t[static_cast<std::size_t>(i)]] == winner) support.push_back(i);
        int pick = support[(support.size() + 1) / 2 - 1];
        ASSERT_EQ(p(t), t[static_cast<std::size_t>(pick)]);
    }
}

TEST(BipartiteP, PolymorphismOfSmallBipartiteGraphs) {
    std::size_t checked = 0;
    for (const auto& c : testing::bipartite_graphs(4)) {
        auto p = build_bipartite_p(c.part);
        ASSERT_FALSE(check_polymorphism(c.graph, p)) << print_structure(c.graph);
        auto w = collapsibility_witness(Algebra(c.graph.universe_size(), {p}));
        ASSERT_TRUE(w) << print_structure(c.graph);
        EXPECT_EQ(c.part.side[w->element], 0);
        ++checked;
    }
    EXPECT_GT(checked, 50u);
}

TEST(BipartiteP, CollapsibleAtEverySideZeroElement) {
    auto part = sides({0, 1, 0, 1});
    auto p = build_bipartite_p(part);
    for (Element c : part.block(0))
        for (std::size_t i = 1; i <= 5; ++i) {
            auto f = fix_argument(p, i, c);
            std::set<Element> image(f.table().begin(), f.table().end());
            EXPECT_EQ(image.size(), 4u);
        }
}

TEST(DetectBipartition, Examples) {
    Structure edge(2);
    edge.add_relation("E", 2, {{0, 1}, {1, 0}});
    EXPECT_EQ(detect_bipartition(edge), sides({0, 1}));
    EXPECT_FALSE(detect_bipartition(testing::load_structure("triangle.struct")));
    Structure two(5);
    two.add_relation("E", 2, {{0, 2}, {2, 0}, {1, 3}, {3, 1}});
    EXPECT_EQ(detect_bipartition(two), sides({0, 0, 1, 1, 0}));
    EXPECT_EQ(detect_bipartition(testing::load_structure("path4.struct")), sides({0, 1, 0, 1}));
}

TEST(DetectBipartition, Errors) {
    Structure directed(2);
    directed.add_relation("E", 2, {{0, 1}});
    EXPECT_THROW(detect_bipartition(directed), ValidationError);
    EXPECT_THROW(detect_bipartition(testing::load_structure("mixed3.struct")), ValidationError);
    Structure loop(2);
    loop.add_relation("E", 2, {{0, 0}});
    EXPECT_FALSE(detect_bipartition(loop));
}

TEST(DetectDisconnection, Examples) {
    EXPECT_EQ(detect_disconnection(testing::load_structure("example4_B.struct")), sides({0, 0, 1}));
    Structure spanning(3);
    spanning.add_relation("T", 3, {{0, 1, 2}});
    EXPECT_FALSE(detect_disconnection(spanning));
    Structure empty(2);
    empty.add_relation("R", 2);
    EXPECT_EQ(detect_disconnection(empty), sides({0, 1}));
    EXPECT_FALSE(detect_disconnection(Structure(1)));
}

TEST(DetectDisconnection, GeneratedStructures) {
    std::mt19937 rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = testing::random_disconnected(rng, 5, 5);
        auto part = detect_disconnection(s);
        ASSERT_TRUE(part);
        EXPECT_FALSE(part->block(0).empty());
        EXPECT_FALSE(part->block(1).empty());
        for (const auto& sym : s.signature().symbols())
            for (const auto& t : s.relation(sym.name))
                for (auto e : t) EXPECT_EQ(part->side[e], part->side[t[0]]);
        EXPECT_FALSE(check_polymorphism(s, build_bipartite_p(*part)));
    }
}

TEST(Example4, Structures) {
    auto e = example4_structures();
    EXPECT_EQ(e.a.relation("S").size(), 6u);
    EXPECT_FALSE(e.b.contains("S", {2, 0, 0}));
    for (Element x = 0; x < 3; ++x) EXPECT_TRUE(e.b.contains("S", {x, x, x}));
    EXPECT_EQ(e.a, testing::load_structure("example4_A.struct"));
    EXPECT_EQ(e.b, testing::load_structure("example4_B.struct"));
    EXPECT_TRUE(e.astar.has_total_constant_map());
    EXPECT_TRUE(e.bstar.has_total_constant_map());
    // oracle: count {0,1}^3 tuples with x = y or y = z
    std::size_t count = 0;
    for (const auto& t : testing::all_tuples(2, 3)) count += (t[0] == t[1] || t[1] == t[2]);
    EXPECT_EQ(count, e.a.relation("S").size());
}

TEST(FormulaGraph, Examples) {
    auto g = formula_graph(parse_formula("A y E x : S(y,x,x)"));
    EXPECT_EQ(g.edges.size(), 1u);
    EXPECT_TRUE(g.adjacent("x", "y"));
    EXPECT_TRUE(formula_graph(parse_formula("E u v : true")).edges.empty());
    auto t = formula_graph(parse_formula("E u v w : S(u,v,w)"));
    EXPECT_EQ(t.edges.size(), 3u);
    EXPECT_EQ(t.components().size(), 1u);
    EXPECT_EQ(formula_graph(parse_formula("E u v w : S(u,u,u) & S(v,w,w)")).components(),
              (std::vector<std::vector<Variable>>{{"u"}, {"v", "w"}}));
}

TEST(Example4Decide, Examples) {
    EXPECT_TRUE(example4_decide(parse_formula("A y E x : S(y,x,x)")));
    EXPECT_FALSE(example4_decide(parse_formula("E x A y : S(x,y,y)")));
    EXPECT_TRUE(example4_decide(parse_formula("A y : S(y,y,y)")));
    EXPECT_THROW(example4_decide(parse_formula("E x : R(x,x)")), ValidationError);
    EXPECT_THROW(example4_decide(parse_formula("free u ; E x : S(u,x,x)")), ValidationError);
}

TEST(Example4Decide, AgreesWithGameTree) {
    auto b = example4_structures().b;
    Signature sig;
    sig.add("S", 3);
    std::size_t count = 0;
    enumerate_sentences(sig, {3, 2, false}, [&](const QCFormula& f) {
        ASSERT_EQ(example4_decide(f), eval_qcsp(b, f)) << print_formula(f);
        ++count;
    });
    EXPECT_GT(count, 1000u);
}

TEST(Example4, SatisfyingAssignmentsStayInOneBlock) {
    auto b = example4_structures().b;
    Signature sig;
    sig.add("S", 3);
    enumerate_sentences(sig, {3, 2, true}, [&](const QCFormula& f) {
        if (formula_graph(f).components().size() != 1) return;
        std::vector<Variable> vars;
        for (const auto& x : f.prefix) vars.push_back(x.variable);
        QCFormula ground{vars, {}, f.atoms};
        for_each_assignment(vars, 3, [&](const Assignment& a) {
            if (!eval_qcsp(b, ground, a)) return;
            std::set<bool> blocks;
            for (const auto& [v, e] : a) blocks.insert(e == 2);
            EXPECT_EQ(blocks.size(), 1u) << print_formula(f);
        });
    });
}

TEST(Example4Gadget, Examples) {
    auto e = example4_structures();
    auto f = parse_formula("E v : S(v,v,v)");
    auto g = example4_gadget(f);
    EXPECT_EQ(print_formula(g), "E v c0 c1 : S(v,v,v) & _c0(c0) & _c1(c1) & S(c0,v,c1)");
    EXPECT_TRUE(eval_qcsp(e.astar, f));
    EXPECT_TRUE(eval_qcsp(e.bstar, g));

    auto contradiction = parse_formula("E v : _c0(v) & _c1(v)");
    EXPECT_FALSE(eval_qcsp(e.astar, contradiction));
    EXPECT_FALSE(eval_qcsp(e.bstar, example4_gadget(contradiction)));

    EXPECT_EQ(print_formula(example4_gadget(QCFormula{})), "E c0 c1 : _c0(c0) & _c1(c1)");
}

TEST(Example4Gadget, FreshNamesAvoidCollisions) {
    auto g = example4_gadget(parse_formula("E c0 c1 : S(c0,c1,c0)"));
    EXPECT_EQ(print_formula(g), "E c0 c1 c0_ c1_ : S(c0,c1,c0) & _c0(c0_) & _c1(c1_) & S(c0_,c0,c1_) & S(c0_,c1,c1_)");
}

TEST(Example4Gadget, Errors) {
    EXPECT_THROW(example4_gadget(parse_formula("A y : S(y,y,y)")), ValidationError);
    EXPECT_THROW(example4_gadget(parse_formula("free u ; E x : S(u,x,x)")), ValidationError);
    EXPECT_THROW(example4_gadget(parse_formula("E x : T(x)")), ValidationError);
}

}  // namespace
}  // namespace qcsp
