#include <filesystem>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace qcsp {
namespace {

std::vector<std::string> corpus(const std::string& extension) {
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(QCSP_DATA_DIR))
        if (entry.path().extension() == extension) out.push_back(entry.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

template <typename F>
std::size_t parse_error_column(F&& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.column();
    }
    return 0;
}

TEST(ParseStructure, MinimalK2) {
    auto s = parse_structure("universe 2\nrelation E 2\n0 1\n1 0");
    Structure k2(2);
    k2.add_relation("E", 2, {{0, 1}, {1, 0}});
    EXPECT_EQ(s, k2);
}

TEST(ParseStructure, CommentsBlankLinesAndConstants) {
    auto s = parse_structure("# header\n\nuniverse 2   # two\nrelation Z 1\n0\nconstant 0 Z\n");
    EXPECT_EQ(s.constant_name(0), "Z");
    EXPECT_FALSE(s.constant_name(1));
}

TEST(ParseStructure, Diagnostics) {
    try {
        parse_structure("universe 3\nrelation S 3\n0 5 1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 3u);
        EXPECT_NE(std::string(e.what()).find("outside"), std::string::npos);
    }
    EXPECT_THROW(parse_structure("relation E 2\n"), ParseError);
    EXPECT_THROW(parse_structure("universe 2\nrelation E 2\n0 1 1\n"), ParseError);
    EXPECT_THROW(parse_structure("universe 2\nrelation E 2\nrelation E 1\n"), ParseError);
    EXPECT_THROW(parse_structure("universe 2\nrelation _c0 1\n0\n1\n"), ParseError);
    EXPECT_THROW(parse_structure("universe 2\n0 1\n"), ParseError);
    EXPECT_THROW(parse_structure("universe two\n"), ParseError);
}

TEST(ParseAlgebra, OrTable) {
    auto a = parse_algebra("universe 2\nop or 2\n0 1 1 1");
    ASSERT_EQ(a.operations().size(), 1u);
    const auto& op = a.operations()[0];
    EXPECT_EQ(op({0, 0}), 0u);
    EXPECT_EQ(op({0, 1}), 1u);
    EXPECT_EQ(op({1, 0}), 1u);
    EXPECT_EQ(op({1, 1}), 1u);
}

TEST(ParseAlgebra, SemilatticeFile) {
    auto a = testing::load_algebra("semilattice3.alg");
    const auto& f = a.operations().at(0);
    for (Element x = 0; x < 3; ++x)
        for (Element y = 0; y < 3; ++y) EXPECT_EQ(f({x, y}), x == y ? x : 2u);
}

TEST(ParseAlgebra, Diagnostics) {
    EXPECT_THROW(parse_algebra("universe 3\nop f 2\n0 1 2 0 1 2 0 1\n"), ParseError);
    EXPECT_THROW(parse_algebra("universe 2\nop f 1\n0 2\n"), ParseError);
    EXPECT_THROW(parse_algebra("universe 2\nop f 1\n0 1\nop f 1\n0 1\n"), ParseError);
}

TEST(ParseFormula, Examples) {
    auto f = parse_formula("A y E x : S(y,x,x)");
    ASSERT_EQ(f.prefix.size(), 2u);
    EXPECT_EQ(f.prefix[0].quantifier, Quantifier::Forall);
    EXPECT_EQ(f.atoms[0].args, (std::vector<Variable>{"y", "x", "x"}));

    auto g = parse_formula("free u ; E x : E(u,x)");
    EXPECT_EQ(g.free_vars, (std::vector<Variable>{"u"}));

    EXPECT_EQ(parse_formula("A y1 y2 : true").atoms.size(), 0u);
    EXPECT_EQ(parse_formula("E x : true(x)").atoms.size(), 1u);
}

TEST(ParseFormula, Diagnostics) {
    try {
        parse_formula("A y A y : S(y,y,y)");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
        EXPECT_EQ(e.column(), 7u);
    }
    EXPECT_EQ(parse_error_column([] { parse_formula("E x : S(x,$)"); }), 11u);
    EXPECT_THROW(parse_formula("E x : S(x,w)"), ParseError);
    EXPECT_THROW(parse_formula("E x S(x)"), ParseError);
    EXPECT_THROW(parse_formula("E x : S(x) &"), ParseError);
    EXPECT_THROW(parse_formula("free u ; E u : S(u)"), ParseError);
}

TEST(ParseGenerators, Examples) {
    EXPECT_EQ(parse_generators("0 1\n1 0\n# c\n", 2), (std::set<Tuple>{{0, 1}, {1, 0}}));
    EXPECT_THROW(parse_generators("0 1\n1\n", 2), ParseError);
    EXPECT_THROW(parse_generators("0 2\n", 2), ParseError);
    std::set<Tuple> t{{0, 0, 1}, {1, 2, 0}};
    EXPECT_EQ(parse_generators(print_generators(t), 3), t);
}

TEST(RoundTrip, Corpus) {
    for (const auto& name : corpus(".struct")) {
        auto s = testing::load_structure(name);
        EXPECT_EQ(parse_structure(print_structure(s)), s) << name;
        auto star = expand_with_constants(s);
        EXPECT_EQ(parse_structure(print_structure(star)), star) << name;
    }
    for (const auto& name : corpus(".alg")) {
        auto a = testing::load_algebra(name);
        EXPECT_EQ(parse_algebra(print_algebra(a)), a) << name;
    }
    for (const auto& name : corpus(".qcf")) {
        auto f = testing::load_formula(name);
        EXPECT_EQ(parse_formula(print_formula(f)), f) << name;
    }
    EXPECT_GE(corpus(".struct").size(), 5u);
}

TEST(RoundTrip, RandomValues) {
    std::mt19937 rng(17);
    for (int i = 0; i < 100; ++i) {
        auto s = testing::random_structure(rng, 1 + i % 4, 3, 3, 0.4);
        if (i % 2) s = expand_with_constants(s);
        EXPECT_EQ(parse_structure(print_structure(s)), s);

        auto a = testing::random_algebra(rng, 1 + i % 3, 3, 3);
        EXPECT_EQ(parse_algebra(print_algebra(a)), a);

        auto f = testing::random_formula(rng, s, {});
        EXPECT_EQ(parse_formula(print_formula(f)), f) << print_formula(f);
    }
}

}  // namespace
}  // namespace qcsp
