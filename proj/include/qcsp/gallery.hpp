#pragma once

// Worked examples: the 5-ary majority/middle polymorphism of bipartite and
// disconnected structures, and the ternary structures A, B where B is
// disconnected, QCSP(B) is decided by a graph condition, and CSP(B*) encodes
// CSP(A*).

#include <array>
#include <numeric>

#include "qcsp/algebra.hpp"
#include "qcsp/model.hpp"

namespace qcsp {

/// side[b] in {0,1}: the block containing element b.
struct Bipartition {
    std::vector<std::uint8_t> side;

    std::set<Element> block(std::uint8_t s) const {
        std::set<Element> out;
        for (std::size_t b = 0; b < side.size(); ++b)
            if (side[b] == s) out.insert(static_cast<Element>(b));
        return out;
    }

    friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

/// The ceil(n/2)-th smallest member of a non-empty subset of {1..5}.
inline int mid_op(const std::set<int>& coords) {
    if (coords.empty()) throw ValidationError("mid of an empty set");
    for (int c : coords)
        if (c < 1 || c > 5) throw ValidationError("mid is defined on subsets of {1..5}");
    auto it = coords.begin();
    std::advance(it, (coords.size() + 1) / 2 - 1);
    return *it;
}

/// The bit occurring at least three times among five.
inline int majority5(const std::array<int, 5>& bits) {
    int ones = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) throw ValidationError("majority5 takes bits");
        ones += b;
    }
    return ones >= 3 ? 1 : 0;
}

/// The coordinate (1-based) that p projects onto: the middle of the
/// coordinates whose side agrees with the majority side.
inline int bipartite_p_coordinate(const Bipartition& part, std::span<const Element> args) {
    std::array<int, 5> sides{};
    for (std::size_t i = 0; i < 5; ++i) sides[i] = part.side.at(args[i]);
    int winner = majority5(sides);
    std::set<int> support;
    for (int i = 0; i < 5; ++i)
        if (sides[static_cast<std::size_t>(i)] == winner) support.insert(i + 1);
    return mid_op(support);
}

inline OperationTable build_bipartite_p(const Bipartition& part) {
    if (part.side.empty()) throw ValidationError("partition of an empty universe");
    for (auto s : part.side)
        if (s > 1) throw ValidationError("partition sides must be 0 or 1");
    return OperationTable::from_function("p", part.side.size(), 5, [&](std::span<const Element> args) {
        return args[static_cast<std::size_t>(bipartite_p_coordinate(part, args) - 1)];
    });
}

/// Two-colours the single symmetric binary relation of s so that every edge
/// crosses. Components are coloured in order of their least element, which
/// gets side 0; none if there is an odd cycle (or a loop).
inline std::optional<Bipartition> detect_bipartition(const Structure& s) {
    const auto& symbols = s.signature().symbols();
    if (symbols.size() != 1 || symbols.front().arity != 2)
        throw ValidationError("detect_bipartition needs a structure with exactly one binary relation");
    const auto& edges = s.relation(symbols.front().name);
    for (const auto& e : edges)
        if (!edges.count(Tuple{e[1], e[0]})) throw ValidationError("edge relation is not symmetric");

    const std::size_t n = s.universe_size();
    std::vector<std::vector<Element>> adj(n);
    for (const auto& e : edges) adj[e[0]].push_back(e[1]);

    std::vector<int> colour(n, -1);
    for (std::size_t start = 0; start < n; ++start) {
        if (colour[start] >= 0) continue;
        colour[start] = 0;
        std::vector<std::size_t> stack{start};
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            for (auto v : adj[u]) {
                if (colour[v] < 0) {
                    colour[v] = 1 - colour[u];
                    stack.push_back(v);
                } else if (colour[v] == colour[u]) {
                    return std::nullopt;
                }
            }
        }
    }
    Bipartition part;
    for (auto c : colour) part.side.push_back(static_cast<std::uint8_t>(c));
    return part;
}

/// A partition into two non-empty blocks such that no relation tuple meets
/// both. Side 0 is the block of elements connected to element 0.
inline std::optional<Bipartition> detect_disconnection(const Structure& s) {
    const std::size_t n = s.universe_size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& sym : s.signature().symbols())
        for (const auto& t : s.relation(sym.name))
            for (std::size_t i = 1; i < t.size(); ++i) {
                auto a = find(t[0]), b = find(t[i]);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
    Bipartition part;
    bool split = false;
    for (std::size_t b = 0; b < n; ++b) {
        bool other = find(b) != find(0);
        split = split || other;
        part.side.push_back(other ? 1 : 0);
    }
    if (!split) return std::nullopt;
    return part;
}

struct Example4Structures {
    Structure a;
    Structure b;
    Structure astar;
    Structure bstar;
};

/// S^A = {(x,y,z) in {0,1}^3 : x = y or y = z} and S^B = S^A plus (2,2,2).
inline Example4Structures example4_structures() {
    Structure a(2);
    a.add_relation("S", 3);
    for (Element x = 0; x < 2; ++x)
        for (Element y = 0; y < 2; ++y)
            for (Element z = 0; z < 2; ++z)
                if (x == y || y == z) a.add_tuple("S", {x, y, z});
    Structure b(3);
    b.add_relation("S", 3, a.relation("S"));
    b.add_tuple("S", {2, 2, 2});
    auto astar = expand_with_constants(a);
    auto bstar = expand_with_constants(b);
    return {std::move(a), std::move(b), std::move(astar), std::move(bstar)};
}

/// Variables are vertices (free ones first, then prefix order); u and v are
/// adjacent when they occur together in some atom.
struct FormulaGraph {
    std::vector<Variable> vertices;
    std::set<std::pair<Variable, Variable>> edges;  // stored with first < second

    bool adjacent(const Variable& u, const Variable& v) const {
        return edges.count(u < v ? std::pair{u, v} : std::pair{v, u}) != 0;
    }

    /// Connected components, each listed in vertex order.
    std::vector<std::vector<Variable>> components() const {
        std::map<Variable, std::size_t> index;
        for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i]] = i;
        std::vector<std::size_t> parent(vertices.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& [u, v] : edges) {
            auto a = find(index.at(u)), b = find(index.at(v));
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
        std::map<std::size_t, std::vector<Variable>> groups;
        for (std::size_t i = 0; i < vertices.size(); ++i) groups[find(i)].push_back(vertices[i]);
        std::vector<std::vector<Variable>> out;
        for (auto& [root, members] : groups) out.push_back(std::move(members));
        return out;
    }
};

inline FormulaGraph formula_graph(const QCFormula& f) {
    FormulaGraph g;
    g.vertices = f.free_vars;
    for (const auto& b : f.prefix) g.vertices.push_back(b.variable);
    for (const auto& a : f.atoms)
        for (std::size_t i = 0; i < a.args.size(); ++i)
            for (std::size_t j = i + 1; j < a.args.size(); ++j) {
                const auto& u = a.args[i];
                const auto& v = a.args[j];
                if (u == v) continue;
                g.edges.insert(u < v ? std::pair{u, v} : std::pair{v, u});
            }
    return g;
}

/// Decides a sentence over {S/3} on B: true iff in every connected component
/// of the formula graph, all variables except the first-quantified one are
/// existential.
inline bool example4_decide(const QCFormula& f) {
    if (auto defect = formula_defect(f)) throw ValidationError(*defect);
    if (!f.is_sentence()) throw ValidationError("example4_decide takes sentences only");
    for (const auto& a : f.atoms)
        if (a.relation != "S" || a.args.size() != 3)
            throw ValidationError("example4_decide takes sentences over the signature {S/3}");

    std::map<Variable, Quantifier> quant;
    for (const auto& b : f.prefix) quant[b.variable] = b.quantifier;
    for (const auto& comp : formula_graph(f).components())
        for (std::size_t i = 1; i < comp.size(); ++i)  // comp[0] is quantified first
            if (quant.at(comp[i]) == Quantifier::Forall) return false;
    return true;
}

/// Maps an existential sentence over A*'s signature to one over B*'s that is
/// true on B* exactly when the input is true on A*: two fresh variables are
/// pinned to 0 and 1 and every original variable v gets S(c0, v, c1), which
/// confines it to {0,1}.
inline QCFormula example4_gadget(const QCFormula& f) {
    if (auto defect = formula_defect(f)) throw ValidationError(*defect);
    if (!f.is_sentence() || !f.is_existential())
        throw ValidationError("example4_gadget takes existential sentences");
    static const Example4Structures structures = example4_structures();
    require_valid(structures.astar, f);

    std::set<Variable> used;
    for (const auto& b : f.prefix) used.insert(b.variable);
    auto fresh = [&](std::string name) {
        while (used.count(name)) name += "_";
        used.insert(name);
        return name;
    };
    auto c0 = fresh("c0");
    auto c1 = fresh("c1");

    // constant names in A* carry over to B* for the shared elements 0 and 1
    auto zero = *structures.bstar.constant_name(0);
    auto one = *structures.bstar.constant_name(1);

    QCFormula g = f;
    g.prefix.push_back({Quantifier::Exists, c0});
    g.prefix.push_back({Quantifier::Exists, c1});
    g.atoms.push_back({zero, {c0}});
    g.atoms.push_back({one, {c1}});
    for (const auto& b : f.prefix) g.atoms.push_back({"S", {c0, b.variable, c1}});
    return g;
}

}  // namespace qcsp
