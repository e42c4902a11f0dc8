#pragma once

// Core data model: signatures, finite structures, operation tables, algebras
// and prenex quantified constraint formulas.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcsp {

using Element = std::uint32_t;
using Tuple = std::vector<Element>;
using Variable = std::string;
using Assignment = std::map<Variable, Element>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A violated contract on inputs (bad arity, unknown symbol, dangling variable...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A computation refused because its search space exceeds the configured budget.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, std::size_t required, std::size_t budget)
        : Error(what + " (required " + std::to_string(required) + ", budget " +
                std::to_string(budget) + ")"),
          required_(required), budget_(budget) {}

    std::size_t required() const noexcept { return required_; }
    std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t required_;
    std::size_t budget_;
};

namespace detail {

// base^exp, saturating at SIZE_MAX.
inline std::size_t checked_pow(std::size_t base, std::size_t exp) {
    std::size_t result = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && result > SIZE_MAX / base) return SIZE_MAX;
        result *= base;
    }
    return result;
}

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front())) return false;
    return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || digit(c); });
}

}  // namespace detail

inline constexpr std::string_view kConstantPrefix = "_c";

struct Symbol {
    std::string name;
    std::size_t arity = 0;

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

class Signature {
public:
    Signature() = default;

    Signature(std::initializer_list<Symbol> symbols) {
        for (const auto& s : symbols) add(s.name, s.arity);
    }

    void add(const std::string& name, std::size_t arity) {
        if (!detail::is_identifier(name)) throw ValidationError("invalid relation name '" + name + "'");
        if (arity < 1) throw ValidationError("relation '" + name + "' must have arity >= 1");
        if (contains(name)) throw ValidationError("duplicate relation symbol '" + name + "'");
        symbols_.push_back({name, arity});
    }

    bool contains(std::string_view name) const { return find(name).has_value(); }

    std::optional<std::size_t> arity(std::string_view name) const {
        if (auto s = find(name)) return symbols_[*s].arity;
        return std::nullopt;
    }

    const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }

    friend bool operator==(const Signature&, const Signature&) = default;

private:
    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i].name == name) return i;
        return std::nullopt;
    }

    std::vector<Symbol> symbols_;
};

/// A finite relational structure over the universe {0, ..., n-1}.
///
/// Relations are kept as sorted tuple sets. The optional constant map names,
/// for an element b, a unary relation equal to {(b)}; when it covers the whole
/// universe the structure is in constant-expanded form.
class Structure {
public:
    explicit Structure(std::size_t universe_size) : universe_size_(universe_size) {
        if (universe_size == 0) throw ValidationError("universe must be non-empty");
    }

    void add_relation(const std::string& name, std::size_t arity, std::set<Tuple> tuples = {}) {
        signature_.add(name, arity);
        for (const auto& t : tuples) check_tuple(name, arity, t);
        relations_.emplace(name, std::move(tuples));
    }

    void add_tuple(const std::string& name, Tuple t) {
        auto arity = signature_.arity(name);
        if (!arity) throw ValidationError("unknown relation symbol '" + name + "'");
        check_tuple(name, *arity, t);
        relations_.at(name).insert(std::move(t));
    }

    void set_constant(Element b, const std::string& name) {
        if (b >= universe_size_)
            throw ValidationError("constant element " + std::to_string(b) + " outside universe");
        if (!is_singleton_of(name, b))
            throw ValidationError("constant relation '" + name + "' is not exactly {(" +
                                  std::to_string(b) + ")}");
        constants_[b] = name;
    }

    std::size_t universe_size() const noexcept { return universe_size_; }
    const Signature& signature() const noexcept { return signature_; }
    const std::map<Element, std::string>& constant_map() const noexcept { return constants_; }

    const std::set<Tuple>& relation(std::string_view name) const {
        auto it = relations_.find(std::string(name));
        if (it == relations_.end()) throw ValidationError("unknown relation symbol '" + std::string(name) + "'");
        return it->second;
    }

    bool has_relation(std::string_view name) const { return signature_.contains(name); }

    bool contains(std::string_view name, const Tuple& t) const { return relation(name).count(t) != 0; }

    bool has_total_constant_map() const noexcept { return constants_.size() == universe_size_; }

    std::optional<std::string> constant_name(Element b) const {
        auto it = constants_.find(b);
        if (it == constants_.end()) return std::nullopt;
        return it->second;
    }

    /// True when `name` is a unary relation whose only tuple is (b).
    bool is_singleton_of(std::string_view name, Element b) const {
        auto arity = signature_.arity(name);
        if (!arity || *arity != 1) return false;
        const auto& r = relation(name);
        return r.size() == 1 && r.begin()->front() == b;
    }

    friend bool operator==(const Structure&, const Structure&) = default;

private:
    void check_tuple(const std::string& name, std::size_t arity, const Tuple& t) const {
        if (t.size() != arity)
            throw ValidationError("tuple of length " + std::to_string(t.size()) + " in relation '" + name +
                                  "' of arity " + std::to_string(arity));
        for (auto e : t)
            if (e >= universe_size_)
                throw ValidationError("element " + std::to_string(e) + " outside universe of size " +
                                      std::to_string(universe_size_) + " in relation '" + name + "'");
    }

    std::size_t universe_size_;
    Signature signature_;
    std::map<std::string, std::set<Tuple>> relations_;
    std::map<Element, std::string> constants_;
};

/// A finitary operation stored as its full value table.
///
/// Arguments are indexed in lexicographic order with the leftmost argument most
/// significant, so for arity 2 over {0,1} the table lists f(0,0) f(0,1) f(1,0) f(1,1).
class OperationTable {
public:
    OperationTable(std::string name, std::size_t universe_size, std::size_t arity, std::vector<Element> table)
        : name_(std::move(name)), universe_size_(universe_size), arity_(arity), table_(std::move(table)) {
        if (universe_size_ == 0) throw ValidationError("operation '" + name_ + "' over empty universe");
        auto expected = detail::checked_pow(universe_size_, arity_);
        if (table_.size() != expected)
            throw ValidationError("operation '" + name_ + "' has " + std::to_string(table_.size()) +
                                  " table entries, expected " + std::to_string(expected));
        for (auto v : table_)
            if (v >= universe_size_)
                throw ValidationError("operation '" + name_ + "' outputs " + std::to_string(v) +
                                      " outside universe of size " + std::to_string(universe_size_));
    }

    template <typename Fn>
    static OperationTable from_function(std::string name, std::size_t universe_size, std::size_t arity, Fn&& fn) {
        auto size = detail::checked_pow(universe_size, arity);
        std::vector<Element> table(size);
        Tuple args(arity, 0);
        for (std::size_t idx = 0; idx < size; ++idx) {
            table[idx] = static_cast<Element>(fn(std::span<const Element>(args)));
            for (std::size_t pos = arity; pos-- > 0;) {
                if (++args[pos] < universe_size) break;
                args[pos] = 0;
            }
        }
        return OperationTable(std::move(name), universe_size, arity, std::move(table));
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t universe_size() const noexcept { return universe_size_; }
    std::size_t arity() const noexcept { return arity_; }
    const std::vector<Element>& table() const noexcept { return table_; }

    std::size_t index_of(std::span<const Element> args) const {
        std::size_t idx = 0;
        for (auto a : args) idx = idx * universe_size_ + a;
        return idx;
    }

    Element operator()(std::span<const Element> args) const { return table_[index_of(args)]; }
    Element operator()(std::initializer_list<Element> args) const {
        return (*this)(std::span<const Element>(args.begin(), args.size()));
    }

    bool is_idempotent() const {
        for (Element b = 0; b < universe_size_; ++b) {
            Tuple diag(arity_, b);
            if ((*this)(diag) != b) return false;
        }
        return true;
    }

    OperationTable renamed(std::string name) const {
        OperationTable copy = *this;
        copy.name_ = std::move(name);
        return copy;
    }

    friend bool operator==(const OperationTable&, const OperationTable&) = default;

private:
    std::string name_;
    std::size_t universe_size_;
    std::size_t arity_;
    std::vector<Element> table_;
};

class Algebra {
public:
    explicit Algebra(std::size_t universe_size, std::vector<OperationTable> operations = {})
        : universe_size_(universe_size), operations_(std::move(operations)) {
        if (universe_size_ == 0) throw ValidationError("algebra over empty universe");
        for (const auto& op : operations_) check(op);
    }

    void add(OperationTable op) {
        check(op);
        operations_.push_back(std::move(op));
    }

    std::size_t universe_size() const noexcept { return universe_size_; }
    const std::vector<OperationTable>& operations() const noexcept { return operations_; }

    friend bool operator==(const Algebra&, const Algebra&) = default;

private:
    void check(const OperationTable& op) const {
        if (op.universe_size() != universe_size_)
            throw ValidationError("operation '" + op.name() + "' is over a universe of size " +
                                  std::to_string(op.universe_size()) + ", algebra has " +
                                  std::to_string(universe_size_));
    }

    std::size_t universe_size_;
    std::vector<OperationTable> operations_;
};

enum class Quantifier { Forall, Exists };

struct Binder {
    Quantifier quantifier = Quantifier::Exists;
    Variable variable;

    friend bool operator==(const Binder&, const Binder&) = default;
};

struct Atom {
    std::string relation;
    std::vector<Variable> args;

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// Q1 v1 ... Qn vn (a1 & ... & am), with optional free variables.
struct QCFormula {
    std::vector<Variable> free_vars;
    std::vector<Binder> prefix;
    std::vector<Atom> atoms;

    bool is_sentence() const noexcept { return free_vars.empty(); }

    bool is_existential() const {
        return std::all_of(prefix.begin(), prefix.end(),
                           [](const Binder& b) { return b.quantifier == Quantifier::Exists; });
    }

    std::vector<Variable> bound_vars() const {
        std::vector<Variable> out;
        out.reserve(prefix.size());
        for (const auto& b : prefix) out.push_back(b.variable);
        return out;
    }

    std::vector<Variable> universal_vars() const {
        std::vector<Variable> out;
        for (const auto& b : prefix)
            if (b.quantifier == Quantifier::Forall) out.push_back(b.variable);
        return out;
    }

    friend bool operator==(const QCFormula&, const QCFormula&) = default;
};

/// Returns a description of the first structural defect of `f`, if any:
/// repeated binders, free/bound overlap, atoms over undeclared variables.
inline std::optional<std::string> formula_defect(const QCFormula& f) {
    std::set<Variable> seen;
    for (const auto& v : f.free_vars) {
        if (!detail::is_identifier(v)) return "invalid variable name '" + v + "'";
        if (!seen.insert(v).second) return "free variable '" + v + "' declared twice";
    }
    for (const auto& b : f.prefix) {
        if (!detail::is_identifier(b.variable)) return "invalid variable name '" + b.variable + "'";
        if (!seen.insert(b.variable).second) {
            bool is_free = std::find(f.free_vars.begin(), f.free_vars.end(), b.variable) != f.free_vars.end();
            return is_free ? "variable '" + b.variable + "' is both free and bound"
                           : "variable '" + b.variable + "' bound twice";
        }
    }
    for (const auto& a : f.atoms)
        for (const auto& v : a.args)
            if (!seen.count(v)) return "atom " + a.relation + " uses undeclared variable '" + v + "'";
    return std::nullopt;
}

inline const std::vector<Variable>& free_variables(const QCFormula& f) {
    if (auto defect = formula_defect(f)) throw ValidationError(*defect);
    return f.free_vars;
}

/// Checks that `f` is well formed and speaks the language of `s`. Never throws;
/// the diagnostic names the first violation found.
inline std::optional<std::string> validate(const Structure& s, const QCFormula& f) {
    if (auto defect = formula_defect(f)) return defect;
    for (const auto& a : f.atoms) {
        auto arity = s.signature().arity(a.relation);
        if (!arity) return "unknown relation symbol '" + a.relation + "'";
        if (*arity != a.args.size())
            return "atom " + a.relation + " has " + std::to_string(a.args.size()) + " arguments but '" +
                   a.relation + "' has arity " + std::to_string(*arity);
    }
    return std::nullopt;
}

inline void require_valid(const Structure& s, const QCFormula& f) {
    if (auto diag = validate(s, f)) throw ValidationError(*diag);
}

/// Quantifier blocks of a prefix, normalised to start with a (possibly empty)
/// universal block and alternate from there.
struct QuantifierBlock {
    Quantifier quantifier;
    std::vector<Variable> vars;
};

inline std::vector<QuantifierBlock> quantifier_blocks(const QCFormula& f) {
    std::vector<QuantifierBlock> blocks;
    blocks.push_back({Quantifier::Forall, {}});
    for (const auto& b : f.prefix) {
        if (blocks.back().quantifier != b.quantifier) blocks.push_back({b.quantifier, {}});
        blocks.back().vars.push_back(b.variable);
    }
    return blocks;
}

/// The least k such that the prefix is k alternating (forall-block,
/// exists-block) pairs, blocks allowed to be empty.
inline std::size_t prefix_alternation_rank(const QCFormula& f) {
    auto blocks = quantifier_blocks(f).size();
    return std::max<std::size_t>(1, (blocks + 1) / 2);
}

/// Adds a singleton unary relation for every element lacking one and records a
/// total constant map. An existing unary relation equal to {(b)} is reused for
/// b rather than duplicated, so the operation is idempotent.
inline Structure expand_with_constants(const Structure& s) {
    for (const auto& sym : s.signature().symbols()) {
        if (!sym.name.starts_with(kConstantPrefix)) continue;
        const auto& r = s.relation(sym.name);
        if (sym.arity != 1 || r.size() != 1)
            throw ValidationError("relation '" + sym.name + "' uses the reserved prefix '_c' but is not a singleton");
    }

    Structure out = s;
    std::set<std::string> taken;
    for (const auto& sym : s.signature().symbols()) taken.insert(sym.name);

    for (Element b = 0; b < s.universe_size(); ++b) {
        if (out.constant_name(b)) continue;
        std::optional<std::string> existing;
        for (const auto& sym : s.signature().symbols())
            if (s.is_singleton_of(sym.name, b)) {
                existing = sym.name;
                break;
            }
        if (existing) {
            out.set_constant(b, *existing);
            continue;
        }
        std::string name = std::string(kConstantPrefix) + std::to_string(b);
        while (taken.count(name)) name += "_";
        taken.insert(name);
        out.add_relation(name, 1, {Tuple{b}});
        out.set_constant(b, name);
    }
    return out;
}

/// Renames bound variables so that the formulas' bound-variable sets are
/// pairwise disjoint and disjoint from the shared free variables. Copy i
/// (1-based) renames v to v_i.
inline std::vector<QCFormula> standardize_apart(const std::vector<QCFormula>& formulas) {
    std::set<Variable> used;
    for (const auto& f : formulas) {
        if (auto defect = formula_defect(f)) throw ValidationError(*defect);
        used.insert(f.free_vars.begin(), f.free_vars.end());
    }

    std::vector<QCFormula> out;
    out.reserve(formulas.size());
    for (std::size_t i = 0; i < formulas.size(); ++i) {
        const auto& f = formulas[i];
        std::map<Variable, Variable> rename;
        QCFormula g;
        g.free_vars = f.free_vars;
        for (const auto& b : f.prefix) {
            Variable fresh = b.variable + "_" + std::to_string(i + 1);
            while (used.count(fresh)) fresh += "_";
            used.insert(fresh);
            rename[b.variable] = fresh;
            g.prefix.push_back({b.quantifier, fresh});
        }
        for (const auto& a : f.atoms) {
            Atom renamed{a.relation, {}};
            for (const auto& v : a.args) {
                auto it = rename.find(v);
                renamed.args.push_back(it == rename.end() ? v : it->second);
            }
            g.atoms.push_back(std::move(renamed));
        }
        out.push_back(std::move(g));
    }
    return out;
}

inline std::string to_string(Quantifier q) { return q == Quantifier::Forall ? "A" : "E"; }

}  // namespace qcsp
