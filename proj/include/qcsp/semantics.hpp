#pragma once

// Ground-truth evaluation of quantified constraint formulas on finite
// structures, and a bounded enumerator of small sentences.

#include <functional>
#include <numeric>

#include "qcsp/model.hpp"

namespace qcsp {

struct EvalResult {
    bool truth = false;
    std::optional<Assignment> witness;
};

namespace detail {

// A formula compiled against a structure: variables become slots, atoms point
// at their relation's tuple set.
struct CompiledFormula {
    struct CAtom {
        const std::set<Tuple>* relation;
        std::vector<std::size_t> slots;
    };

    std::vector<Variable> slot_names;  // free vars, then prefix order
    std::vector<Quantifier> quantifiers;  // per bound slot
    std::size_t free_count = 0;
    std::vector<CAtom> atoms;
    std::vector<std::vector<std::size_t>> atoms_of_slot;
};

inline CompiledFormula compile(const Structure& s, const QCFormula& f) {
    require_valid(s, f);
    CompiledFormula c;
    std::map<Variable, std::size_t> slot;
    for (const auto& v : f.free_vars) {
        slot[v] = c.slot_names.size();
        c.slot_names.push_back(v);
    }
    c.free_count = c.slot_names.size();
    for (const auto& b : f.prefix) {
        slot[b.variable] = c.slot_names.size();
        c.slot_names.push_back(b.variable);
        c.quantifiers.push_back(b.quantifier);
    }
    c.atoms_of_slot.resize(c.slot_names.size());
    for (const auto& a : f.atoms) {
        CompiledFormula::CAtom ca{&s.relation(a.relation), {}};
        for (const auto& v : a.args) ca.slots.push_back(slot.at(v));
        for (auto sl : ca.slots) {
            auto& list = c.atoms_of_slot[sl];
            if (list.empty() || list.back() != c.atoms.size()) list.push_back(c.atoms.size());
        }
        c.atoms.push_back(std::move(ca));
    }
    return c;
}

inline std::vector<Element> initial_values(const Structure& s, const QCFormula& f, const CompiledFormula& c,
                                           const Assignment& a) {
    std::vector<Element> values(c.slot_names.size(), 0);
    if (a.size() != f.free_vars.size())
        throw ValidationError("assignment must cover exactly the free variables");
    for (std::size_t i = 0; i < c.free_count; ++i) {
        auto it = a.find(c.slot_names[i]);
        if (it == a.end()) throw ValidationError("free variable '" + c.slot_names[i] + "' is unassigned");
        if (it->second >= s.universe_size())
            throw ValidationError("value " + std::to_string(it->second) + " for '" + it->first +
                                  "' outside universe");
        values[i] = it->second;
    }
    return values;
}

// An atom is decided once every slot it mentions is assigned; assigned means
// slot index < `assigned_upto` in the game-tree order.
inline bool atom_holds(const CompiledFormula::CAtom& atom, const std::vector<Element>& values) {
    Tuple t(atom.slots.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = values[atom.slots[i]];
    return atom.relation->count(t) != 0;
}

// Backtracking search over existential slots `first..end`, all earlier slots
// being assigned. After each assignment the unassigned variables are split
// into independent components (linked by atoms with at least two unassigned
// slots), and each component is solved on its own.
class ExistentialSearch {
public:
    ExistentialSearch(const CompiledFormula& c, std::vector<Element> values, std::size_t universe,
                      std::optional<std::size_t> first = std::nullopt)
        : c_(c), values_(std::move(values)), assigned_(c.slot_names.size(), false), universe_(universe),
          first_(first.value_or(c.free_count)) {
        for (std::size_t i = 0; i < first_; ++i) assigned_[i] = true;
    }

    bool run() {
        for (const auto& atom : c_.atoms)
            if (fully_assigned(atom) && !atom_holds(atom, values_)) return false;
        std::vector<std::size_t> open(c_.slot_names.size() - first_);
        std::iota(open.begin(), open.end(), first_);
        return solve_all(open);
    }

    const std::vector<Element>& values() const noexcept { return values_; }

private:
    bool fully_assigned(const CompiledFormula::CAtom& atom) const {
        return std::all_of(atom.slots.begin(), atom.slots.end(), [&](std::size_t s) { return assigned_[s]; });
    }

    std::vector<std::vector<std::size_t>> components(const std::vector<std::size_t>& open) const {
        std::map<std::size_t, std::size_t> parent;
        for (auto s : open) parent[s] = s;
        std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (auto s : open)
            for (auto ai : c_.atoms_of_slot[s]) {
                for (auto t : c_.atoms[ai].slots) {
                    if (assigned_[t] || t == s) continue;
                    auto a = find(s), b = find(t);
                    if (a != b) parent[std::max(a, b)] = std::min(a, b);
                }
            }
        std::map<std::size_t, std::vector<std::size_t>> groups;
        for (auto s : open) groups[find(s)].push_back(s);  // open is ascending
        std::vector<std::vector<std::size_t>> out;
        for (auto& [root, members] : groups) out.push_back(std::move(members));
        return out;
    }

    bool solve_all(const std::vector<std::size_t>& open) {
        if (open.empty()) return true;
        for (const auto& comp : components(open))
            if (!solve_component(comp)) return false;
        return true;
    }

    bool solve_component(const std::vector<std::size_t>& comp) {
        auto slot = comp.front();
        std::vector<std::size_t> rest(comp.begin() + 1, comp.end());
        assigned_[slot] = true;
        for (Element v = 0; v < universe_; ++v) {
            values_[slot] = v;
            bool ok = true;
            for (auto ai : c_.atoms_of_slot[slot]) {
                const auto& atom = c_.atoms[ai];
                if (fully_assigned(atom) && !atom_holds(atom, values_)) {
                    ok = false;
                    break;
                }
            }
            if (ok && solve_all(rest)) return true;
            for (auto r : rest) assigned_[r] = false;
        }
        assigned_[slot] = false;
        return false;
    }

    const CompiledFormula& c_;
    std::vector<Element> values_;
    std::vector<bool> assigned_;
    std::size_t universe_;
    std::size_t first_;
};

class GameTree {
public:
    GameTree(const CompiledFormula& c, std::vector<Element> values, std::size_t universe)
        : c_(c), values_(std::move(values)), universe_(universe) {
        // atom i becomes decided when its highest slot is assigned
        ready_.resize(c_.slot_names.size() + 1);
        for (std::size_t i = 0; i < c_.atoms.size(); ++i) {
            std::size_t hi = 0;
            for (auto sl : c_.atoms[i].slots) hi = std::max(hi, sl + 1);
            ready_[std::max(hi, c_.free_count)].push_back(i);
        }
        tail_ = c_.slot_names.size();
        while (tail_ > c_.free_count && c_.quantifiers[tail_ - 1 - c_.free_count] == Quantifier::Exists) --tail_;
    }

    bool run() {
        for (auto i : ready_[c_.free_count])
            if (!atom_holds(c_.atoms[i], values_)) return false;
        return play(c_.free_count);
    }

private:
    bool play(std::size_t slot) {
        if (slot == c_.slot_names.size()) return true;
        // only existential variables remain
        if (slot >= tail_) return ExistentialSearch(c_, values_, universe_, slot).run();
        bool universal = c_.quantifiers[slot - c_.free_count] == Quantifier::Forall;
        for (Element v = 0; v < universe_; ++v) {
            values_[slot] = static_cast<Element>(v);
            bool ok = true;
            for (auto i : ready_[slot + 1])
                if (!atom_holds(c_.atoms[i], values_)) {
                    ok = false;
                    break;
                }
            ok = ok && play(slot + 1);
            if (universal && !ok) return false;
            if (!universal && ok) return true;
        }
        return universal;
    }

    const CompiledFormula& c_;
    std::vector<Element> values_;
    std::size_t universe_;
    std::vector<std::vector<std::size_t>> ready_;
    std::size_t tail_;  // first slot of the trailing existential block
};

}  // namespace detail

/// Truth of `f` on `s` under the free-variable assignment `a`, by exhaustive
/// game-tree recursion in prefix order. A branch is cut as soon as an atom whose
/// variables are all assigned fails. Once only existential variables remain,
/// the rest is decided by the component-splitting search behind eval_csp.
inline bool eval_qcsp(const Structure& s, const QCFormula& f, const Assignment& a = {}) {
    auto c = detail::compile(s, f);
    auto values = detail::initial_values(s, f, c, a);
    return detail::GameTree(c, std::move(values), s.universe_size()).run();
}

/// Decides a purely existential formula by backtracking search and returns the
/// least satisfying assignment of the bound variables (prefix order, ascending
/// values) when one exists.
inline EvalResult eval_csp(const Structure& s, const QCFormula& f, const Assignment& a = {}) {
    if (!f.is_existential()) throw ValidationError("eval_csp requires a purely existential prefix");
    auto c = detail::compile(s, f);
    auto values = detail::initial_values(s, f, c, a);
    detail::ExistentialSearch search(c, std::move(values), s.universe_size());
    EvalResult result;
    result.truth = search.run();
    if (result.truth) {
        Assignment w;
        for (std::size_t i = c.free_count; i < c.slot_names.size(); ++i) w[c.slot_names[i]] = search.values()[i];
        result.witness = std::move(w);
    }
    return result;
}

/// Calls `visit` on every assignment to `vars` over a universe of size n, in
/// lexicographic order.
template <typename Visit>
void for_each_assignment(const std::vector<Variable>& vars, std::size_t n, Visit&& visit) {
    Tuple values(vars.size(), 0);
    while (true) {
        Assignment a;
        for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = values[i];
        visit(a);
        std::size_t pos = vars.size();
        while (pos > 0) {
            if (++values[pos - 1] < n) break;
            values[--pos] = 0;
        }
        if (pos == 0) return;
    }
}

struct SentenceBounds {
    std::size_t max_vars = 1;
    std::size_t max_atoms = 1;
    bool existential_only = false;
};

/// Enumerates every prenex sentence with 1..max_vars variables v1..vk (bound in
/// that order) and 1..max_atoms distinct atoms over `sig`, each distinct
/// sentence exactly once. Order: variable count, quantifier pattern (forall
/// before exists, leftmost most significant), atom count, then atom
/// combination in lexicographic order. `visit` may return false to stop.
template <typename Visit>
void enumerate_sentences(const Signature& sig, const SentenceBounds& bounds, Visit&& visit) {
    if (bounds.max_vars < 1 || bounds.max_atoms < 1) throw ValidationError("sentence bounds must be >= 1");
    auto call = [&](const QCFormula& f) {
        if constexpr (std::is_same_v<std::invoke_result_t<Visit&, const QCFormula&>, bool>)
            return visit(f);
        else {
            visit(f);
            return true;
        }
    };

    for (std::size_t nvars = 1; nvars <= bounds.max_vars; ++nvars) {
        std::vector<Variable> names;
        for (std::size_t i = 1; i <= nvars; ++i) names.push_back("v" + std::to_string(i));

        std::vector<Atom> shapes;
        for (const auto& sym : sig.symbols()) {
            std::vector<std::size_t> idx(sym.arity, 0);
            while (true) {
                Atom a{sym.name, {}};
                for (auto i : idx) a.args.push_back(names[i]);
                shapes.push_back(std::move(a));
                std::size_t pos = idx.size();
                while (pos > 0) {
                    if (++idx[pos - 1] < nvars) break;
                    idx[--pos] = 0;
                }
                if (pos == 0) break;
            }
        }

        std::size_t patterns = std::size_t{1} << nvars;
        for (std::size_t pattern = 0; pattern < patterns; ++pattern) {
            QCFormula f;
            bool existential = true;
            for (std::size_t i = 0; i < nvars; ++i) {
                bool exists = (pattern >> (nvars - 1 - i)) & 1U;
                existential = existential && exists;
                f.prefix.push_back({exists ? Quantifier::Exists : Quantifier::Forall, names[i]});
            }
            if (bounds.existential_only && !existential) continue;

            for (std::size_t natoms = 1; natoms <= bounds.max_atoms && natoms <= shapes.size(); ++natoms) {
                std::vector<std::size_t> pick(natoms);
                std::iota(pick.begin(), pick.end(), 0);
                while (true) {
                    f.atoms.clear();
                    for (auto p : pick) f.atoms.push_back(shapes[p]);
                    if (!call(f)) return;
                    std::size_t pos = natoms;
                    while (pos > 0 && pick[pos - 1] == shapes.size() - natoms + pos - 1) --pos;
                    if (pos == 0) break;
                    ++pick[pos - 1];
                    for (std::size_t j = pos; j < natoms; ++j) pick[j] = pick[j - 1] + 1;
                }
            }
        }
    }
}

inline std::vector<QCFormula> enumerate_sentences(const Signature& sig, const SentenceBounds& bounds) {
    std::vector<QCFormula> out;
    enumerate_sentences(sig, bounds, [&](const QCFormula& f) { out.push_back(f); });
    return out;
}

}  // namespace qcsp
