#pragma once

// Polymorphisms, subpower generation, d-sequences and the growth witnesses
// (identity-element generating sets, forced {a,b}^n subsets), plus the
// collapsibility surjectivity criterion.

#include <functional>
#include <numeric>

#include "qcsp/model.hpp"

namespace qcsp {

enum class Provenance { Identity, Minimal, Full, User };

inline std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Identity: return "identity";
        case Provenance::Minimal: return "minimal";
        case Provenance::Full: return "full";
        case Provenance::User: return "user";
    }
    return "?";
}

/// A set of n-tuples meant to generate the n-th power of an algebra.
/// `verified` certifies that the closure of `tuples` is the whole power.
struct GeneratorSet {
    std::size_t power = 0;
    std::set<Tuple> tuples;
    Provenance provenance = Provenance::User;
    bool verified = false;

    friend bool operator==(const GeneratorSet&, const GeneratorSet&) = default;
};

struct PolymorphismCounterexample {
    std::string relation;
    std::vector<Tuple> tuples;  // one argument tuple per operation argument
    Tuple image;

    friend bool operator==(const PolymorphismCounterexample&, const PolymorphismCounterexample&) = default;
};

struct Limits {
    // idempotent tables examined by enumerate_idempotent_polymorphisms
    std::size_t polymorphism_candidates = 729;
    // |B|^n for minimal_generating_size / d_sequence
    std::size_t power_elements = 32;
    // |B|^n for closure computations
    std::size_t closure_elements = std::size_t{1} << 24;
};

namespace detail {

inline void for_each_index_tuple(std::size_t base, std::size_t length,
                                 const std::function<bool(const std::vector<std::size_t>&)>& visit) {
    std::vector<std::size_t> idx(length, 0);
    if (base == 0 && length > 0) return;
    while (true) {
        if (!visit(idx)) return;
        std::size_t pos = length;
        while (pos > 0) {
            if (++idx[pos - 1] < base) break;
            idx[--pos] = 0;
        }
        if (pos == 0) return;
    }
}

inline bool is_projection(const OperationTable& op) {
    for (std::size_t i = 0; i < op.arity(); ++i) {
        bool proj = true;
        Tuple args(op.arity(), 0);
        for (std::size_t idx = 0; idx < op.table().size() && proj; ++idx) {
            if (op.table()[idx] != args[i]) proj = false;
            for (std::size_t pos = op.arity(); pos-- > 0;) {
                if (++args[pos] < op.universe_size()) break;
                args[pos] = 0;
            }
        }
        if (proj) return true;
    }
    return false;
}

// Dense closure engine for subsets of B^n. Elements are coded by their
// lexicographic rank.
class PowerClosure {
public:
    PowerClosure(const Algebra& a, std::size_t n, const Limits& limits = {}) : universe_(a.universe_size()), n_(n) {
        if (n == 0) throw ValidationError("power must be >= 1");
        size_ = checked_pow(universe_, n);
        if (size_ > limits.closure_elements)
            throw BudgetError("power too large for closure", size_, limits.closure_elements);
        for (const auto& op : a.operations())
            if (op.arity() == 0 || !is_projection(op)) ops_.push_back(&op);
    }

    std::size_t size() const noexcept { return size_; }
    std::size_t power() const noexcept { return n_; }

    std::size_t encode(const Tuple& t) const {
        if (t.size() != n_)
            throw ValidationError("tuple of length " + std::to_string(t.size()) + " in power " + std::to_string(n_));
        std::size_t code = 0;
        for (auto e : t) {
            if (e >= universe_)
                throw ValidationError("tuple entry " + std::to_string(e) + " outside universe of size " +
                                      std::to_string(universe_));
            code = code * universe_ + e;
        }
        return code;
    }

    Tuple decode(std::size_t code) const {
        Tuple t(n_);
        for (std::size_t i = n_; i-- > 0;) {
            t[i] = static_cast<Element>(code % universe_);
            code /= universe_;
        }
        return t;
    }

    /// Codes of the subuniverse generated by `seed`, in discovery order. Stops
    /// early once `stop_at` elements are known.
    std::vector<std::size_t> close(const std::vector<std::size_t>& seed, std::size_t stop_at = SIZE_MAX) const {
        std::vector<char> member(size_, 0);
        std::vector<std::size_t> elems;
        std::vector<Tuple> coords;
        auto push = [&](std::size_t code) {
            if (member[code]) return;
            member[code] = 1;
            elems.push_back(code);
            coords.push_back(decode(code));
        };
        for (const auto* op : ops_)
            if (op->arity() == 0) push(encode(Tuple(n_, (*op)(std::span<const Element>{}))));
        for (auto c : seed) push(c);

        std::vector<Element> args;
        for (std::size_t j = 0; j < elems.size() && elems.size() < stop_at; ++j) {
            for (const auto* op : ops_) {
                std::size_t k = op->arity();
                if (k == 0) continue;
                args.assign(k, 0);
                for_each_index_tuple(j + 1, k, [&](const std::vector<std::size_t>& idx) {
                    if (std::find(idx.begin(), idx.end(), j) == idx.end()) return true;
                    std::size_t code = 0;
                    for (std::size_t c = 0; c < n_; ++c) {
                        for (std::size_t t = 0; t < k; ++t) args[t] = coords[idx[t]][c];
                        code = code * universe_ + (*op)(std::span<const Element>(args));
                    }
                    push(code);
                    return elems.size() < stop_at;
                });
                if (elems.size() >= stop_at) break;
            }
        }
        return elems;
    }

    bool generates(const std::vector<std::size_t>& seed) const { return close(seed, size_).size() == size_; }

private:
    std::size_t universe_;
    std::size_t n_;
    std::size_t size_ = 0;
    std::vector<const OperationTable*> ops_;
};

}  // namespace detail

/// Checks f against every relation of s, trying all |R|^arity(f) argument
/// sequences in lexicographic order. Returns the first failure, if any.
inline std::optional<PolymorphismCounterexample> check_polymorphism(const Structure& s, const OperationTable& f) {
    if (f.universe_size() != s.universe_size())
        throw ValidationError("operation '" + f.name() + "' is over a universe of size " +
                              std::to_string(f.universe_size()) + ", structure has " +
                              std::to_string(s.universe_size()));
    std::optional<PolymorphismCounterexample> found;
    for (const auto& sym : s.signature().symbols()) {
        const auto& rel = s.relation(sym.name);
        std::vector<const Tuple*> rows;
        for (const auto& t : rel) rows.push_back(&t);
        std::vector<Element> args(f.arity());
        detail::for_each_index_tuple(rows.size(), f.arity(), [&](const std::vector<std::size_t>& idx) {
            Tuple image(sym.arity);
            for (std::size_t c = 0; c < sym.arity; ++c) {
                for (std::size_t t = 0; t < f.arity(); ++t) args[t] = (*rows[idx[t]])[c];
                image[c] = f(std::span<const Element>(args));
            }
            if (rel.count(image)) return true;
            PolymorphismCounterexample cx{sym.name, {}, image};
            for (auto i : idx) cx.tuples.push_back(*rows[i]);
            found = std::move(cx);
            return false;
        });
        if (found) return found;
    }
    return std::nullopt;
}

/// All idempotent polymorphisms of s of the given arity, in lexicographic table
/// order. Refuses when the number of idempotent candidate tables exceeds the
/// budget.
inline std::vector<OperationTable> enumerate_idempotent_polymorphisms(const Structure& s, std::size_t arity,
                                                                      const Limits& limits = {}) {
    if (arity < 1) throw ValidationError("polymorphism arity must be >= 1");
    const std::size_t n = s.universe_size();
    const std::size_t cells = detail::checked_pow(n, arity);
    const std::size_t free_cells = cells - n;  // the diagonal is fixed by idempotence
    std::size_t candidates = detail::checked_pow(n, free_cells);
    if (candidates > limits.polymorphism_candidates)
        throw BudgetError("too many idempotent candidate tables for arity " + std::to_string(arity) +
                              " over a universe of size " + std::to_string(n),
                          candidates, limits.polymorphism_candidates);

    // diagonal cell of b is b * (n^arity - 1) / (n - 1) for n > 1
    std::vector<std::optional<Element>> fixed(cells);
    for (Element b = 0; b < n; ++b) {
        Tuple diag(arity, b);
        std::size_t idx = 0;
        for (auto e : diag) idx = idx * n + e;
        fixed[idx] = b;
    }
    std::vector<std::size_t> free_pos;
    for (std::size_t i = 0; i < cells; ++i)
        if (!fixed[i]) free_pos.push_back(i);

    std::vector<OperationTable> out;
    std::vector<Element> table(cells);
    for (std::size_t i = 0; i < cells; ++i)
        if (fixed[i]) table[i] = *fixed[i];
    detail::for_each_index_tuple(n, free_pos.size(), [&](const std::vector<std::size_t>& vals) {
        for (std::size_t i = 0; i < free_pos.size(); ++i) table[free_pos[i]] = static_cast<Element>(vals[i]);
        OperationTable op("f" + std::to_string(arity) + "_" + std::to_string(out.size()), n, arity, table);
        if (!check_polymorphism(s, op)) out.push_back(std::move(op));
        return true;
    });
    return out;
}

/// The algebra of idempotent polymorphisms of s, truncated to arities
/// 1..max_arity. Idempotent polymorphisms are unchanged by adding constants,
/// so s and expand_with_constants(s) give the same algebra.
inline Algebra algebra_of_structure(const Structure& s, std::size_t max_arity, const Limits& limits = {}) {
    Algebra a(s.universe_size());
    for (std::size_t k = 1; k <= max_arity; ++k)
        for (auto& op : enumerate_idempotent_polymorphisms(s, k, limits)) a.add(std::move(op));
    return a;
}

/// The subuniverse of A^n generated by X.
inline std::set<Tuple> generate_subpower(const Algebra& a, std::size_t n, const std::set<Tuple>& x,
                                         const Limits& limits = {}) {
    detail::PowerClosure closure(a, n, limits);
    std::vector<std::size_t> seed;
    for (const auto& t : x) seed.push_back(closure.encode(t));
    std::set<Tuple> out;
    for (auto code : closure.close(seed)) out.insert(closure.decode(code));
    return out;
}

inline bool is_generating(const Algebra& a, std::size_t n, const std::set<Tuple>& x, const Limits& limits = {}) {
    detail::PowerClosure closure(a, n, limits);
    std::vector<std::size_t> seed;
    for (const auto& t : x) seed.push_back(closure.encode(t));
    return closure.generates(seed);
}

/// Some tuple of A^n outside the closure of X (the least one), if any.
inline std::optional<Tuple> first_unreachable(const Algebra& a, std::size_t n, const std::set<Tuple>& x,
                                              const Limits& limits = {}) {
    detail::PowerClosure closure(a, n, limits);
    std::vector<std::size_t> seed;
    for (const auto& t : x) seed.push_back(closure.encode(t));
    std::vector<char> member(closure.size(), 0);
    for (auto c : closure.close(seed)) member[c] = 1;
    for (std::size_t c = 0; c < closure.size(); ++c)
        if (!member[c]) return closure.decode(c);
    return std::nullopt;
}

inline GeneratorSet full_power(std::size_t universe_size, std::size_t n) {
    GeneratorSet g{n, {}, Provenance::Full, true};
    Tuple t(n, 0);
    detail::for_each_index_tuple(universe_size, n, [&](const std::vector<std::size_t>& idx) {
        for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<Element>(idx[i]);
        g.tuples.insert(t);
        return true;
    });
    return g;
}

struct MinimalGenerating {
    std::size_t d = 0;
    GeneratorSet witness;
};

/// d(A^n) together with the lexicographically least generating set of that
/// size. Every generating set contains the mandatory tuples (those outside the
/// closure of all other tuples), so the search only grows that seed, and never
/// picks tuples already generated by it.
inline MinimalGenerating minimal_generating_size(const Algebra& a, std::size_t n, const Limits& limits = {}) {
    if (n == 0) throw ValidationError("power must be >= 1");
    std::size_t total = detail::checked_pow(a.universe_size(), n);
    if (total > limits.power_elements)
        throw BudgetError("power " + std::to_string(n) + " too large for minimal generating set search", total,
                          limits.power_elements);
    detail::PowerClosure closure(a, n, limits);

    std::vector<std::size_t> mandatory;
    for (std::size_t t = 0; t < total; ++t) {
        std::vector<std::size_t> others;
        for (std::size_t u = 0; u < total; ++u)
            if (u != t) others.push_back(u);
        if (closure.close(others, total).size() < total) mandatory.push_back(t);
    }

    std::vector<char> seeded(total, 0);
    for (auto c : closure.close(mandatory)) seeded[c] = 1;
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < total; ++c)
        if (!seeded[c]) candidates.push_back(c);

    auto finish = [&](std::vector<std::size_t> codes) {
        MinimalGenerating r;
        r.d = codes.size();
        r.witness = {n, {}, Provenance::Minimal, true};
        for (auto c : codes) r.witness.tuples.insert(closure.decode(c));
        return r;
    };
    if (candidates.empty()) return finish(mandatory);

    for (std::size_t extra = 1; extra <= candidates.size(); ++extra) {
        std::vector<std::size_t> pick(extra);
        std::iota(pick.begin(), pick.end(), 0);
        while (true) {
            std::vector<std::size_t> seed = mandatory;
            for (auto p : pick) seed.push_back(candidates[p]);
            if (closure.generates(seed)) return finish(seed);
            std::size_t pos = extra;
            while (pos > 0 && pick[pos - 1] == candidates.size() - extra + pos - 1) --pos;
            if (pos == 0) break;
            ++pick[pos - 1];
            for (std::size_t j = pos; j < extra; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    throw Error("no generating set found");  // unreachable: B^n generates itself
}

struct DSequence {
    std::vector<std::size_t> values;  // values[i] = d(A^(i+1))
    bool truncated = false;           // budget ran out before max_n
    std::optional<std::string> truncation_reason;
};

inline DSequence d_sequence(const Algebra& a, std::size_t max_n, const Limits& limits = {}) {
    DSequence seq;
    for (std::size_t n = 1; n <= max_n; ++n) {
        try {
            seq.values.push_back(minimal_generating_size(a, n, limits).d);
        } catch (const BudgetError& e) {
            seq.truncated = true;
            seq.truncation_reason = e.what();
            break;
        }
        if (seq.values.size() >= 2 && seq.values[seq.values.size() - 2] > seq.values.back())
            throw Error("d-sequence decreased at n=" + std::to_string(n));
    }
    return seq;
}

namespace detail {
inline void require_binary(const OperationTable& f) {
    if (f.arity() != 2)
        throw ValidationError("operation '" + f.name() + "' has arity " + std::to_string(f.arity()) +
                              ", expected a binary operation");
}
}  // namespace detail

/// The two-sided identity e of a binary operation (f(b,e) = f(e,b) = b), if any.
inline std::optional<Element> identity_element(const OperationTable& f) {
    detail::require_binary(f);
    for (Element e = 0; e < f.universe_size(); ++e) {
        bool ok = true;
        for (Element b = 0; b < f.universe_size() && ok; ++b) ok = f({b, e}) == b && f({e, b}) == b;
        if (ok) return e;
    }
    return std::nullopt;
}

inline bool is_semilattice(const OperationTable& f) {
    detail::require_binary(f);
    const Element n = static_cast<Element>(f.universe_size());
    for (Element x = 0; x < n; ++x) {
        if (f({x, x}) != x) return false;
        for (Element y = 0; y < n; ++y) {
            if (f({x, y}) != f({y, x})) return false;
            for (Element z = 0; z < n; ++z)
                if (f({f({x, y}), z}) != f({x, f({y, z})})) return false;
        }
    }
    return true;
}

struct IdentityWitness {
    std::string operation;
    Element identity = 0;
};

inline std::optional<IdentityWitness> find_identity_operation(const Algebra& a) {
    for (const auto& op : a.operations())
        if (op.arity() == 2)
            if (auto e = identity_element(op)) return IdentityWitness{op.name(), *e};
    return std::nullopt;
}

/// The set {t[n,i,b]}: tuples equal to the identity e except for value b at
/// coordinate i. Built in time polynomial in n; not verified here.
inline std::optional<GeneratorSet> identity_generating_set(const Algebra& a, std::size_t n) {
    if (n == 0) throw ValidationError("power must be >= 1");
    auto w = find_identity_operation(a);
    if (!w) return std::nullopt;
    GeneratorSet g{n, {}, Provenance::Identity, false};
    for (std::size_t i = 0; i < n; ++i)
        for (Element b = 0; b < a.universe_size(); ++b) {
            Tuple t(n, w->identity);
            t[i] = b;
            g.tuples.insert(std::move(t));
        }
    return g;
}

/// The identity-element generating set of A^n, certified by a closure check.
/// None when no binary operation of A has an identity element.
inline std::optional<GeneratorSet> pgp_witness_identity(const Algebra& a, std::size_t n, const Limits& limits = {}) {
    auto g = identity_generating_set(a, n);
    if (!g) return std::nullopt;
    g->verified = is_generating(a, n, g->tuples, limits);
    if (!g->verified) throw Error("identity-element construction failed to generate the power");
    return g;
}

/// Distinct a < b such that every operation produces a value v in {a,b} only
/// from the all-v argument tuple. Then any generating set of A^n contains
/// {a,b}^n, so d(A^n) >= 2^n.
inline std::optional<std::pair<Element, Element>> egp_witness_pair(const Algebra& a) {
    const Element n = static_cast<Element>(a.universe_size());
    for (Element x = 0; x < n; ++x)
        for (Element y = x + 1; y < n; ++y) {
            bool ok = true;
            for (const auto& op : a.operations()) {
                Tuple args(op.arity(), 0);
                for (std::size_t idx = 0; idx < op.table().size() && ok; ++idx) {
                    Element v = op.table()[idx];
                    if (v == x || v == y)
                        ok = op.arity() > 0 &&
                             std::all_of(args.begin(), args.end(), [&](Element e) { return e == v; });
                    for (std::size_t pos = op.arity(); pos-- > 0;) {
                        if (++args[pos] < n) break;
                        args[pos] = 0;
                    }
                }
                if (!ok) break;
            }
            if (ok) return std::pair{x, y};
        }
    return std::nullopt;
}

enum class GrowthVerdict { PgpWitnessed, EgpWitnessed, Inconclusive };

inline std::string to_string(GrowthVerdict v) {
    switch (v) {
        case GrowthVerdict::PgpWitnessed: return "pgp-witnessed";
        case GrowthVerdict::EgpWitnessed: return "egp-witnessed";
        case GrowthVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct GrowthReport {
    DSequence d_values;
    std::optional<IdentityWitness> pgp_witness;  // generating sets of size <= n*|B|
    std::optional<std::pair<Element, Element>> egp_witness;  // d(A^n) >= 2^n
    GrowthVerdict verdict = GrowthVerdict::Inconclusive;
    std::size_t operation_count = 0;
};

/// Verdicts come only from certificates; the d-values are reported as evidence.
inline GrowthReport classify_growth(const Algebra& a, std::size_t max_n, const Limits& limits = {}) {
    GrowthReport r;
    r.operation_count = a.operations().size();
    r.d_values = d_sequence(a, max_n, limits);
    if (pgp_witness_identity(a, 1, limits)) r.pgp_witness = find_identity_operation(a);
    r.egp_witness = egp_witness_pair(a);
    if (r.pgp_witness)
        r.verdict = GrowthVerdict::PgpWitnessed;
    else if (r.egp_witness)
        r.verdict = GrowthVerdict::EgpWitnessed;
    return r;
}

/// f with its i-th argument (1-based) fixed to a.
inline OperationTable fix_argument(const OperationTable& f, std::size_t i, Element a) {
    if (i < 1 || i > f.arity())
        throw ValidationError("coordinate " + std::to_string(i) + " out of range for arity " +
                              std::to_string(f.arity()));
    if (a >= f.universe_size()) throw ValidationError("element " + std::to_string(a) + " outside universe");
    return OperationTable::from_function(
        f.name() + "_" + std::to_string(i) + "^" + std::to_string(a), f.universe_size(), f.arity() - 1,
        [&](std::span<const Element> rest) {
            Tuple args(rest.begin(), rest.end());
            args.insert(args.begin() + static_cast<std::ptrdiff_t>(i - 1), a);
            return f(args);
        });
}

struct CollapsibilityWitness {
    std::string operation;
    std::size_t arity = 0;
    Element element = 0;
    std::vector<std::set<Element>> images;  // images[i-1] = image of f_i^a
};

/// The first idempotent operation f and element a (operation order, then
/// element order) for which every f_i^a is surjective.
inline std::optional<CollapsibilityWitness> collapsibility_witness(const Algebra& a) {
    for (const auto& f : a.operations()) {
        if (f.arity() == 0 || !f.is_idempotent()) continue;
        for (Element e = 0; e < a.universe_size(); ++e) {
            CollapsibilityWitness w{f.name(), f.arity(), e, {}};
            bool ok = true;
            for (std::size_t i = 1; i <= f.arity() && ok; ++i) {
                auto restricted = fix_argument(f, i, e);
                std::set<Element> image(restricted.table().begin(), restricted.table().end());
                ok = image.size() == a.universe_size();
                w.images.push_back(std::move(image));
            }
            if (ok) return w;
        }
    }
    return std::nullopt;
}

}  // namespace qcsp
