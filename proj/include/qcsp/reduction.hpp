#pragma once

// Translation of bounded-alternation quantified constraint formulas over a
// constant-expanded structure into equivalent existential formulas, using
// generating sets of powers of an algebra of idempotent polymorphisms.
//
// For a forall-exists formula with universal variables Y, each generator t of
// the |Y|-th power yields one copy of the formula with every quantifier made
// existential and y pinned to the constant t(y). The conjunction of the copies
// is equivalent to the original: the set of Y-assignments extending to a
// solution is a subpower (idempotent polymorphisms preserve relations defined
// with parameters), so it is everything once it contains a generating set.

#include "qcsp/algebra.hpp"
#include "qcsp/io.hpp"
#include "qcsp/model.hpp"

namespace qcsp {

enum class GeneratorStrategy { Identity, Minimal, Full, UserFile };
enum class ValidationMode { Verify, Trust };

inline std::string to_string(GeneratorStrategy s) {
    switch (s) {
        case GeneratorStrategy::Identity: return "identity";
        case GeneratorStrategy::Minimal: return "minimal";
        case GeneratorStrategy::Full: return "full";
        case GeneratorStrategy::UserFile: return "file";
    }
    return "?";
}

/// Produces generating sets of A^n on demand.
class GeneratorProvider {
public:
    GeneratorProvider(Algebra algebra, GeneratorStrategy strategy, ValidationMode mode = ValidationMode::Verify,
                      std::optional<std::set<Tuple>> user_tuples = std::nullopt, Limits limits = {})
        : algebra_(std::move(algebra)), strategy_(strategy), mode_(mode), user_(std::move(user_tuples)),
          limits_(limits) {
        if (strategy_ == GeneratorStrategy::Identity && !find_identity_operation(algebra_))
            throw ValidationError("identity strategy needs a binary operation with an identity element");
        if (strategy_ == GeneratorStrategy::UserFile && !user_)
            throw ValidationError("file strategy needs generator tuples");
    }

    const Algebra& algebra() const noexcept { return algebra_; }
    GeneratorStrategy strategy() const noexcept { return strategy_; }
    ValidationMode mode() const noexcept { return mode_; }
    const Limits& limits() const noexcept { return limits_; }

    GeneratorSet generators(std::size_t n) const {
        if (n == 0) throw ValidationError("power must be >= 1");
        GeneratorSet g;
        switch (strategy_) {
            case GeneratorStrategy::Identity:
                g = *identity_generating_set(algebra_, n);
                break;
            case GeneratorStrategy::Minimal:
                return minimal_generating_size(algebra_, n, limits_).witness;
            case GeneratorStrategy::Full:
                return full_power(algebra_.universe_size(), n);
            case GeneratorStrategy::UserFile:
                for (const auto& t : *user_)
                    if (t.size() != n)
                        throw ValidationError("generator file has tuples of length " + std::to_string(t.size()) +
                                              ", power " + std::to_string(n) + " requested");
                g = GeneratorSet{n, *user_, Provenance::User, false};
                break;
        }
        if (mode_ == ValidationMode::Verify) {
            if (auto missing = first_unreachable(algebra_, n, g.tuples, limits_)) {
                std::string t;
                for (auto e : *missing) t += (t.empty() ? "" : " ") + std::to_string(e);
                throw ValidationError("generator set does not generate power " + std::to_string(n) +
                                      ": tuple (" + t + ") is unreachable");
            }
            g.verified = true;
        }
        return g;
    }

private:
    Algebra algebra_;
    GeneratorStrategy strategy_;
    ValidationMode mode_;
    std::optional<std::set<Tuple>> user_;
    Limits limits_;
};

inline GeneratorProvider make_generator_provider(const Algebra& a, GeneratorStrategy strategy,
                                                 const std::optional<std::string>& source = std::nullopt,
                                                 ValidationMode mode = ValidationMode::Verify, Limits limits = {}) {
    std::optional<std::set<Tuple>> tuples;
    if (strategy == GeneratorStrategy::UserFile) {
        if (!source) throw ValidationError("file strategy needs a generator file");
        tuples = parse_generators(read_file(*source), a.universe_size());
    }
    return GeneratorProvider(a, strategy, mode, std::move(tuples), limits);
}

/// Standardizes the existential formulas apart and conjoins them into one
/// prenex existential formula over the shared free variables.
inline QCFormula prenex_conjunction(const std::vector<QCFormula>& formulas) {
    QCFormula out;
    if (formulas.empty()) return out;
    for (const auto& f : formulas) {
        if (!f.is_existential()) throw ValidationError("prenex_conjunction requires existential formulas");
        if (f.free_vars != formulas.front().free_vars)
            throw ValidationError("prenex_conjunction requires identical free variables");
    }
    out.free_vars = formulas.front().free_vars;
    for (auto& f : standardize_apart(formulas)) {
        out.prefix.insert(out.prefix.end(), f.prefix.begin(), f.prefix.end());
        out.atoms.insert(out.atoms.end(), f.atoms.begin(), f.atoms.end());
    }
    return out;
}

struct ReductionStage {
    std::size_t power = 0;  // |Y|
    std::size_t generators = 0;
    std::size_t input_vars = 0;
    std::size_t input_atoms = 0;
    std::size_t output_vars = 0;
    std::size_t output_atoms = 0;
};

struct ReductionReport {
    std::vector<ReductionStage> stages;  // innermost first
    std::size_t input_atoms = 0;
    std::size_t output_atoms = 0;

    double blowup() const {
        return input_atoms == 0 ? static_cast<double>(output_atoms) : double(output_atoms) / double(input_atoms);
    }

    std::size_t generator_product() const {
        std::size_t p = 1;
        for (const auto& s : stages) p *= std::max<std::size_t>(1, s.generators);
        return p;
    }
};

namespace detail {

inline std::size_t variable_count(const QCFormula& f) { return f.free_vars.size() + f.prefix.size(); }

inline void require_constants(const Structure& s) {
    if (!s.has_total_constant_map())
        throw ValidationError("structure lacks a constant relation for every element; expand it with constants first");
}

inline std::vector<Atom> without_duplicates(const std::vector<Atom>& atoms) {
    std::vector<Atom> out;
    std::set<Atom> seen;
    for (const auto& a : atoms)
        if (seen.insert(a).second) out.push_back(a);
    return out;
}

}  // namespace detail

/// Collapses a forall-exists formula to an existential one using `gens`, a
/// generating set of the |Y|-th power indexed by the universal variables Y in
/// prefix order. Copies are kept whole (only a pin already present is
/// skipped), so the atom count is multiplied by the number of generators.
inline QCFormula reduce_pi2(const Structure& sstar, const QCFormula& f, const GeneratorSet& gens,
                            ValidationMode mode = ValidationMode::Verify) {
    detail::require_constants(sstar);
    require_valid(sstar, f);
    if (prefix_alternation_rank(f) != 1) throw ValidationError("reduce_pi2 needs a forall-exists prefix");
    auto universals = f.universal_vars();
    if (universals.empty()) return f;
    if (gens.power != universals.size())
        throw ValidationError("generator power " + std::to_string(gens.power) + " does not match " +
                              std::to_string(universals.size()) + " universal variables");
    if (mode == ValidationMode::Verify && !gens.verified) throw ValidationError("generator set is not verified");

    std::vector<QCFormula> copies;
    for (const auto& t : gens.tuples) {
        if (t.size() != universals.size()) throw ValidationError("generator tuple has the wrong length");
        QCFormula copy;
        copy.free_vars = f.free_vars;
        for (const auto& b : f.prefix) copy.prefix.push_back({Quantifier::Exists, b.variable});
        copy.atoms = f.atoms;
        std::set<Atom> present(f.atoms.begin(), f.atoms.end());
        for (std::size_t j = 0; j < universals.size(); ++j) {
            if (t[j] >= sstar.universe_size()) throw ValidationError("generator entry outside universe");
            Atom pin{*sstar.constant_name(t[j]), {universals[j]}};
            if (present.insert(pin).second) copy.atoms.push_back(std::move(pin));
        }
        copies.push_back(std::move(copy));
    }
    return prenex_conjunction(copies);
}

namespace detail {

inline void require_trusted_algebra(const Structure& sstar, const GeneratorProvider& provider) {
    for (const auto& op : provider.algebra().operations()) {
        if (!op.is_idempotent()) throw ValidationError("operation '" + op.name() + "' is not idempotent");
        if (provider.mode() == ValidationMode::Verify && check_polymorphism(sstar, op))
            throw ValidationError("operation '" + op.name() + "' is not a polymorphism of the structure");
    }
    if (provider.algebra().universe_size() != sstar.universe_size())
        throw ValidationError("algebra and structure have different universes");
}

inline QCFormula reduce_rec(const Structure& sstar, const QCFormula& f, const GeneratorProvider& provider,
                            ReductionReport& report) {
    auto blocks = quantifier_blocks(f);
    QCFormula pi2;
    if (blocks.size() <= 2) {
        pi2 = f;
    } else {
        // strip the outer forall-block and exists-block, reduce the rest with
        // their variables free, then put them back
        QCFormula inner;
        inner.free_vars = f.free_vars;
        for (std::size_t b = 0; b < 2; ++b) inner.free_vars.insert(inner.free_vars.end(), blocks[b].vars.begin(),
                                                                   blocks[b].vars.end());
        for (std::size_t b = 2; b < blocks.size(); ++b)
            for (const auto& v : blocks[b].vars) inner.prefix.push_back({blocks[b].quantifier, v});
        inner.atoms = f.atoms;
        auto reduced = reduce_rec(sstar, inner, provider, report);

        pi2.free_vars = f.free_vars;
        for (std::size_t b = 0; b < 2; ++b)
            for (const auto& v : blocks[b].vars) pi2.prefix.push_back({blocks[b].quantifier, v});
        pi2.prefix.insert(pi2.prefix.end(), reduced.prefix.begin(), reduced.prefix.end());
        pi2.atoms = reduced.atoms;
    }

    ReductionStage stage;
    stage.power = pi2.universal_vars().size();
    stage.input_vars = variable_count(pi2);
    stage.input_atoms = pi2.atoms.size();
    QCFormula out;
    if (stage.power == 0) {
        out = pi2;
        stage.generators = 1;
    } else {
        auto gens = provider.generators(stage.power);
        stage.generators = gens.tuples.size();
        out = reduce_pi2(sstar, pi2, gens, provider.mode());
    }
    stage.output_vars = variable_count(out);
    stage.output_atoms = out.atoms.size();
    report.stages.push_back(stage);
    return out;
}

}  // namespace detail

struct Reduction {
    QCFormula formula;
    ReductionReport report;
};

/// Reduces any prenex formula to an existential formula that agrees with it on
/// every free-variable assignment. Works inside out: the inner formula left
/// after removing the two outermost blocks is reduced first.
inline Reduction reduce_qcsp(const Structure& sstar, const QCFormula& f, const GeneratorProvider& provider) {
    detail::require_constants(sstar);
    require_valid(sstar, f);
    detail::require_trusted_algebra(sstar, provider);
    Reduction r;
    QCFormula input = f;
    input.atoms = detail::without_duplicates(f.atoms);
    r.report.input_atoms = input.atoms.size();
    r.formula = detail::reduce_rec(sstar, input, provider, r.report);
    r.report.output_atoms = r.formula.atoms.size();
    return r;
}

}  // namespace qcsp
