#pragma once

// Text formats: .struct structures, .alg algebras, .qcf formulas and
// generator files (one space-separated tuple per line). `#` starts a comment.

#include <cctype>
#include <fstream>
#include <sstream>

#include "qcsp/algebra.hpp"
#include "qcsp/model.hpp"

namespace qcsp {

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

namespace detail {

struct Word {
    std::string text;
    std::size_t column = 0;  // 1-based
};

struct Line {
    std::size_t number = 0;  // 1-based
    std::vector<Word> words;
};

// Splits text into non-empty lines of whitespace-separated words, dropping comments.
inline std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto raw = text.substr(start, end - start);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            std::size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
            if (j > i) line.words.push_back({std::string(raw.substr(i, j - i)), i + 1});
            i = j;
        }
        if (!line.words.empty()) lines.push_back(std::move(line));
        start = end + 1;
    }
    return lines;
}

inline bool is_number(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline std::size_t parse_count(const Line& line, const Word& w) {
    if (!is_number(w.text) || w.text.size() > 9)
        throw ParseError(line.number, w.column, "expected a non-negative integer, got '" + w.text + "'");
    return std::stoul(w.text);
}

inline Element parse_element(const Line& line, const Word& w, std::size_t universe) {
    auto v = parse_count(line, w);
    if (v >= universe)
        throw ParseError(line.number, w.column,
                         "element " + w.text + " outside universe of size " + std::to_string(universe));
    return static_cast<Element>(v);
}

inline std::size_t parse_universe_header(const std::vector<Line>& lines) {
    if (lines.empty()) throw ParseError(1, 1, "missing 'universe' line");
    const auto& first = lines.front();
    if (first.words[0].text != "universe" || first.words.size() != 2)
        throw ParseError(first.number, first.words[0].column, "expected 'universe <size>'");
    auto n = parse_count(first, first.words[1]);
    if (n == 0) throw ParseError(first.number, first.words[1].column, "universe must be non-empty");
    return n;
}

}  // namespace detail

/// Grammar:
///   universe <n>
///   relation <name> <arity>     followed by one tuple per line
///   constant <element> <name>   names a unary relation equal to {(element)}
inline Structure parse_structure(std::string_view text) {
    using namespace detail;
    auto lines = split_lines(text);
    auto n = parse_universe_header(lines);
    Structure s(n);
    std::optional<std::string> current;
    std::size_t current_arity = 0;
    std::vector<std::pair<const Line*, std::pair<Element, std::string>>> constants;
    std::map<std::string, const Line*> declared_at;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        const auto& head = line.words[0];
        if (head.text == "relation") {
            if (line.words.size() != 3) throw ParseError(line.number, head.column, "expected 'relation <name> <arity>'");
            const auto& name = line.words[1];
            if (!is_identifier(name.text))
                throw ParseError(line.number, name.column, "invalid relation name '" + name.text + "'");
            if (s.has_relation(name.text))
                throw ParseError(line.number, name.column, "duplicate relation '" + name.text + "'");
            auto arity = parse_count(line, line.words[2]);
            if (arity < 1) throw ParseError(line.number, line.words[2].column, "relation arity must be >= 1");
            s.add_relation(name.text, arity);
            current = name.text;
            current_arity = arity;
            declared_at[name.text] = &line;
        } else if (head.text == "constant") {
            if (line.words.size() != 3) throw ParseError(line.number, head.column, "expected 'constant <element> <name>'");
            constants.push_back({&line, {parse_element(line, line.words[1], n), line.words[2].text}});
        } else if (is_number(head.text)) {
            if (!current) throw ParseError(line.number, head.column, "tuple outside of a relation block");
            if (line.words.size() != current_arity)
                throw ParseError(line.number, head.column,
                                 "tuple has " + std::to_string(line.words.size()) + " entries, relation '" + *current +
                                     "' has arity " + std::to_string(current_arity));
            Tuple t;
            for (const auto& w : line.words) t.push_back(parse_element(line, w, n));
            s.add_tuple(*current, std::move(t));
        } else {
            throw ParseError(line.number, head.column, "unexpected token '" + head.text + "'");
        }
    }

    for (const auto& sym : s.signature().symbols()) {
        if (!sym.name.starts_with(kConstantPrefix)) continue;
        const auto& rel = s.relation(sym.name);
        if (sym.arity != 1 || rel.size() != 1) {
            const auto* line = declared_at.at(sym.name);
            throw ParseError(line->number, line->words[1].column,
                             "relation '" + sym.name + "' uses the reserved prefix '_c' but is not a singleton");
        }
    }
    for (const auto& [line, c] : constants) {
        if (!s.is_singleton_of(c.second, c.first))
            throw ParseError(line->number, line->words[2].column,
                             "constant relation '" + c.second + "' is not exactly {(" + std::to_string(c.first) + ")}");
        s.set_constant(c.first, c.second);
    }
    return s;
}

inline std::string print_structure(const Structure& s) {
    std::ostringstream out;
    out << "universe " << s.universe_size() << "\n";
    for (const auto& sym : s.signature().symbols()) {
        out << "relation " << sym.name << " " << sym.arity << "\n";
        for (const auto& t : s.relation(sym.name)) {
            for (std::size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << t[i];
            out << "\n";
        }
    }
    for (const auto& [b, name] : s.constant_map()) out << "constant " << b << " " << name << "\n";
    return out.str();
}

/// Grammar:
///   universe <n>
///   op <name> <arity>   followed by the n^arity table entries, in
///                       lexicographic argument order, over any number of lines
inline Algebra parse_algebra(std::string_view text) {
    using namespace detail;
    auto lines = split_lines(text);
    auto n = parse_universe_header(lines);
    Algebra a(n);

    struct Pending {
        std::string name;
        std::size_t arity;
        const Line* line;
        std::vector<Element> table;
    };
    std::optional<Pending> pending;
    std::set<std::string> names;
    auto flush = [&]() {
        if (!pending) return;
        auto expected = checked_pow(n, pending->arity);
        if (pending->table.size() != expected)
            throw ParseError(pending->line->number, pending->line->words[0].column,
                             "operation '" + pending->name + "' has " + std::to_string(pending->table.size()) +
                                 " table entries, expected " + std::to_string(expected));
        a.add(OperationTable(pending->name, n, pending->arity, std::move(pending->table)));
        pending.reset();
    };

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        const auto& head = line.words[0];
        if (head.text == "op") {
            flush();
            if (line.words.size() != 3) throw ParseError(line.number, head.column, "expected 'op <name> <arity>'");
            const auto& name = line.words[1];
            if (!is_identifier(name.text))
                throw ParseError(line.number, name.column, "invalid operation name '" + name.text + "'");
            if (!names.insert(name.text).second)
                throw ParseError(line.number, name.column, "duplicate operation '" + name.text + "'");
            pending = Pending{name.text, parse_count(line, line.words[2]), &line, {}};
        } else if (is_number(head.text)) {
            if (!pending) throw ParseError(line.number, head.column, "table entries outside of an op block");
            for (const auto& w : line.words) pending->table.push_back(parse_element(line, w, n));
        } else {
            throw ParseError(line.number, head.column, "unexpected token '" + head.text + "'");
        }
    }
    flush();
    return a;
}

inline std::string print_algebra(const Algebra& a) {
    std::ostringstream out;
    out << "universe " << a.universe_size() << "\n";
    for (const auto& op : a.operations()) {
        out << "op " << op.name() << " " << op.arity() << "\n";
        // one row per value of all but the last argument
        std::size_t row = op.arity() == 0 ? 1 : a.universe_size();
        for (std::size_t i = 0; i < op.table().size(); ++i)
            out << op.table()[i] << ((i + 1) % row == 0 ? "\n" : " ");
    }
    return out.str();
}

namespace detail {

class FormulaLexer {
public:
    enum class Kind { Ident, LParen, RParen, Comma, Amp, Colon, Semicolon, End };

    struct Token {
        Kind kind;
        std::string text;
        std::size_t line;
        std::size_t column;
    };

    explicit FormulaLexer(std::string_view text) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < text.size();) {
            char c = text[i];
            if (c == '\n') {
                ++line, col = 1, ++i;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++col, ++i;
                continue;
            }
            if (c == '#') {
                while (i < text.size() && text[i] != '\n') ++i;
                continue;
            }
            auto single = [&](Kind k) {
                tokens_.push_back({k, std::string(1, c), line, col});
                ++col, ++i;
            };
            switch (c) {
                case '(': single(Kind::LParen); continue;
                case ')': single(Kind::RParen); continue;
                case ',': single(Kind::Comma); continue;
                case '&': single(Kind::Amp); continue;
                case ':': single(Kind::Colon); continue;
                case ';': single(Kind::Semicolon); continue;
                default: break;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
                tokens_.push_back({Kind::Ident, std::string(text.substr(i, j - i)), line, col});
                col += j - i;
                i = j;
                continue;
            }
            throw ParseError(line, col, std::string("unknown token '") + c + "'");
        }
        tokens_.push_back({Kind::End, "", line, col});
    }

    const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
    const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }

    const Token& expect(Kind k, const char* what) {
        const auto& t = peek();
        if (t.kind != k) throw ParseError(t.line, t.column, std::string("expected ") + what + ", got '" + t.text + "'");
        return next();
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

inline bool is_quantifier_word(std::string_view s) { return s == "A" || s == "E"; }

}  // namespace detail

/// Grammar: [free v+ ;] ((A|E) v+)* : (true | atom (& atom)*)
/// where atom = R(v, ..., v). `A` and `E` are reserved and cannot name variables.
inline QCFormula parse_formula(std::string_view text) {
    using Lexer = detail::FormulaLexer;
    using Kind = Lexer::Kind;
    Lexer lex(text);
    QCFormula f;
    std::set<Variable> declared;

    auto declare = [&](const Lexer::Token& t) {
        if (detail::is_quantifier_word(t.text))
            throw ParseError(t.line, t.column, "'" + t.text + "' is reserved and cannot name a variable");
        if (!declared.insert(t.text).second)
            throw ParseError(t.line, t.column, "duplicate binder for variable '" + t.text + "'");
    };

    if (lex.peek().kind == Kind::Ident && lex.peek().text == "free") {
        lex.next();
        if (lex.peek().kind != Kind::Ident)
            throw ParseError(lex.peek().line, lex.peek().column, "expected at least one free variable");
        while (lex.peek().kind == Kind::Ident) {
            const auto& t = lex.next();
            declare(t);
            f.free_vars.push_back(t.text);
        }
        lex.expect(Kind::Semicolon, "';'");
    }

    while (lex.peek().kind == Kind::Ident) {
        const auto& q = lex.next();
        if (!detail::is_quantifier_word(q.text))
            throw ParseError(q.line, q.column, "expected quantifier 'A' or 'E', got '" + q.text + "'");
        auto quant = q.text == "A" ? Quantifier::Forall : Quantifier::Exists;
        if (lex.peek().kind != Kind::Ident || detail::is_quantifier_word(lex.peek().text))
            throw ParseError(lex.peek().line, lex.peek().column, "expected a variable after '" + q.text + "'");
        while (lex.peek().kind == Kind::Ident && !detail::is_quantifier_word(lex.peek().text)) {
            const auto& v = lex.next();
            declare(v);
            f.prefix.push_back({quant, v.text});
        }
    }
    lex.expect(Kind::Colon, "':'");

    if (lex.peek().kind == Kind::Ident && lex.peek().text == "true" && lex.peek(1).kind != Kind::LParen) {
        lex.next();
    } else {
        while (true) {
            const auto& rel = lex.expect(Kind::Ident, "relation name");
            Atom atom{rel.text, {}};
            lex.expect(Kind::LParen, "'('");
            while (true) {
                const auto& v = lex.expect(Kind::Ident, "variable");
                if (!declared.count(v.text))
                    throw ParseError(v.line, v.column, "undeclared variable '" + v.text + "'");
                atom.args.push_back(v.text);
                if (lex.peek().kind == Kind::Comma) {
                    lex.next();
                    continue;
                }
                lex.expect(Kind::RParen, "')' or ','");
                break;
            }
            f.atoms.push_back(std::move(atom));
            if (lex.peek().kind != Kind::Amp) break;
            lex.next();
        }
    }
    const auto& end = lex.peek();
    if (end.kind != Kind::End) throw ParseError(end.line, end.column, "unexpected token '" + end.text + "'");
    return f;
}

inline std::string print_formula(const QCFormula& f) {
    std::ostringstream out;
    if (!f.free_vars.empty()) {
        out << "free";
        for (const auto& v : f.free_vars) out << " " << v;
        out << " ; ";
    }
    for (std::size_t i = 0; i < f.prefix.size(); ++i) {
        if (i == 0 || f.prefix[i].quantifier != f.prefix[i - 1].quantifier)
            out << to_string(f.prefix[i].quantifier) << " ";
        out << f.prefix[i].variable << " ";
    }
    out << ":";
    if (f.atoms.empty()) out << " true";
    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
        out << (i ? " & " : " ") << f.atoms[i].relation << "(";
        for (std::size_t j = 0; j < f.atoms[i].args.size(); ++j) out << (j ? "," : "") << f.atoms[i].args[j];
        out << ")";
    }
    return out.str();
}

/// One tuple per line; all tuples must have the same length.
inline std::set<Tuple> parse_generators(std::string_view text, std::size_t universe_size) {
    std::set<Tuple> out;
    std::optional<std::size_t> width;
    for (const auto& line : detail::split_lines(text)) {
        if (width && line.words.size() != *width)
            throw ParseError(line.number, line.words[0].column,
                             "tuple has " + std::to_string(line.words.size()) + " entries, expected " +
                                 std::to_string(*width));
        width = line.words.size();
        Tuple t;
        for (const auto& w : line.words) t.push_back(detail::parse_element(line, w, universe_size));
        out.insert(std::move(t));
    }
    return out;
}

inline std::string print_generators(const std::set<Tuple>& tuples) {
    std::ostringstream out;
    for (const auto& t : tuples) {
        for (std::size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << t[i];
        out << "\n";
    }
    return out.str();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace qcsp
