// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace pqm {

namespace {

enum class Tok {
    Ident, Label, Lambda, Colon, Dot, LParen, RParen, LBracket, RBracket,
    LAngle, RAngle, Comma, Equals, Bang, Star, Lolli,
    KwLet, KwIn, KwLift, KwForce, KwBox, KwApply, KwGate, KwCirc, End
};

struct Token {
    Tok kind;
    std::string text;
    std::uint64_t number = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_ws();
            Token t;
            t.line = line_;
            t.col = col_;
            if (eof()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char c = peek();
            if (c == '\\') {
                t.kind = Tok::Lambda;
                advance();
            } else if (c == '#') {
                advance();
                if (eof() || !std::isdigit(peek())) fail("expected digits after '#'", t);
                std::uint64_t n = 0;
                while (!eof() && std::isdigit(peek())) n = n * 10 + (advance() - '0');
                t.kind = Tok::Label;
                t.number = n;
            } else if (std::isalpha(c) || c == '_') {
                std::string word;
                while (!eof() && (std::isalnum(peek()) || peek() == '_' || peek() == '\'')) word += advance();
                t.text = word;
                if (word == "let") t.kind = Tok::KwLet;
                else if (word == "in") t.kind = Tok::KwIn;
                else if (word == "lift") t.kind = Tok::KwLift;
                else if (word == "force") t.kind = Tok::KwForce;
                else if (word == "box") t.kind = Tok::KwBox;
                else if (word == "apply") t.kind = Tok::KwApply;
                else if (word == "gate") t.kind = Tok::KwGate;
                else if (word == "Circ") t.kind = Tok::KwCirc;
                else t.kind = Tok::Ident;
            } else {
                advance();
                switch (c) {
                case ':': t.kind = Tok::Colon; break;
                case '.': t.kind = Tok::Dot; break;
                case '(': t.kind = Tok::LParen; break;
                case ')': t.kind = Tok::RParen; break;
                case '[': t.kind = Tok::LBracket; break;
                case ']': t.kind = Tok::RBracket; break;
                case '<': t.kind = Tok::LAngle; break;
                case '>': t.kind = Tok::RAngle; break;
                case ',': t.kind = Tok::Comma; break;
                case '=': t.kind = Tok::Equals; break;
                case '!': t.kind = Tok::Bang; break;
                case '*': t.kind = Tok::Star; break;
                case '-':
                    if (!eof() && peek() == 'o') {
                        advance();
                        t.kind = Tok::Lolli;
                        break;
                    }
                    fail("expected '-o'", t);
                default: fail(std::string("unexpected character '") + c + "'", t);
                }
            }
            out.push_back(std::move(t));
        }
    }

private:
    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_ws() {
        for (;;) {
            while (!eof() && std::isspace(peek())) advance();
            if (!eof() && peek() == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
                while (!eof() && peek() != '\n') advance();
                continue;
            }
            return;
        }
    }
    [[noreturn]] void fail(const std::string& msg, const Token& t) { throw ParseError(msg, t.line, t.col); }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

class Parser {
public:
    Parser(std::vector<Token> toks, const GateSignature& sig, FreshSource& fresh)
        : toks_(std::move(toks)), sig_(sig), fresh_(fresh) {}

    Term parse_program() {
        Term t = parse_term();
        expect(Tok::End, "end of input");
        return t;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool at(Tok k) const { return cur().kind == k; }
    bool accept(Tok k) {
        if (at(k)) {
            ++pos_;
            return true;
        }
        return false;
    }
    const Token& expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        return next();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, cur().line, cur().col);
    }

    // term := '\' x ':' type '.' term | 'let' '<' x ',' y '>' '=' term 'in' term
    //       | 'lift' term | 'force' term | 'box' '[' type ']' term | appchain
    Term parse_term() {
        const Token& start = cur();
        auto spanned = [&](Term t) { return t.at(start.line, start.col); };
        if (accept(Tok::Lambda)) {
            std::string x = expect(Tok::Ident, "binder name").text;
            expect(Tok::Colon, "':'");
            TypeExpr a = parse_type();
            expect(Tok::Dot, "'.'");
            return spanned(Term::abs(std::move(x), std::move(a), parse_term()));
        }
        if (accept(Tok::KwLet)) {
            expect(Tok::LAngle, "'<'");
            std::string x = expect(Tok::Ident, "binder name").text;
            expect(Tok::Comma, "','");
            std::string y = expect(Tok::Ident, "binder name").text;
            if (x == y) fail("let binders must be distinct");
            expect(Tok::RAngle, "'>'");
            expect(Tok::Equals, "'='");
            Term bound = parse_term();
            expect(Tok::KwIn, "'in'");
            return spanned(Term::let_pair(std::move(x), std::move(y), std::move(bound), parse_term()));
        }
        if (accept(Tok::KwLift)) return spanned(Term::lift(parse_term()));
        if (accept(Tok::KwForce)) return spanned(Term::force(parse_term()));
        if (accept(Tok::KwBox)) {
            expect(Tok::LBracket, "'['");
            TypeExpr t = parse_type();
            expect(Tok::RBracket, "']'");
            if (!is_simple_m_type(t)) fail("box annotation must be a simple M-type");
            return spanned(Term::box(std::move(t), parse_term()));
        }
        Term head = parse_atom();
        while (starts_atom()) head = spanned(Term::app(std::move(head), parse_atom()));
        return head;
    }

    bool starts_atom() const {
        switch (cur().kind) {
        case Tok::Ident:
        case Tok::Label:
        case Tok::LParen:
        case Tok::LAngle:
        case Tok::KwApply:
        case Tok::KwGate: return true;
        default: return false;
        }
    }

    Term parse_atom() {
        const Token& start = cur();
        auto spanned = [&](Term t) { return t.at(start.line, start.col); };
        if (at(Tok::Ident)) return spanned(Term::var(next().text));
        if (at(Tok::Label)) return spanned(Term::lab(LabelId{next().number}));
        if (accept(Tok::LParen)) {
            Term t = parse_term();
            expect(Tok::RParen, "')'");
            return t;
        }
        if (accept(Tok::LAngle)) {
            Term l = parse_term();
            expect(Tok::Comma, "','");
            Term r = parse_term();
            expect(Tok::RAngle, "'>'");
            return spanned(Term::pair(std::move(l), std::move(r)));
        }
        if (accept(Tok::KwApply)) {
            expect(Tok::LParen, "'('");
            Term c = parse_term();
            expect(Tok::Comma, "','");
            Term k = parse_term();
            expect(Tok::RParen, "')'");
            return spanned(Term::apply(std::move(c), std::move(k)));
        }
        if (at(Tok::KwGate)) {
            const Token& kw = next();
            if (!at(Tok::Ident) && !at(Tok::KwCirc)) throw ParseError("expected gate name", kw.line, kw.col);
            std::string name = next().text;
            auto g = boxed_gate(name, sig_, fresh_);
            if (!g) {
                if (!sig_.find_gate(name)) throw ParseError("unknown gate " + name, kw.line, kw.col);
                throw ParseError("gate " + name + " has an empty frontier and cannot be boxed",
                                 kw.line, kw.col);
            }
            return Term::boxed_circ(g->ins, g->circ, g->outs).at(kw.line, kw.col);
        }
        fail("expected a term");
    }

    // type := tensor ('-o' type)?   (right-assoc)
    // tensor := prefix ('*' tensor)?
    // prefix := '!' prefix | tatom
    TypeExpr parse_type() {
        TypeExpr a = parse_tensor();
        if (accept(Tok::Lolli)) return TypeExpr::lolli(std::move(a), parse_type());
        return a;
    }

    TypeExpr parse_tensor() {
        TypeExpr a = parse_type_prefix();
        if (accept(Tok::Star)) return TypeExpr::tensor(std::move(a), parse_tensor());
        return a;
    }

    TypeExpr parse_type_prefix() {
        if (accept(Tok::Bang)) return TypeExpr::bang(parse_type_prefix());
        return parse_type_atom();
    }

    TypeExpr parse_type_atom() {
        if (accept(Tok::KwCirc)) {
            expect(Tok::LParen, "'('");
            TypeExpr t = parse_type();
            expect(Tok::Comma, "','");
            TypeExpr u = parse_type();
            expect(Tok::RParen, "')'");
            if (!is_simple_m_type(t) || !is_simple_m_type(u))
                fail("Circ components must be simple M-types");
            return TypeExpr::circ(std::move(t), std::move(u));
        }
        if (accept(Tok::LParen)) {
            TypeExpr t = parse_type();
            expect(Tok::RParen, "')'");
            return t;
        }
        if (at(Tok::Ident)) {
            const Token& tk = next();
            if (!sig_.has_wire_type(tk.text))
                throw ParseError("unknown wire type " + tk.text, tk.line, tk.col);
            return TypeExpr::wire(tk.text);
        }
        fail("expected a type");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const GateSignature& sig_;
    FreshSource& fresh_;
};

} // namespace

Term parse(const std::string& src, const GateSignature& sig, FreshSource& fresh) {
    Lexer lex(src);
    auto toks = lex.run();
    // Gate-sugar expansions must not collide with label literals anywhere in
    // the file, so scan those first.
    std::uint64_t max_literal = 0;
    bool any = false;
    for (const auto& t : toks) {
        if (t.kind == Tok::Label) {
            max_literal = std::max(max_literal, t.number);
            any = true;
        }
    }
    if (any) {
        if (auto* counter = dynamic_cast<FreshCounter*>(&fresh)) counter->advance_to(max_literal + 1);
    }
    Parser p(std::move(toks), sig, fresh);
    return p.parse_program();
}

Term parse(const std::string& src) {
    FreshCounter counter;
    return parse(src, default_signature(), counter);
}

} // namespace pqm
