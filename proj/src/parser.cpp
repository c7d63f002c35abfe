#include "dtac/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace dtac {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

constexpr std::array<std::string_view, 33> kPuncts = {
    "==>", "::", ":=", ":|", "==", "!=", "<=", ">=", "&&", "||", "=>", ":", "<", ">", "|", "!", "+",
    "-",   "*",  "/",  "%",  "(",  ")",  "{",  "}",  "[",  "]",  ",", ";", ".", "=", "@", "^"};

} // namespace

std::vector<Token> lex(std::string_view text, ParseMode mode) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token tok;
        tok.line = line;
        tok.col = col;
        if (text.substr(i, 2) == "//") {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (text.substr(i, 2) == "/*") {
            std::size_t end = text.find("*/", i + 2);
            if (end == std::string_view::npos) throw ParseError("unterminated comment", line, col);
            std::string_view body = text.substr(i + 2, end - i - 2);
            if (body == "generated") {
                tok.kind = TokKind::Generated;
                tok.text = "/*generated*/";
                out.push_back(tok);
            } else if (body.size() > 1 && body[0] == '@' && ident_start(body[1]) &&
                       std::all_of(body.begin() + 1, body.end(), ident_char)) {
                tok.kind = TokKind::Marker;
                tok.text = std::string(body.substr(1));
                out.push_back(tok);
            }
            advance(end + 2 - i);
            continue;
        }
        if (c == '?' && i + 1 < text.size() && ident_start(text[i + 1])) {
            if (mode == ParseMode::Program) throw ParseError("metavariable outside a pattern", line, col);
            std::size_t j = i + 1;
            while (j < text.size() && ident_char(text[j])) ++j;
            tok.kind = TokKind::MetaVar;
            tok.text = std::string(text.substr(i, j - i));
            out.push_back(tok);
            advance(j - i);
            continue;
        }
        if (text.substr(i, 2) == "..") {
            std::size_t n = text.substr(i, 3) == "..." ? 3 : 2;
            if (mode == ParseMode::Program) throw ParseError("ellipsis outside a pattern", line, col);
            tok.kind = TokKind::Ellipsis;
            tok.text = std::string(text.substr(i, n));
            out.push_back(tok);
            advance(n);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            tok.kind = TokKind::Int;
            tok.text = std::string(text.substr(i, j - i));
            out.push_back(tok);
            advance(j - i);
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            tok.kind = TokKind::Ident;
            tok.text = std::string(text.substr(i, j - i));
            out.push_back(tok);
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (auto p : kPuncts) {
            if (text.substr(i, p.size()) == p) {
                tok.kind = TokKind::Punct;
                tok.text = std::string(p);
                out.push_back(tok);
                advance(p.size());
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    Token eof;
    eof.line = line;
    eof.col = col;
    out.push_back(eof);
    return out;
}

namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "method", "function", "predicate", "datatype", "class",  "ghost",   "var",  "assert", "if",   "else",
    "requires", "ensures", "modifies", "returns", "public", "private", "true", "false",  "null", "this",
    "exists", "forall", "match", "case"};

class Parser {
public:
    Parser(std::string_view text, ParseMode mode) : toks_(lex(text, mode)), mode_(mode) {}

    Program unit() {
        Node u(Kind::Unit);
        while (!eof()) u.kids.push_back(decl());
        return u;
    }

    Node pattern() {
        if (eof()) return make_block();
        if (decl_start()) {
            Node u = unit();
            return u;
        }
        std::size_t save = pos_;
        try {
            Node b = make_block();
            while (!eof()) b.kids.push_back(stmt());
            return b;
        } catch (const ParseError& stmt_err) {
            pos_ = save;
            try {
                Node e = expr();
                expect_eof();
                return e;
            } catch (const ParseError&) {
                throw stmt_err;
            }
        }
    }

    Node expression() {
        Node e = expr();
        expect_eof();
        return e;
    }

    Node type_only() {
        Node t = type();
        expect_eof();
        return t;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    ParseMode mode_;
    bool ghost_ctx_ = false;

    bool pattern_mode() const { return mode_ == ParseMode::Pattern; }
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool eof() const { return peek().kind == TokKind::Eof; }
    bool at(std::string_view s, std::size_t k = 0) const {
        const Token& t = peek(k);
        return (t.kind == TokKind::Punct || t.kind == TokKind::Ident) && t.text == s;
    }
    bool at_kind(TokKind k) const { return peek().kind == k; }
    Token next() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string found = t.kind == TokKind::Eof ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + " (found " + found + ")", t.line, t.col);
    }
    void expect(std::string_view s) {
        if (!at(s)) fail("expected '" + std::string(s) + "'");
        next();
    }
    bool accept(std::string_view s) {
        if (!at(s)) return false;
        next();
        return true;
    }
    void expect_eof() {
        if (!eof()) fail("unexpected trailing input");
    }

    std::string name() {
        const Token& t = peek();
        if (t.kind == TokKind::Ident && !kKeywords.count(t.text)) return next().text;
        if (t.kind == TokKind::MetaVar) return next().text;
        fail("expected identifier");
    }

    bool decl_start() const {
        const Token& t = peek();
        if (t.kind == TokKind::Generated) return true;
        if (t.kind != TokKind::Ident) return false;
        if (t.text == "ghost") return !at("var", 1);
        return t.text == "method" || t.text == "function" || t.text == "predicate" || t.text == "datatype" ||
               t.text == "class" || t.text == "public" || t.text == "private";
    }

    // ---- declarations -------------------------------------------------

    Node decl() {
        int line = peek().line;
        std::uint32_t flags = 0;
        Visibility vis = Visibility::Private;
        for (;;) {
            if (at_kind(TokKind::Generated)) {
                next();
                vis = Visibility::Generated;
                flags |= flag::VisSet;
            } else if (accept("public")) {
                vis = Visibility::Public;
                flags |= flag::VisSet;
            } else if (accept("private")) {
                vis = Visibility::Private;
                flags |= flag::VisSet;
            } else if (accept("ghost")) {
                flags |= flag::Ghost | flag::GhostSet;
            } else {
                break;
            }
        }
        Node d;
        if (accept("datatype")) {
            d = datatype();
        } else if (accept("class")) {
            d = klass();
        } else if (at("function") || at("predicate")) {
            d = function(flags);
        } else if (accept("method")) {
            d = method(flags, vis);
        } else {
            fail("expected declaration");
        }
        if (d.is(Kind::Method) || d.is(Kind::Function)) {
            d.vis = vis;
            d.flags |= flags & (flag::VisSet | flag::GhostSet);
            if (vis == Visibility::Generated) d.flags |= flag::Ghost | flag::GhostSet;
        }
        d.line = line;
        return d;
    }

    Node datatype() {
        Node d(Kind::Datatype, name());
        expect("=");
        do {
            Node c(Kind::Ctor, name());
            if (accept("(")) {
                if (!at(")")) {
                    do c.kids.push_back(param()); while (accept(","));
                }
                expect(")");
            }
            d.kids.push_back(std::move(c));
        } while (accept("|"));
        accept(";");
        return d;
    }

    Node klass() {
        Node c(Kind::Class, name());
        expect("{");
        while (!accept("}")) {
            expect("var");
            Node f(Kind::Field, name());
            expect(":");
            f.kids.push_back(type());
            accept(";");
            c.kids.push_back(std::move(f));
        }
        return c;
    }

    Node function(std::uint32_t mods) {
        Node f(Kind::Function);
        if (next().text == "predicate") f.flags |= flag::Predicate;
        if (accept("method")) f.flags |= flag::Compiled;
        if (!f.has(flag::Compiled)) f.flags |= flag::Ghost;
        (void)mods;
        f.text = name();
        f.kids.push_back(params());
        if (accept(":")) {
            f.kids.push_back(type());
        } else {
            f.kids.push_back(none());
        }
        f.kids.push_back(clauses());
        if (accept("{")) {
            bool saved = ghost_ctx_;
            ghost_ctx_ = f.ghost();
            f.kids.push_back(expr());
            ghost_ctx_ = saved;
            expect("}");
        } else {
            f.kids.push_back(none());
        }
        return f;
    }

    Node method(std::uint32_t mods, Visibility vis) {
        Node m(Kind::Method, name());
        m.flags |= mods & flag::Ghost;
        if (vis == Visibility::Generated) m.flags |= flag::Ghost;
        m.kids.push_back(params());
        if (accept("returns")) {
            m.kids.push_back(params());
        } else if (pattern_mode()) {
            m.kids.emplace_back(Kind::Unspecified);
        } else {
            m.kids.emplace_back(Kind::Params);
        }
        m.kids.push_back(clauses());
        if (at("{")) {
            bool saved = ghost_ctx_;
            ghost_ctx_ = m.ghost();
            m.kids.push_back(block());
            ghost_ctx_ = saved;
        } else if (pattern_mode()) {
            m.kids.emplace_back(Kind::Unspecified);
        } else {
            m.kids.push_back(none());
        }
        return m;
    }

    Node param() {
        bool ghost = accept("ghost");
        Node p(Kind::Param, name());
        if (ghost) p.flags |= flag::Ghost;
        expect(":");
        p.kids.push_back(type());
        return p;
    }

    Node params() {
        Node ps(Kind::Params);
        expect("(");
        if (accept(")")) return ps;
        if (pattern_mode() && at_kind(TokKind::Ellipsis)) {
            next();
            ps.kids.emplace_back(Kind::Ellipsis);
            expect(")");
            return ps;
        }
        if (pattern_mode() && at_kind(TokKind::MetaVar) && peek(1).text == ")") {
            ps.kids.emplace_back(Kind::ListVar, next().text);
            expect(")");
            return ps;
        }
        do ps.kids.push_back(param()); while (accept(","));
        expect(")");
        return ps;
    }

    bool clause_end() const {
        return eof() || at("{") || decl_start() || at("requires") || at("ensures") || at("modifies");
    }

    Node clauses() {
        Node cs(Kind::Clauses);
        bool any = false;
        for (;;) {
            int line = peek().line;
            if (accept("requires")) {
                cs.kids.emplace_back(Kind::Requires, "", std::vector<Node>{expr()});
            } else if (accept("ensures")) {
                cs.kids.emplace_back(Kind::Ensures, "", std::vector<Node>{expr()});
            } else if (accept("modifies")) {
                std::string text;
                while (!at(";") && !clause_end()) {
                    Token t = next();
                    if (!text.empty() && t.text != "," && t.text != "." && text.back() != '.') text += ' ';
                    text += t.text;
                }
                cs.kids.emplace_back(Kind::Modifies, text);
            } else if (pattern_mode() && at_kind(TokKind::Ellipsis)) {
                next();
                cs.kids.emplace_back(Kind::Ellipsis);
            } else {
                break;
            }
            cs.kids.back().line = line;
            any = true;
            accept(";");
        }
        if (!any && pattern_mode()) return Node(Kind::Unspecified);
        return cs;
    }

    Node type() {
        const Token& t = peek();
        if (t.kind != TokKind::Ident) fail("expected type");
        Node ty(Kind::Type, next().text);
        if (accept("<")) {
            do ty.kids.push_back(type()); while (accept(","));
            expect(">");
        }
        return ty;
    }

    // ---- statements ---------------------------------------------------

    Node block() {
        int line = peek().line;
        expect("{");
        Node b = make_block();
        b.line = line;
        while (!accept("}")) {
            if (eof()) fail("unterminated block");
            b.kids.push_back(stmt());
        }
        return b;
    }

    Node stmt() {
        const Token& t = peek();
        int line = t.line;
        Node s = stmt_inner();
        s.line = line;
        return s;
    }

    Node stmt_inner() {
        if (at_kind(TokKind::Marker)) return make_marker(next().text);
        if (at_kind(TokKind::Ellipsis)) {
            if (!pattern_mode()) fail("ellipsis outside a pattern");
            next();
            return Node(Kind::Ellipsis);
        }
        if (at("ghost") && at("var", 1)) {
            next();
            return var_decl(true);
        }
        if (at("var")) return var_decl(false);
        if (accept("assert")) {
            Node a = make_assert(expr());
            expect(";");
            return a;
        }
        if (accept("if")) return if_stmt();
        if (pattern_mode() && at_kind(TokKind::MetaVar) && peek(1).text == ";") {
            Node m(Kind::MetaVar, next().text);
            next();
            return m;
        }
        std::vector<Node> lhs;
        do lhs.push_back(expr()); while (accept(","));
        if (accept(":=")) {
            Node l(Kind::Lhs);
            if (pattern_mode() && lhs.size() == 1 && lhs[0].is(Kind::MetaVar)) {
                l.kids.emplace_back(Kind::ListVar, lhs[0].text);
            } else {
                l.kids = std::move(lhs);
            }
            Node rhs = expr();
            expect(";");
            return Node(Kind::Assign, "", {std::move(l), std::move(rhs)});
        }
        if (lhs.size() == 1 && lhs[0].is(Kind::App)) {
            expect(";");
            Node c(Kind::CallStmt, lhs[0].text, std::move(lhs[0].kids));
            return c;
        }
        fail("expected statement");
    }

    Node var_decl(bool ghost) {
        expect("var");
        Node v(Kind::VarDecl);
        if (ghost || ghost_ctx_) v.flags |= flag::Ghost;
        Node locals(Kind::Locals);
        if (pattern_mode() && at_kind(TokKind::MetaVar) && (at(":=", 1) || at(":|", 1) || at(";", 1))) {
            locals.kids.emplace_back(Kind::ListVar, next().text);
        } else {
            do {
                Node l(Kind::Local, name());
                if (accept(":")) l.kids.push_back(type());
                locals.kids.push_back(std::move(l));
            } while (accept(","));
        }
        v.kids.push_back(std::move(locals));
        if (accept(":=")) {
            v.kids.push_back(expr());
        } else if (accept(":|")) {
            v.flags |= flag::SuchThat;
            v.kids.push_back(expr());
        } else {
            v.kids.push_back(none());
        }
        expect(";");
        return v;
    }

    Node if_stmt() {
        Node cond = expr();
        Node then_b = block();
        Node else_b = make_block();
        if (accept("else")) {
            if (at("if")) {
                int line = peek().line;
                next();
                Node nested = if_stmt();
                nested.line = line;
                else_b.kids.push_back(std::move(nested));
            } else {
                else_b = block();
            }
        }
        return Node(Kind::If, "", {std::move(cond), std::move(then_b), std::move(else_b)});
    }

    // ---- expressions --------------------------------------------------

    Node expr() { return implies(); }

    Node implies() {
        Node l = disj();
        if (accept("==>")) return make_binary("==>", std::move(l), implies());
        return l;
    }

    Node disj() {
        Node l = conj();
        if (accept("||")) return make_binary("||", std::move(l), disj());
        return l;
    }

    Node conj() {
        Node l = rel();
        if (accept("&&")) return make_binary("&&", std::move(l), conj());
        return l;
    }

    Node rel() {
        Node l = add();
        for (auto op : {"==", "!=", "<=", ">=", "<", ">"}) {
            if (at(op)) {
                next();
                return make_binary(op, std::move(l), add());
            }
        }
        return l;
    }

    Node add() {
        Node l = mul();
        while (at("+") || at("-")) {
            std::string op = next().text;
            l = make_binary(op, std::move(l), mul());
        }
        return l;
    }

    Node mul() {
        Node l = unary();
        while (at("*") || at("/") || at("%")) {
            std::string op = next().text;
            l = make_binary(op, std::move(l), unary());
        }
        return l;
    }

    Node unary() {
        if (at("!") || at("-")) {
            std::string op = next().text;
            return make_unary(op, unary());
        }
        return postfix();
    }

    Node postfix() {
        Node e = primary();
        while (at(".")) {
            next();
            Node s(Kind::Select, name(), {});
            s.kids.push_back(std::move(e));
            e = std::move(s);
        }
        return e;
    }

    std::vector<Node> args() {
        std::vector<Node> out;
        expect("(");
        if (accept(")")) return out;
        if (pattern_mode() && at_kind(TokKind::MetaVar) && peek(1).text == ")") {
            out.emplace_back(Kind::ListVar, next().text);
            next();
            return out;
        }
        do out.push_back(expr()); while (accept(","));
        expect(")");
        return out;
    }

    Node binders() {
        Node bs(Kind::Binders);
        do {
            Node l(Kind::Local, name());
            if (accept(":")) l.kids.push_back(type());
            bs.kids.push_back(std::move(l));
        } while (accept(","));
        return bs;
    }

    Node primary() {
        const Token& t = peek();
        switch (t.kind) {
        case TokKind::Int:
            return Node(Kind::IntLit, next().text);
        case TokKind::Ellipsis:
            if (!pattern_mode()) fail("ellipsis outside a pattern");
            next();
            return Node(Kind::Ellipsis);
        case TokKind::MetaVar: {
            std::string n = next().text;
            if (at("(")) return Node(Kind::App, n, args());
            return Node(Kind::MetaVar, n);
        }
        case TokKind::Ident: {
            if (t.text == "true" || t.text == "false") return Node(Kind::BoolLit, next().text);
            if (t.text == "null") {
                next();
                return Node(Kind::Null);
            }
            if (t.text == "this") {
                next();
                return Node(Kind::This);
            }
            if (t.text == "exists" || t.text == "forall") {
                std::string q = next().text;
                Node bs = binders();
                expect("::");
                Node body = expr();
                return Node(Kind::Quant, q, {std::move(bs), std::move(body)});
            }
            if (t.text == "match") {
                next();
                Node m(Kind::Match);
                m.kids.push_back(expr());
                if (!at("case")) fail("expected 'case'");
                while (accept("case")) {
                    Node c(Kind::Case, name());
                    Node bs(Kind::Binders);
                    if (accept("(")) {
                        if (!at(")")) bs = binders();
                        expect(")");
                    }
                    expect("=>");
                    c.kids.push_back(std::move(bs));
                    c.kids.push_back(expr());
                    m.kids.push_back(std::move(c));
                }
                return m;
            }
            std::string n = name();
            if (at("(")) {
                if ((n == "rewrite" || n == "rewrite1") && pattern_mode())
                    return Node(Kind::Rewrite, n == "rewrite1" ? "1" : "", args());
                return Node(Kind::App, n, args());
            }
            return make_var(n);
        }
        case TokKind::Punct:
            if (t.text == "(") {
                next();
                Node e = expr();
                expect(")");
                return e;
            }
            if (t.text == "|") {
                next();
                Node e = expr();
                expect("|");
                return Node(Kind::Len, "", {std::move(e)});
            }
            if (t.text == "[") {
                next();
                Node s(Kind::SeqLit);
                if (!at("]")) {
                    do s.kids.push_back(expr()); while (accept(","));
                }
                expect("]");
                return s;
            }
            break;
        default:
            break;
        }
        fail("expected expression");
    }
};

void check_unit(const Program& p) {
    std::set<std::string> names;
    for (const auto& d : p.kids) {
        if (!names.insert(d.text).second)
            throw ParseError("duplicate declaration '" + d.text + "'", d.line, 1);
    }
    std::set<std::string> anchors;
    bool dup = false;
    std::string which;
    int line = 0;
    walk(p, [&](const Node& n) {
        if (n.is(Kind::Marker) && !anchors.insert(n.text).second && !dup) {
            dup = true;
            which = n.text;
            line = n.line;
        }
    });
    if (dup) throw ParseError("duplicate anchor '@" + which + "'", line, 1);
}

} // namespace

Program parse_program(std::string_view text) {
    Parser parser(text, ParseMode::Program);
    Program p = parser.unit();
    check_unit(p);
    renumber(p);
    return p;
}

Node parse_pattern(std::string_view text) {
    Parser parser(text, ParseMode::Pattern);
    return parser.pattern();
}

Node parse_expression(std::string_view text, ParseMode mode) {
    Parser parser(text, mode);
    return parser.expression();
}

Node parse_type(std::string_view text) {
    Parser parser(text, ParseMode::Program);
    return parser.type_only();
}

} // namespace dtac
