#include "dtac/printer.hpp"

#include <algorithm>

namespace dtac {

namespace {

int precedence(const Node& e) {
    switch (e.kind) {
    case Kind::Quant:
    case Kind::Match:
        return 0;
    case Kind::Binary:
        if (e.text == "==>") return 1;
        if (e.text == "||") return 2;
        if (e.text == "&&") return 3;
        if (e.text == "+" || e.text == "-") return 5;
        if (e.text == "*" || e.text == "/" || e.text == "%") return 6;
        return 4;
    case Kind::Unary:
        return 7;
    default:
        return 8;
    }
}

bool right_assoc(const std::string& op) { return op == "==>" || op == "&&" || op == "||"; }
bool left_assoc(const std::string& op) { return op == "+" || op == "-" || op == "*" || op == "/" || op == "%"; }

std::string join(const std::vector<Node>& xs, const std::string& sep, std::string (*f)(const Node&)) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += f(xs[i]);
    }
    return out;
}

std::string local_text(const Node& l) {
    if (l.is(Kind::ListVar) || l.is(Kind::Ellipsis) || l.is(Kind::MetaVar)) return print_node(l);
    std::string s = l.text;
    if (!l.kids.empty()) s += ": " + print_type(l.kids[0]);
    return s;
}

std::string param_text(const Node& p) {
    if (!p.is(Kind::Param)) return print_node(p);
    return std::string(p.ghost() ? "ghost " : "") + p.text + ": " + print_type(p.kids[0]);
}

std::string expr_child(const Node& child, const Node& parent, bool is_left) {
    std::string s = print_expr(child);
    bool paren = false;
    if (child.is(Kind::Quant) || child.is(Kind::Match)) {
        paren = true;
    } else if (parent.is(Kind::Binary) && child.is(Kind::Binary)) {
        int pp = precedence(parent);
        int cp = precedence(child);
        bool logic_mix = (parent.text == "&&" || parent.text == "||") && (child.text == "&&" || child.text == "||") &&
                         parent.text != child.text;
        if (cp < pp || logic_mix) {
            paren = true;
        } else if (cp == pp) {
            if (is_left) paren = !left_assoc(parent.text);
            else paren = !right_assoc(parent.text);
        }
    } else if (precedence(child) < precedence(parent)) {
        paren = true;
    }
    return paren ? "(" + s + ")" : s;
}

} // namespace

std::string print_type(const Node& t) {
    if (!t.is(Kind::Type)) return print_node(t);
    if (t.kids.empty()) return t.text;
    return t.text + "<" + join(t.kids, ", ", print_type) + ">";
}

std::string print_expr(const Node& e) {
    switch (e.kind) {
    case Kind::IntLit:
    case Kind::BoolLit:
    case Kind::Var:
    case Kind::MetaVar:
    case Kind::ListVar:
        return e.text;
    case Kind::StrLit: {
        std::string out = "\"";
        for (char c : e.text) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out + "\"";
    }
    case Kind::Null:
        return "null";
    case Kind::This:
        return "this";
    case Kind::Ellipsis:
        return "...";
    case Kind::Binary:
        return expr_child(e.kids[0], e, true) + " " + e.text + " " + expr_child(e.kids[1], e, false);
    case Kind::Unary:
        return e.text + expr_child(e.kids[0], e, false);
    case Kind::Quant:
        return e.text + " " + join(e.kids[0].kids, ", ", local_text) + " :: " + print_expr(e.kids[1]);
    case Kind::Len:
        return "|" + print_expr(e.kids[0]) + "|";
    case Kind::SeqLit:
        return "[" + join(e.kids, ", ", print_expr) + "]";
    case Kind::App:
        return e.text + "(" + join(e.kids, ", ", print_expr) + ")";
    case Kind::Rewrite:
        return (e.text == "1" ? "rewrite1(" : "rewrite(") + join(e.kids, ", ", print_expr) + ")";
    case Kind::Fragment:
        return "[" + join(e.kids, ", ", print_node) + "]";
    case Kind::RuleLit:
        return "`" + print_node(e.kids[0]) + "` =>> `" + print_node(e.kids[1]) + "`";
    case Kind::Select:
        return expr_child(e.kids[0], e, true) + "." + e.text;
    case Kind::Match: {
        std::string s = "match " + print_expr(e.kids[0]);
        for (std::size_t i = 1; i < e.kids.size(); ++i) {
            const Node& c = e.kids[i];
            s += " case " + c.text;
            if (!c.kids[0].kids.empty()) s += "(" + join(c.kids[0].kids, ", ", local_text) + ")";
            s += " => " + expr_child(c.kids[1], e, false);
        }
        return s;
    }
    default:
        return print_node(e);
    }
}

namespace {

class Printer {
public:
    explicit Printer(std::vector<StmtLines>* lines) : lines_(lines) {}

    std::string unit(const Node& u) {
        for (std::size_t i = 0; i < u.kids.size(); ++i) {
            if (i) emit(0, "");
            decl(u.kids[i]);
        }
        return out_;
    }

    std::string stmts_fragment(const Node& b) {
        for (const auto& s : b.kids) stmt(s, 0, {}, 0);
        return out_;
    }

    void decl(const Node& d) {
        switch (d.kind) {
        case Kind::Datatype: {
            std::string s = "datatype " + d.text + " =";
            for (std::size_t i = 0; i < d.kids.size(); ++i) {
                const Node& c = d.kids[i];
                s += (i ? " | " : " ") + c.text;
                if (!c.kids.empty()) s += "(" + join(c.kids, ", ", param_text) + ")";
            }
            emit(0, s);
            break;
        }
        case Kind::Class:
            emit(0, "class " + d.text + " {");
            for (const auto& f : d.kids) emit(1, "var " + f.text + ": " + print_type(f.kids[0]) + ";");
            emit(0, "}");
            break;
        case Kind::Function: {
            std::string s = modifiers(d, false);
            s += d.has(flag::Predicate) ? "predicate " : "function ";
            if (d.has(flag::Compiled)) s += "method ";
            s += d.text + "(" + join(d.kids[0].kids, ", ", param_text) + ")";
            if (!d.kids[1].is(Kind::None)) s += ": " + print_type(d.kids[1]);
            emit(0, s);
            clauses(d.kids[2]);
            if (!d.kids[3].is(Kind::None)) {
                emit(0, "{");
                emit(1, print_expr(d.kids[3]));
                emit(0, "}");
            }
            break;
        }
        case Kind::Method: {
            method_ = d.text;
            ghost_ = d.ghost();
            std::string s = modifiers(d, true) + "method " + d.text + "(" + join(d.kids[0].kids, ", ", param_text) + ")";
            if (d.kids[1].is(Kind::Params) && !d.kids[1].kids.empty())
                s += " returns (" + join(d.kids[1].kids, ", ", param_text) + ")";
            emit(0, s);
            clauses(d.kids[2]);
            if (d.kids[3].is(Kind::Block)) {
                emit(0, "{");
                block_body(d.kids[3], 1, {});
                emit(0, "}");
            }
            ghost_ = false;
            break;
        }
        default:
            emit(0, print_node(d));
        }
    }

private:
    std::vector<StmtLines>* lines_;
    std::string out_;
    int line_ = 1;
    std::string method_;
    bool ghost_ = false;

    void emit(int indent, const std::string& text) {
        if (!text.empty()) out_.append(static_cast<std::size_t>(indent) * 2, ' ');
        out_ += text;
        out_ += '\n';
        ++line_;
    }

    static std::string modifiers(const Node& d, bool ghost_keyword) {
        std::string s;
        if (d.vis == Visibility::Generated) s += "/*generated*/ ";
        else if (d.vis == Visibility::Public) s += "public ";
        if (ghost_keyword && d.ghost()) s += "ghost ";
        return s;
    }

    void clauses(const Node& cs) {
        if (!cs.is(Kind::Clauses)) return;
        for (const auto& c : cs.kids) {
            switch (c.kind) {
            case Kind::Requires: emit(1, "requires " + print_expr(c.kids[0])); break;
            case Kind::Ensures: emit(1, "ensures " + print_expr(c.kids[0])); break;
            case Kind::Modifies: emit(1, "modifies " + c.text); break;
            default: emit(1, print_node(c)); break;
            }
        }
    }

    void block_body(const Node& b, int indent, const std::vector<int>& path) {
        for (std::size_t i = 0; i < b.kids.size(); ++i) stmt(b.kids[i], indent, path, static_cast<int>(i));
    }

    void stmt(const Node& s, int indent, const std::vector<int>& path, int index) {
        int first = line_;
        switch (s.kind) {
        case Kind::If: {
            emit(indent, "if (" + print_expr(s.kids[0]) + ") {");
            auto then_path = path;
            then_path.push_back(index);
            then_path.push_back(0);
            block_body(s.kids[1], indent + 1, then_path);
            emit(indent, "} else {");
            auto else_path = path;
            else_path.push_back(index);
            else_path.push_back(1);
            block_body(s.kids[2], indent + 1, else_path);
            emit(indent, "}");
            break;
        }
        default:
            emit(indent, stmt_line(s));
        }
        if (lines_ && !method_.empty()) {
            AbsolutePosition pos;
            pos.method = method_;
            pos.block = path;
            pos.index = index;
            pos.length = 1;
            lines_->push_back(StmtLines{pos, first, line_ - 1});
        }
    }

public:
    std::string stmt_line(const Node& s) const {
        switch (s.kind) {
        case Kind::Marker:
            return "/*@" + s.text + "*/";
        case Kind::VarDecl: {
            std::string out = (s.ghost() && !ghost_) ? "ghost var " : "var ";
            out += join(s.kids[0].kids, ", ", local_text);
            if (!s.kids[1].is(Kind::None)) out += (s.has(flag::SuchThat) ? " :| " : " := ") + print_expr(s.kids[1]);
            return out + ";";
        }
        case Kind::Assign:
            return join(s.kids[0].kids, ", ", print_expr) + " := " + print_expr(s.kids[1]) + ";";
        case Kind::CallStmt:
            return s.text + "(" + join(s.kids, ", ", print_expr) + ");";
        case Kind::Assert:
            return "assert " + print_expr(s.kids[0]) + ";";
        case Kind::MetaVar:
            return s.text + ";";
        case Kind::Ellipsis:
            return "...";
        case Kind::If:
            return "if (" + print_expr(s.kids[0]) + ") { " + inline_block(s.kids[1]) + "} else { " +
                   inline_block(s.kids[2]) + "}";
        default:
            return print_expr(s);
        }
    }

    std::string inline_block(const Node& b) const {
        std::string out;
        for (const auto& s : b.kids) out += stmt_line(s) + " ";
        return out;
    }
};

} // namespace

std::string print_program(const Program& p, std::vector<StmtLines>* lines) {
    Printer pr(lines);
    return pr.unit(p);
}

std::string print_node(const Node& n) {
    switch (n.kind) {
    case Kind::Unit: {
        Printer pr(nullptr);
        std::string s = pr.unit(n);
        while (!s.empty() && s.back() == '\n') s.pop_back();
        return s;
    }
    case Kind::Block: {
        Printer pr(nullptr);
        return pr.inline_block(n).empty() ? std::string() : [&] {
            std::string s = pr.inline_block(n);
            s.pop_back();
            return s;
        }();
    }
    case Kind::VarDecl:
    case Kind::Assign:
    case Kind::CallStmt:
    case Kind::Assert:
    case Kind::Marker:
    case Kind::If: {
        Printer pr(nullptr);
        return pr.stmt_line(n);
    }
    case Kind::Type:
        return print_type(n);
    case Kind::Param:
        return param_text(n);
    case Kind::Local:
        return local_text(n);
    case Kind::Params:
    case Kind::Locals:
    case Kind::Lhs:
    case Kind::Binders:
        return join(n.kids, ", ", print_node);
    case Kind::Requires:
        return "requires " + print_expr(n.kids[0]);
    case Kind::Ensures:
        return "ensures " + print_expr(n.kids[0]);
    case Kind::Modifies:
        return "modifies " + n.text;
    case Kind::Unspecified:
    case Kind::None:
        return "";
    case Kind::Ellipsis:
        return "...";
    case Kind::Method:
    case Kind::Function:
    case Kind::Datatype:
    case Kind::Class: {
        Node u(Kind::Unit, "", {n});
        return print_node(u);
    }
    default:
        return print_expr(n);
    }
}

int method_line(const Program& p, const std::string& method) {
    int line = 1;
    for (std::size_t i = 0; i < p.kids.size(); ++i) {
        if (i) ++line;
        Node single(Kind::Unit, "", {p.kids[i]});
        if (p.kids[i].text == method) return line;
        std::string s = print_program(single);
        line += static_cast<int>(std::count(s.begin(), s.end(), '\n'));
    }
    return 0;
}

} // namespace dtac
