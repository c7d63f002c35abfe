#include "dtac/ast.hpp"

#include <algorithm>

namespace dtac {

std::string_view kind_name(Kind k) {
    switch (k) {
    case Kind::Unit: return "Unit";
    case Kind::Datatype: return "Datatype";
    case Kind::Ctor: return "Ctor";
    case Kind::Class: return "Class";
    case Kind::Field: return "Field";
    case Kind::Function: return "Function";
    case Kind::Method: return "Method";
    case Kind::Params: return "Params";
    case Kind::Param: return "Param";
    case Kind::Clauses: return "Clauses";
    case Kind::Requires: return "Requires";
    case Kind::Ensures: return "Ensures";
    case Kind::Modifies: return "Modifies";
    case Kind::Type: return "Type";
    case Kind::Block: return "Block";
    case Kind::VarDecl: return "VarDecl";
    case Kind::Locals: return "Locals";
    case Kind::Local: return "Local";
    case Kind::Assign: return "Assign";
    case Kind::Lhs: return "Lhs";
    case Kind::CallStmt: return "CallStmt";
    case Kind::Assert: return "Assert";
    case Kind::If: return "If";
    case Kind::Marker: return "Marker";
    case Kind::IntLit: return "IntLit";
    case Kind::BoolLit: return "BoolLit";
    case Kind::StrLit: return "StrLit";
    case Kind::Null: return "Null";
    case Kind::This: return "This";
    case Kind::Var: return "Var";
    case Kind::Binary: return "Binary";
    case Kind::Unary: return "Unary";
    case Kind::Quant: return "Quant";
    case Kind::Binders: return "Binders";
    case Kind::Len: return "Len";
    case Kind::SeqLit: return "SeqLit";
    case Kind::App: return "App";
    case Kind::Select: return "Select";
    case Kind::Match: return "Match";
    case Kind::Case: return "Case";
    case Kind::MetaVar: return "MetaVar";
    case Kind::ListVar: return "ListVar";
    case Kind::Ellipsis: return "Ellipsis";
    case Kind::Unspecified: return "Unspecified";
    case Kind::Rewrite: return "Rewrite";
    case Kind::RuleLit: return "RuleLit";
    case Kind::Fragment: return "Fragment";
    case Kind::None: return "None";
    }
    return "?";
}

std::string_view visibility_name(Visibility v) {
    switch (v) {
    case Visibility::Public: return "public";
    case Visibility::Private: return "private";
    case Visibility::Generated: return "generated";
    }
    return "?";
}

namespace {

bool has_visibility(Kind k) { return k == Kind::Method || k == Kind::Function; }

bool shallow_same(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.text != b.text) return false;
    if ((a.flags & flag::Structural) != (b.flags & flag::Structural)) return false;
    if (has_visibility(a.kind) && a.vis != b.vis) return false;
    return true;
}

} // namespace

bool same(const Node& a, const Node& b) {
    if (!shallow_same(a, b) || a.kids.size() != b.kids.size()) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!same(a.kids[i], b.kids[i])) return false;
    return true;
}

bool operator==(const Node& a, const Node& b) { return same(a, b); }

bool same_modulo_markers(const Node& a, const Node& b) {
    return same(strip_markers(a), strip_markers(b));
}

Node make_var(std::string name) { return Node(Kind::Var, std::move(name)); }
Node make_int(long long v) { return Node(Kind::IntLit, std::to_string(v)); }
Node make_bool(bool v) { return Node(Kind::BoolLit, v ? "true" : "false"); }
Node make_str(std::string s) { return Node(Kind::StrLit, std::move(s)); }

Node make_binary(std::string op, Node lhs, Node rhs) {
    return Node(Kind::Binary, std::move(op), {std::move(lhs), std::move(rhs)});
}

Node make_unary(std::string op, Node operand) {
    return Node(Kind::Unary, std::move(op), {std::move(operand)});
}

Node make_block(std::vector<Node> stmts) { return Node(Kind::Block, {}, std::move(stmts)); }
Node make_marker(std::string name) { return Node(Kind::Marker, std::move(name)); }
Node make_assert(Node e) { return Node(Kind::Assert, {}, {std::move(e)}); }
Node none() { return Node(Kind::None); }

bool is_metavar_name(std::string_view s) { return !s.empty() && s.front() == '?'; }

const Node* find_decl(const Program& p, std::string_view name) {
    for (const auto& d : p.kids)
        if (d.text == name) return &d;
    return nullptr;
}

Node* find_decl(Program& p, std::string_view name) {
    for (auto& d : p.kids)
        if (d.text == name) return &d;
    return nullptr;
}

std::vector<Node> conjuncts(const Node& e) {
    std::vector<Node> out;
    const Node* cur = &e;
    while (cur->is(Kind::Binary) && cur->text == "&&") {
        auto left = conjuncts(cur->kids[0]);
        out.insert(out.end(), left.begin(), left.end());
        cur = &cur->kids[1];
    }
    out.push_back(*cur);
    return out;
}

Node conjoin(const std::vector<Node>& es) {
    if (es.empty()) return make_bool(true);
    Node acc = es.back();
    for (auto it = es.rbegin() + 1; it != es.rend(); ++it) acc = make_binary("&&", *it, std::move(acc));
    return acc;
}

namespace {
void renumber_from(Node& n, NodeId& next) {
    n.id = next++;
    for (auto& k : n.kids) renumber_from(k, next);
}
} // namespace

void renumber(Node& n) {
    NodeId next = 1;
    renumber_from(n, next);
}

Node strip_markers(Node n) {
    std::erase_if(n.kids, [](const Node& k) { return k.is(Kind::Marker); });
    for (auto& k : n.kids) k = strip_markers(std::move(k));
    return n;
}

bool has_pattern_residue(const Node& n) {
    switch (n.kind) {
    case Kind::MetaVar:
    case Kind::ListVar:
    case Kind::Ellipsis:
    case Kind::Unspecified:
    case Kind::Rewrite:
    case Kind::RuleLit:
    case Kind::Fragment:
        return true;
    default:
        break;
    }
    if (is_metavar_name(n.text) && n.kind != Kind::StrLit) return true;
    return std::any_of(n.kids.begin(), n.kids.end(), has_pattern_residue);
}

} // namespace dtac
