#include <set>

#include "dtac/error.hpp"
#include "dtac/kernel.hpp"

namespace dtac {

namespace {

bool has_name_slot(Kind k) {
    switch (k) {
    case Kind::Method:
    case Kind::Function:
    case Kind::Datatype:
    case Kind::Class:
    case Kind::CallStmt:
    case Kind::App:
    case Kind::Local:
    case Kind::Param:
        return true;
    default:
        return false;
    }
}

bool list_context(Kind k) {
    switch (k) {
    case Kind::Params:
    case Kind::Locals:
    case Kind::Lhs:
    case Kind::Binders:
    case Kind::SeqLit:
    case Kind::App:
    case Kind::CallStmt:
    case Kind::Unit:
    case Kind::Block:
    case Kind::Datatype:
    case Kind::Class:
    case Kind::Fragment:
        return true;
    default:
        return false;
    }
}

bool is_list(const Node& n) {
    return n.is(Kind::Fragment) || n.is(Kind::SeqLit) || n.is(Kind::Params) || n.is(Kind::Locals);
}

std::string name_of(const Node& n) {
    if (n.is(Kind::Var) || n.is(Kind::Local) || n.is(Kind::Param)) return n.text;
    if (n.is(Kind::Fragment) && n.size() == 1) return name_of(n.kids[0]);
    return {};
}

// Adapts a spliced element to the list it lands in.
Node coerce(Node n, Kind context) {
    switch (context) {
    case Kind::Locals:
        if (n.is(Kind::Var) || n.is(Kind::Param)) {
            Node l(Kind::Local, n.text);
            if (n.is(Kind::Param)) l.kids = n.kids;
            return l;
        }
        return n;
    case Kind::Lhs:
    case Kind::App:
    case Kind::CallStmt:
    case Kind::SeqLit:
        if (n.is(Kind::Local) || n.is(Kind::Param)) return make_var(n.text);
        return n;
    default:
        return n;
    }
}

void splice(std::vector<Node>& out, const Node& value, Kind context) {
    if (value.is(Kind::Fragment) || (value.is(Kind::Params) && context != Kind::Params) ||
        (value.is(Kind::Locals) && context != Kind::Locals)) {
        for (const auto& k : value.kids) splice(out, k, context);
        return;
    }
    out.push_back(coerce(value, context));
}

std::vector<Node> flat(const Node& n) {
    std::vector<Node> out;
    if (!is_list(n)) {
        out.push_back(n);
        return out;
    }
    for (const auto& k : n.kids) {
        auto sub = is_list(k) && !k.is(Kind::SeqLit) ? flat(k) : std::vector<Node>{k};
        for (auto& s : sub) out.push_back(coerce(std::move(s), Kind::SeqLit));
    }
    return out;
}

bool mentions(const Node& n, const std::set<std::string>& names) {
    if (n.is(Kind::Var) && names.count(n.text)) return true;
    for (const auto& k : n.kids)
        if (mentions(k, names)) return true;
    return false;
}

Node replace_pairs(const Node& n, const std::vector<Node>& from, const std::vector<Node>& to,
                   const std::vector<bool>& live) {
    for (std::size_t i = 0; i < from.size(); ++i)
        if (live[i] && same(n, from[i])) return to[i];
    if (n.is(Kind::Quant) || n.is(Kind::Case)) {
        std::set<std::string> bound;
        for (const auto& b : n.kids[0].kids) bound.insert(b.text);
        std::vector<bool> inner = live;
        for (std::size_t i = 0; i < from.size(); ++i)
            if (mentions(from[i], bound)) inner[i] = false;
        Node out = n;
        out.kids[1] = replace_pairs(n.kids[1], from, to, inner);
        return out;
    }
    Node out = n;
    for (auto& k : out.kids) k = replace_pairs(k, from, to, live);
    return out;
}

bool is_expr(Kind k) {
    switch (k) {
    case Kind::IntLit:
    case Kind::BoolLit:
    case Kind::StrLit:
    case Kind::Null:
    case Kind::This:
    case Kind::Var:
    case Kind::Binary:
    case Kind::Unary:
    case Kind::Quant:
    case Kind::Len:
    case Kind::SeqLit:
    case Kind::App:
    case Kind::Select:
    case Kind::Match:
        return true;
    default:
        return false;
    }
}

// Rewrites the first redex in pre-order; false if there is none.
bool rewrite_once(Node& n, const Node& lhs, const Node& rhs) {
    if (is_expr(n.kind)) {
        auto envs = match_node(Environment{}, lhs, n);
        if (!envs.empty()) {
            n = instantiate(rhs, envs.front());
            return true;
        }
    }
    for (auto& k : n.kids)
        if (rewrite_once(k, lhs, rhs)) return true;
    return false;
}

class Instantiator {
public:
    explicit Instantiator(const Environment& env) : env_(env) {}

    Node node(const Node& p) {
        switch (p.kind) {
        case Kind::MetaVar:
        case Kind::ListVar: {
            const Node* b = env_.var(p.text);
            if (!b) throw EvalError("unbound metavariable " + p.text);
            if (b->is(Kind::Fragment) && b->size() == 1) return b->kids[0];
            return *b;
        }
        case Kind::Ellipsis:
        case Kind::Unspecified:
            return capture();
        case Kind::Rewrite:
            return rewrite(p);
        case Kind::RuleLit:
            return p;
        default:
            break;
        }
        Node out(p.kind, p.text);
        out.flags = p.flags;
        out.vis = p.vis;
        out.line = p.line;
        if (has_name_slot(p.kind) && is_metavar_name(p.text)) {
            const Node* b = env_.var(p.text);
            if (!b) throw EvalError("unbound metavariable " + p.text);
            out.text = name_of(*b);
            if (out.text.empty()) throw EvalError("metavariable " + p.text + " does not name a declaration");
        }
        if (p.is(Kind::Clauses)) {
            bool rest_done = false;
            for (const auto& k : p.kids) {
                if (!k.is(Kind::Ellipsis)) {
                    out.kids.push_back(node(k));
                } else if (!rest_done) {
                    rest_done = true;
                    splice(out.kids, capture(), Kind::Clauses);
                }
            }
        } else if (list_context(p.kind)) {
            for (const auto& k : p.kids) {
                if (k.is(Kind::ListVar) || k.is(Kind::MetaVar) || k.is(Kind::Ellipsis)) {
                    Node v = k.is(Kind::Ellipsis) ? capture() : raw(k.text);
                    splice(out.kids, v, p.kind);
                } else {
                    splice(out.kids, node(k), p.kind);
                }
            }
        } else {
            for (const auto& k : p.kids) {
                Node v = node(k);
                if (v.is(Kind::Fragment) && v.size() == 1) v = v.kids[0];
                out.kids.push_back(std::move(v));
            }
        }
        if (out.is(Kind::Binary) && out.text == "&&" && out.kids[0].is(Kind::Binary) && out.kids[0].text == "&&")
            out = reassociate(std::move(out));
        return out;
    }

private:
    const Environment& env_;
    std::size_t next_ = 0;

    Node raw(const std::string& name) {
        const Node* b = env_.var(name);
        if (!b) throw EvalError("unbound metavariable " + name);
        return *b;
    }

    Node capture() {
        if (next_ >= env_.captures.size()) throw EvalError("rhs uses more unspecified parts than the lhs matched");
        return env_.captures[next_++];
    }

    Node rewrite(const Node& p) {
        std::vector<Node> args;
        for (const auto& a : p.kids) args.push_back(a.is(Kind::RuleLit) ? a : node(a));
        if (args.size() == 2 && args[0].is(Kind::RuleLit)) return rewrite_rule(args[0], args[1], p.text == "1");
        if (args.size() == 3) return rewrite_pairs(args[0], args[1], args[2]);
        throw EvalError("rewrite expects a rule and a term, or two terms and a target");
    }
};

} // namespace

Node instantiate(const Node& pattern, const Environment& env) { return Instantiator(env).node(pattern); }

Node substitute(const Node& n, const std::map<std::string, Node>& vars) {
    if (n.is(Kind::RuleLit)) return n;
    if (n.is(Kind::MetaVar) || n.is(Kind::ListVar)) {
        auto it = vars.find(n.text);
        return it == vars.end() ? n : it->second;
    }
    Node out = n;
    if (has_name_slot(n.kind) && is_metavar_name(n.text)) {
        auto it = vars.find(n.text);
        if (it != vars.end()) {
            std::string name = name_of(it->second);
            if (!name.empty()) out.text = name;
        }
    }
    out.kids.clear();
    for (const auto& k : n.kids) {
        if (list_context(n.kind) && k.is(Kind::ListVar)) {
            auto it = vars.find(k.text);
            if (it != vars.end()) {
                splice(out.kids, it->second, n.kind);
                continue;
            }
        }
        out.kids.push_back(substitute(k, vars));
    }
    return out;
}

Node rewrite_pairs(const Node& from, const Node& to, const Node& in) {
    std::vector<Node> l;
    std::vector<Node> r;
    if (is_list(from)) {
        l = flat(from);
        r = is_list(to) ? flat(to) : std::vector<Node>{to};
    } else {
        l = {from};
        r = {to.is(Kind::Fragment) && to.size() == 1 ? to.kids[0] : to};
    }
    if (l.size() != r.size())
        throw EvalError("rewrite: " + std::to_string(l.size()) + " terms to replace but " + std::to_string(r.size()) +
                        " replacements");
    for (auto& x : l) x = coerce(std::move(x), Kind::SeqLit);
    for (auto& x : r) x = coerce(std::move(x), Kind::SeqLit);
    return reassociate(replace_pairs(in, l, r, std::vector<bool>(l.size(), true)));
}

Node rewrite_rule(const Node& rule, const Node& in, bool single, std::size_t bound) {
    if (!rule.is(Kind::RuleLit) || rule.size() != 2) throw EvalError("rewrite expects a rule literal");
    const Node& lhs = rule.kids[0];
    const Node& rhs = rule.kids[1];
    if (!is_expr(lhs.kind) && !lhs.is(Kind::MetaVar)) throw EvalError("rewrite rules must rewrite expressions");
    Node out = in;
    if (single) {
        if (!rewrite_once(out, lhs, rhs)) throw EvalError("rewrite rule does not apply");
        return reassociate(std::move(out));
    }
    for (std::size_t steps = 0; rewrite_once(out, lhs, rhs);) {
        if (++steps > bound) throw EvalError("rewrite did not terminate within " + std::to_string(bound) + " steps");
    }
    return reassociate(std::move(out));
}

Node reassociate(Node e) {
    for (auto& k : e.kids) k = reassociate(std::move(k));
    while (e.is(Kind::Binary) && e.text == "&&" && e.kids[0].is(Kind::Binary) && e.kids[0].text == "&&") {
        Node left = std::move(e.kids[0]);
        Node right = std::move(e.kids[1]);
        Node inner = make_binary("&&", std::move(left.kids[1]), std::move(right));
        e = make_binary("&&", std::move(left.kids[0]), reassociate(std::move(inner)));
    }
    return e;
}

} // namespace dtac
