#include "dtac/projection.hpp"

#include <set>

namespace dtac {

bool is_ghost_decl(const Node& d) {
    if (d.is(Kind::Method)) return d.ghost() || d.vis == Visibility::Generated;
    if (d.is(Kind::Function)) return !d.has(flag::Compiled);
    return false;
}

namespace {

struct Eraser {
    const Program& prog;
    std::set<std::string> ghost_vars;

    bool ghost_callee(const std::string& name) const {
        const Node* d = find_decl(prog, name);
        return d && is_ghost_decl(*d);
    }

    bool assigns_ghost(const Node& assign) const {
        for (const auto& l : assign.kids[0].kids) {
            if (l.is(Kind::Var) && ghost_vars.count(l.text)) return true;
        }
        return false;
    }

    Node block(const Node& b) {
        Node out = make_block();
        for (const auto& s : b.kids) {
            switch (s.kind) {
            case Kind::Marker:
            case Kind::Assert:
                continue;
            case Kind::VarDecl:
                if (s.ghost()) {
                    for (const auto& l : s.kids[0].kids) ghost_vars.insert(l.text);
                    continue;
                }
                break;
            case Kind::Assign:
                if (assigns_ghost(s)) continue;
                break;
            case Kind::CallStmt:
                if (ghost_callee(s.text)) continue;
                break;
            case Kind::If: {
                Node i = s;
                i.kids[1] = block(s.kids[1]);
                i.kids[2] = block(s.kids[2]);
                out.kids.push_back(std::move(i));
                continue;
            }
            default:
                break;
            }
            out.kids.push_back(s);
        }
        return out;
    }
};

Node strip_contracts(const Node& cs) {
    Node out(Kind::Clauses);
    for (const auto& c : cs.kids) {
        if (c.is(Kind::Modifies)) out.kids.push_back(c);
    }
    return out;
}

} // namespace

Program compiled_projection(const Program& p) {
    Program out(Kind::Unit);
    for (const auto& d : p.kids) {
        if (is_ghost_decl(d)) continue;
        Node c = d;
        if (c.is(Kind::Method)) {
            c.kids[2] = strip_contracts(d.kids[2]);
            if (d.kids[3].is(Kind::Block)) {
                Eraser e{p, {}};
                c.kids[3] = e.block(d.kids[3]);
            }
        } else if (c.is(Kind::Function)) {
            c.kids[2] = strip_contracts(d.kids[2]);
        }
        out.kids.push_back(std::move(c));
    }
    return out;
}

} // namespace dtac
