#include <set>

#include "dtac/error.hpp"
#include "dtac/kernel.hpp"

namespace dtac {

namespace {

constexpr NodeId kTag = 0xFFFFFFFFu;

void mark_fresh(Node& n) {
    if (n.is(Kind::Marker)) n.flags |= flag::Fresh;
    for (auto& k : n.kids) mark_fresh(k);
}

void collect_markers(const Node& n, std::set<std::string>& out, bool fresh_only) {
    if (n.is(Kind::Marker) && (!fresh_only || n.has(flag::Fresh))) out.insert(n.text);
    for (const auto& k : n.kids) collect_markers(k, out, fresh_only);
}

// Removes stale markers that share a name with a fresh one; clears Fresh.
void settle_markers(Node& n, const std::set<std::string>& fresh) {
    if (n.is(Kind::Block)) {
        std::vector<Node> kept;
        for (auto& s : n.kids) {
            if (s.is(Kind::Marker) && !s.has(flag::Fresh) && fresh.count(s.text) && s.id != kTag) continue;
            kept.push_back(std::move(s));
        }
        n.kids = std::move(kept);
    }
    n.flags &= ~flag::Fresh;
    for (auto& k : n.kids) settle_markers(k, fresh);
}

bool locate_in(const Node& block, AbsolutePosition& cur) {
    if (block.id == kTag) {
        cur.index = static_cast<int>(block.size());
        return true;
    }
    for (std::size_t i = 0; i < block.size(); ++i) {
        const Node& s = block.kids[i];
        if (s.id == kTag) {
            cur.index = static_cast<int>(i);
            return true;
        }
        if (s.is(Kind::If)) {
            for (int br = 0; br < 2; ++br) {
                cur.block.push_back(static_cast<int>(i));
                cur.block.push_back(br);
                if (locate_in(s.kids[static_cast<std::size_t>(br) + 1], cur)) return true;
                cur.block.pop_back();
                cur.block.pop_back();
            }
        }
    }
    return false;
}

AbsolutePosition locate(const Program& p, const std::string& method) {
    AbsolutePosition pos;
    pos.method = method;
    const Node* body = method_body(p, method);
    if (!body || !locate_in(*body, pos)) throw EvalError("internal: lost track of the rewritten site");
    return pos;
}

Node& stmt_at(Program& p, const AbsolutePosition& pos) {
    Node* b = block_at(p, pos);
    if (!b || pos.index < 0 || pos.index >= static_cast<int>(b->size())) throw EvalError("site does not resolve");
    return b->kids[static_cast<std::size_t>(pos.index)];
}

Applied apply_decls(const Program& p, const Match& m, Node inst) {
    if (!inst.is(Kind::Unit)) {
        if (inst.is(Kind::Block) && inst.kids.empty()) inst = Node(Kind::Unit);
        else throw EvalError("a declaration pattern must be rewritten to declarations");
    }
    Program out = p;
    std::size_t from = m.site.decl_index;
    std::size_t count = static_cast<std::size_t>(std::max(m.site.pos.length, 1));
    std::map<std::string, const Node*> matched;
    for (std::size_t i = from; i < from + count; ++i) matched[p.kids[i].text] = &p.kids[i];
    for (auto& d : inst.kids) {
        auto it = matched.find(d.text);
        if (it != matched.end()) {
            const Node& old = *it->second;
            d.vis = old.vis;
            d.flags = (d.flags & ~(flag::Ghost | flag::VisSet | flag::GhostSet)) | (old.flags & flag::Ghost);
            if (d.is(Kind::Function)) d.flags = (d.flags & ~(flag::Predicate | flag::Compiled)) | (old.flags & (flag::Predicate | flag::Compiled | flag::Ghost));
        } else if (find_decl(p, d.text)) {
            throw EvalError("declaration '" + d.text + "' already exists");
        } else {
            d.vis = Visibility::Generated;
            d.flags = (d.flags & ~(flag::VisSet | flag::GhostSet)) | flag::Ghost;
        }
        mark_fresh(d);
    }
    std::string site_name = inst.kids.empty() ? m.site.pos.method : inst.kids.front().text;
    for (const auto& d : inst.kids)
        if (d.text == m.site.pos.method) site_name = d.text;
    out.kids.erase(out.kids.begin() + static_cast<std::ptrdiff_t>(from),
                   out.kids.begin() + static_cast<std::ptrdiff_t>(from + count));
    out.kids.insert(out.kids.begin() + static_cast<std::ptrdiff_t>(from), inst.kids.begin(), inst.kids.end());
    std::set<std::string> fresh;
    collect_markers(out, fresh, true);
    settle_markers(out, fresh);
    renumber(out);
    AbsolutePosition site;
    site.method = site_name;
    site.decl = true;
    site.length = static_cast<int>(inst.kids.size());
    return Applied{std::move(out), std::move(site)};
}

Applied apply_stmts(const Program& p, const Match& m, Node inst) {
    if (!inst.is(Kind::Block)) throw EvalError("a statement pattern must be rewritten to statements");
    Program out = p;
    Node* b = block_at(out, m.site.pos);
    if (!b) throw EvalError("site does not resolve");
    auto from = static_cast<std::size_t>(m.site.pos.index);
    auto len = static_cast<std::size_t>(m.site.pos.length);
    for (auto& s : inst.kids) mark_fresh(s);
    std::set<std::string> emitted;
    collect_markers(inst, emitted, false);
    std::vector<Node> replacement = inst.kids;
    for (std::size_t i = from; i < from + len; ++i) {
        const Node& s = b->kids[i];
        if (s.is(Kind::Marker) && !emitted.count(s.text)) replacement.push_back(s);
    }
    std::size_t inserted = inst.kids.size();
    b->kids.erase(b->kids.begin() + static_cast<std::ptrdiff_t>(from),
                  b->kids.begin() + static_cast<std::ptrdiff_t>(from + len));
    b->kids.insert(b->kids.begin() + static_cast<std::ptrdiff_t>(from), replacement.begin(), replacement.end());
    if (from < b->size()) b->kids[from].id = kTag;
    else b->id = kTag;
    std::set<std::string> fresh;
    collect_markers(out, fresh, true);
    settle_markers(out, fresh);
    AbsolutePosition site = locate(out, m.site.pos.method);
    site.length = static_cast<int>(inserted);
    renumber(out);
    return Applied{std::move(out), std::move(site)};
}

Applied apply_expr(const Program& p, const Match& m, Node inst) {
    if (inst.is(Kind::Block) || inst.is(Kind::Unit)) throw EvalError("an expression pattern must be rewritten to an expression");
    Program out = p;
    Node* n = nullptr;
    if (m.site.pos.decl) {
        n = &out.kids[m.site.decl_index];
    } else {
        n = &stmt_at(out, m.site.pos);
    }
    for (std::size_t i : m.site.path) {
        if (i >= n->size()) throw EvalError("site does not resolve");
        n = &n->kids[i];
    }
    *n = std::move(inst);
    renumber(out);
    return Applied{std::move(out), m.site.pos};
}

} // namespace

Applied apply_rule(const Program& p, const Match& m, const Node& rhs) {
    Node inst = instantiate(rhs, m.env);
    switch (m.site.kind) {
    case Site::Kind::Decl: return apply_decls(p, m, std::move(inst));
    case Site::Kind::Stmts: return apply_stmts(p, m, std::move(inst));
    case Site::Kind::Expr: return apply_expr(p, m, std::move(inst));
    }
    throw EvalError("unknown site kind");
}

} // namespace dtac
