#include "dtac/kernel.hpp"

#include <utility>

#include "dtac/tactic.hpp"

namespace dtac {

const Node* Environment::var(const std::string& name) const {
    auto it = vars.find(name);
    return it == vars.end() ? nullptr : &it->second;
}

const AbsolutePosition* Environment::position(const std::string& name) const {
    auto it = positions.find(name);
    return it == positions.end() ? nullptr : &it->second;
}

Environment flush(const Environment& env) {
    Environment out;
    for (const auto& [k, v] : env.vars)
        if (is_reserved(k)) out.vars.emplace(k, v);
    for (const auto& [k, v] : env.positions)
        if (is_reserved(k)) out.positions.emplace(k, v);
    return out;
}

std::optional<AbsolutePosition> site_start(const Program& p, const std::string& method) {
    if (!method_body(p, method)) return std::nullopt;
    return method_start(p, method);
}

std::optional<AbsolutePosition> site_end(const Program& p, const std::string& method) {
    if (!method_body(p, method)) return std::nullopt;
    return method_end(p, method);
}

namespace {

using Envs = std::vector<Environment>;

bool name_like(const Node& n) { return n.is(Kind::Var) || n.is(Kind::Local) || n.is(Kind::Param); }

std::string name_of(const Node& n) {
    if (name_like(n)) return n.text;
    if (n.is(Kind::Fragment) && n.size() == 1) return name_of(n.kids[0]);
    return {};
}

// Equality of a binding with program text, treating a Var, Local and Param
// of the same name as the same thing.
bool equiv(const Node& a, const Node& b) {
    if (a.is(Kind::Fragment) && a.size() == 1 && !b.is(Kind::Fragment)) return equiv(a.kids[0], b);
    if (name_like(a) && name_like(b)) return a.text == b.text && (a.kind == b.kind || a.kids.empty() || b.kids.empty());
    return same(a, b);
}

bool equiv_list(const Node& binding, const std::vector<Node>& ts, std::size_t from, std::size_t to) {
    if (binding.is(Kind::Fragment) || binding.is(Kind::SeqLit) || binding.is(Kind::Params) ||
        binding.is(Kind::Locals)) {
        if (binding.size() != to - from) return false;
        for (std::size_t i = 0; i < binding.size(); ++i)
            if (!equiv(binding.kids[i], ts[from + i])) return false;
        return true;
    }
    return to - from == 1 && equiv(binding, ts[from]);
}

Node fragment(const std::vector<Node>& ts, std::size_t from, std::size_t to) {
    Node f(Kind::Fragment);
    f.kids.assign(ts.begin() + static_cast<std::ptrdiff_t>(from), ts.begin() + static_cast<std::ptrdiff_t>(to));
    return f;
}

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

bool variadic(Kind k) {
    switch (k) {
    case Kind::Params:
    case Kind::Locals:
    case Kind::Lhs:
    case Kind::Binders:
    case Kind::SeqLit:
    case Kind::App:
    case Kind::CallStmt:
    case Kind::Unit:
    case Kind::Datatype:
    case Kind::Class:
    case Kind::Ctor:
        return true;
    default:
        return false;
    }
}

class Matcher {
public:
    Envs node(const Node& p, const Node& t, Environment env) {
        switch (p.kind) {
        case Kind::MetaVar:
        case Kind::ListVar:
            return metavar(p.text, t, std::move(env));
        case Kind::Ellipsis:
        case Kind::Unspecified:
            env.captures.push_back(t);
            return {std::move(env)};
        default:
            break;
        }
        if (p.kind != t.kind) return {};
        if (has_name_slot(p.kind) && is_metavar_name(p.text)) {
            if (const Node* b = env.var(p.text)) {
                if (name_of(*b) != t.text) return {};
            } else {
                env.vars[p.text] = make_var(t.text);
            }
        } else if (p.text != t.text) {
            return {};
        }
        if (!flags_ok(p, t)) return {};
        switch (p.kind) {
        case Kind::Block:
            return list(p.kids, t.kids, std::move(env), true);
        case Kind::Clauses:
            return clauses(p, t, std::move(env));
        default:
            break;
        }
        if (variadic(p.kind)) return list(p.kids, t.kids, std::move(env), false);
        if (p.size() != t.size()) return {};
        return fixed(p, t, 0, std::move(env));
    }

    // Matches a pattern statement run against ts starting at `from`; yields
    // (env, end) for every way the run can end.
    std::vector<std::pair<Environment, std::size_t>> prefix(const std::vector<Node>& ps, const std::vector<Node>& ts,
                                                            std::size_t from, Environment env) {
        std::vector<std::pair<Environment, std::size_t>> out;
        seq(ps, ts, 0, from, std::move(env), true, false, out);
        return out;
    }

private:
    Envs metavar(const std::string& name, const Node& t, Environment env) {
        if (const Node* b = env.var(name)) {
            if (!equiv(*b, t)) return {};
            return {std::move(env)};
        }
        env.vars[name] = t;
        return {std::move(env)};
    }

    static bool flags_ok(const Node& p, const Node& t) {
        switch (p.kind) {
        case Kind::Method:
        case Kind::Function:
            if (p.has(flag::VisSet) && p.vis != t.vis) return false;
            if (p.has(flag::GhostSet) && p.ghost() != t.ghost()) return false;
            if (p.is(Kind::Function) &&
                (p.flags & (flag::Predicate | flag::Compiled)) != (t.flags & (flag::Predicate | flag::Compiled)))
                return false;
            return true;
        case Kind::VarDecl:
            if (p.has(flag::SuchThat) != t.has(flag::SuchThat)) return false;
            return !p.ghost() || t.ghost();
        default:
            return true;
        }
    }

    Envs fixed(const Node& p, const Node& t, std::size_t i, Environment env) {
        if (i == p.size()) return {std::move(env)};
        Envs out;
        for (auto& e : node(p.kids[i], t.kids[i], std::move(env))) {
            auto rest = fixed(p, t, i + 1, std::move(e));
            for (auto& r : rest) out.push_back(std::move(r));
        }
        return out;
    }

    Envs list(const std::vector<Node>& ps, const std::vector<Node>& ts, Environment env, bool block) {
        if (ps.size() == 1 && ps[0].is(Kind::ListVar)) {
            if (const Node* b = env.var(ps[0].text)) {
                if (!equiv_list(*b, ts, 0, ts.size())) return {};
                return {std::move(env)};
            }
            env.vars[ps[0].text] = fragment(ts, 0, ts.size());
            return {std::move(env)};
        }
        std::vector<std::pair<Environment, std::size_t>> out;
        seq(ps, ts, 0, 0, std::move(env), block, true, out);
        Envs envs;
        for (auto& [e, end] : out) envs.push_back(std::move(e));
        return envs;
    }

    void seq(const std::vector<Node>& ps, const std::vector<Node>& ts, std::size_t pi, std::size_t ti, Environment env,
             bool block, bool whole, std::vector<std::pair<Environment, std::size_t>>& out) {
        if (pi == ps.size()) {
            if (whole) {
                std::size_t k = ti;
                if (block)
                    while (k < ts.size() && ts[k].is(Kind::Marker)) ++k;
                if (k != ts.size()) return;
            }
            out.emplace_back(std::move(env), ti);
            return;
        }
        const Node& p = ps[pi];
        if (p.is(Kind::Ellipsis)) {
            for (std::size_t k = ti; k <= ts.size(); ++k) {
                Environment e = env;
                e.captures.push_back(fragment(ts, ti, k));
                seq(ps, ts, pi + 1, k, std::move(e), block, whole, out);
            }
            return;
        }
        if (block && !p.is(Kind::Marker))
            while (ti < ts.size() && ts[ti].is(Kind::Marker)) ++ti;
        if (ti >= ts.size()) return;
        if (p.is(Kind::MetaVar)) {
            // a variable may stand for a pinned list in argument position
            if (const Node* b = env.var(p.text); b && b->is(Kind::Fragment) && !block) {
                std::size_t n = b->size();
                if (ti + n <= ts.size() && equiv_list(*b, ts, ti, ti + n))
                    seq(ps, ts, pi + 1, ti + n, std::move(env), block, whole, out);
                return;
            }
        }
        for (auto& e : node(p, ts[ti], env)) seq(ps, ts, pi + 1, ti + 1, std::move(e), block, whole, out);
    }

    Envs clauses(const Node& p, const Node& t, Environment env) {
        std::vector<std::size_t> concrete;
        bool ellipsis = false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p.kids[i].is(Kind::Ellipsis)) ellipsis = true;
            else concrete.push_back(i);
        }
        if (!ellipsis && concrete.size() != t.size()) return {};
        Envs out;
        std::vector<bool> used(t.size(), false);
        pick(p, t, concrete, 0, 0, used, std::move(env), ellipsis, out);
        return out;
    }

    void pick(const Node& p, const Node& t, const std::vector<std::size_t>& concrete, std::size_t ci, std::size_t from,
              std::vector<bool>& used, Environment env, bool ellipsis, Envs& out) {
        if (ci == concrete.size()) {
            if (ellipsis) {
                Node rest(Kind::Fragment);
                for (std::size_t i = 0; i < t.size(); ++i)
                    if (!used[i]) rest.kids.push_back(t.kids[i]);
                env.captures.push_back(std::move(rest));
            }
            out.push_back(std::move(env));
            return;
        }
        for (std::size_t i = from; i < t.size(); ++i) {
            for (auto& e : node(p.kids[concrete[ci]], t.kids[i], env)) {
                used[i] = true;
                pick(p, t, concrete, ci + 1, i + 1, used, std::move(e), ellipsis, out);
                used[i] = false;
            }
        }
    }
};

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

// Context bindings of the enclosing method; false if a pinned value disagrees.
bool add_context(Environment& env, const Program& p, const std::string& method) {
    const Node* d = find_decl(p, method);
    if (!d || !is_callable(*d)) return true;
    std::vector<Node> pre;
    std::vector<Node> post;
    if (d->kids[2].is(Kind::Clauses)) {
        for (const auto& c : d->kids[2].kids) {
            if (c.is(Kind::Requires)) pre.push_back(c.kids[0]);
            if (c.is(Kind::Ensures)) post.push_back(c.kids[0]);
        }
    }
    std::optional<Node> arg;
    for (const auto& prm : d->kids[0].kids) {
        if (prm.is(Kind::Param) && !prm.kids.empty() && prm.kids[0].text == "int") {
            arg = make_var(prm.text);
            break;
        }
    }
    auto set = [&](const char* name, const std::optional<Node>& v) {
        if (const Node* pinned = env.var(name)) return v.has_value() && equiv(*pinned, *v);
        if (v) env.vars[name] = *v;
        return true;
    };
    return set("?meth", make_var(method)) && set("?pre", conjoin(pre)) && set("?post", conjoin(post)) &&
           set("?arg", arg);
}

class Enumerator {
public:
    Enumerator(const Environment& base, const Program& p, const Node& pattern)
        : base_(base), prog_(p), pat_(pattern) {}

    std::vector<Match> run() {
        if (pat_.is(Kind::Unit)) {
            decls();
        } else if (pat_.is(Kind::Block)) {
            for (const auto& d : prog_.kids) {
                if (!d.is(Kind::Method) || !d.kids[3].is(Kind::Block)) continue;
                AbsolutePosition pos;
                pos.method = d.text;
                stmts(d.kids[3], pos);
            }
        } else {
            exprs();
        }
        return std::move(out_);
    }

private:
    const Environment& base_;
    const Program& prog_;
    const Node& pat_;
    Matcher m_;
    std::vector<Match> out_;

    void emit(Environment env, Site site) {
        const std::string& method = site.pos.method;
        if (!add_context(env, prog_, method)) return;
        env.positions["@m"] = site.pos;
        if (auto s = site_start(prog_, method)) env.positions["@s"] = *s;
        if (auto e = site_end(prog_, method)) env.positions["@e"] = *e;
        out_.push_back(Match{std::move(env), std::move(site)});
    }

    void decls() {
        std::size_t k = pat_.size();
        if (k == 0) return;
        for (std::size_t i = 0; i + k <= prog_.size(); ++i) {
            Envs envs{base_};
            for (std::size_t j = 0; j < k && !envs.empty(); ++j) {
                Envs next;
                for (auto& e : envs)
                    for (auto& r : m_.node(pat_.kids[j], prog_.kids[i + j], std::move(e))) next.push_back(std::move(r));
                envs = std::move(next);
            }
            for (auto& e : envs) {
                Site s;
                s.kind = Site::Kind::Decl;
                s.pos.method = prog_.kids[i].text;
                s.pos.decl = true;
                s.pos.length = static_cast<int>(k);
                s.decl_index = i;
                emit(std::move(e), std::move(s));
            }
        }
    }

    void stmts(const Node& block, AbsolutePosition pos) {
        const auto& ps = pat_.kids;
        for (std::size_t i = 0; i <= block.size(); ++i) {
            if (ps.empty()) {
                Site s;
                s.pos = pos;
                s.pos.index = static_cast<int>(i);
                emit(base_, std::move(s));
            } else if (i < block.size() && !(block.kids[i].is(Kind::Marker) && !ps[0].is(Kind::Marker) &&
                                              !ps[0].is(Kind::Ellipsis))) {
                for (auto& [env, end] : m_.prefix(ps, block.kids, i, base_)) {
                    if (end == i) continue;
                    Site s;
                    s.pos = pos;
                    s.pos.index = static_cast<int>(i);
                    s.pos.length = static_cast<int>(end - i);
                    emit(std::move(env), std::move(s));
                }
            }
            if (i < block.size() && block.kids[i].is(Kind::If)) {
                for (int br = 0; br < 2; ++br) {
                    AbsolutePosition inner = pos;
                    inner.block.push_back(static_cast<int>(i));
                    inner.block.push_back(br);
                    stmts(block.kids[i].kids[static_cast<std::size_t>(br) + 1], inner);
                }
            }
        }
    }

    void sub(const Node& n, std::vector<std::size_t>& path, const Site& at) {
        if (is_expr(n.kind)) {
            for (auto& e : m_.node(pat_, n, base_)) {
                Site s = at;
                s.kind = Site::Kind::Expr;
                s.path = path;
                emit(std::move(e), std::move(s));
            }
        }
        for (std::size_t i = 0; i < n.size(); ++i) {
            const Node& k = n.kids[i];
            if (k.is(Kind::Block) || k.is(Kind::Lhs) || k.is(Kind::Locals) || k.is(Kind::Binders)) continue;
            path.push_back(i);
            sub(k, path, at);
            path.pop_back();
        }
    }

    void block_exprs(const Node& block, AbsolutePosition pos) {
        for (std::size_t i = 0; i < block.size(); ++i) {
            Site at;
            at.pos = pos;
            at.pos.index = static_cast<int>(i);
            at.pos.length = 1;
            std::vector<std::size_t> path;
            sub(block.kids[i], path, at);
            if (block.kids[i].is(Kind::If)) {
                for (int br = 0; br < 2; ++br) {
                    AbsolutePosition inner = pos;
                    inner.block.push_back(static_cast<int>(i));
                    inner.block.push_back(br);
                    block_exprs(block.kids[i].kids[static_cast<std::size_t>(br) + 1], inner);
                }
            }
        }
    }

    void exprs() {
        for (std::size_t di = 0; di < prog_.size(); ++di) {
            const Node& d = prog_.kids[di];
            if (!is_callable(d)) continue;
            Site at;
            at.kind = Site::Kind::Expr;
            at.pos.method = d.text;
            at.pos.decl = true;
            at.decl_index = di;
            std::vector<std::size_t> path;
            if (d.kids[2].is(Kind::Clauses)) {
                for (std::size_t ci = 0; ci < d.kids[2].size(); ++ci) {
                    const Node& c = d.kids[2].kids[ci];
                    if (c.is(Kind::Modifies)) continue;
                    path = {2, ci, 0};
                    sub(c.kids[0], path, at);
                }
            }
            if (d.is(Kind::Function) && !d.kids[3].is(Kind::None)) {
                path = {3};
                sub(d.kids[3], path, at);
            }
            if (d.is(Kind::Method) && d.kids[3].is(Kind::Block)) {
                AbsolutePosition pos;
                pos.method = d.text;
                block_exprs(d.kids[3], pos);
            }
        }
    }
};

} // namespace

std::vector<Match> pmatch(const Environment& base, const Program& p, const Node& pattern) {
    return Enumerator(base, p, pattern).run();
}

std::vector<Environment> match_node(const Environment& base, const Node& pattern, const Node& target) {
    Matcher m;
    return m.node(pattern, target, base);
}

} // namespace dtac
