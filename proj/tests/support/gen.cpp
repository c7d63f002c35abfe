#include "gen.hpp"

#include "dtac/parser.hpp"
#include "dtac/projection.hpp"

namespace dtac::testgen {

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (const auto& s : v) {
        if (!out.empty()) out += sep;
        out += s;
    }
    return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Parses statements in a throwaway method and returns them.
std::vector<Node> parse_stmts(const std::string& text) {
    Program p = parse_program("method Tmp__() { " + text + " }");
    return p.kids[0].kids[3].kids;
}

Node parse_clause(const std::string& text) {
    Program p = parse_program("method Tmp__() " + text + " { }");
    return p.kids[0].kids[2].kids[0];
}

bool user(const Node& d) { return is_callable(d) && d.vis != Visibility::Generated; }

// Every block of a method body with the method it belongs to.
void blocks(Node& n, std::vector<Node*>& out) {
    if (n.is(Kind::Block)) out.push_back(&n);
    for (auto& k : n.kids) blocks(k, out);
}

struct BlockRef {
    Node* block;
    Node* decl;
};

std::vector<BlockRef> body_blocks(Program& p, bool compiled_only) {
    std::vector<BlockRef> out;
    for (auto& d : p.kids) {
        if (!d.is(Kind::Method) || !d.kids[3].is(Kind::Block) || d.vis == Visibility::Generated) continue;
        if (compiled_only && is_ghost_decl(d)) continue;
        std::vector<Node*> bs;
        blocks(d.kids[3], bs);
        for (auto* b : bs) out.push_back({b, &d});
    }
    return out;
}

std::vector<std::string> param_names(const Node& d) {
    std::vector<std::string> out;
    for (const auto& prm : d.kids[0].kids) out.push_back(prm.text);
    return out;
}

std::vector<std::string> result_names(const Node& d) {
    std::vector<std::string> out;
    if (d.is(Kind::Method) && d.kids[1].is(Kind::Params))
        for (const auto& prm : d.kids[1].kids) out.push_back(prm.text);
    return out;
}

// Whether any call or application names `name`.
bool referenced(const Program& p, const std::string& name) {
    bool found = false;
    walk(p, [&](const Node& n) {
        if ((n.is(Kind::CallStmt) || n.is(Kind::App)) && n.text == name) found = true;
    });
    return found;
}

bool compiled_stmt(const Node& s) {
    if (s.is(Kind::Assign) || s.is(Kind::If)) return true;
    return s.is(Kind::VarDecl) && !s.ghost();
}

} // namespace

std::string Gen::int_expr(const std::vector<std::string>& vars, int depth, bool ghost) {
    if (depth <= 0 || chance(0.3)) {
        if (!vars.empty() && chance(0.6)) return choose(vars);
        return std::to_string(pick(10));
    }
    auto sub = [&] { return int_expr(vars, depth - 1, ghost); };
    switch (pick(ghost ? 6 : 5)) {
    case 0:
    case 1:
    case 2: {
        static const std::vector<std::string> ops = {"+", "-", "*"};
        std::string e = sub() + " " + choose(ops) + " " + sub();
        return chance(0.6) ? "(" + e + ")" : e;
    }
    case 3:
        return "-" + (chance(0.5) ? "(" + sub() + ")" : std::to_string(pick(10)));
    case 4:
        return "g0(" + sub() + ")";
    default:
        return "f0(" + sub() + ")";
    }
}

std::string Gen::bool_expr(const std::vector<std::string>& vars, int depth, bool ghost) {
    static const std::vector<std::string> cmp = {"==", "!=", "<", "<=", ">", ">="};
    if (depth <= 0 || chance(0.25)) {
        if (chance(0.1)) return chance(0.5) ? "true" : "false";
        return int_expr(vars, 1, ghost) + " " + choose(cmp) + " " + int_expr(vars, 1, ghost);
    }
    auto sub = [&] { return bool_expr(vars, depth - 1, ghost); };
    switch (pick(ghost ? 7 : 5)) {
    case 0:
    case 1: {
        static const std::vector<std::string> ops = {"&&", "||", "==>"};
        std::string e = sub() + " " + choose(ops) + " " + sub();
        return chance(0.6) ? "(" + e + ")" : e;
    }
    case 2:
        return "!(" + sub() + ")";
    case 3:
    case 4:
        return int_expr(vars, depth - 1, ghost) + " " + choose(cmp) + " " + int_expr(vars, depth - 1, ghost);
    case 5:
        return "p0(" + int_expr(vars, depth - 1, ghost) + ")";
    default: {
        std::string k = "k" + std::to_string(fresh_++);
        std::string body = bool_expr(concat(vars, {k}), depth - 1, ghost);
        return std::string("(") + (chance(0.5) ? "forall " : "exists ") + k + (chance(0.5) ? ": int" : "") +
               " :: " + body + ")";
    }
    }
}

std::string Gen::block(const MethodInfo& m, std::vector<std::string> vars, std::vector<std::string> ghosts,
                       int depth, GenProgram& g, const std::string& indent) {
    std::string out;
    int n = 1 + pick(4);
    for (int i = 0; i < n; ++i) {
        auto all = concat(vars, ghosts);
        int choice = pick(8);
        if (m.ghost && (choice == 0 || choice == 1)) choice = 5;  // no compiled statements in ghost code
        switch (choice) {
        case 0: {
            std::string v = "v" + std::to_string(fresh_++);
            out += indent + "var " + v + ": int := " + int_expr(vars, 2, false) + ";\n";
            vars.push_back(v);
            break;
        }
        case 1: {
            std::vector<std::string> targets;
            for (const auto& v : vars)
                if (v[0] == 'v' || v[0] == 'r') targets.push_back(v);
            if (targets.empty()) break;
            out += indent + choose(targets) + " := " + int_expr(vars, 2, false) + ";\n";
            break;
        }
        case 2:
            out += indent + "assert " + bool_expr(all, 2, true) + ";\n";
            break;
        case 3:
            if (depth > 0) {
                out += indent + "if (" + bool_expr(m.ghost ? all : vars, 1, m.ghost) + ") {\n";
                out += block(m, vars, ghosts, depth - 1, g, indent + "  ");
                out += indent + "} else {\n";
                out += block(m, vars, ghosts, depth - 1, g, indent + "  ");
                out += indent + "}\n";
            }
            break;
        case 4:
            if (!g.lemmas.empty()) out += indent + choose(g.lemmas) + "(" + int_expr(all, 1, true) + ");\n";
            break;
        case 5: {
            std::string v = "w" + std::to_string(fresh_++);
            out += indent + (m.ghost ? "var " : "ghost var ") + v + ": int := " + int_expr(all, 2, true) + ";\n";
            ghosts.push_back(v);
            break;
        }
        default: {
            std::string name = "m" + std::to_string(markers_++);
            out += indent + "/*@" + name + "*/\n";
            g.markers.push_back({name, m.name});
            break;
        }
        }
    }
    return out;
}

GenProgram Gen::program() {
    GenProgram g;
    markers_ = 0;
    std::string& t = g.text;
    if (chance(0.5)) t += "datatype Color = Red | Green | Blue(shade: int)\n\n";
    if (chance(0.3)) t += "class Box {\n  var w: int;\n  var ok: bool;\n}\n\n";
    t += "function f0(a: int): int\n{\n  " + int_expr({"a"}, 2, true) + "\n}\n\n";
    t += "function method g0(a: int): int\n{\n  " + int_expr({"a"}, 1, false) + "\n}\n\n";
    t += "predicate p0(a: int)\n{\n  " + bool_expr({"a"}, 1, false) + "\n}\n\n";

    std::vector<MethodInfo> methods;
    if (chance(0.6)) {
        methods.push_back({"Gen0", Visibility::Generated, true, {"n"}, {}});
        t += "/*generated*/ ghost method Gen0(n: int)\n  requires n >= 0\n{\n}\n\n";
    }
    int lemmas = pick(3);
    for (int i = 0; i < lemmas; ++i) {
        MethodInfo m{"L" + std::to_string(i), Visibility::Private, true, {"x"}, {}};
        t += "ghost method " + m.name + "(x: int)\n";
        if (chance(0.5)) t += "  requires " + bool_expr({"x"}, 1, true) + "\n";
        if (chance(0.5)) t += "  ensures " + bool_expr({"x"}, 1, true) + "\n";
        t += "{\n" + block(m, {"x"}, {}, 1, g, "  ") + "}\n\n";
        g.lemmas.push_back(m.name);
        methods.push_back(m);
    }
    int count = 1 + pick(3);
    for (int i = 0; i < count; ++i) {
        MethodInfo m{"M" + std::to_string(i), chance(0.5) ? Visibility::Public : Visibility::Private, false, {}, {}};
        int np = 1 + pick(3);
        for (int k = 0; k < np; ++k) m.params.push_back(std::string(1, static_cast<char>('x' + k)));
        int nr = 1 + pick(2);
        for (int k = 0; k < nr; ++k) m.returns.push_back("r" + std::to_string(k));
        std::vector<std::string> ps, rs;
        for (const auto& p : m.params) ps.push_back(p + ": int");
        for (const auto& r : m.returns) rs.push_back(r + ": int");
        t += std::string(m.vis == Visibility::Public ? "public " : (chance(0.5) ? "private " : "")) + "method " +
             m.name + "(" + join(ps, ", ") + ") returns (" + join(rs, ", ") + ")\n";
        for (int k = pick(3); k > 0; --k) t += "  requires " + bool_expr(m.params, 2, true) + "\n";
        int ne = (m.vis == Visibility::Public ? 1 : 0) + pick(2);
        for (int k = 0; k < ne; ++k) t += "  ensures " + bool_expr(concat(m.params, m.returns), 2, true) + "\n";
        t += "{\n" + block(m, concat(m.params, m.returns), {}, 2, g, "  ");
        if (i > 0 && chance(0.4)) {
            // Call an earlier compiled method with a single result.
            const MethodInfo& callee = methods[methods.size() - 1 - static_cast<std::size_t>(pick(i))];
            if (!callee.ghost && callee.returns.size() == 1) {
                std::vector<std::string> args;
                for (std::size_t k = 0; k < callee.params.size(); ++k) args.push_back(int_expr(m.params, 1, false));
                t += "  var c" + std::to_string(fresh_++) + ": int := " + callee.name + "(" + join(args, ", ") + ");\n";
            }
        }
        for (const auto& r : m.returns) t += "  " + r + " := " + int_expr(m.params, 2, false) + ";\n";
        t += "}\n\n";
        methods.push_back(m);
    }
    g.methods = std::move(methods);
    return g;
}

std::string Gen::invocation(const GenProgram& g) {
    auto simple = [&]() -> std::string {
        std::vector<const MethodInfo*> bodies;
        for (const auto& m : g.methods)
            if (m.vis != Visibility::Generated) bodies.push_back(&m);
        const MethodInfo& m = *choose(bodies);
        std::string meth = "?meth := " + m.name;
        auto pinned = [&](const std::string& s) { return chance(0.7) ? s + "[" + meth + "]" : s; };
        switch (pick(20)) {
        case 0:
        case 1:
            if (!g.markers.empty()) {
                const auto& mk = choose(g.markers);
                const MethodInfo* owner = &m;
                for (const auto& x : g.methods)
                    if (x.name == mk.method) owner = &x;
                return "assert-I(" + bool_expr(owner->params, 1, true) + ")[@" + mk.name + "]";
            }
            [[fallthrough]];
        case 2:
            return "assert-I(" + bool_expr(m.params, 1, true) + ")[" + (chance(0.5) ? "@start" : "@end") + ", " +
                   meth + "]";
        case 3: return pinned("assert-E()");
        case 4: return pinned("assert-up()");
        case 5: return pinned(choose(std::vector<std::string>{"assert-up1()", "assert-up2()", "assert-up3()"}));
        case 6: return pinned("assert-down()");
        case 7: return pinned("assert-conj-I()");
        case 8: return pinned(choose(std::vector<std::string>{"assert-strengthen()", "assert-comb1()", "assert-up-ctxt()"}));
        case 9: return "post-I(" + bool_expr(concat(m.params, m.returns), 1, true) + ")[" + meth + "]";
        case 10: return "pre-I(" + bool_expr(m.params, 1, true) + ")[" + meth + "]";
        case 11: return pinned(chance(0.5) ? "pre-E()" : "post-E()");
        case 12: return pinned("post-to-assert()");
        case 13: return "assert-to-pre()[" + meth + "]";
        case 14: return "assert-to-post()";
        case 15: return "post-to-post()";
        case 16:
            if (!g.methods.empty() && g.methods[0].vis == Visibility::Generated)
                return chance(0.5) ? "case-I()[?meth := Gen0]" : "IH-I()";
            return pinned("assert-E()");
        case 17:
            if (!g.lemmas.empty() && !g.markers.empty())
                return "call-I(" + choose(g.lemmas) + ", " + std::to_string(pick(5)) + ")[@" + choose(g.markers).name + "]";
            return pinned("assert-up()");
        case 18:
            if (!g.markers.empty()) {
                std::string v = "z" + std::to_string(fresh_++);
                return "pred-var-I(" + v + ", " + v + " > " + std::to_string(pick(5)) + ")[@" +
                       choose(g.markers).name + "]";
            }
            [[fallthrough]];
        default:
            if (!g.markers.empty())
                return "ex-E(q" + std::to_string(fresh_++) + ", exists y :: y > 1)[@" + choose(g.markers).name + "]";
            return pinned("assert-down()");
        }
    };
    int shape = pick(10);
    if (shape == 0) return simple() + " ; " + simple();
    if (shape == 1) return "or(" + simple() + ", " + simple() + ")";
    return simple();
}

Program Gen::legal_edit(const Program& original, const GenProgram& g) {
    Program p = original;
    int edits = 1 + pick(3);
    for (int e = 0; e < edits; ++e) {
        switch (pick(10)) {
        case 0: {  // insert an assertion
            auto bs = body_blocks(p, false);
            if (bs.empty()) break;
            auto& b = bs[static_cast<std::size_t>(pick(static_cast<int>(bs.size())))];
            auto s = parse_stmts("assert " + bool_expr(param_names(*b.decl), 2, true) + ";");
            auto& kids = b.block->kids;
            kids.insert(kids.begin() + pick(static_cast<int>(kids.size()) + 1), s[0]);
            break;
        }
        case 1: {  // remove an assertion
            std::vector<std::pair<Node*, std::size_t>> asserts;
            for (auto& b : body_blocks(p, false))
                for (std::size_t i = 0; i < b.block->kids.size(); ++i)
                    if (b.block->kids[i].is(Kind::Assert)) asserts.push_back({b.block, i});
            if (asserts.empty()) break;
            auto [blk, i] = asserts[static_cast<std::size_t>(pick(static_cast<int>(asserts.size())))];
            blk->kids.erase(blk->kids.begin() + static_cast<long>(i));
            break;
        }
        case 2: {  // insert a marker
            auto bs = body_blocks(p, false);
            if (bs.empty()) break;
            auto& kids = bs[static_cast<std::size_t>(pick(static_cast<int>(bs.size())))].block->kids;
            kids.insert(kids.begin() + pick(static_cast<int>(kids.size()) + 1),
                        make_marker("edit" + std::to_string(fresh_++)));
            break;
        }
        case 3: {  // precondition on a non-public declaration
            std::vector<Node*> ds;
            for (auto& d : p.kids)
                if (d.is(Kind::Method) && d.vis != Visibility::Public) ds.push_back(&d);
            if (ds.empty()) break;
            Node& d = *ds[static_cast<std::size_t>(pick(static_cast<int>(ds.size())))];
            d.kids[2].kids.push_back(parse_clause("requires " + bool_expr(param_names(d), 2, true)));
            break;
        }
        case 4:
        case 5: {  // drop any precondition, or a postcondition of a non-public method
            bool pre = chance(0.5);
            std::vector<std::pair<Node*, std::size_t>> cs;
            for (auto& d : p.kids) {
                if (!d.is(Kind::Method)) continue;
                if (!pre && d.vis == Visibility::Public) continue;
                for (std::size_t i = 0; i < d.kids[2].kids.size(); ++i)
                    if (d.kids[2].kids[i].is(pre ? Kind::Requires : Kind::Ensures)) cs.push_back({&d, i});
            }
            if (cs.empty()) break;
            auto [d, i] = cs[static_cast<std::size_t>(pick(static_cast<int>(cs.size())))];
            d->kids[2].kids.erase(d->kids[2].kids.begin() + static_cast<long>(i));
            break;
        }
        case 6: {  // postcondition on any method
            std::vector<Node*> ds;
            for (auto& d : p.kids)
                if (d.is(Kind::Method)) ds.push_back(&d);
            Node& d = *ds[static_cast<std::size_t>(pick(static_cast<int>(ds.size())))];
            d.kids[2].kids.push_back(
                parse_clause("ensures " + bool_expr(concat(param_names(d), result_names(d)), 2, true)));
            break;
        }
        case 7: {  // new generated lemma
            Program extra = parse_program("/*generated*/ ghost method GenE" + std::to_string(fresh_++) +
                                          "(n: int)\n  requires n >= 0\n{\n  assert n + 1 > 0;\n}\n");
            p.kids.push_back(extra.kids[0]);
            break;
        }
        case 8: {  // ghost variable
            auto bs = body_blocks(p, false);
            if (bs.empty()) break;
            auto& b = bs[static_cast<std::size_t>(pick(static_cast<int>(bs.size())))];
            auto s = parse_stmts(std::string(is_ghost_decl(*b.decl) ? "var" : "ghost var") + " ge" +
                                 std::to_string(fresh_++) + ": int := " + int_expr(param_names(*b.decl), 2, true) + ";");
            auto& kids = b.block->kids;
            kids.insert(kids.begin() + pick(static_cast<int>(kids.size()) + 1), s[0]);
            break;
        }
        default: {  // lemma call
            if (g.lemmas.empty()) break;
            auto bs = body_blocks(p, false);
            if (bs.empty()) break;
            auto& b = bs[static_cast<std::size_t>(pick(static_cast<int>(bs.size())))];
            auto s = parse_stmts(choose(g.lemmas) + "(" + int_expr(param_names(*b.decl), 1, true) + ");");
            auto& kids = b.block->kids;
            kids.insert(kids.begin() + pick(static_cast<int>(kids.size()) + 1), s[0]);
            break;
        }
        }
    }
    return p;
}

std::optional<Gen::Mutation> Gen::mutate(const Program& original, const GenProgram&) {
    Program p = original;
    auto pick_decl = [&](auto pred) -> Node* {
        std::vector<Node*> ds;
        for (auto& d : p.kids)
            if (pred(d)) ds.push_back(&d);
        return ds.empty() ? nullptr : ds[static_cast<std::size_t>(pick(static_cast<int>(ds.size())))];
    };
    auto compiled_method = [](const Node& d) {
        return d.is(Kind::Method) && user(d) && !is_ghost_decl(d) && d.kids[3].is(Kind::Block);
    };
    auto public_method = [](const Node& d) { return d.is(Kind::Method) && d.vis == Visibility::Public; };

    switch (pick(10)) {
    case 0: {  // change the last assignment of a compiled method
        Node* d = pick_decl(compiled_method);
        if (!d) return std::nullopt;
        auto& body = d->kids[3].kids;
        for (auto it = body.rbegin(); it != body.rend(); ++it) {
            if (!it->is(Kind::Assign)) continue;
            it->kids[1] = make_binary("+", it->kids[1], make_int(1));
            return Mutation{p, ViolationKind::CodeChanged, "changed assignment in " + d->text};
        }
        return std::nullopt;
    }
    case 1: {  // insert a compiled statement
        auto bs = body_blocks(p, true);
        if (bs.empty()) return std::nullopt;
        auto& b = bs[static_cast<std::size_t>(pick(static_cast<int>(bs.size())))];
        auto s = parse_stmts("var mut" + std::to_string(fresh_++) + ": int := " + std::to_string(pick(9)) + ";");
        auto& kids = b.block->kids;
        kids.insert(kids.begin() + pick(static_cast<int>(kids.size()) + 1), s[0]);
        return Mutation{p, ViolationKind::CodeChanged, "inserted compiled statement in " + b.decl->text};
    }
    case 2: {  // delete a compiled statement
        std::vector<std::pair<BlockRef, std::size_t>> sites;
        for (auto& b : body_blocks(p, true))
            for (std::size_t i = 0; i < b.block->kids.size(); ++i)
                if (compiled_stmt(b.block->kids[i])) sites.push_back({b, i});
        if (sites.empty()) return std::nullopt;
        auto [b, i] = sites[static_cast<std::size_t>(pick(static_cast<int>(sites.size())))];
        b.block->kids.erase(b.block->kids.begin() + static_cast<long>(i));
        return Mutation{p, ViolationKind::CodeChanged, "deleted compiled statement in " + b.decl->text};
    }
    case 3: {  // change a compiled function body
        Node* d = find_decl(p, "g0");
        d->kids[3] = make_binary("+", d->kids[3], make_int(1));
        return Mutation{p, ViolationKind::CodeChanged, "changed g0"};
    }
    case 4: {
        Node* d = pick_decl(public_method);
        if (!d) return std::nullopt;
        d->kids[2].kids.push_back(parse_clause("requires " + bool_expr(param_names(*d), 1, true)));
        return Mutation{p, ViolationKind::PublicPreStrengthened, "added requires to " + d->text};
    }
    case 5: {
        Node* d = pick_decl(public_method);
        if (!d) return std::nullopt;
        auto& cs = d->kids[2].kids;
        std::vector<std::size_t> ens;
        for (std::size_t i = 0; i < cs.size(); ++i)
            if (cs[i].is(Kind::Ensures)) ens.push_back(i);
        if (ens.empty()) return std::nullopt;
        cs.erase(cs.begin() + static_cast<long>(ens[static_cast<std::size_t>(pick(static_cast<int>(ens.size())))]));
        return Mutation{p, ViolationKind::PublicPostWeakened, "removed ensures from " + d->text};
    }
    case 6: {
        Node* d = pick_decl([&](const Node& x) { return user(x) && !referenced(original, x.text); });
        if (!d) return std::nullopt;
        std::string name = d->text;
        p.kids.erase(p.kids.begin() + (d - p.kids.data()));
        return Mutation{p, ViolationKind::PublicRemoved, "removed " + name};
    }
    case 7: {  // rename a parameter in the signature only
        Node* d = pick_decl([](const Node& x) { return user(x) && x.is(Kind::Method) && x.kids[0].size() > 0; });
        if (!d) return std::nullopt;
        d->kids[0].kids[0].text += "_renamed";
        return Mutation{p, ViolationKind::SignatureChanged, "renamed parameter of " + d->text};
    }
    case 8: {  // toggle ghost-ness
        Node* d = pick_decl(
            [&](const Node& x) { return user(x) && x.is(Kind::Method) && !referenced(original, x.text); });
        if (!d) return std::nullopt;
        d->flags ^= flag::Ghost;
        return Mutation{p, ViolationKind::SignatureChanged, "toggled ghost on " + d->text};
    }
    default: {  // change visibility
        Node* d = pick_decl([](const Node& x) { return user(x) && x.is(Kind::Method); });
        if (!d) return std::nullopt;
        d->vis = d->vis == Visibility::Public ? Visibility::Private : Visibility::Public;
        return Mutation{p, ViolationKind::SignatureChanged, "changed visibility of " + d->text};
    }
    }
}

} // namespace dtac::testgen
