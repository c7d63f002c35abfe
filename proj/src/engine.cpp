#include "dtac/engine.hpp"

#include <functional>

#include "dtac/error.hpp"
#include "dtac/printer.hpp"

namespace dtac {

namespace {

struct BudgetExceeded {};

// Constraints a call or `when` places on the first primitive step it reaches.
struct Head {
    std::map<std::string, Node> pinned;
    std::vector<std::vector<PosRef>> positions;
    std::vector<Prop> props;
};

std::string one_line(const std::string& s, std::size_t limit = 120) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == '\n' || c == ' ' || c == '\t') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    if (out.size() > limit) out = out.substr(0, limit - 3) + "...";
    return out;
}

std::string decl_name(const Node& term, const Environment& env) {
    if (term.is(Kind::MetaVar)) {
        const Node* b = env.var(term.text);
        if (!b) return {};
        if (b->is(Kind::Fragment) && b->size() == 1) return b->kids[0].text;
        return b->is(Kind::Var) ? b->text : std::string();
    }
    return term.is(Kind::Var) ? term.text : std::string();
}

std::shared_ptr<const Prop> substitute_prop(const Prop& p, const std::map<std::string, Node>& vars) {
    auto out = std::make_shared<Prop>(p);
    out->term = substitute(p.term, vars);
    out->pattern = substitute(p.pattern, vars);
    if (p.inner) out->inner = substitute_prop(*p.inner, vars);
    return out;
}

class Run {
public:
    using Cont = std::function<bool(const Environment&, const Program&)>;

    Run(const Library& lib, const EvalOptions& opts) : lib_(lib), opts_(opts) {}

    bool eval(const Environment& env, const Program& p, const Trans& t, const Head& head, const Cont& k) {
        switch (t.tag) {
        case Trans::Tag::Rule:
        case Trans::Tag::Match:
            return primitive(env, p, t, head, k);
        case Trans::Tag::Seq: {
            const Trans& second = *t.second;
            return eval(env, p, *t.first, head,
                        [&](const Environment& e2, const Program& p2) { return eval(e2, p2, second, Head{}, k); });
        }
        case Trans::Tag::Or:
            return eval(env, p, *t.first, head, k) || eval(env, p, *t.second, head, k);
        case Trans::Tag::When: {
            Head h = head;
            h.props.push_back(*t.prop);
            return eval(env, p, *t.first, h, k);
        }
        case Trans::Tag::Call:
            return call(env, p, t, head, k);
        }
        return false;
    }

    void fail(const std::string& msg) {
        if (failure_.empty() || depth_ > failure_depth_) {
            failure_ = msg;
            failure_depth_ = depth_;
        }
    }

    const std::string& failure() const { return failure_; }
    const std::vector<TraceEntry>& path() const { return path_; }

private:
    const Library& lib_;
    const EvalOptions& opts_;
    std::vector<std::string> names_;
    std::vector<TraceEntry> path_;
    std::size_t steps_ = 0;
    std::size_t depth_ = 0;
    std::string failure_;
    std::size_t failure_depth_ = 0;

    std::string who() const { return names_.empty() ? std::string("rule") : names_.back(); }

    bool add_inst(Head& h, const InstSpec& inst, const Environment& env) {
        std::vector<PosRef> positions;
        for (const auto& it : inst) {
            if (it.is_position) {
                positions.push_back(it.pos);
                continue;
            }
            try {
                Environment plain = env;
                plain.captures.clear();
                h.pinned[it.var] = instantiate(it.code, plain);
            } catch (const EvalError& e) {
                fail(who() + ": cannot instantiate " + it.var + ": " + e.what());
                return false;
            }
        }
        if (!positions.empty()) h.positions.push_back(std::move(positions));
        return true;
    }

    bool call(const Environment& env, const Program& p, const Trans& t, const Head& head, const Cont& k) {
        const TacticDef* d = lib_.find(t.name);
        if (!d) throw EvalError("undefined tactic '" + t.name + "'");
        if (t.args.size() > d->formals.size())
            throw EvalError("tactic '" + t.name + "' takes " + std::to_string(d->formals.size()) + " arguments, got " +
                            std::to_string(t.args.size()));
        std::map<std::string, Node> formals;
        for (std::size_t i = 0; i < d->formals.size(); ++i) {
            const Formal& f = d->formals[i];
            if (i < t.args.size()) {
                formals["?" + f.name] = substitute(t.args[i], env.vars);
            } else if (f.fallback) {
                formals["?" + f.name] = substitute(*f.fallback, env.vars);
            } else {
                throw EvalError("tactic '" + t.name + "' is missing argument " + f.name);
            }
        }
        if (names_.size() >= opts_.max_unfold) throw EvalError("unfolding '" + t.name + "' exceeds the depth limit");
        Head h = head;
        if (!add_inst(h, t.inst, env)) return false;
        Trans body = substitute_trans(*d->body, formals);
        names_.push_back(d->name);
        Cont after = [&](const Environment& e2, const Program& p2) {
            std::string name = names_.back();
            names_.pop_back();
            bool r = k(e2, p2);
            names_.push_back(name);
            return r;
        };
        bool r = eval(env, p, body, h, after);
        names_.pop_back();
        return r;
    }

    // `pinned` means the head fixes ?meth, so @start/@end refer to that method.
    std::vector<AbsolutePosition> resolve(const PosRef& r, const Environment& env, const Program& p,
                                          const std::string& method, bool pinned) {
        switch (r.tag) {
        case PosRef::Tag::Named: {
            std::string key = "@" + r.name;
            const AbsolutePosition* bound = env.position(key);
            if (r.name == "start" || r.name == "end") {
                bool start = r.name == "start";
                if (bound && pinned && bound->method != method) bound = nullptr;
                std::string m = bound ? bound->method : method;
                if (bound && !bound->decl) return {*bound};
                return {start ? method_start(p, m) : method_end(p, m)};
            }
            if (bound) return {*bound};
            if (auto a = find_anchor(p, r.name)) return {*a};
            throw PositionError("no position @" + r.name);
        }
        case PosRef::Tag::Line: {
            std::vector<AbsolutePosition> out;
            for (int l : r.lines) out.push_back(position_of_line(p, l));
            return out;
        }
        case PosRef::Tag::Up:
        case PosRef::Tag::Down: {
            std::vector<AbsolutePosition> out;
            for (const auto& a : resolve(*r.inner, env, p, method, pinned))
                out.push_back(move(p, a, r.tag == PosRef::Tag::Up ? Direction::Up : Direction::Down));
            return out;
        }
        }
        return {};
    }

    bool admitted(const Head& h, const Environment& env, const Program& p, const AbsolutePosition& site) {
        for (const auto& alts : h.positions) {
            bool any = false;
            for (const auto& ref : alts) {
                try {
                    for (const auto& a : resolve(ref, env, p, site.method, h.pinned.count("?meth") > 0)) {
                        if (admits(p, a, site)) {
                            any = true;
                            break;
                        }
                    }
                } catch (const PositionError& e) {
                    fail(who() + ": " + e.what());
                }
                if (any) break;
            }
            if (!any) return false;
        }
        return true;
    }

    std::vector<Environment> prop_holds(const Prop& pr, const Environment& env, const Program& p) {
        switch (pr.tag) {
        case Prop::Tag::IsPublic:
        case Prop::Tag::IsPrivate:
        case Prop::Tag::IsGenerated:
        case Prop::Tag::IsGhost: {
            std::string name = decl_name(pr.term, env);
            const Node* d = name.empty() ? nullptr : find_decl(p, name);
            if (!d) {
                fail(who() + ": cannot resolve " + print_expr(pr.term) + " in when-clause");
                return {};
            }
            bool v = false;
            if (pr.tag == Prop::Tag::IsPublic) v = d->vis == Visibility::Public;
            if (pr.tag == Prop::Tag::IsPrivate) v = d->vis == Visibility::Private;
            if (pr.tag == Prop::Tag::IsGenerated) v = d->vis == Visibility::Generated;
            if (pr.tag == Prop::Tag::IsGhost) v = d->ghost() || d->vis == Visibility::Generated;
            if (!v) return {};
            return {env};
        }
        case Prop::Tag::Not:
            if (!prop_holds(*pr.inner, env, p).empty()) return {};
            return {env};
        case Prop::Tag::ErrorEquals: {
            const Node* e = env.var("?error");
            if (!e || e->text != pr.text) return {};
            return {env};
        }
        case Prop::Tag::PatternEquals: {
            const Node* value = &pr.term;
            if (pr.term.is(Kind::MetaVar)) {
                value = env.var(pr.term.text);
                if (!value) return {};
            }
            auto envs = match_node(env, pr.pattern, *value);
            for (auto& e : envs) e.captures = env.captures;
            return envs;
        }
        }
        return {};
    }

    std::vector<Environment> props(const std::vector<Prop>& ps, const Environment& env, const Program& p) {
        std::vector<Environment> envs{env};
        for (const auto& pr : ps) {
            std::vector<Environment> next;
            for (const auto& e : envs)
                for (auto& r : prop_holds(pr, e, p)) next.push_back(std::move(r));
            envs = std::move(next);
            if (envs.empty()) break;
        }
        return envs;
    }

    bool primitive(const Environment& env, const Program& p, const Trans& t, const Head& head, const Cont& k) {
        Head h = head;
        if (!add_inst(h, t.inst, env)) return false;
        Environment base = flush(env);
        for (const char* ctx : {"?meth", "?pre", "?post", "?arg"}) base.vars.erase(ctx);
        for (const auto& [name, v] : h.pinned) base.vars[name] = v;
        if (++steps_ > opts_.step_budget) throw BudgetExceeded{};
        std::vector<Match> ms = pmatch(base, p, t.lhs);
        bool candidate = false;
        bool props_failed = false;
        for (const auto& m : ms) {
            if (!admitted(h, env, p, m.site.pos)) continue;
            auto envs = props(h.props, m.env, p);
            if (envs.empty()) {
                props_failed = true;
                continue;
            }
            for (auto& e : envs) {
                candidate = true;
                Program np;
                AbsolutePosition site;
                Environment out = e;
                out.captures.clear();
                if (t.tag == Trans::Tag::Rule) {
                    try {
                        Applied a = apply_rule(p, Match{e, m.site}, t.rhs);
                        np = std::move(a.program);
                        site = std::move(a.site);
                    } catch (const EvalError& ex) {
                        fail(who() + ": " + ex.what());
                        continue;
                    }
                    out.positions.erase("@start");
                    out.positions.erase("@end");
                    if (auto s = site_start(np, site.method)) out.positions["@start"] = *s;
                    if (auto en = site_end(np, site.method)) out.positions["@end"] = *en;
                } else {
                    np = p;
                    site = m.site.pos;
                    out.positions.erase("@start");
                    out.positions.erase("@end");
                    if (const auto* s = e.position("@s")) out.positions["@start"] = *s;
                    if (const auto* en = e.position("@e")) out.positions["@end"] = *en;
                }
                out.positions["@pos"] = site;
                std::string summary = t.tag == Trans::Tag::Rule
                                          ? one_line(print_node(t.lhs)) + " =>> " + one_line(print_node(t.rhs))
                                          : "match " + one_line(print_node(t.lhs));
                path_.push_back(TraceEntry{who(), to_string(m.site.pos), one_line(summary)});
                ++depth_;
                bool r = k(out, np);
                --depth_;
                path_.pop_back();
                if (r) return true;
            }
        }
        if (!candidate) {
            std::string what = t.tag == Trans::Tag::Rule ? "rule" : "match";
            if (props_failed)
                fail(who() + ": when-clause does not hold at any match of `" + one_line(print_node(t.lhs)) + "`");
            else
                fail(who() + ": no admissible " + what + " for `" + one_line(print_node(t.lhs)) + "`");
        }
        return false;
    }
};

} // namespace

Engine::Engine(const Library& lib, const VerifierOracle& oracle, EvalOptions opts)
    : lib_(lib), oracle_(oracle), opts_(opts) {}

RunResult Engine::run(const Program& p, const Trans& t, const Environment& carried) const {
    RunResult res;
    res.program = p;
    Environment base = carried;
    base.vars.erase("?error");
    base.vars.erase("?err_arg");
    base.positions.erase("@err_pos");
    base.captures.clear();
    std::vector<Environment> starts;
    for (const auto& e : oracle_.errors(p)) {
        Environment s = base;
        Environment ee = error_env(e);
        for (auto& [k, v] : ee.vars) s.vars[k] = v;
        for (auto& [k, v] : ee.positions) s.positions[k] = v;
        starts.push_back(std::move(s));
    }
    if (starts.empty()) starts.push_back(base);

    Run run(lib_, opts_);
    try {
        for (const auto& s : starts) {
            bool ok = run.eval(s, p, t, Head{}, [&](const Environment& e2, const Program& p2) {
                auto errors = typecheck(p2);
                if (!errors.empty()) {
                    run.fail("result does not typecheck: " + errors.front().message);
                    return false;
                }
                GuardReport g = check_guard(p, p2);
                if (!g.ok) {
                    res.guard = g;
                    run.fail("refactoring guard rejected the result: " + format_report(g));
                    return false;
                }
                res.program = p2;
                res.env = e2;
                res.guard = g;
                res.trace = run.path();
                return true;
            });
            if (ok) {
                res.ok = true;
                return res;
            }
        }
    } catch (const BudgetExceeded&) {
        res.failure = "search exceeded the step budget of " + std::to_string(opts_.step_budget);
        return res;
    } catch (const EvalError& e) {
        res.failure = e.what();
        return res;
    } catch (const PositionError& e) {
        res.failure = e.what();
        return res;
    }
    res.failure = run.failure().empty() ? "no applicable match" : run.failure();
    return res;
}

Trans substitute_trans(const Trans& t, const std::map<std::string, Node>& vars) {
    Trans out = t;
    out.lhs = substitute(t.lhs, vars);
    out.rhs = substitute(t.rhs, vars);
    for (auto& a : out.args) a = substitute(a, vars);
    for (auto& it : out.inst)
        if (!it.is_position) it.code = substitute(it.code, vars);
    if (t.first) out.first = std::make_shared<Trans>(substitute_trans(*t.first, vars));
    if (t.second) out.second = std::make_shared<Trans>(substitute_trans(*t.second, vars));
    if (t.prop) out.prop = substitute_prop(*t.prop, vars);
    return out;
}

std::string describe(const Trans& t) { return one_line(print_trans(t), 200); }

} // namespace dtac
