#include <map>
#include <set>

#include "dtac/guard.hpp"
#include "dtac/printer.hpp"
#include "dtac/projection.hpp"

namespace dtac {

namespace {

const std::set<std::string> kBoolOps = {"==", "!=", "<", "<=", ">", ">=", "&&", "||", "==>", "<==>", "in", "!in"};
const std::set<std::string> kIntOps = {"-", "*", "/", "%"};

// Callable signature: parameter count, result count, result type, ghost.
struct Sig {
    Kind kind = Kind::Function;
    std::size_t arity = 0;
    std::size_t results = 0;
    std::string type;
    bool ghost = false;
    const Node* decl = nullptr;
};

class Checker {
public:
    explicit Checker(const Program& p) : p_(p) {
        for (const auto& d : p.kids) declare(d);
        // Built-in list theory used by the lemma examples.
        if (!sigs_.count("Nil")) sigs_["Nil"] = Sig{Kind::Ctor, 0, 1, "List", false, nullptr};
        if (!sigs_.count("Cons")) {
            sigs_["Cons"] = Sig{Kind::Ctor, 2, 1, "List", false, nullptr};
            fields_["head"] = "int";
            fields_["tail"] = "List";
        }
        if (!sigs_.count("length")) sigs_["length"] = Sig{Kind::Function, 1, 1, "int", true, nullptr};
    }

    std::vector<TypeError> run() {
        walk(p_, [&](const Node& n) {
            if (is_residue(n)) report("residual metavariable or pattern syntax: " + describe(n));
        });
        for (const auto& d : p_.kids) {
            method_ = d.text;
            if (is_callable(d)) callable(d);
        }
        return std::move(errors_);
    }

private:
    using Scope = std::map<std::string, std::pair<std::string, bool>>;  // name -> (type, ghost)

    const Program& p_;
    std::map<std::string, Sig> sigs_;
    std::map<std::string, std::string> fields_;
    std::vector<TypeError> errors_;
    std::string method_;
    std::vector<Scope> scopes_;

    static bool is_residue(const Node& n) {
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
            return is_metavar_name(n.text);
        }
    }

    static std::string describe(const Node& n) {
        if (!n.text.empty()) return n.text;
        return std::string(kind_name(n.kind));
    }

    void report(const std::string& msg) {
        TypeError e;
        e.position.method = method_;
        e.position.decl = true;
        e.message = msg;
        errors_.push_back(std::move(e));
    }

    void declare(const Node& d) {
        switch (d.kind) {
        case Kind::Method:
            sigs_[d.text] = Sig{Kind::Method, d.kids[0].size(),
                                d.kids[1].is(Kind::Params) ? d.kids[1].size() : 0, "", is_ghost_decl(d), &d};
            break;
        case Kind::Function:
            sigs_[d.text] = Sig{Kind::Function, d.kids[0].size(), 1,
                                d.has(flag::Predicate) ? "bool" : (d.kids[1].is(Kind::Type) ? d.kids[1].text : ""),
                                is_ghost_decl(d), &d};
            break;
        case Kind::Datatype:
            for (const auto& c : d.kids) {
                sigs_[c.text] = Sig{Kind::Ctor, c.size(), 1, d.text, false, &c};
                for (const auto& f : c.kids) fields_[f.text] = type_of_param(f);
            }
            break;
        case Kind::Class:
            for (const auto& f : d.kids) fields_[f.text] = type_of_param(f);
            break;
        default:
            break;
        }
    }

    static std::string type_of_param(const Node& p) {
        return !p.kids.empty() && p.kids[0].is(Kind::Type) ? p.kids[0].text : std::string();
    }

    void bind(const Node& local, bool ghost) { scopes_.back()[local.text] = {type_of_param(local), ghost}; }

    const std::pair<std::string, bool>* lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }

    void callable(const Node& d) {
        bool ghost = is_ghost_decl(d);
        scopes_.assign(1, Scope{});
        for (const auto& prm : d.kids[0].kids) bind(prm, ghost);
        if (d.is(Kind::Method) && d.kids[1].is(Kind::Params))
            for (const auto& prm : d.kids[1].kids) bind(prm, ghost);
        if (d.kids[2].is(Kind::Clauses)) {
            for (const auto& c : d.kids[2].kids) {
                if (c.is(Kind::Modifies)) continue;
                if (c.kids.empty()) continue;
                boolean(c.kids[0], c.is(Kind::Requires) ? "requires clause" : "ensures clause");
            }
        }
        if (d.is(Kind::Function)) {
            if (d.kids[3].is(Kind::None)) return;
            std::string t = expr(d.kids[3], !ghost);
            if (d.has(flag::Predicate) && !t.empty() && t != "bool")
                report("predicate '" + d.text + "' body is not boolean");
            return;
        }
        if (d.kids[3].is(Kind::Block)) block(d.kids[3], ghost);
    }

    void boolean(const Node& e, const std::string& what) {
        std::string t = expr(e, false);
        if (!t.empty() && t != "bool") report(what + " is not boolean: " + print_expr(e));
    }

    void block(const Node& b, bool ghost) {
        scopes_.emplace_back();
        for (const auto& s : b.kids) stmt(s, ghost);
        scopes_.pop_back();
    }

    bool ghost_var(const Node& lhs) const {
        if (!lhs.is(Kind::Var)) return false;
        const auto* v = lookup(lhs.text);
        return v && v->second;
    }

    void call_args(const Node& call, const Sig& sig, bool compiled) {
        if (call.size() != sig.arity)
            report("'" + call.text + "' expects " + std::to_string(sig.arity) + " arguments, got " +
                   std::to_string(call.size()));
        for (const auto& a : call.kids) expr(a, compiled);
    }

    void stmt(const Node& s, bool ghost) {
        switch (s.kind) {
        case Kind::Marker:
            return;
        case Kind::Assert:
            boolean(s.kids[0], "assertion");
            return;
        case Kind::VarDecl: {
            bool g = ghost || s.ghost();
            if (s.has(flag::SuchThat)) {
                for (const auto& l : s.kids[0].kids) bind(l, g);
                boolean(s.kids[1], "such-that condition");
                return;
            }
            if (!s.kids[1].is(Kind::None)) rhs(s.kids[1], s.kids[0].size(), !g, g);
            for (const auto& l : s.kids[0].kids) bind(l, g);
            return;
        }
        case Kind::Assign: {
            bool all_ghost = true;
            for (const auto& l : s.kids[0].kids) {
                expr(l, false);
                if (!ghost_var(l) && !ghost) all_ghost = false;
            }
            rhs(s.kids[1], s.kids[0].size(), !all_ghost, all_ghost);
            return;
        }
        case Kind::CallStmt: {
            auto it = sigs_.find(s.text);
            if (it == sigs_.end() || it->second.kind != Kind::Method) {
                report("unresolved method '" + s.text + "'");
                for (const auto& a : s.kids) expr(a, false);
                return;
            }
            if (it->second.results != 0)
                report("call to '" + s.text + "' discards its results");
            if (ghost && !it->second.ghost) report("compiled method '" + s.text + "' called from ghost code");
            call_args(s, it->second, !ghost && !it->second.ghost);
            return;
        }
        case Kind::If:
            if (std::string t = expr(s.kids[0], !ghost); !t.empty() && t != "bool")
                report("if condition is not boolean: " + print_expr(s.kids[0]));
            block(s.kids[1], ghost);
            block(s.kids[2], ghost);
            return;
        default:
            report("unexpected statement " + describe(s));
        }
    }

    // Right-hand side of an assignment or declaration with `n` targets.
    void rhs(const Node& e, std::size_t n, bool compiled, bool ghost_target) {
        if (e.is(Kind::App)) {
            auto it = sigs_.find(e.text);
            if (it != sigs_.end() && it->second.kind == Kind::Method) {
                const Sig& sig = it->second;
                if (sig.results != n)
                    report("'" + e.text + "' returns " + std::to_string(sig.results) + " values, assigned to " +
                           std::to_string(n));
                if (sig.ghost && !ghost_target)
                    report("non-ghost variable assigned from ghost method '" + e.text + "'");
                call_args(e, sig, compiled && !sig.ghost);
                return;
            }
        }
        if (n != 1) report("multiple targets need a method call");
        expr(e, compiled);
    }

    std::string expr(const Node& e, bool compiled) {
        switch (e.kind) {
        case Kind::IntLit: return "int";
        case Kind::BoolLit: return "bool";
        case Kind::StrLit: return "string";
        case Kind::Null:
        case Kind::This: return "";
        case Kind::Var: {
            if (is_metavar_name(e.text)) return "";  // reported as residue
            if (const auto* v = lookup(e.text)) return v->first;
            auto it = sigs_.find(e.text);
            if (it != sigs_.end() && it->second.kind == Kind::Ctor && it->second.arity == 0) return it->second.type;
            auto f = fields_.find(e.text);
            if (f != fields_.end()) return f->second;
            report("unresolved name '" + e.text + "'");
            return "";
        }
        case Kind::Binary: {
            std::string l = expr(e.kids[0], compiled);
            std::string r = expr(e.kids[1], compiled);
            if (kBoolOps.count(e.text)) return "bool";
            if (kIntOps.count(e.text)) return "int";
            if (e.text == "+") return l == r ? l : std::string();
            return "";
        }
        case Kind::Unary: {
            expr(e.kids[0], compiled);
            return e.text == "!" ? "bool" : "int";
        }
        case Kind::Quant: {
            scopes_.emplace_back();
            for (const auto& b : e.kids[0].kids) bind(b, true);
            std::string t = expr(e.kids[1], false);
            scopes_.pop_back();
            if (!t.empty() && t != "bool") report("quantifier body is not boolean: " + print_expr(e));
            return "bool";
        }
        case Kind::Len:
            expr(e.kids[0], compiled);
            return "int";
        case Kind::SeqLit:
            for (const auto& k : e.kids) expr(k, compiled);
            return "";
        case Kind::App: {
            auto it = sigs_.find(e.text);
            if (it == sigs_.end()) {
                report("unresolved function '" + e.text + "'");
                for (const auto& a : e.kids) expr(a, compiled);
                return "";
            }
            const Sig& sig = it->second;
            if (sig.kind == Kind::Method) report("method '" + e.text + "' called inside an expression");
            if (compiled && sig.ghost) report("ghost function '" + e.text + "' used in compiled code");
            call_args(e, sig, compiled);
            return sig.type;
        }
        case Kind::Select: {
            expr(e.kids[0], compiled);
            auto f = fields_.find(e.text);
            if (f == fields_.end()) {
                report("unknown field '" + e.text + "'");
                return "";
            }
            return f->second;
        }
        case Kind::Match: {
            expr(e.kids[0], compiled);
            std::string t;
            for (std::size_t i = 1; i < e.size(); ++i) {
                const Node& c = e.kids[i];
                auto it = sigs_.find(c.text);
                if (it == sigs_.end() || it->second.kind != Kind::Ctor)
                    report("unknown constructor '" + c.text + "'");
                else if (it->second.arity != c.kids[0].size())
                    report("constructor '" + c.text + "' has " + std::to_string(it->second.arity) + " fields");
                scopes_.emplace_back();
                for (const auto& b : c.kids[0].kids) bind(b, !compiled);
                std::string ct = expr(c.kids[1], compiled);
                scopes_.pop_back();
                if (t.empty()) t = ct;
            }
            return t;
        }
        default:
            return "";
        }
    }
};

} // namespace

std::vector<TypeError> typecheck(const Program& p) { return Checker(p).run(); }

} // namespace dtac
