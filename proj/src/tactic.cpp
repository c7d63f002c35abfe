#include "dtac/tactic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "dtac/parser.hpp"
#include "dtac/printer.hpp"

namespace dtac {

namespace {

const std::set<std::string, std::less<>> kReserved = {"?error", "?err_arg", "@err_pos", "?pre",   "?post",
                                                      "?meth",  "?arg",     "@pos",     "@start", "@end"};

bool word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }
bool var_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

class TacticParser {
public:
    TacticParser(std::string_view text, bool script) : src_(text), script_(script) {}

    std::vector<TacticDef> defs() {
        std::vector<TacticDef> out;
        skip();
        while (!eof()) out.push_back(def());
        return out;
    }

    Script script() {
        Script s;
        skip();
        while (!eof() && def_start()) {
            s.defs.push_back(def());
            skip();
            accept(";");
        }
        while (!eof()) {
            std::size_t begin = pos_;
            s.steps.push_back(step());
            s.step_texts.push_back(trim(src_.substr(begin, pos_ - begin)));
            skip();
            if (!accept(";")) break;
            skip();
        }
        skip();
        if (!eof()) fail("expected ';' between invocations");
        return s;
    }

    Trans invocation() {
        skip();
        Trans t = trans();
        skip();
        if (!eof()) fail("unexpected trailing input");
        return t;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    bool script_;
    std::vector<std::string> pending_doc_;

    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
        int line = 1;
        int col = 1;
        for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(msg, line, col);
    }

    bool eof() const { return pos_ >= src_.size(); }
    char cur() const { return eof() ? '\0' : src_[pos_]; }

    void skip() {
        for (;;) {
            while (!eof() && std::isspace(static_cast<unsigned char>(cur()))) {
                if (cur() == '\n' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') pending_doc_.clear();
                ++pos_;
            }
            if (src_.substr(pos_, 2) == "//") {
                std::size_t e = src_.find('\n', pos_);
                if (e == std::string_view::npos) e = src_.size();
                pending_doc_.push_back(trim(src_.substr(pos_ + 2, e - pos_ - 2)));
                pos_ = e;
                continue;
            }
            return;
        }
    }

    bool at(std::string_view s) {
        skip();
        if (src_.substr(pos_, s.size()) != s) return false;
        if (word_start(s.front()) && pos_ + s.size() < src_.size() && word_char(src_[pos_ + s.size()])) return false;
        return true;
    }

    bool accept(std::string_view s) {
        if (!at(s)) return false;
        pos_ += s.size();
        return true;
    }

    void expect(std::string_view s) {
        if (!accept(s)) fail("expected '" + std::string(s) + "'");
    }

    std::string word() {
        skip();
        if (!word_start(cur())) fail("expected a name");
        std::size_t b = pos_;
        while (!eof() && word_char(cur())) ++pos_;
        return std::string(src_.substr(b, pos_ - b));
    }

    std::string metavar() {
        skip();
        if (cur() != '?') fail("expected a metavariable");
        std::size_t b = pos_++;
        if (!word_start(cur())) fail("expected a metavariable name");
        while (!eof() && var_char(cur())) ++pos_;
        return std::string(src_.substr(b, pos_ - b));
    }

    bool def_start() {
        skip();
        std::size_t save = pos_;
        bool ok = false;
        if (word_start(cur())) {
            word();
            skip();
            if (cur() == '(') {
                std::size_t end = balanced_end(pos_);
                if (end != std::string_view::npos) {
                    pos_ = end + 1;
                    ok = at(":=");
                }
            }
        }
        pos_ = save;
        return ok;
    }

    // Index of the ')' matching the '(' at `open`, honouring backquotes and strings.
    std::size_t balanced_end(std::size_t open) const {
        int depth = 0;
        for (std::size_t i = open; i < src_.size(); ++i) {
            char c = src_[i];
            if (c == '`') {
                std::size_t e = src_.find('`', i + 1);
                if (e == std::string_view::npos) return std::string_view::npos;
                i = e;
            } else if (c == '"') {
                for (++i; i < src_.size() && src_[i] != '"'; ++i)
                    if (src_[i] == '\\') ++i;
            } else if (c == '(' || c == '[' || c == '{') {
                ++depth;
            } else if (c == ')' || c == ']' || c == '}') {
                if (--depth == 0) return i;
            }
        }
        return std::string_view::npos;
    }

    // Raw text up to a depth-0 character in `stops`; leaves pos_ on the stop.
    std::string raw_until(std::string_view stops) {
        std::size_t b = pos_;
        int depth = 0;
        while (!eof()) {
            char c = cur();
            if (depth == 0 && stops.find(c) != std::string_view::npos) break;
            if (c == '`') {
                std::size_t e = src_.find('`', pos_ + 1);
                if (e == std::string_view::npos) fail("unterminated code quote");
                pos_ = e + 1;
                continue;
            }
            if (c == '"') {
                for (++pos_; !eof() && cur() != '"'; ++pos_)
                    if (cur() == '\\') ++pos_;
            } else if (c == '(' || c == '[' || c == '{') {
                ++depth;
            } else if (c == ')' || c == ']' || c == '}') {
                --depth;
            }
            ++pos_;
        }
        if (eof()) fail("unexpected end of input");
        return std::string(src_.substr(b, pos_ - b));
    }

    std::string quoted_code() {
        skip();
        if (cur() != '`') fail("expected a backquoted code fragment");
        std::size_t e = src_.find('`', pos_ + 1);
        if (e == std::string_view::npos) fail("unterminated code quote");
        std::string body(src_.substr(pos_ + 1, e - pos_ - 1));
        pos_ = e + 1;
        return body;
    }

    Node pattern_at(const std::string& code, std::size_t at) const {
        try {
            return parse_pattern(code);
        } catch (const ParseError& e) {
            fail_at(std::string("in code fragment: ") + e.what(), at);
        }
    }

    Node expression_at(const std::string& code, std::size_t at) const {
        try {
            return parse_expression(code, ParseMode::Pattern);
        } catch (const ParseError& e) {
            fail_at(std::string("in argument: ") + e.what(), at);
        }
    }

    // A call argument or binding value: bare expression, `code`, or `l` =>> `r`.
    Node code_value(const std::string& raw, std::size_t at) {
        std::string t = trim(raw);
        if (t.empty()) fail_at("empty argument", at);
        if (t.front() != '`') return expression_at(t, at);
        TacticParser sub(t, false);
        std::string l = sub.quoted_code();
        if (sub.accept("=>>")) {
            std::string r = sub.quoted_code();
            sub.skip();
            if (!sub.eof()) fail_at("unexpected text after rule literal", at);
            return Node(Kind::RuleLit, "", {pattern_at(l, at), pattern_at(r, at)});
        }
        sub.skip();
        if (!sub.eof()) fail_at("unexpected text after code fragment", at);
        return pattern_at(l, at);
    }

    TacticDef def() {
        skip();
        TacticDef d;
        d.doc.clear();
        for (std::size_t i = 0; i < pending_doc_.size(); ++i) {
            if (i) d.doc += ' ';
            d.doc += pending_doc_[i];
        }
        pending_doc_.clear();
        d.name = word();
        expect("(");
        std::set<std::string> seen;
        if (!accept(")")) {
            do {
                Formal f;
                skip();
                std::size_t at = pos_;
                f.name = word();
                if (!seen.insert(f.name).second) fail_at("duplicate formal '" + f.name + "'", at);
                if (accept("=")) {
                    skip();
                    std::size_t vat = pos_;
                    f.fallback = code_value(raw_until(",)"), vat);
                }
                d.formals.push_back(std::move(f));
            } while (accept(","));
            expect(")");
        }
        expect(":=");
        d.body = std::make_shared<Trans>(script_ ? body_step() : body());
        return d;
    }

    Trans body() {
        if (accept("when")) {
            Trans t;
            t.tag = Trans::Tag::When;
            t.prop = std::make_shared<Prop>(prop());
            expect("then");
            t.first = std::make_shared<Trans>(trans());
            return t;
        }
        return trans();
    }

    Trans body_step() {
        if (accept("when")) {
            Trans t;
            t.tag = Trans::Tag::When;
            t.prop = std::make_shared<Prop>(prop());
            expect("then");
            t.first = std::make_shared<Trans>(step());
            return t;
        }
        return step();
    }

    Trans trans() {
        Trans first = step();
        if (!accept(";")) return first;
        Trans t;
        t.tag = Trans::Tag::Seq;
        t.first = std::make_shared<Trans>(std::move(first));
        t.second = std::make_shared<Trans>(trans());
        return t;
    }

    Trans step() {
        skip();
        if (cur() == '(') {
            ++pos_;
            Trans t = trans();
            expect(")");
            return t;
        }
        if (cur() == '`') {
            std::size_t at = pos_;
            Trans t;
            t.tag = Trans::Tag::Rule;
            std::string l = quoted_code();
            expect("=>>");
            std::size_t rat = pos_;
            std::string r = quoted_code();
            t.lhs = pattern_at(l, at);
            t.rhs = pattern_at(r, rat);
            t.inst = opt_inst();
            return t;
        }
        if (at("when")) {
            if (!script_) fail("'when' is only allowed at the start of a definition body");
            return body_step();
        }
        if (at("match")) {
            expect("match");
            Trans t;
            t.tag = Trans::Tag::Match;
            skip();
            std::size_t at = pos_;
            t.lhs = pattern_at(quoted_code(), at);
            t.inst = opt_inst();
            return t;
        }
        std::size_t at = pos_;
        std::string name = word();
        skip();
        if (name == "or" && cur() == '(') {
            ++pos_;
            std::vector<Trans> alts;
            alts.push_back(trans());
            while (accept(",")) alts.push_back(trans());
            expect(")");
            if (alts.size() < 2) fail_at("or needs at least two alternatives", at);
            Trans t = std::move(alts.back());
            for (std::size_t i = alts.size() - 1; i-- > 0;) {
                Trans o;
                o.tag = Trans::Tag::Or;
                o.first = std::make_shared<Trans>(std::move(alts[i]));
                o.second = std::make_shared<Trans>(std::move(t));
                t = std::move(o);
            }
            return t;
        }
        if (cur() != '(') fail("expected '(' after tactic name '" + name + "'");
        Trans t;
        t.tag = Trans::Tag::Call;
        t.name = name;
        ++pos_;
        skip();
        if (cur() != ')') {
            for (;;) {
                skip();
                std::size_t aat = pos_;
                t.args.push_back(code_value(raw_until(",)"), aat));
                if (cur() == ')') break;
                ++pos_;
            }
        }
        expect(")");
        t.inst = opt_inst();
        return t;
    }

    InstSpec opt_inst() {
        InstSpec out;
        skip();
        if (cur() != '[') return out;
        ++pos_;
        if (accept("]")) return out;
        do out.push_back(inst_item()); while (accept(","));
        expect("]");
        return out;
    }

    PosRef pos_ref() {
        skip();
        if (cur() == '@') {
            ++pos_;
            return PosRef::named(word());
        }
        std::string w = word();
        expect("(");
        if (w == "up" || w == "down") {
            PosRef inner = pos_ref();
            expect(")");
            return w == "up" ? PosRef::up(std::move(inner)) : PosRef::down(std::move(inner));
        }
        if (w == "line") {
            std::vector<int> lines;
            for (;;) {
                skip();
                if (accept(")")) break;
                accept(",");
                skip();
                if (!std::isdigit(static_cast<unsigned char>(cur()))) fail("expected a line number");
                int n = 0;
                while (!eof() && std::isdigit(static_cast<unsigned char>(cur()))) n = n * 10 + (src_[pos_++] - '0');
                lines.push_back(n);
            }
            return PosRef::line(std::move(lines));
        }
        fail("expected a position");
    }

    InstItem inst_item() {
        skip();
        InstItem it;
        if (cur() == '?') {
            it.var = metavar();
            expect(":=");
            skip();
            std::size_t at = pos_;
            it.code = code_value(raw_until(",]"), at);
            return it;
        }
        it.is_position = true;
        it.pos = pos_ref();
        return it;
    }

    Node term() {
        skip();
        if (cur() == '?') return Node(Kind::MetaVar, metavar());
        return make_var(word());
    }

    Prop prop() {
        if (accept("not")) {
            Prop p;
            p.tag = Prop::Tag::Not;
            p.inner = std::make_shared<Prop>(prop());
            return p;
        }
        Prop p;
        p.term = term();
        if (accept("is")) {
            bool negate = accept("not");
            std::string w = word();
            if (w == "public") p.tag = Prop::Tag::IsPublic;
            else if (w == "private") p.tag = Prop::Tag::IsPrivate;
            else if (w == "generated") p.tag = Prop::Tag::IsGenerated;
            else if (w == "ghost") p.tag = Prop::Tag::IsGhost;
            else fail("expected public, private, generated or ghost");
            if (!negate) return p;
            Prop n;
            n.tag = Prop::Tag::Not;
            n.inner = std::make_shared<Prop>(std::move(p));
            return n;
        }
        expect("=");
        skip();
        if (cur() == '"') {
            p.tag = Prop::Tag::ErrorEquals;
            ++pos_;
            std::string s;
            while (!eof() && cur() != '"') {
                if (cur() == '\\' && pos_ + 1 < src_.size()) ++pos_;
                s += src_[pos_++];
            }
            if (eof()) fail("unterminated string");
            ++pos_;
            p.text = std::move(s);
            return p;
        }
        p.tag = Prop::Tag::PatternEquals;
        std::size_t at = pos_;
        p.pattern = pattern_at(quoted_code(), at);
        return p;
    }
};

void collect_vars(const Node& n, std::set<std::string>& out) {
    if (n.is(Kind::RuleLit)) return;
    if (is_metavar_name(n.text) && !n.is(Kind::StrLit)) out.insert(n.text);
    for (const auto& k : n.kids) collect_vars(k, out);
}

void check_trans_vars(const Trans& t, std::set<std::string> bound, const std::string& def) {
    switch (t.tag) {
    case Trans::Tag::Rule: {
        std::set<std::string> lhs;
        collect_vars(t.lhs, lhs);
        bound.insert(lhs.begin(), lhs.end());
        for (const auto& it : t.inst)
            if (!it.is_position) bound.insert(it.var);
        std::set<std::string> rhs;
        collect_vars(t.rhs, rhs);
        for (const auto& v : rhs) {
            if (!bound.count(v)) throw TacticError("tactic '" + def + "': unbound metavariable " + v + " in rule rhs");
        }
        break;
    }
    case Trans::Tag::When: {
        std::function<void(const Prop&)> add = [&](const Prop& p) {
            if (p.tag == Prop::Tag::PatternEquals) collect_vars(p.pattern, bound);
        };
        add(*t.prop);
        check_trans_vars(*t.first, bound, def);
        break;
    }
    case Trans::Tag::Seq:
    case Trans::Tag::Or:
        check_trans_vars(*t.first, bound, def);
        check_trans_vars(*t.second, bound, def);
        break;
    default:
        break;
    }
}

void check_cycles(const std::vector<const TacticDef*>& defs, bool require_defined) {
    std::map<std::string, const TacticDef*> by_name;
    for (const auto* d : defs) by_name[d->name] = d;
    std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
    std::vector<std::string> stack;
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        state[n] = 1;
        stack.push_back(n);
        std::vector<std::string> callees;
        called_names(*by_name[n]->body, callees);
        for (const auto& c : callees) {
            if (!by_name.count(c)) {
                if (require_defined) throw TacticError("undefined tactic '" + c + "' called from '" + n + "'");
                continue;
            }
            if (state[c] == 1) {
                std::string cycle;
                auto it = std::find(stack.begin(), stack.end(), c);
                for (; it != stack.end(); ++it) cycle += *it + " -> ";
                throw TacticError("recursion cycle: " + cycle + c);
            }
            if (state[c] == 0) visit(c);
        }
        stack.pop_back();
        state[n] = 2;
    };
    for (const auto* d : defs)
        if (state[d->name] == 0) visit(d->name);
}

std::string print_code(const Node& n) {
    if (n.is(Kind::RuleLit)) return print_expr(n);
    return "`" + print_node(n) + "`";
}

std::string print_arg(const Node& n) {
    if (n.is(Kind::RuleLit) || n.is(Kind::Block) || n.is(Kind::Unit)) return print_code(n);
    return print_expr(n);
}

} // namespace

bool is_reserved(std::string_view name) { return kReserved.count(name) > 0; }

void called_names(const Trans& t, std::vector<std::string>& out) {
    switch (t.tag) {
    case Trans::Tag::Call:
        out.push_back(t.name);
        break;
    case Trans::Tag::Seq:
    case Trans::Tag::Or:
        called_names(*t.first, out);
        called_names(*t.second, out);
        break;
    case Trans::Tag::When:
        called_names(*t.first, out);
        break;
    default:
        break;
    }
}

void check_rule_variables(const TacticDef& def) {
    std::set<std::string> bound(kReserved.begin(), kReserved.end());
    for (const auto& f : def.formals) bound.insert("?" + f.name);
    check_trans_vars(*def.body, bound, def.name);
}

void Library::add(TacticDef def) {
    if (index_.count(def.name)) throw TacticError("duplicate tactic '" + def.name + "'");
    index_[def.name] = defs_.size();
    defs_.push_back(std::move(def));
}

const TacticDef* Library::find(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &defs_[it->second];
}

void Library::check() const {
    std::vector<const TacticDef*> all;
    for (const auto& d : defs_) all.push_back(&d);
    check_cycles(all, true);
}

std::vector<TacticDef> parse_tactic_defs(std::string_view text) {
    TacticParser p(text, false);
    auto defs = p.defs();
    std::set<std::string> names;
    std::vector<const TacticDef*> ptrs;
    for (const auto& d : defs) {
        if (!names.insert(d.name).second) throw TacticError("duplicate tactic '" + d.name + "'");
        check_rule_variables(d);
        ptrs.push_back(&d);
    }
    check_cycles(ptrs, false);
    return defs;
}

Trans parse_tactic_invocation(std::string_view text) {
    TacticParser p(text, true);
    return p.invocation();
}

Script parse_script(std::string_view text) {
    TacticParser p(text, true);
    Script s = p.script();
    std::vector<const TacticDef*> ptrs;
    for (const auto& d : s.defs) {
        check_rule_variables(d);
        ptrs.push_back(&d);
    }
    check_cycles(ptrs, false);
    return s;
}

std::string print_inst(const InstSpec& inst) {
    if (inst.empty()) return "";
    std::string s = "[";
    for (std::size_t i = 0; i < inst.size(); ++i) {
        if (i) s += ", ";
        if (inst[i].is_position) s += to_string(inst[i].pos);
        else s += inst[i].var + " := " + print_arg(inst[i].code);
    }
    return s + "]";
}

std::string print_prop(const Prop& p) {
    switch (p.tag) {
    case Prop::Tag::IsPublic: return print_expr(p.term) + " is public";
    case Prop::Tag::IsPrivate: return print_expr(p.term) + " is private";
    case Prop::Tag::IsGenerated: return print_expr(p.term) + " is generated";
    case Prop::Tag::IsGhost: return print_expr(p.term) + " is ghost";
    case Prop::Tag::Not: return "not " + print_prop(*p.inner);
    case Prop::Tag::ErrorEquals: {
        std::string s;
        for (char c : p.text) {
            if (c == '"' || c == '\\') s += '\\';
            s += c;
        }
        return print_expr(p.term) + " = \"" + s + "\"";
    }
    case Prop::Tag::PatternEquals: return print_expr(p.term) + " = " + print_code(p.pattern);
    }
    return "";
}

std::string print_trans(const Trans& t) {
    switch (t.tag) {
    case Trans::Tag::Rule:
        return print_code(t.lhs) + " =>> " + print_code(t.rhs) + print_inst(t.inst);
    case Trans::Tag::Match:
        return "match " + print_code(t.lhs) + print_inst(t.inst);
    case Trans::Tag::Seq: {
        std::string a = print_trans(*t.first);
        if (t.first->tag == Trans::Tag::Seq || t.first->tag == Trans::Tag::When) a = "(" + a + ")";
        return a + " ; " + print_trans(*t.second);
    }
    case Trans::Tag::Or:
        return "or(" + print_trans(*t.first) + ", " + print_trans(*t.second) + ")";
    case Trans::Tag::Call: {
        std::string s = t.name + "(";
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i) s += ", ";
            s += print_arg(t.args[i]);
        }
        return s + ")" + print_inst(t.inst);
    }
    case Trans::Tag::When:
        return "when " + print_prop(*t.prop) + " then " + print_trans(*t.first);
    }
    return "";
}

std::string print_def(const TacticDef& d) {
    std::string s;
    if (!d.doc.empty()) s += "// " + d.doc + "\n";
    s += d.name + "(";
    for (std::size_t i = 0; i < d.formals.size(); ++i) {
        if (i) s += ", ";
        s += d.formals[i].name;
        if (d.formals[i].fallback) s += " = " + print_arg(*d.formals[i].fallback);
    }
    return s + ") := " + print_trans(*d.body) + "\n";
}

std::string print_defs(const std::vector<TacticDef>& defs) {
    std::string s;
    for (std::size_t i = 0; i < defs.size(); ++i) {
        if (i) s += "\n";
        s += print_def(defs[i]);
    }
    return s;
}

namespace {

bool same_prop(const Prop& a, const Prop& b) {
    if (a.tag != b.tag || a.text != b.text || !same(a.term, b.term) || !same(a.pattern, b.pattern)) return false;
    if (!a.inner || !b.inner) return !a.inner && !b.inner;
    return same_prop(*a.inner, *b.inner);
}

bool same_inst(const InstSpec& a, const InstSpec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_position != b[i].is_position) return false;
        if (a[i].is_position ? !(a[i].pos == b[i].pos) : (a[i].var != b[i].var || !same(a[i].code, b[i].code)))
            return false;
    }
    return true;
}

bool same_ptr(const TransPtr& a, const TransPtr& b) {
    if (!a || !b) return !a && !b;
    return same_trans(*a, *b);
}

} // namespace

bool same_trans(const Trans& a, const Trans& b) {
    if (a.tag != b.tag || a.name != b.name || !same(a.lhs, b.lhs) || !same(a.rhs, b.rhs)) return false;
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!same(a.args[i], b.args[i])) return false;
    if (!same_inst(a.inst, b.inst) || !same_ptr(a.first, b.first) || !same_ptr(a.second, b.second)) return false;
    if (!a.prop || !b.prop) return !a.prop && !b.prop;
    return same_prop(*a.prop, *b.prop);
}

bool same_def(const TacticDef& a, const TacticDef& b) {
    if (a.name != b.name || a.formals.size() != b.formals.size()) return false;
    for (std::size_t i = 0; i < a.formals.size(); ++i) {
        const auto& x = a.formals[i];
        const auto& y = b.formals[i];
        if (x.name != y.name || x.fallback.has_value() != y.fallback.has_value()) return false;
        if (x.fallback && !same(*x.fallback, *y.fallback)) return false;
    }
    return same_trans(*a.body, *b.body);
}

} // namespace dtac
