#include "dtac/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "dtac/error.hpp"
#include "dtac/parser.hpp"
#include "dtac/printer.hpp"

namespace dtac {

Environment error_env(const ErrorReport& e) {
    Environment env;
    env.vars["?error"] = make_str(e.kind);
    env.vars["?err_arg"] = e.property;
    env.positions["@err_pos"] = e.pos;
    return env;
}

namespace {

struct StmtRef {
    AbsolutePosition pos;  // length 0, index of the statement
    const Node* stmt = nullptr;
};

void collect(const Node& block, AbsolutePosition cur, std::vector<StmtRef>& out) {
    for (std::size_t i = 0; i < block.size(); ++i) {
        const Node& s = block.kids[i];
        if (s.is(Kind::Marker)) continue;
        cur.index = static_cast<int>(i);
        out.push_back(StmtRef{cur, &s});
        if (s.is(Kind::If)) {
            for (int br = 0; br < 2; ++br) {
                AbsolutePosition inner = cur;
                inner.block.push_back(static_cast<int>(i));
                inner.block.push_back(br);
                inner.index = 0;
                collect(s.kids[static_cast<std::size_t>(br) + 1], inner, out);
            }
        }
    }
}

std::vector<StmtRef> statements(const Program& p, const std::string& method) {
    std::vector<StmtRef> out;
    const Node* body = method_body(p, method);
    if (!body) return out;
    AbsolutePosition start;
    start.method = method;
    collect(*body, start, out);
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

// key="value" pairs separated by ';'.
std::vector<std::pair<std::string, std::string>> fields(std::string_view line, int line_no) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ';' || line[i] == '\r')) ++i;
    };
    skip();
    while (i < line.size()) {
        std::size_t k = i;
        while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
        std::string key(line.substr(k, i - k));
        if (key.empty()) throw ParseError("expected a field name", line_no, static_cast<int>(i) + 1);
        while (i < line.size() && line[i] == ' ') ++i;
        if (i >= line.size() || line[i] != '=') throw ParseError("expected '=' after " + key, line_no, static_cast<int>(i) + 1);
        ++i;
        while (i < line.size() && line[i] == ' ') ++i;
        if (i >= line.size() || line[i] != '"') throw ParseError("expected a quoted value", line_no, static_cast<int>(i) + 1);
        ++i;
        std::string value;
        while (i < line.size() && line[i] != '"') {
            if (line[i] == '\\' && i + 1 < line.size()) ++i;
            value += line[i++];
        }
        if (i >= line.size()) throw ParseError("unterminated string", line_no, static_cast<int>(i) + 1);
        ++i;
        out.emplace_back(std::move(key), std::move(value));
        skip();
    }
    return out;
}

Node expression(const std::string& text, int line_no) {
    try {
        return parse_expression(text);
    } catch (const ParseError& e) {
        throw ParseError(std::string("in fixture expression: ") + e.what(), line_no, 1);
    }
}

FixtureOracle::Condition condition(const std::string& text, int line_no) {
    FixtureOracle::Condition c;
    std::istringstream in(text);
    std::string tag;
    in >> tag;
    if (tag == "requires" || tag == "ensures") {
        c.tag = tag == "requires" ? FixtureOracle::Condition::Tag::Requires : FixtureOracle::Condition::Tag::Ensures;
        in >> c.method;
        if (c.method.empty()) throw ParseError("condition needs a method name", line_no, 1);
    } else if (tag == "asserted") {
        c.tag = FixtureOracle::Condition::Tag::Asserted;
    } else {
        throw ParseError("unknown condition '" + tag + "'", line_no, 1);
    }
    std::string rest;
    std::getline(in, rest);
    c.expr = expression(trim(rest), line_no);
    return c;
}

std::string print_condition(const FixtureOracle::Condition& c) {
    switch (c.tag) {
    case FixtureOracle::Condition::Tag::Requires: return "requires " + c.method + " " + print_expr(c.expr);
    case FixtureOracle::Condition::Tag::Ensures: return "ensures " + c.method + " " + print_expr(c.expr);
    case FixtureOracle::Condition::Tag::Asserted: return "asserted " + print_expr(c.expr);
    }
    return "";
}

bool contains_all(const std::vector<Node>& have, const Node& e) {
    for (const auto& c : conjuncts(e)) {
        bool found = std::any_of(have.begin(), have.end(), [&](const Node& h) { return same(h, c); });
        if (!found) return false;
    }
    return true;
}

void collect_asserts(const Node& n, std::vector<Node>& out) {
    if (n.is(Kind::Assert)) {
        for (auto& c : conjuncts(n.kids[0])) out.push_back(std::move(c));
        return;
    }
    for (const auto& k : n.kids) collect_asserts(k, out);
}

int indent_col(const std::string& text, int line) {
    std::istringstream in(text);
    std::string l;
    for (int i = 1; std::getline(in, l); ++i) {
        if (i == line) return static_cast<int>(l.find_first_not_of(' ') == std::string::npos ? 0 : l.find_first_not_of(' ')) + 1;
    }
    return 1;
}

int closing_line(const std::string& text, int header) {
    std::istringstream in(text);
    std::string l;
    for (int i = 1; std::getline(in, l); ++i) {
        if (i > header && l == "}") return i;
    }
    return header;
}

} // namespace

FixtureOracle FixtureOracle::parse(std::string_view text) {
    FixtureOracle o;
    std::istringstream in{std::string(text)};
    std::string line;
    for (int no = 1; std::getline(in, line); ++no) {
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        Entry e;
        e.source_line = no;
        bool have_kind = false, have_at = false, have_prop = false;
        for (auto& [key, value] : fields(t, no)) {
            if (key == "kind") {
                e.kind = value;
                have_kind = true;
            } else if (key == "at") {
                e.selector = value;
                have_at = true;
            } else if (key == "property") {
                e.property = expression(value, no);
                have_prop = true;
            } else if (key == "discharge") {
                e.discharge.push_back(condition(value, no));
            } else if (key == "active") {
                e.active.push_back(condition(value, no));
            } else {
                throw ParseError("unknown fixture field '" + key + "'", no, 1);
            }
        }
        if (!have_kind || e.kind.empty()) throw ParseError("fixture entry needs a nonempty kind", no, 1);
        if (!have_at) throw ParseError("fixture entry needs a selector (at=...)", no, 1);
        if (!have_prop) throw ParseError("fixture entry needs a property", no, 1);
        o.entries_.push_back(std::move(e));
        o.targets_.emplace_back();
    }
    return o;
}

std::string FixtureOracle::serialize() const {
    std::string out;
    for (const auto& e : entries_) {
        out += "kind=" + quote(e.kind) + "; at=" + quote(e.selector) + "; property=" + quote(print_expr(e.property)) + ";";
        for (const auto& c : e.discharge) out += " discharge=" + quote(print_condition(c)) + ";";
        for (const auto& c : e.active) out += " active=" + quote(print_condition(c)) + ";";
        out += "\n";
    }
    return out;
}

void FixtureOracle::bind(const Program& initial) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Entry& e = entries_[i];
        Target t;
        const StmtRef* hit = nullptr;
        std::vector<StmtRef> stmts;
        if (!e.selector.empty() && e.selector.front() == '@') {
            auto a = find_anchor(initial, e.selector.substr(1));
            if (!a) throw ParseError("unresolved selector " + e.selector, e.source_line, 1);
            t.method = a->method;
            stmts = statements(initial, t.method);
            const Node* b = block_at(initial, *a);
            int idx = b ? skip_markers(*b, a->index) : 0;
            for (const auto& s : stmts)
                if (s.pos.block == a->block && s.pos.index == idx) hit = &s;
            if (!hit) throw ParseError("anchor " + e.selector + " is not followed by a statement", e.source_line, 1);
        } else if (e.selector.rfind("method:", 0) == 0) {
            std::istringstream in(e.selector.substr(7));
            std::string which;
            in >> t.method >> which;
            if (!method_body(initial, t.method))
                throw ParseError("unresolved selector " + e.selector, e.source_line, 1);
            if (which == "end") {
                t.end = true;
            } else {
                stmts = statements(initial, t.method);
                int k = 0;
                try {
                    k = std::stoi(which);
                } catch (const std::exception&) {
                    throw ParseError("bad selector " + e.selector, e.source_line, 1);
                }
                if (k < 1 || k > static_cast<int>(stmts.size()))
                    throw ParseError("unresolved selector " + e.selector, e.source_line, 1);
                hit = &stmts[static_cast<std::size_t>(k - 1)];
            }
        } else {
            throw ParseError("bad selector " + e.selector, e.source_line, 1);
        }
        if (hit) {
            t.text = print_node(*hit->stmt);
            for (const auto& s : stmts) {
                if (&s == hit) break;
                if (print_node(*s.stmt) == t.text) ++t.occurrence;
            }
        }
        t.bound = true;
        targets_[i] = std::move(t);
    }
}

std::optional<AbsolutePosition> FixtureOracle::locate(const Target& t, const Entry& e, const Program& p) const {
    if (!t.bound) {
        FixtureOracle single;
        single.entries_ = {e};
        single.targets_.emplace_back();
        try {
            single.bind(p);
        } catch (const ParseError&) {
            return std::nullopt;
        }
        return single.locate(single.targets_[0], e, p);
    }
    if (t.end) {
        if (!method_body(p, t.method)) return std::nullopt;
        return method_end(p, t.method);
    }
    int seen = 0;
    for (const auto& s : statements(p, t.method)) {
        if (print_node(*s.stmt) != t.text) continue;
        if (seen++ == t.occurrence) {
            AbsolutePosition after = s.pos;
            after.index += 1;
            return after;
        }
    }
    return std::nullopt;
}

bool FixtureOracle::holds(const Condition& c, const Program& p, const std::string& method) const {
    std::vector<Node> have;
    if (c.tag == Condition::Tag::Asserted) {
        const Node* body = method_body(p, method);
        if (body) collect_asserts(*body, have);
        return contains_all(have, c.expr);
    }
    const Node* d = find_decl(p, c.method);
    if (!d || !is_callable(*d) || !d->kids[2].is(Kind::Clauses)) return false;
    Kind want = c.tag == Condition::Tag::Requires ? Kind::Requires : Kind::Ensures;
    for (const auto& cl : d->kids[2].kids)
        if (cl.is(want))
            for (auto& x : conjuncts(cl.kids[0])) have.push_back(std::move(x));
    return contains_all(have, c.expr);
}

std::vector<ErrorReport> FixtureOracle::errors(const Program& p) const {
    std::vector<ErrorReport> out;
    if (entries_.empty()) return out;
    std::vector<StmtLines> lines;
    std::string text = print_program(p, &lines);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Entry& e = entries_[i];
        const Target& t = targets_[i];
        std::optional<AbsolutePosition> pos = locate(t, e, p);
        if (!pos) continue;
        const std::string& method = pos->method;
        if (std::any_of(e.discharge.begin(), e.discharge.end(), [&](const Condition& c) { return holds(c, p, method); }))
            continue;
        if (!std::all_of(e.active.begin(), e.active.end(), [&](const Condition& c) { return holds(c, p, method); }))
            continue;
        ErrorReport r;
        r.kind = e.kind;
        r.property = e.property;
        r.pos = *pos;
        bool is_end = t.bound ? t.end : e.selector.size() > 4 && e.selector.substr(e.selector.size() - 4) == " end";
        if (is_end) {
            r.line = closing_line(text, method_line(p, method));
        } else {
            for (const auto& sl : lines) {
                if (sl.pos.method == method && sl.pos.block == pos->block && sl.pos.index == pos->index - 1) {
                    r.line = sl.first;
                    break;
                }
            }
        }
        r.col = indent_col(text, r.line);
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const ErrorReport& a, const ErrorReport& b) {
        return a.line != b.line ? a.line < b.line : a.col < b.col;
    });
    return out;
}

std::vector<ErrorReport> ExternalToolOracle::parse_output(std::string_view output, const Program& p) {
    static const std::regex diag(R"(^.*\((\d+),(\d+)\):\s*Error:\s*(.*)$)");
    std::vector<ErrorReport> out;
    std::istringstream in{std::string(output)};
    std::string line;
    while (std::getline(in, line)) {
        std::smatch m;
        if (!std::regex_match(line, m, diag)) continue;
        ErrorReport r;
        r.line = std::stoi(m[1]);
        r.col = std::stoi(m[2]);
        r.kind = trim(m[3].str());
        r.property = make_bool(true);
        try {
            AbsolutePosition at = position_of_line(p, r.line);
            at.length = 0;
            at.index += 1;
            r.pos = at;
        } catch (const PositionError&) {
            continue;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ErrorReport> ExternalToolOracle::errors(const Program& p) const {
    namespace fs = std::filesystem;
    fs::path file = fs::temp_directory_path() / ("dtac-" + std::to_string(std::rand()) + ".dfy");
    {
        std::ofstream f(file);
        f << print_program(p);
    }
    std::string output;
    if (FILE* pipe = popen((command_ + " " + file.string() + " 2>&1").c_str(), "r")) {
        char buf[4096];
        std::size_t n = 0;
        while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
        pclose(pipe);
    }
    std::error_code ec;
    fs::remove(file, ec);
    return parse_output(output, p);
}

} // namespace dtac
