#include "dtac/guard.hpp"

#include <set>

#include "dtac/printer.hpp"
#include "dtac/projection.hpp"

namespace dtac {

std::string_view violation_name(ViolationKind k) {
    switch (k) {
    case ViolationKind::CodeChanged: return "CodeChanged";
    case ViolationKind::PublicPreStrengthened: return "PublicPreStrengthened";
    case ViolationKind::PublicPostWeakened: return "PublicPostWeakened";
    case ViolationKind::PublicRemoved: return "PublicRemoved";
    case ViolationKind::SignatureChanged: return "SignatureChanged";
    }
    return "";
}

namespace {

bool user_decl(const Node& d) { return is_callable(d) && d.vis != Visibility::Generated; }

std::vector<Node> clause_conjuncts(const Node& d, Kind clause) {
    std::vector<Node> out;
    if (!d.kids[2].is(Kind::Clauses)) return out;
    for (const auto& c : d.kids[2].kids) {
        if (!c.is(clause)) continue;
        for (auto& e : conjuncts(c.kids[0])) out.push_back(std::move(e));
    }
    return out;
}

// Elements of `sub` that are missing from the multiset `super`.
std::vector<Node> missing(const std::vector<Node>& sub, std::vector<Node> super) {
    std::vector<Node> out;
    for (const auto& e : sub) {
        bool found = false;
        for (auto it = super.begin(); it != super.end(); ++it) {
            if (same(e, *it)) {
                super.erase(it);
                found = true;
                break;
            }
        }
        if (!found) out.push_back(e);
    }
    return out;
}

bool same_signature(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.vis != b.vis) return false;
    if ((a.flags & flag::Structural) != (b.flags & flag::Structural)) return false;
    return same(a.kids[0], b.kids[0]) && same(a.kids[1], b.kids[1]);
}

} // namespace

GuardReport check_guard(const Program& before, const Program& after) {
    GuardReport r;
    // Declarations already reported as removed or re-signed are not compared again.
    std::set<std::string> reported;
    auto add = [&](ViolationKind k, const std::string& m, std::string detail) {
        if (k == ViolationKind::PublicRemoved || k == ViolationKind::SignatureChanged) reported.insert(m);
        r.violations.push_back(Violation{k, m, std::move(detail)});
    };

    for (const auto& d : before.kids) {
        const Node* a = find_decl(after, d.text);
        if (d.is(Kind::Datatype) || d.is(Kind::Class)) {
            if (!a || !same(d, *a)) add(ViolationKind::CodeChanged, d.text, "type declaration changed");
            continue;
        }
        if (!is_callable(d)) continue;
        if (d.vis == Visibility::Generated) {
            if (a && a->vis != Visibility::Generated)
                add(ViolationKind::SignatureChanged, d.text, "generated declaration became " +
                                                                 std::string(visibility_name(a->vis)));
            continue;
        }
        if (!a) {
            add(ViolationKind::PublicRemoved, d.text, std::string(visibility_name(d.vis)) + " declaration removed");
            continue;
        }
        if (!same_signature(d, *a)) {
            add(ViolationKind::SignatureChanged, d.text, "signature differs");
            continue;
        }
        if (d.vis != Visibility::Public) continue;
        for (const auto& e : missing(clause_conjuncts(*a, Kind::Requires), clause_conjuncts(d, Kind::Requires)))
            add(ViolationKind::PublicPreStrengthened, d.text, "added requires " + print_expr(e));
        for (const auto& e : missing(clause_conjuncts(d, Kind::Ensures), clause_conjuncts(*a, Kind::Ensures)))
            add(ViolationKind::PublicPostWeakened, d.text, "removed ensures " + print_expr(e));
    }

    Program pb = compiled_projection(before);
    Program pa = compiled_projection(after);
    for (const auto& d : pb.kids) {
        if (!user_decl(d) || reported.count(d.text)) continue;
        const Node* a = find_decl(pa, d.text);
        if (!a) {
            if (find_decl(after, d.text))
                add(ViolationKind::CodeChanged, d.text, "compiled declaration became ghost");
            continue;
        }
        if (!same_modulo_markers(d, *a)) add(ViolationKind::CodeChanged, d.text, "compiled code differs");
    }
    for (const auto& a : pa.kids) {
        if (!user_decl(a) || find_decl(before, a.text)) continue;
        add(ViolationKind::CodeChanged, a.text, "new compiled declaration");
    }
    for (const auto& a : after.kids) {
        if (!user_decl(a) || find_decl(before, a.text) || find_decl(pa, a.text)) continue;
        add(ViolationKind::CodeChanged, a.text, "new user declaration");
    }
    r.ok = r.violations.empty();
    return r;
}

std::string format_report(const GuardReport& r) {
    if (r.ok) return "ok";
    std::string out;
    for (const auto& v : r.violations) {
        if (!out.empty()) out += "\n";
        out += std::string(violation_name(v.kind)) + " " + v.method + ": " + v.detail;
    }
    return out;
}

} // namespace dtac
