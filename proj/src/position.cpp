#include "dtac/position.hpp"

#include <algorithm>
#include <limits>

#include "dtac/error.hpp"
#include "dtac/printer.hpp"

namespace dtac {

std::string to_string(const AbsolutePosition& pos) {
    std::string s = pos.method;
    if (pos.decl) return s + "(decl)";
    s += "[";
    for (std::size_t i = 0; i < pos.block.size(); i += 2) {
        s += std::to_string(pos.block[i]);
        s += pos.block[i + 1] == 0 ? ".then/" : ".else/";
    }
    s += std::to_string(pos.index);
    if (pos.length > 0) s += "+" + std::to_string(pos.length);
    return s + "]";
}

std::string to_string(const PosRef& ref) {
    switch (ref.tag) {
    case PosRef::Tag::Named:
        return "@" + ref.name;
    case PosRef::Tag::Line: {
        std::string s = "line(";
        for (std::size_t i = 0; i < ref.lines.size(); ++i) {
            if (i) s += " ";
            s += std::to_string(ref.lines[i]);
        }
        return s + ")";
    }
    case PosRef::Tag::Up:
        return "up(" + to_string(*ref.inner) + ")";
    case PosRef::Tag::Down:
        return "down(" + to_string(*ref.inner) + ")";
    }
    return "";
}

bool operator==(const PosRef& a, const PosRef& b) {
    if (a.tag != b.tag || a.name != b.name || a.lines != b.lines) return false;
    if (!a.inner || !b.inner) return !a.inner && !b.inner;
    return *a.inner == *b.inner;
}

const Node* method_body(const Program& p, const std::string& method) {
    const Node* d = find_decl(p, method);
    if (!d || !d->is(Kind::Method) || !d->kids[3].is(Kind::Block)) return nullptr;
    return &d->kids[3];
}

const Node* block_at(const Program& p, const AbsolutePosition& pos) {
    const Node* b = method_body(p, pos.method);
    for (std::size_t i = 0; b && i + 1 < pos.block.size(); i += 2) {
        int idx = pos.block[i];
        int br = pos.block[i + 1];
        if (idx < 0 || idx >= static_cast<int>(b->size())) return nullptr;
        const Node& s = b->kids[static_cast<std::size_t>(idx)];
        if (!s.is(Kind::If) || br < 0 || br > 1) return nullptr;
        b = &s.kids[static_cast<std::size_t>(br) + 1];
    }
    return b;
}

Node* block_at(Program& p, const AbsolutePosition& pos) {
    return const_cast<Node*>(block_at(static_cast<const Program&>(p), pos));
}

int skip_markers(const Node& block, int index) {
    int n = static_cast<int>(block.size());
    while (index < n && block.kids[static_cast<std::size_t>(index)].is(Kind::Marker)) ++index;
    return std::min(index, n);
}

AbsolutePosition move(const Program& p, const AbsolutePosition& pos, Direction dir) {
    if (pos.decl) throw PositionError("cannot move a declaration position");
    const Node* b = block_at(p, pos);
    if (!b) throw PositionError("position " + to_string(pos) + " does not resolve");
    AbsolutePosition out = pos;
    out.length = 0;
    out.edge = Edge::At;
    int n = static_cast<int>(b->size());
    if (dir == Direction::Up) {
        for (int j = std::min(pos.index, n) - 1; j >= 0; --j) {
            if (!b->kids[static_cast<std::size_t>(j)].is(Kind::Marker)) {
                out.index = j;
                return out;
            }
        }
        throw PositionError("cannot move up from " + to_string(pos) + ": first statement of the block");
    }
    for (int j = std::max(pos.index, 0); j < n; ++j) {
        if (!b->kids[static_cast<std::size_t>(j)].is(Kind::Marker)) {
            out.index = j + 1;
            return out;
        }
    }
    throw PositionError("cannot move down from " + to_string(pos) + ": last statement of the block");
}

namespace {

bool find_in_block(const Node& b, const std::string& name, AbsolutePosition& cur) {
    for (std::size_t i = 0; i < b.size(); ++i) {
        const Node& s = b.kids[i];
        if (s.is(Kind::Marker) && s.text == name) {
            cur.index = static_cast<int>(i);
            return true;
        }
        if (s.is(Kind::If)) {
            for (int br = 0; br < 2; ++br) {
                cur.block.push_back(static_cast<int>(i));
                cur.block.push_back(br);
                if (find_in_block(s.kids[static_cast<std::size_t>(br) + 1], name, cur)) return true;
                cur.block.pop_back();
                cur.block.pop_back();
            }
        }
    }
    return false;
}

} // namespace

std::optional<AbsolutePosition> find_anchor(const Program& p, const std::string& name) {
    for (const auto& d : p.kids) {
        if (!d.is(Kind::Method) || !d.kids[3].is(Kind::Block)) continue;
        AbsolutePosition cur;
        cur.method = d.text;
        if (find_in_block(d.kids[3], name, cur)) return cur;
    }
    return std::nullopt;
}

AbsolutePosition method_start(const Program& p, const std::string& method) {
    if (!method_body(p, method)) throw PositionError("method '" + method + "' has no body");
    AbsolutePosition pos;
    pos.method = method;
    return pos;
}

AbsolutePosition method_end(const Program& p, const std::string& method) {
    const Node* b = method_body(p, method);
    if (!b) throw PositionError("method '" + method + "' has no body");
    AbsolutePosition pos;
    pos.method = method;
    pos.index = static_cast<int>(b->size());
    return pos;
}

AbsolutePosition position_of_line(const Program& p, int line) {
    std::vector<StmtLines> lines;
    print_program(p, &lines);
    const StmtLines* best = nullptr;
    int best_span = std::numeric_limits<int>::max();
    for (const auto& sl : lines) {
        if (sl.first <= line && line <= sl.last && sl.last - sl.first < best_span) {
            best = &sl;
            best_span = sl.last - sl.first;
        }
    }
    if (!best) throw PositionError("line " + std::to_string(line) + " is not inside a method body");
    return best->pos;
}

bool admits(const Program& p, const AbsolutePosition& allowed, const AbsolutePosition& site) {
    if (allowed.method != site.method) return false;
    if (allowed.decl || site.decl) return true;
    if (allowed.block != site.block) {
        // an allowed slot inside a statement covered by the site
        if (site.length == 0 || allowed.block.size() <= site.block.size()) return false;
        if (!std::equal(site.block.begin(), site.block.end(), allowed.block.begin())) return false;
        int stmt = allowed.block[site.block.size()];
        return site.index <= stmt && stmt < site.index + site.length;
    }
    if (allowed.length > 0) {
        return allowed.index <= site.index && site.index + site.length <= allowed.index + allowed.length;
    }
    const Node* b = block_at(p, site);
    if (!b) return false;
    int q = skip_markers(*b, allowed.index);
    if (site.length == 0) return q == skip_markers(*b, site.index);
    return (site.index <= allowed.index && allowed.index <= site.index + site.length) || q == site.index;
}

} // namespace dtac
