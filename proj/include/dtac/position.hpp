#ifndef DTAC_POSITION_HPP
#define DTAC_POSITION_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dtac/ast.hpp"

namespace dtac {

enum class Edge : std::uint8_t { At, Before, After };

// A location inside a method body.
// 
// `block` navigates from the method body to the enclosing block as pairs
// (statement index, branch) where branch 0 is `then` and 1 is `else`.
// `index` is a slot: slot i lies before statement i, slot n after the last.
// A non-zero `length` turns the slot into a span of raw statements.
// Declaration-level positions (`decl == true`) name a whole method.
struct AbsolutePosition {
    std::string method;
    std::vector<int> block;
    int index = 0;
    int length = 0;
    Edge edge = Edge::At;
    bool decl = false;

    bool same_block(const AbsolutePosition& o) const { return method == o.method && block == o.block && decl == o.decl; }
    friend bool operator==(const AbsolutePosition&, const AbsolutePosition&) = default;
};

std::string to_string(const AbsolutePosition& pos);

// Position references as written in tactic instantiations.
struct PosRef {
    enum class Tag : std::uint8_t { Named, Line, Up, Down };
    Tag tag = Tag::Named;
    std::string name;                 // Named: without the leading '@'
    std::vector<int> lines;           // Line
    std::shared_ptr<const PosRef> inner;  // Up/Down

    static PosRef named(std::string n) { return PosRef{Tag::Named, std::move(n), {}, nullptr}; }
    static PosRef line(std::vector<int> ls) { return PosRef{Tag::Line, {}, std::move(ls), nullptr}; }
    static PosRef up(PosRef r) { return PosRef{Tag::Up, {}, {}, std::make_shared<PosRef>(std::move(r))}; }
    static PosRef down(PosRef r) { return PosRef{Tag::Down, {}, {}, std::make_shared<PosRef>(std::move(r))}; }
};

std::string to_string(const PosRef& ref);
bool operator==(const PosRef& a, const PosRef& b);

// Block addressed by `pos` (nullptr if the path does not resolve).
const Node* block_at(const Program& p, const AbsolutePosition& pos);
Node* block_at(Program& p, const AbsolutePosition& pos);

// Body of the named method, if it has one.
const Node* method_body(const Program& p, const std::string& method);

// Moves one non-marker statement up or down; throws PositionError at a
// block boundary.
enum class Direction : std::uint8_t { Up, Down };
AbsolutePosition move(const Program& p, const AbsolutePosition& pos, Direction dir);

// Smallest slot >= index that holds a non-marker statement (or the block size).
int skip_markers(const Node& block, int index);

// Slot of the `/*@name*/` marker anywhere in the program.
std::optional<AbsolutePosition> find_anchor(const Program& p, const std::string& name);

// First slot / after-last slot of a method body.
AbsolutePosition method_start(const Program& p, const std::string& method);
AbsolutePosition method_end(const Program& p, const std::string& method);

// Statement span (length 1) covering a 1-based line of print_program(p).
AbsolutePosition position_of_line(const Program& p, int line);

// Whether a match occupying `site` is admitted by the allowed position
// `allowed`.  Markers are transparent when comparing slots.
bool admits(const Program& p, const AbsolutePosition& allowed, const AbsolutePosition& site);

} // namespace dtac

#endif
