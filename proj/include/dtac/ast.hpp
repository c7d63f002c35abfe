#ifndef DTAC_AST_HPP
#define DTAC_AST_HPP

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dtac {

// Node kinds of the mini-Dafny tree. Programs and code patterns share one
// tree type; the pattern-only kinds never survive into an accepted program.
enum class Kind : std::uint8_t {
    // declarations
    Unit,
    Datatype,
    Ctor,
    Class,
    Field,
    Function,
    Method,
    Params,
    Param,
    Clauses,
    Requires,
    Ensures,
    Modifies,
    Type,
    // statements
    Block,
    VarDecl,
    Locals,
    Local,
    Assign,
    Lhs,
    CallStmt,
    Assert,
    If,
    Marker,
    // expressions
    IntLit,
    BoolLit,
    StrLit,
    Null,
    This,
    Var,
    Binary,
    Unary,
    Quant,
    Binders,
    Len,
    SeqLit,
    App,
    Select,
    Match,
    Case,
    // pattern-only
    MetaVar,
    ListVar,
    Ellipsis,
    Unspecified,
    Rewrite,
    RuleLit,
    // list-valued binding or ellipsis capture
    Fragment,
    // absent optional child
    None,
};

std::string_view kind_name(Kind k);

enum class Visibility : std::uint8_t { Public, Private, Generated };

std::string_view visibility_name(Visibility v);

using NodeId = std::uint32_t;

namespace flag {
inline constexpr std::uint32_t Ghost = 1u << 0;
inline constexpr std::uint32_t SuchThat = 1u << 1;
inline constexpr std::uint32_t Predicate = 1u << 2;
inline constexpr std::uint32_t Compiled = 1u << 3;   // `function method`
inline constexpr std::uint32_t VisSet = 1u << 4;     // pattern names a visibility
inline constexpr std::uint32_t GhostSet = 1u << 5;   // pattern names ghost-ness
inline constexpr std::uint32_t Fresh = 1u << 6;      // marker created by the current rewrite
inline constexpr std::uint32_t Structural = Ghost | SuchThat | Predicate | Compiled;
} // namespace flag

// One node of a program or code pattern.
// 
// Layout conventions (children by index):
//   Method    [Params, Params(returns), Clauses, Block|None|Unspecified]
//   Function  [Params, Type|None, Clauses, Expr|None]
//   VarDecl   [Locals, Expr|None]            (SuchThat flag for `:|`)
//   Assign    [Lhs, Expr]
//   If        [Expr, Block, Block]
//   Quant     [Binders, Expr]                (text = exists|forall)
//   Match     [Expr, Case...]; Case [Binders, Expr] (text = ctor)
//   Select    [Expr]                         (text = field)
//   App / CallStmt: text = callee, children = arguments
struct Node {
    Kind kind = Kind::None;
    std::string text;
    std::vector<Node> kids;
    std::uint32_t flags = 0;
    Visibility vis = Visibility::Private;
    NodeId id = 0;
    int line = 0;

    Node() = default;
    Node(Kind k, std::string t = {}, std::vector<Node> children = {})
        : kind(k), text(std::move(t)), kids(std::move(children)) {}

    bool is(Kind k) const { return kind == k; }
    bool has(std::uint32_t f) const { return (flags & f) != 0; }
    bool ghost() const { return has(flag::Ghost); }

    const Node& operator[](std::size_t i) const { return kids.at(i); }
    Node& operator[](std::size_t i) { return kids.at(i); }
    std::size_t size() const { return kids.size(); }
};

// Structural equality: ignores NodeIds, source lines and transient flags.
bool same(const Node& a, const Node& b);
bool operator==(const Node& a, const Node& b);

// Structural equality that additionally ignores Marker statements.
bool same_modulo_markers(const Node& a, const Node& b);

// Programs are compilation units (Kind::Unit).
using Program = Node;

// Construction helpers.
Node make_var(std::string name);
Node make_int(long long v);
Node make_bool(bool v);
Node make_str(std::string s);
Node make_binary(std::string op, Node lhs, Node rhs);
Node make_unary(std::string op, Node operand);
Node make_block(std::vector<Node> stmts = {});
Node make_marker(std::string name);
Node make_assert(Node e);
Node none();

bool is_metavar_name(std::string_view s);

// Program-level queries.
const Node* find_decl(const Program& p, std::string_view name);
Node* find_decl(Program& p, std::string_view name);
inline bool is_callable(const Node& d) { return d.is(Kind::Method) || d.is(Kind::Function); }

// Splits an expression on top-level `&&` (right-nested chains).
std::vector<Node> conjuncts(const Node& e);
// Right-nested `&&` of the given expressions (`true` when empty).
Node conjoin(const std::vector<Node>& es);

// Assigns fresh NodeIds to every node in pre-order, starting at 1.
void renumber(Node& n);

// Removes every Marker statement anywhere in the tree.
Node strip_markers(Node n);

// True if the tree contains a pattern-only node or `?name` text.
bool has_pattern_residue(const Node& n);

// Calls f on n and all descendants in pre-order.
template <typename F>
void walk(const Node& n, F&& f) {
    f(n);
    for (const auto& k : n.kids) walk(k, f);
}

} // namespace dtac

#endif
