#ifndef DTAC_KERNEL_HPP
#define DTAC_KERNEL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtac/ast.hpp"
#include "dtac/position.hpp"

namespace dtac {

// Bindings of metavariables (`?x`) and positions (`@x`).  Captures hold what
// each `...`/unspecified part of the last matched pattern stood for, in
// traversal order; the rhs of the same rule consumes them positionally.
struct Environment {
    std::map<std::string, Node> vars;
    std::map<std::string, AbsolutePosition> positions;
    std::vector<Node> captures;

    const Node* var(const std::string& name) const;
    const AbsolutePosition* position(const std::string& name) const;
};

// Keeps only the reserved names.
Environment flush(const Environment& env);

// Where a match sits.  Statement runs use `pos` (length = statements covered,
// 0 for a gap); declarations use a decl position plus the index in the unit;
// expressions add a child path from the enclosing statement or declaration.
struct Site {
    enum class Kind : std::uint8_t { Decl, Stmts, Expr };
    Kind kind = Kind::Stmts;
    AbsolutePosition pos;
    std::size_t decl_index = 0;
    std::vector<std::size_t> path;
};

struct Match {
    Environment env;
    Site site;
};

// All matches of `pattern` in `p`, in document order (outermost first).
// Variables already bound in `base` constrain the match.  Each result binds
// the pattern's variables, ?meth/?pre/?post/?arg of the enclosing method and
// @m/@s/@e (site, method body start and end).
std::vector<Match> pmatch(const Environment& base, const Program& p, const Node& pattern);

// Matches `pattern` against the single node `target` (used by when-props).
std::vector<Environment> match_node(const Environment& base, const Node& pattern, const Node& target);

// Instantiates a rhs pattern: substitutes bindings, splices list bindings,
// consumes captures and evaluates rewrite calls.  Throws EvalError on an
// unbound variable or a failed rewrite.
Node instantiate(const Node& pattern, const Environment& env);

// Substitutes the given bindings but leaves unbound variables in place and
// does not evaluate rewrite calls.
Node substitute(const Node& n, const std::map<std::string, Node>& vars);

inline constexpr std::size_t kRewriteBound = 10000;

// Replaces every occurrence of `from` by `to` in `in` (simultaneously for
// lists), skipping subterms where a quantifier rebinds a variable of `from`.
Node rewrite_pairs(const Node& from, const Node& to, const Node& in);
// Applies a rule literal: once (`single`) or until no redex is left.
Node rewrite_rule(const Node& rule, const Node& in, bool single, std::size_t bound = kRewriteBound);

// Right-nests every `&&` chain.
Node reassociate(Node e);

// Result of applying a rule: the new program and the site of the
// replacement (statements inserted, or the declaration).
struct Applied {
    Program program;
    AbsolutePosition site;
};

// Splices the instantiated rhs at the match site.
Applied apply_rule(const Program& p, const Match& m, const Node& rhs);

// Method start/end positions for a site; nullopt if the method has no body.
std::optional<AbsolutePosition> site_start(const Program& p, const std::string& method);
std::optional<AbsolutePosition> site_end(const Program& p, const std::string& method);

} // namespace dtac

#endif
