#ifndef DTAC_TACTIC_HPP
#define DTAC_TACTIC_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtac/ast.hpp"
#include "dtac/error.hpp"
#include "dtac/position.hpp"

namespace dtac {

// One item of an instantiation `[...]`: a position or `?x := code`.
struct InstItem {
    bool is_position = false;
    PosRef pos;
    std::string var;  // with the leading '?'
    Node code;
};
using InstSpec = std::vector<InstItem>;

struct Prop {
    enum class Tag : std::uint8_t { IsPublic, IsPrivate, IsGenerated, IsGhost, Not, ErrorEquals, PatternEquals };
    Tag tag = Tag::IsPublic;
    Node term;                          // Is*: metavariable or identifier; PatternEquals: the value
    std::string text;                   // ErrorEquals
    Node pattern;                       // PatternEquals
    std::shared_ptr<const Prop> inner;  // Not
};

struct Trans;
using TransPtr = std::shared_ptr<const Trans>;

// Tactic AST.  `When` is folded in so a body is just a Trans.
struct Trans {
    enum class Tag : std::uint8_t { Rule, Match, Seq, Or, Call, When };
    Tag tag = Tag::Rule;
    Node lhs;                  // Rule, Match (the pattern)
    Node rhs;                  // Rule
    std::string name;          // Call
    std::vector<Node> args;    // Call
    TransPtr first, second;    // Seq, Or; When uses `first`
    std::shared_ptr<const Prop> prop;  // When
    InstSpec inst;             // Rule, Match, Call
};

struct Formal {
    std::string name;  // bare, referenced as ?name
    std::optional<Node> fallback;
};

struct TacticDef {
    std::string name;
    std::vector<Formal> formals;
    TransPtr body;
    std::string doc;  // `//` comment lines directly above the definition
};

// Ordered set of definitions with a name index.
class Library {
public:
    void add(TacticDef def);  // throws TacticError on duplicates
    const TacticDef* find(std::string_view name) const;
    const std::vector<TacticDef>& defs() const { return defs_; }
    std::size_t size() const { return defs_.size(); }

    // Load-time checks: every called name exists and the call graph is acyclic.
    void check() const;

private:
    std::vector<TacticDef> defs_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

// Reserved names that survive flush.
bool is_reserved(std::string_view name);

// Parses a library file: a sequence of `name(formals) := body` definitions.
// Each rule must satisfy vars(rhs) within vars(lhs), inst, formals and
// reserved names.  Throws ParseError / TacticError.
std::vector<TacticDef> parse_tactic_defs(std::string_view text);

// Parses a single invocation (any trans).
Trans parse_tactic_invocation(std::string_view text);

// A script: optional definitions (single-step bodies) followed by
// `;`-separated invocations, each applied as its own top-level step.
struct Script {
    std::vector<TacticDef> defs;
    std::vector<Trans> steps;
    std::vector<std::string> step_texts;
};
Script parse_script(std::string_view text);

// Checks vars(rhs) against the names bound on the path to every rule of `def`.
void check_rule_variables(const TacticDef& def);

std::string print_trans(const Trans& t);
std::string print_prop(const Prop& p);
std::string print_inst(const InstSpec& inst);
std::string print_def(const TacticDef& d);
std::string print_defs(const std::vector<TacticDef>& defs);

bool same_trans(const Trans& a, const Trans& b);
bool same_def(const TacticDef& a, const TacticDef& b);

// Names of tactics called (transitively through Seq/Or/When) by `t`.
void called_names(const Trans& t, std::vector<std::string>& out);

} // namespace dtac

#endif
