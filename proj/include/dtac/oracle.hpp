#ifndef DTAC_ORACLE_HPP
#define DTAC_ORACLE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtac/ast.hpp"
#include "dtac/kernel.hpp"
#include "dtac/position.hpp"

namespace dtac {

// One verification failure.  `pos` is the slot just after the failing
// statement, or the end of the method for failing postconditions.
struct ErrorReport {
    std::string kind;
    Node property;
    int line = 0;
    int col = 0;
    AbsolutePosition pos;
};

// The verifier seen as a function from programs to failures.
class VerifierOracle {
public:
    virtual ~VerifierOracle() = default;
    virtual std::vector<ErrorReport> errors(const Program& p) const = 0;
};

// Starting environment for one error: ?error, ?err_arg and @err_pos.
Environment error_env(const ErrorReport& e);

// Fixture-backed oracle.  Each entry names a failure at a statement
// selector that is reported while all its `active` conditions hold and none
// of its `discharge` conditions does.
// 
// Entry syntax, one per line (`#` starts a comment):
//   kind="..."; at="@anchor" | "method:NAME K" | "method:NAME end";
//   property="expr"; [discharge="COND";]* [active="COND";]*
// where COND is `requires M E`, `ensures M E` or `asserted E`.
class FixtureOracle : public VerifierOracle {
public:
    struct Condition {
        enum class Tag : std::uint8_t { Requires, Ensures, Asserted };
        Tag tag = Tag::Asserted;
        std::string method;
        Node expr;
    };
    struct Entry {
        std::string kind;
        std::string selector;
        Node property;
        std::vector<Condition> discharge;
        std::vector<Condition> active;
        int source_line = 0;
    };

    static FixtureOracle parse(std::string_view text);  // throws ParseError

    // Binds selectors to statements of the initial program so that they
    // keep pointing at the same statement while the program evolves.
    void bind(const Program& initial);

    std::vector<ErrorReport> errors(const Program& p) const override;
    const std::vector<Entry>& entries() const { return entries_; }

    // Fixture text that parses back to the same entries.
    std::string serialize() const;

private:
    struct Target {
        std::string method;
        std::string text;  // printed statement, empty for `end`
        int occurrence = 0;
        bool end = false;
        bool bound = false;
    };
    std::vector<Entry> entries_;
    std::vector<Target> targets_;

    bool holds(const Condition& c, const Program& p, const std::string& method) const;
    std::optional<AbsolutePosition> locate(const Target& t, const Entry& e, const Program& p) const;
};

// Runs an external verifier command on the printed program and parses
// `file(line,col): Error: message` lines.  The command receives the path
// of a temporary file as its last argument.
class ExternalToolOracle : public VerifierOracle {
public:
    explicit ExternalToolOracle(std::string command) : command_(std::move(command)) {}
    std::vector<ErrorReport> errors(const Program& p) const override;

    // Parses verifier output against the program it was run on.
    static std::vector<ErrorReport> parse_output(std::string_view output, const Program& p);

private:
    std::string command_;
};

} // namespace dtac

#endif
