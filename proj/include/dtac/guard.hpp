#ifndef DTAC_GUARD_HPP
#define DTAC_GUARD_HPP

#include <string>
#include <string_view>
#include <vector>

#include "dtac/ast.hpp"
#include "dtac/position.hpp"

namespace dtac {

enum class ViolationKind : std::uint8_t {
    CodeChanged,
    PublicPreStrengthened,
    PublicPostWeakened,
    PublicRemoved,
    SignatureChanged,
};

std::string_view violation_name(ViolationKind k);

struct Violation {
    ViolationKind kind = ViolationKind::CodeChanged;
    std::string method;
    std::string detail;
};

struct GuardReport {
    bool ok = true;
    std::vector<Violation> violations;
};

// Checks that `after` is a refactoring of `before`: compiled code of user
// declarations is unchanged, signatures are kept, public preconditions are
// only weakened and public postconditions only strengthened.
GuardReport check_guard(const Program& before, const Program& after);

// One line per violation, or "ok".
std::string format_report(const GuardReport& r);

struct TypeError {
    AbsolutePosition position;
    std::string message;
};

// Well-formedness: names resolve, arities match, contracts and asserts are
// boolean, no pattern residue, ghost code does not leak into compiled code.
std::vector<TypeError> typecheck(const Program& p);

} // namespace dtac

#endif
