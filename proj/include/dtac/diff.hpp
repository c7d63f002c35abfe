#ifndef DTAC_DIFF_HPP
#define DTAC_DIFF_HPP

#include <string>
#include <string_view>

namespace dtac {

// Line-based unified diff (LCS) with `context` lines around each change.
// Returns an empty string when the texts are equal.
std::string unified_diff(std::string_view before, std::string_view after, std::string_view from = "before",
                         std::string_view to = "after", int context = 3);

} // namespace dtac

#endif
