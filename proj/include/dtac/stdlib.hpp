#ifndef DTAC_STDLIB_HPP
#define DTAC_STDLIB_HPP

#include <string>
#include <vector>

#include "dtac/tactic.hpp"

namespace dtac {

// The built-in tactic library source.
const char* stdlib_source();

// Parses and checks the built-in library.
Library load_stdlib();

// Parses and checks a library from source text.
Library load_library(std::string_view text);

struct ManifestEntry {
    std::string name;
    std::size_t arity = 0;
    std::string doc;
    std::string paper_ref;
};

// One entry per definition of `lib`, in definition order.
std::vector<ManifestEntry> manifest(const Library& lib);

} // namespace dtac

#endif
