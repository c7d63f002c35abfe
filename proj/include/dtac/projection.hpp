#ifndef DTAC_PROJECTION_HPP
#define DTAC_PROJECTION_HPP

#include "dtac/ast.hpp"

namespace dtac {

// Erases everything that is not compiled: ghost methods and functions,
// ghost variables and assignments to them, asserts, requires/ensures,
// calls to ghost methods and markers.
Program compiled_projection(const Program& p);

// True for ghost or generated methods and non-`method` functions.
bool is_ghost_decl(const Node& d);

} // namespace dtac

#endif
