#ifndef DTAC_PRINTER_HPP
#define DTAC_PRINTER_HPP

#include <string>
#include <vector>

#include "dtac/ast.hpp"
#include "dtac/position.hpp"

namespace dtac {

// Source lines occupied by one printed statement.
struct StmtLines {
    AbsolutePosition pos;  // span of length 1 over the statement
    int first = 0;
    int last = 0;
};

// Deterministic layout.  Markers print as `/*@name*/`, Generated methods
// carry a `/*generated*/` modifier.  When `lines` is given, the line range
// of every statement is recorded.
std::string print_program(const Program& p, std::vector<StmtLines>* lines = nullptr);

// Single-line rendering of any node, including pattern fragments.
std::string print_expr(const Node& e);
std::string print_node(const Node& n);
std::string print_type(const Node& t);

// Line of the method header for `method` in print_program(p) (1-based, 0 if absent).
int method_line(const Program& p, const std::string& method);

} // namespace dtac

#endif
