#ifndef DTAC_ERROR_HPP
#define DTAC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dtac {

// Syntax error in program, pattern, tactic or fixture text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error(format(msg, line, col)), line_(line), col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    static std::string format(const std::string& msg, int line, int col) {
        return std::to_string(line) + ":" + std::to_string(col) + ": " + msg;
    }
    int line_;
    int col_;
};

// Semantic error while loading a tactic library (unbound metavariable,
// recursion cycle, duplicate definition).
class TacticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failure to evaluate a tactic: undefined tactic, arity mismatch, recursion,
// or an unbound variable in an instantiation.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Position could not be resolved or navigation left the block.
class PositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dtac

#endif
