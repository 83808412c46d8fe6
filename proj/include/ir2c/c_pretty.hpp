#pragma once

#include <string>

#include "ir2c/c_ast.hpp"
#include "ir2c/result.hpp"

namespace ir2c::c {

enum class Assoc { Left, Right, None };

struct Precedence {
    int level;
    Assoc assoc;
};

// C18 precedence of an expression form. Higher binds tighter.
Precedence precedence(const Expr& e);

struct PrintOptions {
    int indent = 4;
    // Implementation sizes are only needed by the parser side, to type
    // unsuffixed constants; kept here so both directions share one options
    // struct.
    ImplParams params{};
};

// Emits e with parentheses only where omitting them would change the parse.
std::string print_expr(const Expr& e);

std::string print_stmt(const Stmt& s, int indent_level, const PrintOptions& opts);

// The full .c text: ASCII, LF line endings, deterministic.
std::string print_transunit(const TransUnit& tu, const PrintOptions& opts = {});

struct ParseError {
    std::string message;
    std::size_t offset;  // byte position in the input
};

// Parses a single C expression over the subset's forms. Inverse of print_expr
// on well-formed expressions.
Result<ExprPtr, ParseError> parse_expr(const std::string& text,
                                       const ImplParams& params = ImplParams{});

}  // namespace ir2c::c
