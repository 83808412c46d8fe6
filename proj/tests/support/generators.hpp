#pragma once

#include <random>
#include <string>
#include <vector>

#include "ir2c/c_ast.hpp"
#include "ir2c/ir.hpp"

namespace testgen {

// Random well-formed C expression over the full grammar: constants with
// suffixes, variables, all operators, conditionals, casts, subscripts and
// calls. In-range constants only, so printing and re-parsing is lossless.
ir2c::c::ExprPtr random_expr(std::mt19937_64& rng, int depth,
                             const ir2c::ImplParams& params);

// Random integer value of a random type (boundary-biased).
ir2c::IntegerValue random_int(std::mt19937_64& rng, ir2c::CIntType t,
                              const ir2c::ImplParams& params);
ir2c::CIntType random_type(std::mt19937_64& rng);

// Deterministic generator of small checked IR programs: 1-3 functions,
// straight-line bodies with declarations, assignments, statement ifs, array
// writes, calls to earlier functions, and optionally a counting loop.
// Every generated program passes check_ir and translates.
std::string random_ir_program(std::mt19937_64& rng, bool with_loop);

// Typed argument tuples for a generated function (types only; guards of
// generated programs are type conjuncts, so no rejection is needed).
std::vector<ir2c::ir::IrValue> random_args(std::mt19937_64& rng,
                                           const ir2c::ir::IrFunction& fn,
                                           const ir2c::ImplParams& params,
                                           std::size_t max_array_len);

// C token stream (identifiers, constants, punctuation), for
// whitespace-insensitive comparisons of generated code.
std::vector<std::string> c_tokens(const std::string& text);

}  // namespace testgen
