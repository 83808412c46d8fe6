#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ir2c/c_ast.hpp"
#include "ir2c/c_dynamic.hpp"
#include "ir2c/ir.hpp"

namespace ir2c::codegen {

// Minimal fuel with which exec_fun cannot return `limit`, for functions whose
// transitive call graph is loop-free; loop-dependent otherwise.
struct FuelBound {
    bool is_constant = false;
    c::Fuel value = 0;
};

std::string to_string(const FuelBound& b);

// The while statement a loop function translates to, plus what it affects;
// used by loop-level validation.
struct LoopTranslation {
    c::ExprPtr test;
    c::Block body;
    std::vector<ir::IrParam> params;      // the loop's formals
    std::vector<std::string> affected;    // subset of formals, tuple order
};

// Output interpretation of a function: how eval_ir's multi-value lines up
// with the C side.
struct FunOutputs {
    std::optional<c::CType> result;
    std::vector<std::string> affected_arrays;  // parameter names (non-loop)
    std::vector<std::string> affected_vars;    // formals (loops)
};

struct Translation {
    c::TransUnit tu;
    std::map<std::string, FuelBound> fuel;             // per C function
    std::map<std::string, LoopTranslation> loops;      // per loop function
    std::map<std::string, FunOutputs> outputs;         // per IR function
    ir::ProgramShapes shapes;

    std::string fuel_table() const;
};

struct TranslationError {
    std::string message;
    ir::SrcLoc loc;
};

std::string to_string(const TranslationError& e);

// Translates a checked program to a C translation unit: one function per
// non-loop IR function, in order, loops inlined as while statements. Performs
// C-like type checking along the way and re-checks the result with the static
// semantics, so a successful translation is always well-formed.
Result<Translation, TranslationError> translate(const ir::IrProgram& p,
                                                const ImplParams& params);

}  // namespace ir2c::codegen
