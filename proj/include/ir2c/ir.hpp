#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ir2c/result.hpp"
#include "ir2c/values.hpp"

namespace ir2c::ir {

// ---------------------------------------------------------------------------
// The functional IR: S-expression syntax of typed integer/array operations,
// let-bound declarations and assignments, statement-shaped ifs, and
// tail-recursive loop functions. This is the input language of the code
// generator and of the reference evaluator.
// ---------------------------------------------------------------------------

struct SrcLoc {
    int line = 0;
    int col = 0;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    struct Var {
        std::string name;
    };
    // (<tag>-dec-const n), n a non-negative decimal
    struct Const {
        CIntType type;
        Int128 value;
    };
    // (<op>-<tag> x)
    struct Unop {
        UnaryOp op;
        CIntType operand_type;
        TermPtr arg;
    };
    // (<op>-<tag1>-<tag2> x y)
    struct Binop {
        BinaryOp op;
        CIntType lhs_type;
        CIntType rhs_type;
        TermPtr lhs;
        TermPtr rhs;
    };
    // (<to>-from-<from> x)
    struct Convert {
        CIntType to;
        CIntType from;
        TermPtr arg;
    };
    // (boolean-from-<tag> x)
    struct BoolFrom {
        CIntType from;
        TermPtr arg;
    };
    // (<tag>-from-boolean b)
    struct IntFromBool {
        CIntType to;
        TermPtr arg;
    };
    struct And {
        TermPtr lhs;
        TermPtr rhs;
    };
    struct Or {
        TermPtr lhs;
        TermPtr rhs;
    };
    // Statement-position conditional; branches end in the affected variables
    // (or loop terminals).
    struct If {
        TermPtr test;
        TermPtr then_branch;
        TermPtr else_branch;
    };
    // (condexpr (if t a b)): a C conditional expression.
    struct CondExpr {
        TermPtr test;
        TermPtr then_branch;
        TermPtr else_branch;
    };
    // (<elem>-array-read-<idx> a i)
    struct ArrayRead {
        CIntType elem_type;
        CIntType index_type;
        std::string array;
        TermPtr index;
    };
    // (<elem>-array-write-<idx> a i v); legal only as the rhs of a let that
    // rebinds a.
    struct ArrayWrite {
        CIntType elem_type;
        CIntType index_type;
        std::string array;
        TermPtr index;
        TermPtr value;
    };
    // (<elem>-array-<idx>-index-okp a i): guard vocabulary, boolean-valued.
    struct IndexOkp {
        CIntType elem_type;
        CIntType index_type;
        std::string array;
        TermPtr index;
    };
    // (let ((v (declar rhs))) body)
    struct LetDeclar {
        std::string var;
        TermPtr rhs;
        TermPtr body;
    };
    // (let ((v (assign rhs))) body)
    struct LetAssign {
        std::string var;
        TermPtr rhs;
        TermPtr body;
    };
    // (let ((a (<elem>-array-write-<idx> a i v))) body)
    struct LetWrite {
        std::string var;
        TermPtr write;  // always an ArrayWrite
        TermPtr body;
    };
    // Wrapperless let / mv-let binding an if or a call.
    struct LetStmt {
        std::vector<std::string> vars;
        TermPtr rhs;
        TermPtr body;
    };
    struct Call {
        std::string fn;
        std::vector<TermPtr> args;
    };
    // (mv [(retval e)] v1 v2 ...)
    struct Mv {
        std::optional<TermPtr> result;
        std::vector<std::string> vars;
    };

    using Node = std::variant<Var, Const, Unop, Binop, Convert, BoolFrom,
                              IntFromBool, And, Or, If, CondExpr, ArrayRead,
                              ArrayWrite, IndexOkp, LetDeclar, LetAssign,
                              LetWrite, LetStmt, Call, Mv>;
    Node node;
    SrcLoc loc;
};

struct IrType {
    bool is_array = false;
    CIntType type{};

    bool operator==(const IrType&) const = default;
};

struct IrParam {
    std::string name;
    IrType type;
};

struct IrFunction {
    std::string name;
    std::vector<IrParam> params;
    std::vector<TermPtr> extra_guards;  // guard conjuncts beyond the type ones
    TermPtr body;
    bool is_loop = false;  // body contains a recursive self call
    SrcLoc loc;

    const IrParam* find_param(const std::string& name) const;
};

struct IrProgram {
    std::vector<IrFunction> functions;

    const IrFunction* find(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct IrError {
    std::string message;
    SrcLoc loc;
};

std::string to_string(const IrError& e);

// Parses a sequence of (defun ...) forms. Vertical-bar symbols keep their
// exact case; bare symbols are upcased, as a Lisp reader would.
Result<IrProgram, IrError> parse_ir(const std::string& text);

// Canonical S-expression text of a program; parsing it back reproduces the
// program. Names come out bar-quoted, guards as one (and ...) form.
std::string print_ir(const IrProgram& p);

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

// The output shape of a function, derived from its terminal positions.
// For a non-loop function: an optional result plus the affected array
// parameters (in tuple order). For a loop function: the affected formals
// (integers and arrays, in tuple order).
struct FunShape {
    bool has_result = false;
    std::vector<std::string> affected;

    bool operator==(const FunShape&) const = default;
};

using ProgramShapes = std::map<std::string, FunShape>;

// Verifies the representation rules: identifier legality, bottom-up call
// order, guard structure, tail shape of loop functions, single-threaded array
// usage, and that statement-binding right-hand sides end in the bound
// variables. Returns the per-function shapes on success.
Result<ProgramShapes, IrError> check_ir(const IrProgram& p);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Array contents are held behind a shared pointer so the evaluator can run
// either functionally (copy on write) or destructively (in place); for
// single-threaded programs the two agree.
struct IrArray {
    CIntType elem_type;
    std::shared_ptr<std::vector<IntegerValue>> elems;

    ArrayValue snapshot() const { return ArrayValue{elem_type, *elems}; }
};

struct IrValue {
    std::variant<IntegerValue, IrArray, bool> v;

    bool is_integer() const { return v.index() == 0; }
    bool is_array() const { return v.index() == 1; }
    bool is_bool() const { return v.index() == 2; }
    const IntegerValue& as_integer() const { return std::get<IntegerValue>(v); }
    const IrArray& as_array() const { return std::get<IrArray>(v); }
    bool as_bool() const { return std::get<bool>(v); }
};

IrValue make_ir_int(IntegerValue v);
IrValue make_ir_array(ArrayValue a);

// Deep equality (array contents compared element-wise).
bool ir_value_eq(const IrValue& a, const IrValue& b);
std::string to_string(const IrValue& v);

enum class ArrayStrategy { CopyOnWrite, InPlace };

struct EvalOptions {
    ImplParams params{};
    std::uint64_t step_cap = 1u << 20;  // recursive loop calls per evaluation
    ArrayStrategy strategy = ArrayStrategy::CopyOnWrite;
};

struct EvalError {
    enum class Kind {
        Guard,     // a well-definedness or bounds guard failed
        Cap,       // step cap exceeded
        Internal,  // malformed program: unbound name, kind mismatch, shape
    } kind;
    std::string detail;
};

std::string to_string(const EvalError& e);

// Runs a function on argument values, checking every operation's guard. The
// result is the function's multi-value: [result] and/or affected arrays, or
// the affected formals for a loop function. Returned arrays are fresh copies.
Result<std::vector<IrValue>, EvalError> eval_ir(const IrProgram& p,
                                                const std::string& fn,
                                                const std::vector<IrValue>& args,
                                                const EvalOptions& opts);

// Evaluates one guard conjunct (a boolean-valued term over the parameters).
Result<bool, EvalError> eval_guard(const IrProgram& p, const IrFunction& fn,
                                   const TermPtr& guard,
                                   const std::vector<IrValue>& args,
                                   const EvalOptions& opts);

// ---------------------------------------------------------------------------
// Input generation
// ---------------------------------------------------------------------------

struct GenOptions {
    ImplParams params{};
    std::uint64_t seed = 0;
    std::size_t count = 0;
    std::size_t max_array_len = 8;
    // Give up when count * this many candidates were rejected.
    std::size_t max_attempts_factor = 1000;
};

// Deterministically generates argument tuples satisfying the function's type
// conjuncts and extra guards, by rejection sampling biased toward range
// boundaries and small magnitudes. Arrays come out as distinct objects so a
// caller can place them at distinct addresses.
Result<std::vector<std::vector<IrValue>>, std::string> gen_inputs(
    const IrProgram& p, const IrFunction& fn, const GenOptions& opts);

}  // namespace ir2c::ir
