#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ir2c/values.hpp"

namespace ir2c::c {

// ---------------------------------------------------------------------------
// Abstract syntax of the generated C subset. Shared by the code generator,
// the static and dynamic semantics, and the pretty-printer.
// ---------------------------------------------------------------------------

struct Ident {
    std::string name;

    bool operator==(const Ident&) const = default;
    auto operator<=>(const Ident&) const = default;
};

bool is_c_keyword(const std::string& s);
bool is_valid_identifier(const std::string& s);

// The type of a declaration: an integer type, a pointer to an integer type
// (array parameters), or void (function returns only).
struct CType {
    enum class Kind { Integer, Pointer, Void } kind = Kind::Void;
    CIntType base{};  // integer type, or pointer referent

    static CType integer(CIntType t) { return CType{Kind::Integer, t}; }
    static CType pointer(CIntType t) { return CType{Kind::Pointer, t}; }
    static CType void_type() { return CType{Kind::Void, {}}; }

    bool is_integer() const { return kind == Kind::Integer; }
    bool is_pointer() const { return kind == Kind::Pointer; }
    bool is_void() const { return kind == Kind::Void; }

    bool operator==(const CType&) const = default;
};

std::string to_string(const CType& t);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    struct Const {
        CIntType type;  // rank >= int only: C has no sub-int literals
        Int128 value;
    };
    struct Var {
        Ident name;
    };
    struct Unary {
        UnaryOp op;
        ExprPtr arg;
    };
    struct Binary {
        BinaryOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct Cond {
        ExprPtr test;
        ExprPtr then_branch;
        ExprPtr else_branch;
    };
    struct Cast {
        CIntType target;
        ExprPtr arg;
    };
    struct Index {
        Ident array;
        ExprPtr index;
    };
    struct Call {
        Ident fn;
        std::vector<ExprPtr> args;
    };
    struct LogAnd {
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct LogOr {
        ExprPtr lhs;
        ExprPtr rhs;
    };

    using Node = std::variant<Const, Var, Unary, Binary, Cond, Cast, Index,
                              Call, LogAnd, LogOr>;
    Node node;
};

bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

ExprPtr make_const(CIntType type, Int128 value);
ExprPtr make_var(std::string name);
ExprPtr make_unary(UnaryOp op, ExprPtr arg);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_cond(ExprPtr test, ExprPtr then_branch, ExprPtr else_branch);
ExprPtr make_cast(CIntType target, ExprPtr arg);
ExprPtr make_index(std::string array, ExprPtr index);
ExprPtr make_call(std::string fn, std::vector<ExprPtr> args);
ExprPtr make_logand(ExprPtr lhs, ExprPtr rhs);
ExprPtr make_logor(ExprPtr lhs, ExprPtr rhs);

// true if e contains no function call.
bool is_pure(const Expr& e);

struct Stmt;

struct Block {
    std::vector<Stmt> stmts;
};

bool operator==(const Block& a, const Block& b);

struct Stmt {
    struct Declare {
        CIntType type;
        Ident name;
        ExprPtr init;  // may be a call at top level
    };
    struct Assign {
        Ident name;
        ExprPtr rhs;  // may be a call at top level
    };
    struct AssignIndex {
        Ident array;
        ExprPtr index;  // pure
        ExprPtr rhs;    // may be a call at top level
    };
    struct If {
        ExprPtr test;  // pure
        Block then_block;
    };
    struct IfElse {
        ExprPtr test;  // pure
        Block then_block;
        Block else_block;
    };
    struct While {
        ExprPtr test;  // pure
        Block body;
    };
    struct Return {
        std::optional<ExprPtr> value;  // may be a call at top level
    };
    struct ExprStmt {
        ExprPtr call;  // always a call
    };

    using Node = std::variant<Declare, Assign, AssignIndex, If, IfElse, While,
                              Return, ExprStmt>;
    Node node;
};

bool operator==(const Stmt& a, const Stmt& b);

struct FunDef {
    Ident name;
    std::vector<std::pair<Ident, CType>> params;  // non-void types
    CType return_type;
    Block body;
};

struct TransUnit {
    std::vector<FunDef> fundefs;
};

// ---------------------------------------------------------------------------
// Structural checking
// ---------------------------------------------------------------------------

struct SyntaxError {
    std::string message;
    std::string location;  // e.g. "function i, parameter 2"
};

// Checks the structural invariants that do not need symbol tables: identifier
// legality, constant types and ranges, parameter shapes, call positions, and
// bottom-up ordering of distinct function names.
std::optional<SyntaxError> syntax_check(const TransUnit& tu,
                                        const ImplParams& params = ImplParams{});

}  // namespace ir2c::c
