#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ir2c/c_ast.hpp"
#include "ir2c/result.hpp"

namespace ir2c::c {

// ---------------------------------------------------------------------------
// Static semantics: the decidable requirements C code must satisfy to be
// compiled. Expression checking yields the expression's type; statement
// checking yields the set of types the statement may return (void standing
// for completion without a return value).
// ---------------------------------------------------------------------------

struct StaticError {
    std::string message;
    std::string location;
};

// Lexically scoped variable table. Lookup searches innermost to outermost;
// shadowing across scopes is allowed, redeclaration within one scope is not.
class VarTable {
public:
    VarTable() { push_scope(); }

    void push_scope() { scopes_.emplace_back(); }
    void pop_scope() { scopes_.pop_back(); }

    bool declare(const Ident& name, const CType& type);  // false if duplicate
    const CType* lookup(const Ident& name) const;

private:
    std::vector<std::map<std::string, CType>> scopes_;
};

struct FunSig {
    std::vector<CType> param_types;
    CType return_type;
};

using FunTable = std::map<std::string, FunSig>;

// Set of possible completion types of a statement; non-empty by construction.
using TypeSet = std::set<CType, decltype([](const CType& a, const CType& b) {
    return std::tie(a.kind, a.base.sign, a.base.rank) <
           std::tie(b.kind, b.base.sign, b.base.rank);
})>;

Result<CType, StaticError> check_expr(const Expr& e, const VarTable& vars,
                                      const FunTable& funs,
                                      const ImplParams& params);

struct StmtCheck {
    TypeSet types;
};

// Checks one statement; declarations extend the innermost scope of vars.
Result<StmtCheck, StaticError> check_stmt(const Stmt& s, VarTable& vars,
                                          const FunTable& funs,
                                          const ImplParams& params);

// Checks a statement sequence, threading declarations; used for function
// bodies and nested blocks (callers manage scope push/pop).
Result<StmtCheck, StaticError> check_block(const Block& b, VarTable& vars,
                                           const FunTable& funs,
                                           const ImplParams& params);

Result<std::monostate, StaticError> check_fundef(const FunDef& f,
                                                 const FunTable& funs,
                                                 const ImplParams& params);

// Top-level static check: every function checks against the table of its
// predecessors (and itself), so callees must precede callers.
Result<std::monostate, StaticError> check_transunit(const TransUnit& tu,
                                                    const ImplParams& params);

}  // namespace ir2c::c
