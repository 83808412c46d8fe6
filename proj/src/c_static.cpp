#include "ir2c/c_static.hpp"

#include <tuple>

namespace ir2c::c {

bool VarTable::declare(const Ident& name, const CType& type) {
    return scopes_.back().emplace(name.name, type).second;
}

const CType* VarTable::lookup(const Ident& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
        auto found = it->find(name.name);
        if (found != it->end()) return &found->second;
    }
    return nullptr;
}

namespace {

using CheckExpr = Result<CType, StaticError>;

StaticError serr(std::string message, std::string location) {
    return StaticError{std::move(message), std::move(location)};
}

CheckExpr check_expr_impl(const Expr& e, const VarTable& vars,
                          const FunTable& funs, const ImplParams& params,
                          const std::string& loc, bool allow_call);

// Checks an operand position: integer-typed, no calls.
CheckExpr check_integer_operand(const Expr& e, const VarTable& vars,
                                const FunTable& funs, const ImplParams& params,
                                const std::string& loc, const char* what) {
    auto t = check_expr_impl(e, vars, funs, params, loc, false);
    if (!t) return t;
    if (!t.value().is_integer())
        return serr(std::string(what) + " has non-integer type " +
                        to_string(t.value()),
                    loc);
    return t;
}

CheckExpr check_expr_impl(const Expr& e, const VarTable& vars,
                          const FunTable& funs, const ImplParams& params,
                          const std::string& loc, bool allow_call) {
    return std::visit(
        [&](const auto& n) -> CheckExpr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const>) {
                if (n.type.rank < Rank::Int)
                    return serr("constant of sub-int type", loc);
                if (n.value < 0 || !fits(n.type, n.value, params))
                    return serr("constant out of range", loc);
                return CType::integer(n.type);
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                const CType* t = vars.lookup(n.name);
                if (!t) return serr("unbound variable '" + n.name.name + "'", loc);
                return *t;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                auto t = check_integer_operand(*n.arg, vars, funs, params, loc,
                                               "unary operand");
                if (!t) return t;
                return CType::integer(
                    unary_result_type(n.op, t.value().base, params));
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                auto l = check_integer_operand(*n.lhs, vars, funs, params, loc,
                                               "left operand");
                if (!l) return l;
                auto r = check_integer_operand(*n.rhs, vars, funs, params, loc,
                                               "right operand");
                if (!r) return r;
                return CType::integer(binary_result_type(
                    n.op, l.value().base, r.value().base, params));
            } else if constexpr (std::is_same_v<T, Expr::Cond>) {
                auto t = check_integer_operand(*n.test, vars, funs, params, loc,
                                               "conditional test");
                if (!t) return t;
                auto a = check_integer_operand(*n.then_branch, vars, funs,
                                               params, loc, "conditional branch");
                if (!a) return a;
                auto b = check_integer_operand(*n.else_branch, vars, funs,
                                               params, loc, "conditional branch");
                if (!b) return b;
                return CType::integer(
                    common_type(a.value().base, b.value().base, params));
            } else if constexpr (std::is_same_v<T, Expr::Cast>) {
                auto t = check_integer_operand(*n.arg, vars, funs, params, loc,
                                               "cast operand");
                if (!t) return t;
                return CType::integer(n.target);
            } else if constexpr (std::is_same_v<T, Expr::Index>) {
                const CType* at = vars.lookup(n.array);
                if (!at)
                    return serr("unbound variable '" + n.array.name + "'", loc);
                if (!at->is_pointer())
                    return serr("subscript of non-pointer '" + n.array.name + "'",
                                loc);
                auto i = check_integer_operand(*n.index, vars, funs, params,
                                               loc, "array index");
                if (!i) return i;
                return CType::integer(at->base);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                if (!allow_call)
                    return serr("call to '" + n.fn.name +
                                    "' in a nested expression position",
                                loc);
                auto sig = funs.find(n.fn.name);
                if (sig == funs.end())
                    return serr("unbound function '" + n.fn.name + "'", loc);
                if (sig->second.param_types.size() != n.args.size())
                    return serr("call to '" + n.fn.name + "' with " +
                                    std::to_string(n.args.size()) +
                                    " arguments, expected " +
                                    std::to_string(sig->second.param_types.size()),
                                loc);
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    auto at = check_expr_impl(*n.args[i], vars, funs, params,
                                              loc, false);
                    if (!at) return at;
                    // Arguments must have exactly the declared parameter
                    // types; the generator inserts explicit conversions.
                    if (!(at.value() == sig->second.param_types[i]))
                        return serr("argument " + std::to_string(i + 1) +
                                        " of '" + n.fn.name + "' has type " +
                                        to_string(at.value()) + ", expected " +
                                        to_string(sig->second.param_types[i]),
                                    loc);
                }
                return sig->second.return_type;
            } else if constexpr (std::is_same_v<T, Expr::LogAnd> ||
                                 std::is_same_v<T, Expr::LogOr>) {
                auto l = check_integer_operand(*n.lhs, vars, funs, params, loc,
                                               "logical operand");
                if (!l) return l;
                auto r = check_integer_operand(*n.rhs, vars, funs, params, loc,
                                               "logical operand");
                if (!r) return r;
                return CType::integer(ty::sint);
            }
        },
        e.node);
}

using CheckStmt = Result<StmtCheck, StaticError>;

CheckStmt check_stmt_impl(const Stmt& s, VarTable& vars, const FunTable& funs,
                          const ImplParams& params, const std::string& loc);

CheckStmt check_block_impl(const Block& b, VarTable& vars, const FunTable& funs,
                           const ImplParams& params, const std::string& loc) {
    TypeSet acc;
    bool reachable = true;
    bool terminated = false;
    for (const Stmt& s : b.stmts) {
        auto r = check_stmt_impl(s, vars, funs, params, loc);
        if (!r) return r;
        if (!reachable) continue;  // unreachable code is checked but adds nothing
        const TypeSet& ts = r.value().types;
        bool falls_through = ts.count(CType::void_type()) != 0;
        for (const CType& t : ts)
            if (!t.is_void()) acc.insert(t);
        if (!falls_through) {
            reachable = false;
            terminated = true;
        }
    }
    if (!terminated) acc.insert(CType::void_type());
    return StmtCheck{std::move(acc)};
}

CheckStmt check_stmt_impl(const Stmt& s, VarTable& vars, const FunTable& funs,
                          const ImplParams& params, const std::string& loc) {
    auto void_set = [] {
        TypeSet ts;
        ts.insert(CType::void_type());
        return StmtCheck{std::move(ts)};
    };
    return std::visit(
        [&](const auto& n) -> CheckStmt {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Stmt::Declare>) {
                auto t = check_expr_impl(*n.init, vars, funs, params, loc, true);
                if (!t) return std::move(t).error();
                if (!(t.value() == CType::integer(n.type)))
                    return serr("initializer of '" + n.name.name + "' has type " +
                                    to_string(t.value()) + ", expected " +
                                    c_type_name(n.type),
                                loc);
                if (!vars.declare(n.name, CType::integer(n.type)))
                    return serr("redeclaration of '" + n.name.name +
                                    "' in the same scope",
                                loc);
                return void_set();
            } else if constexpr (std::is_same_v<T, Stmt::Assign>) {
                const CType* vt = vars.lookup(n.name);
                if (!vt)
                    return serr("assignment to undeclared variable '" +
                                    n.name.name + "'",
                                loc);
                auto t = check_expr_impl(*n.rhs, vars, funs, params, loc, true);
                if (!t) return std::move(t).error();
                if (!(t.value() == *vt))
                    return serr("assignment to '" + n.name.name + "' of type " +
                                    to_string(t.value()) + ", expected " +
                                    to_string(*vt),
                                loc);
                return void_set();
            } else if constexpr (std::is_same_v<T, Stmt::AssignIndex>) {
                const CType* at = vars.lookup(n.array);
                if (!at)
                    return serr("assignment through undeclared '" +
                                    n.array.name + "'",
                                loc);
                if (!at->is_pointer())
                    return serr("subscript assignment to non-pointer '" +
                                    n.array.name + "'",
                                loc);
                auto i = check_integer_operand(*n.index, vars, funs, params,
                                               loc, "array index");
                if (!i) return std::move(i).error();
                auto t = check_expr_impl(*n.rhs, vars, funs, params, loc, true);
                if (!t) return std::move(t).error();
                if (!(t.value() == CType::integer(at->base)))
                    return serr("element assignment of type " +
                                    to_string(t.value()) + ", expected " +
                                    c_type_name(at->base),
                                loc);
                return void_set();
            } else if constexpr (std::is_same_v<T, Stmt::If>) {
                auto t = check_integer_operand(*n.test, vars, funs, params, loc,
                                               "if test");
                if (!t) return std::move(t).error();
                vars.push_scope();
                auto b = check_block_impl(n.then_block, vars, funs, params, loc);
                vars.pop_scope();
                if (!b) return b;
                TypeSet ts = b.value().types;
                ts.insert(CType::void_type());
                return StmtCheck{std::move(ts)};
            } else if constexpr (std::is_same_v<T, Stmt::IfElse>) {
                auto t = check_integer_operand(*n.test, vars, funs, params, loc,
                                               "if test");
                if (!t) return std::move(t).error();
                vars.push_scope();
                auto b1 = check_block_impl(n.then_block, vars, funs, params, loc);
                vars.pop_scope();
                if (!b1) return b1;
                vars.push_scope();
                auto b2 = check_block_impl(n.else_block, vars, funs, params, loc);
                vars.pop_scope();
                if (!b2) return b2;
                TypeSet ts = b1.value().types;
                for (const CType& x : b2.value().types) ts.insert(x);
                return StmtCheck{std::move(ts)};
            } else if constexpr (std::is_same_v<T, Stmt::While>) {
                if (!is_pure(*n.test))
                    return serr("while test must be pure", loc);
                auto t = check_integer_operand(*n.test, vars, funs, params, loc,
                                               "while test");
                if (!t) return std::move(t).error();
                vars.push_scope();
                auto b = check_block_impl(n.body, vars, funs, params, loc);
                vars.pop_scope();
                if (!b) return b;
                TypeSet ts = b.value().types;
                ts.insert(CType::void_type());
                return StmtCheck{std::move(ts)};
            } else if constexpr (std::is_same_v<T, Stmt::Return>) {
                TypeSet ts;
                if (!n.value) {
                    ts.insert(CType::void_type());
                    return StmtCheck{std::move(ts)};
                }
                auto t = check_expr_impl(**n.value, vars, funs, params, loc, true);
                if (!t) return std::move(t).error();
                if (t.value().is_void())
                    return serr("return of a void expression", loc);
                ts.insert(t.value());
                return StmtCheck{std::move(ts)};
            } else {
                static_assert(std::is_same_v<T, Stmt::ExprStmt>);
                if (!std::holds_alternative<Expr::Call>(n.call->node))
                    return serr("expression statement must be a call", loc);
                auto t = check_expr_impl(*n.call, vars, funs, params, loc, true);
                if (!t) return std::move(t).error();
                return void_set();
            }
        },
        s.node);
}

}  // namespace

Result<CType, StaticError> check_expr(const Expr& e, const VarTable& vars,
                                      const FunTable& funs,
                                      const ImplParams& params) {
    return check_expr_impl(e, vars, funs, params, "expression", true);
}

Result<StmtCheck, StaticError> check_stmt(const Stmt& s, VarTable& vars,
                                          const FunTable& funs,
                                          const ImplParams& params) {
    return check_stmt_impl(s, vars, funs, params, "statement");
}

Result<StmtCheck, StaticError> check_block(const Block& b, VarTable& vars,
                                           const FunTable& funs,
                                           const ImplParams& params) {
    return check_block_impl(b, vars, funs, params, "block");
}

Result<std::monostate, StaticError> check_fundef(const FunDef& f,
                                                 const FunTable& funs,
                                                 const ImplParams& params) {
    std::string loc = "function " + f.name.name;
    VarTable vars;
    for (const auto& [pname, ptype] : f.params) {
        if (ptype.is_void()) return serr("void parameter", loc);
        if (!vars.declare(pname, ptype))
            return serr("duplicate parameter '" + pname.name + "'", loc);
    }
    auto b = check_block_impl(f.body, vars, funs, params, loc);
    if (!b) return std::move(b).error();
    const TypeSet& ts = b.value().types;
    if (f.return_type.is_void()) {
        for (const CType& t : ts)
            if (!t.is_void())
                return serr("void function returns a value of type " +
                                to_string(t),
                            loc);
        return std::monostate{};
    }
    for (const CType& t : ts) {
        if (t.is_void())
            return serr("missing return on some control path", loc);
        if (!(t == f.return_type))
            return serr("body may return " + to_string(t) + ", declared " +
                            to_string(f.return_type),
                        loc);
    }
    return std::monostate{};
}

Result<std::monostate, StaticError> check_transunit(const TransUnit& tu,
                                                    const ImplParams& params) {
    FunTable funs;
    for (const FunDef& f : tu.fundefs) {
        FunSig sig;
        for (const auto& [pname, ptype] : f.params)
            sig.param_types.push_back(ptype);
        sig.return_type = f.return_type;
        if (!funs.emplace(f.name.name, std::move(sig)).second)
            return serr("duplicate function '" + f.name.name + "'",
                        "translation unit");
        auto r = check_fundef(f, funs, params);
        if (!r) return r;
    }
    return std::monostate{};
}

}  // namespace ir2c::c
