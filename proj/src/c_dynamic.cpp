#include "ir2c/c_dynamic.hpp"

namespace ir2c::c {

std::string to_string(const Value& v) {
    if (v.is_integer()) return to_string(v.as_integer());
    const PointerValue& p = v.as_pointer();
    if (!p.address) return c_type_name(p.referent_type) + " * null";
    return c_type_name(p.referent_type) + " * @" + std::to_string(*p.address);
}

std::string dyn_error_kind_name(DynErrorKind k) {
    switch (k) {
        case DynErrorKind::UnboundVar: return "unbound-var";
        case DynErrorKind::UnboundFun: return "unbound-fun";
        case DynErrorKind::TypeMismatch: return "type-mismatch";
        case DynErrorKind::WellDefinedness: return "well-definedness";
        case DynErrorKind::Bounds: return "bounds";
        case DynErrorKind::NullDeref: return "null-deref";
        case DynErrorKind::NoSuchArray: return "no-such-array";
        case DynErrorKind::NoFrame: return "no-frame";
        case DynErrorKind::Arity: return "arity";
        case DynErrorKind::MissingReturn: return "missing-return";
    }
    return "";
}

std::string to_string(const DynError& e) {
    return dyn_error_kind_name(e.kind) +
           (e.detail.empty() ? "" : " (" + e.detail + ")");
}

namespace {

DynError derr(DynErrorKind kind, std::string detail) {
    return DynError{kind, std::move(detail)};
}

DynError lift(const WellDefError& e) {
    return derr(DynErrorKind::WellDefinedness,
                well_def_kind_name(e.kind) + ": " + e.detail);
}

}  // namespace

void ComputationState::push_frame(Frame f) { frames.push_back(std::move(f)); }

Result<std::monostate, DynError> ComputationState::pop_frame() {
    if (frames.empty()) return derr(DynErrorKind::NoFrame, "pop_frame");
    frames.pop_back();
    return std::monostate{};
}

Result<std::monostate, DynError> ComputationState::push_scope() {
    if (frames.empty()) return derr(DynErrorKind::NoFrame, "push_scope");
    frames.back().scopes.emplace_back();
    return std::monostate{};
}

Result<std::monostate, DynError> ComputationState::pop_scope() {
    if (frames.empty()) return derr(DynErrorKind::NoFrame, "pop_scope");
    auto& scopes = frames.back().scopes;
    if (scopes.size() <= 1)
        return derr(DynErrorKind::NoFrame, "pop_scope on last scope");
    scopes.pop_back();
    return std::monostate{};
}

Result<std::monostate, DynError> ComputationState::create_var(const Ident& name,
                                                              Value v) {
    if (frames.empty()) return derr(DynErrorKind::NoFrame, "create_var");
    Scope& top = frames.back().scopes.back();
    if (!top.emplace(name.name, std::move(v)).second)
        return derr(DynErrorKind::TypeMismatch,
                    "redeclaration of '" + name.name + "' in the same scope");
    return std::monostate{};
}

Result<Value, DynError> ComputationState::read_var(const Ident& name) const {
    if (frames.empty()) return derr(DynErrorKind::NoFrame, "read_var");
    const auto& scopes = frames.back().scopes;
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        auto found = it->find(name.name);
        if (found != it->end()) return found->second;
    }
    return derr(DynErrorKind::UnboundVar, name.name);
}

Result<std::monostate, DynError> ComputationState::write_var(const Ident& name,
                                                             Value v) {
    if (frames.empty()) return derr(DynErrorKind::NoFrame, "write_var");
    auto& scopes = frames.back().scopes;
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        auto found = it->find(name.name);
        if (found == it->end()) continue;
        // Writes preserve the variable's type.
        const Value& old = found->second;
        bool same_type =
            (old.is_integer() && v.is_integer() &&
             old.as_integer().type == v.as_integer().type) ||
            (old.is_pointer() && v.is_pointer() &&
             old.as_pointer().referent_type == v.as_pointer().referent_type);
        if (!same_type)
            return derr(DynErrorKind::TypeMismatch,
                        "write of " + to_string(v) + " to '" + name.name +
                            "' holding " + to_string(old));
        found->second = std::move(v);
        return std::monostate{};
    }
    return derr(DynErrorKind::UnboundVar, name.name);
}

Result<ArrayValue, DynError> ComputationState::read_array(Address a) const {
    auto it = heap.find(a);
    if (it == heap.end())
        return derr(DynErrorKind::NoSuchArray, "@" + std::to_string(a));
    return it->second;
}

Result<std::monostate, DynError> ComputationState::write_array(Address a,
                                                               ArrayValue v) {
    auto it = heap.find(a);
    if (it == heap.end())
        return derr(DynErrorKind::NoSuchArray, "@" + std::to_string(a));
    it->second = std::move(v);
    return std::monostate{};
}

Result<FunEnv, DynError> init_fun_env(const TransUnit& tu) {
    FunEnv env;
    for (const FunDef& f : tu.fundefs) {
        FunInfo info{f.params, f.return_type, f.body};
        if (!env.emplace(f.name.name, std::move(info)).second)
            return derr(DynErrorKind::UnboundFun,
                        "duplicate function '" + f.name.name + "'");
    }
    return env;
}

// ---------------------------------------------------------------------------
// Pure expressions
// ---------------------------------------------------------------------------

namespace {

using PureResult = Result<Value, DynError>;

Result<IntegerValue, DynError> expect_integer(PureResult r, const char* what) {
    if (!r) return std::move(r).error();
    if (!r.value().is_integer())
        return derr(DynErrorKind::TypeMismatch,
                    std::string(what) + " is a pointer, expected an integer");
    return r.value().as_integer();
}

// Static type of a pure expression, with variable types taken from the
// current state. Used where the dynamic semantics needs the type of an
// unevaluated subexpression (the untaken branch of a conditional).
Result<CIntType, DynError> typeof_pure_int(const Expr& e,
                                           const ComputationState& st,
                                           const ImplParams& params) {
    using R = Result<CIntType, DynError>;
    return std::visit(
        [&](const auto& n) -> R {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const>) {
                return n.type;
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                auto v = st.read_var(n.name);
                if (!v) return std::move(v).error();
                if (!v.value().is_integer())
                    return derr(DynErrorKind::TypeMismatch,
                                "'" + n.name.name + "' is a pointer");
                return v.value().as_integer().type;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                auto t = typeof_pure_int(*n.arg, st, params);
                if (!t) return t;
                return unary_result_type(n.op, t.value(), params);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                auto l = typeof_pure_int(*n.lhs, st, params);
                if (!l) return l;
                auto r = typeof_pure_int(*n.rhs, st, params);
                if (!r) return r;
                return binary_result_type(n.op, l.value(), r.value(), params);
            } else if constexpr (std::is_same_v<T, Expr::Cond>) {
                auto a = typeof_pure_int(*n.then_branch, st, params);
                if (!a) return a;
                auto b = typeof_pure_int(*n.else_branch, st, params);
                if (!b) return b;
                return common_type(a.value(), b.value(), params);
            } else if constexpr (std::is_same_v<T, Expr::Cast>) {
                return n.target;
            } else if constexpr (std::is_same_v<T, Expr::Index>) {
                auto v = st.read_var(n.array);
                if (!v) return std::move(v).error();
                if (!v.value().is_pointer())
                    return derr(DynErrorKind::TypeMismatch,
                                "subscript of non-pointer '" + n.array.name + "'");
                return v.value().as_pointer().referent_type;
            } else if constexpr (std::is_same_v<T, Expr::LogAnd> ||
                                 std::is_same_v<T, Expr::LogOr>) {
                return ty::sint;
            } else {
                static_assert(std::is_same_v<T, Expr::Call>);
                return derr(DynErrorKind::TypeMismatch,
                            "call in a pure expression");
            }
        },
        e.node);
}

}  // namespace

Result<Value, DynError> exec_expr_pure(const Expr& e, const ComputationState& st,
                                       const ImplParams& params) {
    return std::visit(
        [&](const auto& n) -> PureResult {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const>) {
                auto v = make_int(n.type, n.value, params);
                if (!v) return lift(v.error());
                return Value{v.value()};
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                return st.read_var(n.name);
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                auto a = expect_integer(exec_expr_pure(*n.arg, st, params),
                                        "unary operand");
                if (!a) return std::move(a).error();
                auto r = exec_unary(n.op, a.value(), params);
                if (!r) return lift(r.error());
                return Value{r.value()};
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                auto l = expect_integer(exec_expr_pure(*n.lhs, st, params),
                                        "left operand");
                if (!l) return std::move(l).error();
                auto r = expect_integer(exec_expr_pure(*n.rhs, st, params),
                                        "right operand");
                if (!r) return std::move(r).error();
                auto out = exec_binary(n.op, l.value(), r.value(), params);
                if (!out) return lift(out.error());
                return Value{out.value()};
            } else if constexpr (std::is_same_v<T, Expr::Cond>) {
                auto t = expect_integer(exec_expr_pure(*n.test, st, params),
                                        "conditional test");
                if (!t) return std::move(t).error();
                bool taken_then = t.value().value != 0;
                const Expr& taken = taken_then ? *n.then_branch : *n.else_branch;
                const Expr& other = taken_then ? *n.else_branch : *n.then_branch;
                auto v = expect_integer(exec_expr_pure(taken, st, params),
                                        "conditional branch");
                if (!v) return std::move(v).error();
                // The result has the common type of both branches, so the
                // taken value is converted; the conversion is always the
                // wrap-or-preserve case and cannot fail.
                auto ot = typeof_pure_int(other, st, params);
                if (!ot) return std::move(ot).error();
                CIntType ct = common_type(v.value().type, ot.value(), params);
                auto conv = convert(promote(v.value(), params), ct, params);
                if (!conv) return lift(conv.error());
                return Value{conv.value()};
            } else if constexpr (std::is_same_v<T, Expr::Cast>) {
                auto a = expect_integer(exec_expr_pure(*n.arg, st, params),
                                        "cast operand");
                if (!a) return std::move(a).error();
                auto r = convert(a.value(), n.target, params);
                if (!r) return lift(r.error());
                return Value{r.value()};
            } else if constexpr (std::is_same_v<T, Expr::Index>) {
                auto av = st.read_var(n.array);
                if (!av) return std::move(av).error();
                if (!av.value().is_pointer())
                    return derr(DynErrorKind::TypeMismatch,
                                "subscript of non-pointer '" + n.array.name + "'");
                const PointerValue& ptr = av.value().as_pointer();
                if (!ptr.address)
                    return derr(DynErrorKind::NullDeref, n.array.name);
                auto arr = st.read_array(*ptr.address);
                if (!arr) return std::move(arr).error();
                if (arr.value().elem_type != ptr.referent_type)
                    return derr(DynErrorKind::TypeMismatch,
                                "pointer to " + c_type_name(ptr.referent_type) +
                                    " refers to an array of " +
                                    c_type_name(arr.value().elem_type));
                auto idx = expect_integer(exec_expr_pure(*n.index, st, params),
                                          "array index");
                if (!idx) return std::move(idx).error();
                auto elem = array_read(arr.value(), idx.value());
                if (!elem)
                    return derr(DynErrorKind::Bounds,
                                "index " + int128_to_string(elem.error().index) +
                                    " of array of length " +
                                    std::to_string(elem.error().length));
                return Value{elem.value()};
            } else if constexpr (std::is_same_v<T, Expr::LogAnd>) {
                auto l = expect_integer(exec_expr_pure(*n.lhs, st, params),
                                        "logical operand");
                if (!l) return std::move(l).error();
                if (l.value().value == 0)
                    return Value{IntegerValue{ty::sint, 0}};
                auto r = expect_integer(exec_expr_pure(*n.rhs, st, params),
                                        "logical operand");
                if (!r) return std::move(r).error();
                return Value{IntegerValue{ty::sint, r.value().value != 0 ? 1 : 0}};
            } else if constexpr (std::is_same_v<T, Expr::LogOr>) {
                auto l = expect_integer(exec_expr_pure(*n.lhs, st, params),
                                        "logical operand");
                if (!l) return std::move(l).error();
                if (l.value().value != 0)
                    return Value{IntegerValue{ty::sint, 1}};
                auto r = expect_integer(exec_expr_pure(*n.rhs, st, params),
                                        "logical operand");
                if (!r) return std::move(r).error();
                return Value{IntegerValue{ty::sint, r.value().value != 0 ? 1 : 0}};
            } else {
                static_assert(std::is_same_v<T, Expr::Call>);
                return derr(DynErrorKind::TypeMismatch,
                            "call in a pure expression position");
            }
        },
        e.node);
}

// ---------------------------------------------------------------------------
// Statements and functions
// ---------------------------------------------------------------------------

namespace {

// Evaluates a right-hand side that may be a top-level call. Absent value
// means a void call.
Outcome<std::optional<Value>> exec_rhs(const Expr& e, ComputationState& st,
                                       const FunEnv& env,
                                       const ImplParams& params, Fuel fuel) {
    if (const auto* call = std::get_if<Expr::Call>(&e.node)) {
        std::vector<Value> args;
        args.reserve(call->args.size());
        for (const ExprPtr& a : call->args) {
            auto v = exec_expr_pure(*a, st, params);
            if (!v) return std::move(v).error();
            args.push_back(std::move(v).value());
        }
        return exec_fun(call->fn, args, st, env, params, fuel);
    }
    auto v = exec_expr_pure(e, st, params);
    if (!v) return std::move(v).error();
    return std::optional<Value>(std::move(v).value());
}

Outcome<Completion> exec_branch_block(const Block& b, ComputationState& st,
                                      const FunEnv& env, const ImplParams& params,
                                      Fuel fuel) {
    if (auto r = st.push_scope(); !r) return std::move(r).error();
    Outcome<Completion> out = exec_block(b, st, env, params, fuel);
    if (out.is_result()) {
        if (auto r = st.pop_scope(); !r) return std::move(r).error();
    }
    return out;
}

}  // namespace

Outcome<Completion> exec_stmt(const Stmt& s, ComputationState& st,
                              const FunEnv& env, const ImplParams& params,
                              Fuel fuel) {
    if (fuel == 0) return Limit{};
    using Out = Outcome<Completion>;
    return std::visit(
        [&](const auto& n) -> Out {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Stmt::Declare>) {
                auto v = exec_rhs(*n.init, st, env, params, fuel - 1);
                if (v.is_error()) return v.error();
                if (v.is_limit()) return Limit{};
                const std::optional<Value>& val = v.result();
                if (!val)
                    return derr(DynErrorKind::TypeMismatch,
                                "void initializer for '" + n.name.name + "'");
                if (!val->is_integer() ||
                    val->as_integer().type != n.type)
                    return derr(DynErrorKind::TypeMismatch,
                                "initializer of '" + n.name.name + "' is " +
                                    to_string(*val) + ", declared " +
                                    c_type_name(n.type));
                if (auto r = st.create_var(n.name, *val); !r)
                    return std::move(r).error();
                return Completion{};
            } else if constexpr (std::is_same_v<T, Stmt::Assign>) {
                auto v = exec_rhs(*n.rhs, st, env, params, fuel - 1);
                if (v.is_error()) return v.error();
                if (v.is_limit()) return Limit{};
                if (!v.result())
                    return derr(DynErrorKind::TypeMismatch,
                                "void value assigned to '" + n.name.name + "'");
                if (auto r = st.write_var(n.name, *v.result()); !r)
                    return std::move(r).error();
                return Completion{};
            } else if constexpr (std::is_same_v<T, Stmt::AssignIndex>) {
                auto av = st.read_var(n.array);
                if (!av) return std::move(av).error();
                if (!av.value().is_pointer())
                    return derr(DynErrorKind::TypeMismatch,
                                "subscript assignment to non-pointer '" +
                                    n.array.name + "'");
                const PointerValue ptr = av.value().as_pointer();
                if (!ptr.address)
                    return derr(DynErrorKind::NullDeref, n.array.name);
                auto idx = expect_integer(exec_expr_pure(*n.index, st, params),
                                          "array index");
                if (!idx) return std::move(idx).error();
                auto rhs = exec_rhs(*n.rhs, st, env, params, fuel - 1);
                if (rhs.is_error()) return rhs.error();
                if (rhs.is_limit()) return Limit{};
                if (!rhs.result() || !rhs.result()->is_integer())
                    return derr(DynErrorKind::TypeMismatch,
                                "element assignment needs an integer value");
                auto arr = st.read_array(*ptr.address);
                if (!arr) return std::move(arr).error();
                if (arr.value().elem_type != ptr.referent_type)
                    return derr(DynErrorKind::TypeMismatch,
                                "pointer type does not match array");
                auto written = array_write(arr.value(), idx.value(),
                                           rhs.result()->as_integer());
                if (!written) {
                    const ArrayError& e = written.error();
                    if (e.kind == ArrayError::Kind::Bounds)
                        return derr(DynErrorKind::Bounds,
                                    "index " + int128_to_string(e.index) +
                                        " of array of length " +
                                        std::to_string(e.length));
                    return derr(DynErrorKind::TypeMismatch,
                                "element type mismatch in write");
                }
                if (auto r = st.write_array(*ptr.address,
                                            std::move(written).value());
                    !r)
                    return std::move(r).error();
                return Completion{};
            } else if constexpr (std::is_same_v<T, Stmt::If>) {
                auto t = expect_integer(exec_expr_pure(*n.test, st, params),
                                        "if test");
                if (!t) return std::move(t).error();
                if (t.value().value == 0) return Completion{};
                return exec_branch_block(n.then_block, st, env, params,
                                         fuel - 1);
            } else if constexpr (std::is_same_v<T, Stmt::IfElse>) {
                auto t = expect_integer(exec_expr_pure(*n.test, st, params),
                                        "if test");
                if (!t) return std::move(t).error();
                const Block& taken =
                    t.value().value != 0 ? n.then_block : n.else_block;
                return exec_branch_block(taken, st, env, params, fuel - 1);
            } else if constexpr (std::is_same_v<T, Stmt::While>) {
                return exec_stmt_while(*n.test, n.body, st, env, params,
                                       fuel - 1);
            } else if constexpr (std::is_same_v<T, Stmt::Return>) {
                if (!n.value) return Completion{true, std::nullopt};
                auto v = exec_rhs(**n.value, st, env, params, fuel - 1);
                if (v.is_error()) return v.error();
                if (v.is_limit()) return Limit{};
                if (!v.result())
                    return derr(DynErrorKind::TypeMismatch,
                                "return of a void call");
                return Completion{true, v.result()};
            } else {
                static_assert(std::is_same_v<T, Stmt::ExprStmt>);
                if (!std::holds_alternative<Expr::Call>(n.call->node))
                    return derr(DynErrorKind::TypeMismatch,
                                "expression statement must be a call");
                auto v = exec_rhs(*n.call, st, env, params, fuel - 1);
                if (v.is_error()) return v.error();
                if (v.is_limit()) return Limit{};
                return Completion{};
            }
        },
        s.node);
}

Outcome<Completion> exec_block(const Block& b, ComputationState& st,
                               const FunEnv& env, const ImplParams& params,
                               Fuel fuel) {
    std::size_t i = 0;
    while (true) {
        if (fuel == 0) return Limit{};
        if (i >= b.stmts.size()) return Completion{};
        Outcome<Completion> out = exec_stmt(b.stmts[i], st, env, params, fuel - 1);
        if (!out.is_result()) return out;
        if (out.result().returned) return out;
        fuel -= 1;
        ++i;
    }
}

Outcome<Completion> exec_stmt_while(const Expr& test, const Block& body,
                                    ComputationState& st, const FunEnv& env,
                                    const ImplParams& params, Fuel fuel) {
    while (true) {
        if (fuel == 0) return Limit{};
        auto t = expect_integer(exec_expr_pure(test, st, params), "while test");
        if (!t) return std::move(t).error();
        if (t.value().value == 0) return Completion{};
        Outcome<Completion> out =
            exec_branch_block(body, st, env, params, fuel - 1);
        if (!out.is_result()) return out;
        if (out.result().returned) return out;
        fuel -= 1;
    }
}

Outcome<std::optional<Value>> exec_fun(const Ident& name,
                                       const std::vector<Value>& args,
                                       ComputationState& st, const FunEnv& env,
                                       const ImplParams& params, Fuel fuel) {
    if (fuel == 0) return Limit{};
    auto it = env.find(name.name);
    if (it == env.end()) return derr(DynErrorKind::UnboundFun, name.name);
    const FunInfo& info = it->second;
    if (args.size() != info.params.size())
        return derr(DynErrorKind::Arity,
                    name.name + " called with " + std::to_string(args.size()) +
                        " arguments, declared " +
                        std::to_string(info.params.size()));
    Frame frame{name, {Scope{}}};
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& [pname, ptype] = info.params[i];
        const Value& a = args[i];
        bool matches =
            (ptype.is_integer() && a.is_integer() &&
             a.as_integer().type == ptype.base) ||
            (ptype.is_pointer() && a.is_pointer() &&
             a.as_pointer().referent_type == ptype.base);
        if (!matches)
            return derr(DynErrorKind::TypeMismatch,
                        "argument " + std::to_string(i + 1) + " of " +
                            name.name + " is " + to_string(a) + ", declared " +
                            to_string(ptype));
        frame.scopes.back().emplace(pname.name, a);
    }
    st.push_frame(std::move(frame));
    Outcome<Completion> out = exec_block(info.body, st, env, params, fuel - 1);
    if (out.is_limit()) return Limit{};
    if (out.is_error()) {
        // Restore the frame stack on semantic errors too; only the heap may
        // have changed.
        (void)st.pop_frame();
        return out.error();
    }
    if (auto r = st.pop_frame(); !r) return std::move(r).error();
    const Completion& c = out.result();
    if (info.return_type.is_void()) {
        if (c.value)
            return derr(DynErrorKind::TypeMismatch,
                        "void function " + name.name + " returned a value");
        return std::optional<Value>{};
    }
    if (!c.returned || !c.value)
        return derr(DynErrorKind::MissingReturn, name.name);
    const Value& v = *c.value;
    bool matches = (info.return_type.is_integer() && v.is_integer() &&
                    v.as_integer().type == info.return_type.base) ||
                   (info.return_type.is_pointer() && v.is_pointer() &&
                    v.as_pointer().referent_type == info.return_type.base);
    if (!matches)
        return derr(DynErrorKind::TypeMismatch,
                    name.name + " returned " + to_string(v) + ", declared " +
                        to_string(info.return_type));
    return std::optional<Value>{v};
}

}  // namespace ir2c::c
