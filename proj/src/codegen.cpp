#include "ir2c/codegen.hpp"

#include <algorithm>

#include "ir2c/c_static.hpp"

namespace ir2c::codegen {

using ir::IrFunction;
using ir::IrProgram;
using ir::Term;
using ir::TermPtr;

std::string to_string(const FuelBound& b) {
    return b.is_constant ? std::to_string(b.value) : "loop-dependent";
}

std::string to_string(const TranslationError& e) {
    if (e.loc.line == 0) return e.message;
    return std::to_string(e.loc.line) + ":" + std::to_string(e.loc.col) + ": " +
           e.message;
}

std::string Translation::fuel_table() const {
    std::string out = "function  fuel\n";
    for (const c::FunDef& f : tu.fundefs) {
        out += f.name.name;
        out += "  ";
        out += to_string(fuel.at(f.name.name));
        out += "\n";
    }
    return out;
}

namespace {

using TypeCtx = std::map<std::string, c::CType>;

struct Translator {
    const IrProgram& p;
    const ir::ProgramShapes& shapes;
    const ImplParams& params;
    Translation out;
    TranslationError error{};
    bool failed = false;

    bool fail(std::string message, ir::SrcLoc loc) {
        if (!failed) {
            failed = true;
            error = TranslationError{std::move(message), loc};
        }
        return false;
    }

    // ------------------------------------------------------------------
    // Typed expression translation
    // ------------------------------------------------------------------

    struct TypedExpr {
        c::ExprPtr expr;
        CIntType type;
    };

    // Integer-valued pure terms.
    bool tr_int(const Term& t, const TypeCtx& ctx, TypedExpr& te) {
        return std::visit(
            [&](const auto& n) -> bool {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Term::Var>) {
                    auto it = ctx.find(n.name);
                    if (it == ctx.end())
                        return fail("unbound variable '" + n.name + "'", t.loc);
                    if (!it->second.is_integer())
                        return fail("array variable '" + n.name +
                                        "' in an expression position",
                                    t.loc);
                    te = {c::make_var(n.name), it->second.base};
                    return true;
                } else if constexpr (std::is_same_v<T, Term::Const>) {
                    if (!fits(n.type, n.value, params))
                        return fail("constant " + int128_to_string(n.value) +
                                        " out of range for " +
                                        c_type_name(n.type),
                                    t.loc);
                    te = {c::make_const(n.type, n.value), n.type};
                    return true;
                } else if constexpr (std::is_same_v<T, Term::Unop>) {
                    TypedExpr a;
                    if (!tr_int(*n.arg, ctx, a)) return false;
                    if (a.type != n.operand_type)
                        return fail("operand of " + unary_op_name(n.op) + "-" +
                                        type_tag(n.operand_type) + " has type " +
                                        c_type_name(a.type),
                                    t.loc);
                    te = {c::make_unary(n.op, a.expr),
                          unary_result_type(n.op, a.type, params)};
                    return true;
                } else if constexpr (std::is_same_v<T, Term::Binop>) {
                    TypedExpr l, r;
                    if (!tr_int(*n.lhs, ctx, l) || !tr_int(*n.rhs, ctx, r))
                        return false;
                    if (l.type != n.lhs_type || r.type != n.rhs_type)
                        return fail(
                            "operands of " + binary_op_name(n.op) + "-" +
                                type_tag(n.lhs_type) + "-" +
                                type_tag(n.rhs_type) + " have types " +
                                c_type_name(l.type) + " and " +
                                c_type_name(r.type),
                            t.loc);
                    te = {c::make_binary(n.op, l.expr, r.expr),
                          binary_result_type(n.op, l.type, r.type, params)};
                    return true;
                } else if constexpr (std::is_same_v<T, Term::Convert>) {
                    TypedExpr a;
                    if (!tr_int(*n.arg, ctx, a)) return false;
                    if (a.type != n.from)
                        return fail("conversion operand has type " +
                                        c_type_name(a.type) + ", tag says " +
                                        c_type_name(n.from),
                                    t.loc);
                    te = {c::make_cast(n.to, a.expr), n.to};
                    return true;
                } else if constexpr (std::is_same_v<T, Term::IntFromBool>) {
                    // The boolean bridge leaves no trace in C; the underlying
                    // expression must already have the target type.
                    TypedExpr b;
                    if (!tr_bool(*n.arg, ctx, b)) return false;
                    if (b.type != n.to)
                        return fail(type_tag(n.to) +
                                        "-from-boolean wraps an expression of "
                                        "type " +
                                        c_type_name(b.type) +
                                        "; insert a conversion",
                                    t.loc);
                    te = {b.expr, b.type};
                    return true;
                } else if constexpr (std::is_same_v<T, Term::CondExpr>) {
                    TypedExpr c_test, a, b;
                    if (!tr_bool(*n.test, ctx, c_test)) return false;
                    if (!tr_int(*n.then_branch, ctx, a)) return false;
                    if (!tr_int(*n.else_branch, ctx, b)) return false;
                    if (a.type != b.type)
                        return fail("conditional branches have types " +
                                        c_type_name(a.type) + " and " +
                                        c_type_name(b.type),
                                    t.loc);
                    if (a.type.rank < Rank::Int)
                        return fail(
                            "conditional branches must have rank int or "
                            "higher (C promotes the result)",
                            t.loc);
                    te = {c::make_cond(c_test.expr, a.expr, b.expr), a.type};
                    return true;
                } else if constexpr (std::is_same_v<T, Term::ArrayRead>) {
                    auto it = ctx.find(n.array);
                    if (it == ctx.end())
                        return fail("unbound variable '" + n.array + "'", t.loc);
                    if (!it->second.is_pointer() ||
                        it->second.base != n.elem_type)
                        return fail("array read tag does not match '" +
                                        n.array + "'",
                                    t.loc);
                    TypedExpr idx;
                    if (!tr_int(*n.index, ctx, idx)) return false;
                    if (idx.type != n.index_type)
                        return fail("index has type " + c_type_name(idx.type) +
                                        ", tag says " +
                                        c_type_name(n.index_type),
                                    t.loc);
                    te = {c::make_index(n.array, idx.expr), n.elem_type};
                    return true;
                } else if constexpr (std::is_same_v<T, Term::BoolFrom> ||
                                     std::is_same_v<T, Term::And> ||
                                     std::is_same_v<T, Term::Or>) {
                    return fail(
                        "boolean-valued term where an integer is needed; "
                        "bridge it with <type>-from-boolean",
                        t.loc);
                } else if constexpr (std::is_same_v<T, Term::IndexOkp>) {
                    return fail("index-okp belongs to the guard vocabulary",
                                t.loc);
                } else {
                    return fail("statement form in an expression position",
                                t.loc);
                }
            },
            t.node);
    }

    // Boolean-valued terms become scalar C test expressions; the boolean
    // bridges disappear.
    bool tr_bool(const Term& t, const TypeCtx& ctx, TypedExpr& te) {
        if (const auto* bf = std::get_if<Term::BoolFrom>(&t.node)) {
            TypedExpr inner;
            if (!tr_int(*bf->arg, ctx, inner)) return false;
            if (inner.type != bf->from)
                return fail("boolean-from-" + type_tag(bf->from) +
                                " wraps an expression of type " +
                                c_type_name(inner.type),
                            t.loc);
            te = inner;
            return true;
        }
        if (const auto* a = std::get_if<Term::And>(&t.node)) {
            TypedExpr l, r;
            if (!tr_bool(*a->lhs, ctx, l) || !tr_bool(*a->rhs, ctx, r))
                return false;
            te = {c::make_logand(l.expr, r.expr), ty::sint};
            return true;
        }
        if (const auto* o = std::get_if<Term::Or>(&t.node)) {
            TypedExpr l, r;
            if (!tr_bool(*o->lhs, ctx, l) || !tr_bool(*o->rhs, ctx, r))
                return false;
            te = {c::make_logor(l.expr, r.expr), ty::sint};
            return true;
        }
        return fail("test must be boolean-valued (boolean-from-<type>, and, "
                    "or)",
                    t.loc);
    }

    // A call expression with translated arguments, typed by the callee's
    // return type (void allowed).
    bool tr_call(const Term& t, const Term::Call& call, const TypeCtx& ctx,
                 c::ExprPtr& expr, c::CType& type) {
        const IrFunction* callee = p.find(call.fn);
        if (!callee) return fail("call to undefined '" + call.fn + "'", t.loc);
        if (callee->is_loop)
            return fail("loop '" + call.fn + "' used as a plain call", t.loc);
        std::vector<c::ExprPtr> args;
        for (std::size_t i = 0; i < call.args.size(); ++i) {
            const ir::IrParam& prm = callee->params[i];
            if (prm.type.is_array) {
                const auto* v = std::get_if<Term::Var>(&call.args[i]->node);
                if (!v)
                    return fail("array argument must be a variable", t.loc);
                auto it = ctx.find(v->name);
                if (it == ctx.end() || !it->second.is_pointer() ||
                    it->second.base != prm.type.type)
                    return fail("array argument '" + v->name +
                                    "' does not match parameter '" + prm.name +
                                    "'",
                                t.loc);
                args.push_back(c::make_var(v->name));
            } else {
                TypedExpr a;
                if (!tr_int(*call.args[i], ctx, a)) return false;
                if (a.type != prm.type.type)
                    return fail("argument " + std::to_string(i + 1) + " of '" +
                                    call.fn + "' has type " +
                                    c_type_name(a.type) + ", declared " +
                                    c_type_name(prm.type.type),
                                t.loc);
                args.push_back(a.expr);
            }
        }
        expr = c::make_call(call.fn, std::move(args));
        const FunOutputs& fo = out.outputs.at(call.fn);
        type = fo.result ? *fo.result : c::CType::void_type();
        return true;
    }

    // ------------------------------------------------------------------
    // Statement translation
    // ------------------------------------------------------------------

    enum class Mode { Function, LoopRec, Branch };

    struct BodyCtx {
        Mode mode;
        const IrFunction* fn = nullptr;     // enclosing IR function
        std::vector<std::string> bound;     // Branch: the let-bound variables
        // Function mode: result ending, filled on first return-like terminal.
        std::optional<c::CType> result_type;
        std::vector<std::string> affected_arrays;
        bool saw_terminal = false;
    };

    bool tr_body(const Term& t, TypeCtx ctx, BodyCtx& bc,
                 std::vector<c::Stmt>& sink) {
        const Term* cur = &t;
        while (true) {
            if (const auto* let = std::get_if<Term::LetDeclar>(&cur->node)) {
                c::ExprPtr init;
                c::CType type;
                if (!tr_value_rhs(*let->rhs, ctx, init, type)) return false;
                if (!type.is_integer())
                    return fail("initializer of '" + let->var +
                                    "' has no integer value",
                                cur->loc);
                sink.push_back(c::Stmt{c::Stmt::Declare{
                    type.base, c::Ident{let->var}, init}});
                ctx[let->var] = type;
                cur = let->body.get();
                continue;
            }
            if (const auto* let = std::get_if<Term::LetAssign>(&cur->node)) {
                auto it = ctx.find(let->var);
                if (it == ctx.end())
                    return fail("assignment to unbound '" + let->var + "'",
                                cur->loc);
                c::ExprPtr rhs;
                c::CType type;
                if (!tr_value_rhs(*let->rhs, ctx, rhs, type)) return false;
                if (!(type == it->second))
                    return fail("assignment to '" + let->var + "' of type " +
                                    c::to_string(type) + ", variable has " +
                                    c::to_string(it->second),
                                cur->loc);
                sink.push_back(c::Stmt{c::Stmt::Assign{c::Ident{let->var}, rhs}});
                cur = let->body.get();
                continue;
            }
            if (const auto* let = std::get_if<Term::LetWrite>(&cur->node)) {
                const auto& w = std::get<Term::ArrayWrite>(let->write->node);
                auto it = ctx.find(w.array);
                if (it == ctx.end() || !it->second.is_pointer() ||
                    it->second.base != w.elem_type)
                    return fail("array write tag does not match '" + w.array +
                                    "'",
                                cur->loc);
                TypedExpr idx, val;
                if (!tr_int(*w.index, ctx, idx) || !tr_int(*w.value, ctx, val))
                    return false;
                if (idx.type != w.index_type)
                    return fail("index has type " + c_type_name(idx.type) +
                                    ", tag says " + c_type_name(w.index_type),
                                cur->loc);
                if (val.type != w.elem_type)
                    return fail("written value has type " +
                                    c_type_name(val.type) + ", element type is " +
                                    c_type_name(w.elem_type),
                                cur->loc);
                sink.push_back(c::Stmt{c::Stmt::AssignIndex{
                    c::Ident{w.array}, idx.expr, val.expr}});
                cur = let->body.get();
                continue;
            }
            if (const auto* let = std::get_if<Term::LetStmt>(&cur->node)) {
                if (!tr_let_stmt(*cur, *let, ctx, sink)) return false;
                cur = let->body.get();
                continue;
            }
            if (const auto* ifs = std::get_if<Term::If>(&cur->node)) {
                // Terminal if: both branches continue in the current mode.
                TypedExpr test;
                if (!tr_bool(*ifs->test, ctx, test)) return false;
                std::vector<c::Stmt> then_stmts, else_stmts;
                if (!tr_body(*ifs->then_branch, ctx, bc, then_stmts))
                    return false;
                if (!tr_body(*ifs->else_branch, ctx, bc, else_stmts))
                    return false;
                sink.push_back(c::Stmt{c::Stmt::IfElse{
                    test.expr, c::Block{std::move(then_stmts)},
                    c::Block{std::move(else_stmts)}}});
                return true;
            }
            return tr_terminal(*cur, ctx, bc, sink);
        }
    }

    bool tr_value_rhs(const Term& t, const TypeCtx& ctx, c::ExprPtr& expr,
                      c::CType& type) {
        if (const auto* call = std::get_if<Term::Call>(&t.node))
            return tr_call(t, *call, ctx, expr, type);
        TypedExpr te;
        if (!tr_int(t, ctx, te)) return false;
        expr = te.expr;
        type = c::CType::integer(te.type);
        return true;
    }

    bool tr_let_stmt(const Term& t, const Term::LetStmt& let, const TypeCtx& ctx,
                     std::vector<c::Stmt>& sink) {
        if (const auto* ifs = std::get_if<Term::If>(&let.rhs->node)) {
            TypedExpr test;
            if (!tr_bool(*ifs->test, ctx, test)) return false;
            std::vector<c::Stmt> then_stmts, else_stmts;
            if (!tr_branch(*ifs->then_branch, ctx, let.vars, then_stmts))
                return false;
            if (!tr_branch(*ifs->else_branch, ctx, let.vars, else_stmts))
                return false;
            if (else_stmts.empty())
                sink.push_back(c::Stmt{c::Stmt::If{
                    test.expr, c::Block{std::move(then_stmts)}}});
            else
                sink.push_back(c::Stmt{c::Stmt::IfElse{
                    test.expr, c::Block{std::move(then_stmts)},
                    c::Block{std::move(else_stmts)}}});
            return true;
        }
        const auto* call = std::get_if<Term::Call>(&let.rhs->node);
        if (!call)
            return fail("statement binding requires an if or a call", t.loc);
        const IrFunction* callee = p.find(call->fn);
        if (!callee) return fail("call to undefined '" + call->fn + "'", t.loc);
        if (callee->is_loop) return tr_while(t, *call, *callee, ctx, sink);
        c::ExprPtr expr;
        c::CType type;
        if (!tr_call(t, *call, ctx, expr, type)) return false;
        sink.push_back(c::Stmt{c::Stmt::ExprStmt{expr}});
        return true;
    }

    bool tr_branch(const Term& t, const TypeCtx& ctx,
                   const std::vector<std::string>& bound,
                   std::vector<c::Stmt>& sink) {
        BodyCtx bc;
        bc.mode = Mode::Branch;
        bc.bound = bound;
        return tr_body(t, ctx, bc, sink);
    }

    // Inlines a loop function call as a while statement. The argument names
    // equal the loop's formals, so the translated body refers to the caller's
    // variables directly.
    bool tr_while(const Term& t, const Term::Call& call, const IrFunction& loop,
                  const TypeCtx& ctx, std::vector<c::Stmt>& sink) {
        for (std::size_t i = 0; i < call.args.size(); ++i) {
            const auto* v = std::get_if<Term::Var>(&call.args[i]->node);
            const ir::IrParam& prm = loop.params[i];
            if (!v || v->name != prm.name)
                return fail("argument " + std::to_string(i + 1) + " of loop '" +
                                call.fn + "' must be the variable '" +
                                prm.name + "'",
                            t.loc);
            auto it = ctx.find(v->name);
            c::CType want = prm.type.is_array
                                ? c::CType::pointer(prm.type.type)
                                : c::CType::integer(prm.type.type);
            if (it == ctx.end() || !(it->second == want))
                return fail("variable '" + v->name + "' does not have type " +
                                c::to_string(want),
                            t.loc);
        }
        auto lt = translate_loop(loop);
        if (!lt) return false;
        sink.push_back(c::Stmt{c::Stmt::While{lt->test, lt->body}});
        return true;
    }

    // Translates a loop function to its while statement: the body must be an
    // if whose else-branch is exactly the affected tuple and whose
    // then-branch runs statements ending in the recursive call.
    std::optional<LoopTranslation> translate_loop(const IrFunction& loop) {
        auto cached = out.loops.find(loop.name);
        if (cached != out.loops.end()) return cached->second;

        const auto* ifs = std::get_if<Term::If>(&loop.body->node);
        if (!ifs) {
            fail("loop '" + loop.name +
                     "' does not have the shape (if test <step...> <exit>)",
                 loop.body->loc);
            return std::nullopt;
        }
        TypeCtx ctx;
        for (const ir::IrParam& prm : loop.params)
            ctx[prm.name] = prm.type.is_array
                                ? c::CType::pointer(prm.type.type)
                                : c::CType::integer(prm.type.type);
        TypedExpr test;
        if (!tr_bool(*ifs->test, ctx, test)) return std::nullopt;

        // The exit branch carries no statements; it only names the affected
        // variables.
        const Term& exit_term = *ifs->else_branch;
        bool exit_ok = std::holds_alternative<Term::Var>(exit_term.node) ||
                       std::holds_alternative<Term::Mv>(exit_term.node);
        if (!exit_ok) {
            fail("loop '" + loop.name +
                     "' has statements on its exit path; that is not a while "
                     "image",
                 exit_term.loc);
            return std::nullopt;
        }

        BodyCtx bc;
        bc.mode = Mode::LoopRec;
        bc.fn = &loop;
        std::vector<c::Stmt> body_stmts;
        if (!tr_body(*ifs->then_branch, ctx, bc, body_stmts))
            return std::nullopt;

        LoopTranslation lt;
        lt.test = test.expr;
        lt.body = c::Block{std::move(body_stmts)};
        lt.params = loop.params;
        lt.affected = shapes.at(loop.name).affected;
        out.loops.emplace(loop.name, lt);
        return lt;
    }

    bool tr_terminal(const Term& t, const TypeCtx& ctx, BodyCtx& bc,
                     std::vector<c::Stmt>& sink) {
        if (bc.mode == Mode::Branch) {
            bool ok = std::holds_alternative<Term::Var>(t.node) ||
                      std::holds_alternative<Term::Mv>(t.node);
            if (!ok)
                return fail("branch must end with the bound variables", t.loc);
            return true;  // the variable tuple is erased
        }
        if (bc.mode == Mode::LoopRec) {
            const auto* call = std::get_if<Term::Call>(&t.node);
            if (call && bc.fn && call->fn == bc.fn->name)
                return true;  // the recursive call is erased
            return fail(
                "loop step must end with the recursive call; early exits "
                "have no while image",
                t.loc);
        }
        // Function mode: return / fall off the end.
        return tr_function_end(t, ctx, bc, sink);
    }

    bool record_end(BodyCtx& bc, std::optional<c::CType> result,
                    std::vector<std::string> arrays, ir::SrcLoc loc) {
        if (bc.saw_terminal) {
            bool same = bc.result_type.has_value() == result.has_value() &&
                        (!result || *bc.result_type == *result) &&
                        bc.affected_arrays == arrays;
            if (!same)
                return fail("control paths disagree on the function's outputs",
                            loc);
            return true;
        }
        bc.saw_terminal = true;
        bc.result_type = result;
        bc.affected_arrays = std::move(arrays);
        return true;
    }

    bool tr_function_end(const Term& t, const TypeCtx& ctx, BodyCtx& bc,
                         std::vector<c::Stmt>& sink) {
        if (const auto* v = std::get_if<Term::Var>(&t.node)) {
            auto it = ctx.find(v->name);
            if (it == ctx.end())
                return fail("unbound variable '" + v->name + "'", t.loc);
            if (it->second.is_pointer())
                return record_end(bc, std::nullopt, {v->name}, t.loc);
            sink.push_back(
                c::Stmt{c::Stmt::Return{c::make_var(v->name)}});
            return record_end(bc, it->second, {}, t.loc);
        }
        if (const auto* mv = std::get_if<Term::Mv>(&t.node)) {
            std::optional<c::CType> result;
            if (mv->result) {
                TypedExpr e;
                if (!tr_int(**mv->result, ctx, e)) return false;
                sink.push_back(c::Stmt{c::Stmt::Return{e.expr}});
                result = c::CType::integer(e.type);
            }
            return record_end(bc, result, mv->vars, t.loc);
        }
        if (const auto* call = std::get_if<Term::Call>(&t.node)) {
            c::ExprPtr expr;
            c::CType type;
            if (!tr_call(t, *call, ctx, expr, type)) return false;
            const FunOutputs& fo = out.outputs.at(call->fn);
            std::vector<std::string> arrays;
            const IrFunction* callee = p.find(call->fn);
            for (const std::string& a : fo.affected_arrays) {
                for (std::size_t i = 0; i < callee->params.size(); ++i)
                    if (callee->params[i].name == a)
                        arrays.push_back(
                            std::get<Term::Var>(call->args[i]->node).name);
            }
            if (type.is_void())
                sink.push_back(c::Stmt{c::Stmt::ExprStmt{expr}});
            else
                sink.push_back(c::Stmt{c::Stmt::Return{expr}});
            return record_end(bc,
                              type.is_void() ? std::nullopt
                                             : std::optional<c::CType>(type),
                              std::move(arrays), t.loc);
        }
        TypedExpr e;
        if (!tr_int(t, ctx, e)) return false;
        sink.push_back(c::Stmt{c::Stmt::Return{e.expr}});
        return record_end(bc, c::CType::integer(e.type), {}, t.loc);
    }

    // ------------------------------------------------------------------
    // Per-function driver
    // ------------------------------------------------------------------

    bool translate_function(const IrFunction& fn) {
        TypeCtx ctx;
        c::FunDef def;
        def.name = c::Ident{fn.name};
        for (const ir::IrParam& prm : fn.params) {
            c::CType t = prm.type.is_array ? c::CType::pointer(prm.type.type)
                                           : c::CType::integer(prm.type.type);
            def.params.emplace_back(c::Ident{prm.name}, t);
            ctx[prm.name] = t;
        }
        BodyCtx bc;
        bc.mode = Mode::Function;
        bc.fn = &fn;
        std::vector<c::Stmt> stmts;
        if (!tr_body(*fn.body, ctx, bc, stmts)) return false;
        if (!bc.saw_terminal)
            return fail("function '" + fn.name + "' has no ending", fn.loc);
        def.return_type =
            bc.result_type ? *bc.result_type : c::CType::void_type();
        def.body = c::Block{std::move(stmts)};
        out.tu.fundefs.push_back(std::move(def));

        FunOutputs fo;
        fo.result = bc.result_type;
        fo.affected_arrays = shapes.at(fn.name).affected;
        out.outputs[fn.name] = std::move(fo);
        return true;
    }

    bool record_loop_outputs(const IrFunction& fn) {
        FunOutputs fo;
        fo.affected_vars = shapes.at(fn.name).affected;
        out.outputs[fn.name] = std::move(fo);
        return true;
    }
};

// ---------------------------------------------------------------------------
// Fuel bounds, computed compositionally over the generated syntax following
// the interpreter's pinned decrement points.
// ---------------------------------------------------------------------------

struct FuelCalc {
    const std::map<std::string, FuelBound>& funs;
    bool loopy = false;

    c::Fuel stmt_need(const c::Stmt& s) {
        return std::visit(
            [&](const auto& n) -> c::Fuel {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, c::Stmt::Declare>) {
                    return 1 + call_need(*n.init);
                } else if constexpr (std::is_same_v<T, c::Stmt::Assign>) {
                    return 1 + call_need(*n.rhs);
                } else if constexpr (std::is_same_v<T, c::Stmt::AssignIndex>) {
                    return 1 + call_need(*n.rhs);
                } else if constexpr (std::is_same_v<T, c::Stmt::If>) {
                    return 1 + block_need(n.then_block);
                } else if constexpr (std::is_same_v<T, c::Stmt::IfElse>) {
                    return 1 + std::max(block_need(n.then_block),
                                        block_need(n.else_block));
                } else if constexpr (std::is_same_v<T, c::Stmt::While>) {
                    loopy = true;
                    return 1;
                } else if constexpr (std::is_same_v<T, c::Stmt::Return>) {
                    return 1 + (n.value ? call_need(**n.value) : 0);
                } else {
                    static_assert(std::is_same_v<T, c::Stmt::ExprStmt>);
                    return 1 + call_need(*n.call);
                }
            },
            s.node);
    }

    // Fuel needed by a top-level call in a statement's right-hand side,
    // beyond the statement's own entry step.
    c::Fuel call_need(const c::Expr& e) {
        const auto* call = std::get_if<c::Expr::Call>(&e.node);
        if (!call) return 0;
        auto it = funs.find(call->fn.name);
        if (it == funs.end() || !it->second.is_constant) {
            loopy = true;
            return 0;
        }
        return it->second.value;
    }

    c::Fuel block_need(const c::Block& b) {
        c::Fuel need = 1;
        for (auto it = b.stmts.rbegin(); it != b.stmts.rend(); ++it)
            need = 1 + std::max(stmt_need(*it), need);
        return need;
    }
};

}  // namespace

Result<Translation, TranslationError> translate(const IrProgram& p,
                                                const ImplParams& params) {
    auto shapes = check_ir(p);
    if (!shapes)
        return TranslationError{shapes.error().message, shapes.error().loc};

    Translator tr{p, shapes.value(), params, Translation{}, {}, false};
    tr.out.shapes = shapes.value();
    for (const IrFunction& fn : p.functions) {
        if (fn.is_loop) {
            if (!tr.record_loop_outputs(fn)) return tr.error;
            // Translate the loop even when no caller uses it, so loop-level
            // validation always has its while statement.
            if (!tr.translate_loop(fn)) return tr.error;
            continue;
        }
        if (!tr.translate_function(fn)) return tr.error;
    }

    if (auto err = c::syntax_check(tr.out.tu, params))
        return TranslationError{
            "generated code failed the structural check: " + err->message +
                " (" + err->location + ")",
            {}};
    if (auto err = c::check_transunit(tr.out.tu, params); !err)
        return TranslationError{
            "generated code is not well-formed: " + err.error().message +
                " (" + err.error().location + ")",
            {}};

    // Fuel bounds, bottom-up.
    for (const c::FunDef& f : tr.out.tu.fundefs) {
        FuelCalc calc{tr.out.fuel, false};
        c::Fuel need = 1 + calc.block_need(f.body);
        tr.out.fuel[f.name.name] =
            calc.loopy ? FuelBound{false, 0} : FuelBound{true, need};
    }
    return std::move(tr.out);
}

}  // namespace ir2c::codegen
