#include <algorithm>
#include <set>

#include "ir2c/c_ast.hpp"
#include "ir2c/ir.hpp"

namespace ir2c::ir {

namespace {

struct VarKind {
    bool is_array = false;
    CIntType elem{};  // element type for arrays
};

using Kinds = std::map<std::string, VarKind>;

enum class Want { Int, Bool };

struct EndShape {
    bool has_result = false;
    std::vector<std::string> affected;

    bool operator==(const EndShape&) const = default;
};

class FnChecker {
public:
    FnChecker(const IrProgram& p, const ProgramShapes& shapes,
              const std::set<std::string>& defined, const IrFunction& fn)
        : p_(p), shapes_(shapes), defined_(defined), fn_(fn) {}

    Result<FunShape, IrError> run() {
        Kinds kinds;
        for (const IrParam& prm : fn_.params)
            kinds[prm.name] = VarKind{prm.type.is_array, prm.type.type};

        for (const TermPtr& g : fn_.extra_guards)
            if (auto r = check_pure(*g, kinds, Want::Bool, true); !r)
                return std::move(r).error();

        FunShape shape;
        if (fn_.is_loop) {
            if (auto r = check_body(*fn_.body, kinds, {}, Ctx::loop()); !r)
                return std::move(r).error();
            if (!loop_tuple_)
                return err("loop function has no non-recursive control path",
                           fn_.loc);
            if (!saw_self_call_)
                return err("loop function never reaches its recursive call",
                           fn_.loc);
            // A formal the loop updates must be in the affected tuple; the
            // generated while statement updates the caller's variable either
            // way.
            for (const std::string& u : updated_formals_) {
                if (std::find(loop_tuple_->begin(), loop_tuple_->end(), u) ==
                    loop_tuple_->end())
                    return err("loop updates '" + u +
                                   "' but its control paths end with (" +
                                   join(*loop_tuple_) + ")",
                               fn_.loc);
            }
            shape = FunShape{false, *loop_tuple_};
        } else {
            if (auto r = check_body(*fn_.body, kinds, {}, Ctx::function()); !r)
                return std::move(r).error();
            if (!fn_shape_)
                return err("function body has no control-path ending", fn_.loc);
            shape = FunShape{fn_shape_->has_result, fn_shape_->affected};
        }
        // Every array the function writes (directly or through a callee) must
        // flow out through its affected outputs; a dropped write would make
        // the functional reading and the pointer reading disagree.
        for (const std::string& w : written_arrays_) {
            if (std::find(shape.affected.begin(), shape.affected.end(), w) ==
                shape.affected.end())
                return err("array '" + w +
                               "' is written but not among the affected "
                               "outputs",
                           fn_.loc);
        }
        return shape;
    }

private:
    struct Ctx {
        enum class Mode { Function, Loop, Branch } mode;
        std::vector<std::string> bound;  // Branch: the let-bound variables

        static Ctx function() { return {Mode::Function, {}}; }
        static Ctx loop() { return {Mode::Loop, {}}; }
        static Ctx branch(std::vector<std::string> vars) {
            return {Mode::Branch, std::move(vars)};
        }
    };

    using Check = Result<std::monostate, IrError>;

    static IrError err(std::string message, SrcLoc loc) {
        return IrError{std::move(message), loc};
    }
    static Check ok() { return std::monostate{}; }

    const VarKind* lookup(const Kinds& kinds, const std::string& name) const {
        auto it = kinds.find(name);
        return it == kinds.end() ? nullptr : &it->second;
    }

    Check check_array_var(const Kinds& kinds, const std::string& name,
                          SrcLoc loc) {
        const VarKind* k = lookup(kinds, name);
        if (!k) return err("unbound variable '" + name + "'", loc);
        if (!k->is_array)
            return err("'" + name + "' is not an array variable", loc);
        return ok();
    }

    // Expression positions: integer- or boolean-valued terms without calls,
    // lets, statement ifs, or array writes.
    Check check_pure(const Term& t, const Kinds& kinds, Want want,
                     bool in_guard) {
        auto want_int = [&](const char* what) -> Check {
            if (want != Want::Int)
                return err(std::string(what) +
                               " is integer-valued where a boolean is needed",
                           t.loc);
            return ok();
        };
        auto want_bool = [&](const char* what) -> Check {
            if (want != Want::Bool)
                return err(std::string(what) +
                               " is boolean-valued; bridge it with "
                               "<type>-from-boolean",
                           t.loc);
            return ok();
        };
        return std::visit(
            [&](const auto& n) -> Check {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Term::Var>) {
                    const VarKind* k = lookup(kinds, n.name);
                    if (!k) return err("unbound variable '" + n.name + "'", t.loc);
                    if (k->is_array)
                        return err("array variable '" + n.name +
                                       "' in an expression position",
                                   t.loc);
                    return want_int("variable");
                } else if constexpr (std::is_same_v<T, Term::Const>) {
                    return want_int("constant");
                } else if constexpr (std::is_same_v<T, Term::Unop>) {
                    if (auto r = want_int("operation"); !r) return r;
                    return check_pure(*n.arg, kinds, Want::Int, in_guard);
                } else if constexpr (std::is_same_v<T, Term::Binop>) {
                    if (auto r = want_int("operation"); !r) return r;
                    if (auto r = check_pure(*n.lhs, kinds, Want::Int, in_guard); !r)
                        return r;
                    return check_pure(*n.rhs, kinds, Want::Int, in_guard);
                } else if constexpr (std::is_same_v<T, Term::Convert>) {
                    if (auto r = want_int("conversion"); !r) return r;
                    return check_pure(*n.arg, kinds, Want::Int, in_guard);
                } else if constexpr (std::is_same_v<T, Term::BoolFrom>) {
                    if (auto r = want_bool("boolean-from"); !r) return r;
                    return check_pure(*n.arg, kinds, Want::Int, in_guard);
                } else if constexpr (std::is_same_v<T, Term::IntFromBool>) {
                    if (auto r = want_int("from-boolean"); !r) return r;
                    return check_pure(*n.arg, kinds, Want::Bool, in_guard);
                } else if constexpr (std::is_same_v<T, Term::And> ||
                                     std::is_same_v<T, Term::Or>) {
                    if (auto r = want_bool("and/or"); !r) return r;
                    if (auto r = check_pure(*n.lhs, kinds, Want::Bool, in_guard);
                        !r)
                        return r;
                    return check_pure(*n.rhs, kinds, Want::Bool, in_guard);
                } else if constexpr (std::is_same_v<T, Term::CondExpr>) {
                    if (auto r = want_int("conditional expression"); !r) return r;
                    if (auto r = check_pure(*n.test, kinds, Want::Bool, in_guard);
                        !r)
                        return r;
                    if (auto r =
                            check_pure(*n.then_branch, kinds, Want::Int, in_guard);
                        !r)
                        return r;
                    return check_pure(*n.else_branch, kinds, Want::Int, in_guard);
                } else if constexpr (std::is_same_v<T, Term::ArrayRead>) {
                    if (auto r = want_int("array read"); !r) return r;
                    if (auto r = check_array_var(kinds, n.array, t.loc); !r)
                        return r;
                    return check_pure(*n.index, kinds, Want::Int, in_guard);
                } else if constexpr (std::is_same_v<T, Term::IndexOkp>) {
                    if (!in_guard)
                        return err("index-okp belongs to the guard vocabulary",
                                   t.loc);
                    if (auto r = want_bool("index-okp"); !r) return r;
                    if (auto r = check_array_var(kinds, n.array, t.loc); !r)
                        return r;
                    return check_pure(*n.index, kinds, Want::Int, in_guard);
                } else if constexpr (std::is_same_v<T, Term::ArrayWrite>) {
                    return err("array write outside a let rebinding its array",
                               t.loc);
                } else if constexpr (std::is_same_v<T, Term::If>) {
                    return err("statement if in an expression position; "
                               "wrap it in (condexpr ...)",
                               t.loc);
                } else if constexpr (std::is_same_v<T, Term::Call>) {
                    return err("call in an expression position; bind it "
                               "with declar or assign",
                               t.loc);
                } else if constexpr (std::is_same_v<T, Term::Mv>) {
                    return err("mv in an expression position", t.loc);
                } else {
                    return err("let in an expression position", t.loc);
                }
            },
            t.node);
    }

    struct CallFacts {
        const IrFunction* callee = nullptr;
        const FunShape* shape = nullptr;
        std::vector<std::string> array_args;             // names, in arg order
        std::vector<std::string> affected_arg_names;     // per callee's affected
    };

    Result<CallFacts, IrError> check_call(const Term& t, const Term::Call& call,
                                          const Kinds& kinds) {
        if (call.fn == fn_.name)
            return err("recursive call outside a control-path ending", t.loc);
        if (defined_.find(call.fn) == defined_.end())
            return err("call to '" + call.fn +
                           "' which is not defined earlier (functions must be "
                           "in bottom-up order)",
                       t.loc);
        const IrFunction* callee = p_.find(call.fn);
        const FunShape& shape = shapes_.at(call.fn);
        if (call.args.size() != callee->params.size())
            return err("'" + call.fn + "' called with " +
                           std::to_string(call.args.size()) +
                           " arguments, declared " +
                           std::to_string(callee->params.size()),
                       t.loc);
        CallFacts facts;
        facts.callee = callee;
        facts.shape = &shape;
        std::set<std::string> seen_arrays;
        for (std::size_t i = 0; i < call.args.size(); ++i) {
            const Term& arg = *call.args[i];
            if (callee->params[i].type.is_array) {
                const auto* v = std::get_if<Term::Var>(&arg.node);
                if (!v)
                    return err("array argument " + std::to_string(i + 1) +
                                   " of '" + call.fn + "' must be a variable",
                               arg.loc);
                if (auto r = check_array_var(kinds, v->name, arg.loc); !r)
                    return std::move(r).error();
                if (!seen_arrays.insert(v->name).second)
                    return err("array '" + v->name +
                                   "' passed twice to '" + call.fn +
                                   "' (arrays may not alias)",
                               arg.loc);
                facts.array_args.push_back(v->name);
            } else {
                if (auto r = check_pure(arg, kinds, Want::Int, false); !r)
                    return std::move(r).error();
            }
        }
        for (const std::string& affected : shape.affected) {
            // Affected names are the callee's parameter names; map them to
            // the caller's argument at the same position. (For loop callees
            // integer positions are validated by the caller.)
            for (std::size_t i = 0; i < callee->params.size(); ++i) {
                if (callee->params[i].name == affected) {
                    if (const auto* v =
                            std::get_if<Term::Var>(&call.args[i]->node))
                        facts.affected_arg_names.push_back(v->name);
                    break;
                }
            }
        }
        return facts;
    }

    // A right-hand side of declar/assign: pure term or a result-only call.
    Check check_value_rhs(const Term& rhs, const Kinds& kinds) {
        if (const auto* call = std::get_if<Term::Call>(&rhs.node)) {
            auto facts = check_call(rhs, *call, kinds);
            if (!facts) return std::move(facts).error();
            if (facts.value().callee->is_loop)
                return err("loop function '" + call->fn +
                               "' must be bound with a wrapperless let or "
                               "mv-let",
                           rhs.loc);
            if (!facts.value().shape->has_result)
                return err("'" + call->fn + "' returns no result", rhs.loc);
            if (!facts.value().shape->affected.empty())
                return err("'" + call->fn +
                               "' affects arrays; bind them with a "
                               "wrapperless let or mv-let",
                           rhs.loc);
            return ok();
        }
        return check_pure(rhs, kinds, Want::Int, false);
    }

    // An update (assignment, array write, or statement binding) of a variable
    // that existed when a statement-if branch was entered must be among the
    // branch's bound variables, or the update would be dropped at the join.
    Check check_update_visible(const std::string& var,
                               const std::set<std::string>& declared,
                               const Ctx& ctx, SrcLoc loc) {
        if (ctx.mode == Ctx::Mode::Loop && !declared.count(var) &&
            fn_.find_param(var))
            updated_formals_.insert(var);
        if (ctx.mode != Ctx::Mode::Branch) return ok();
        if (declared.count(var)) return ok();
        if (std::find(ctx.bound.begin(), ctx.bound.end(), var) !=
            ctx.bound.end())
            return ok();
        return err("update of '" + var +
                       "' inside a branch that binds only (" +
                       join(ctx.bound) + ") would be dropped",
                   loc);
    }

    Check check_body(const Term& t, Kinds kinds,
                     std::set<std::string> declared, const Ctx& ctx) {
        const Term* cur = &t;
        Kinds local = std::move(kinds);
        while (true) {
            if (const auto* let = std::get_if<Term::LetDeclar>(&cur->node)) {
                if (auto r = check_value_rhs(*let->rhs, local); !r) return r;
                const VarKind* existing = lookup(local, let->var);
                if (existing && existing->is_array)
                    return err("array variable '" + let->var +
                                   "' rebound by a declaration",
                               cur->loc);
                local[let->var] = VarKind{false, {}};
                declared.insert(let->var);
                cur = let->body.get();
                continue;
            }
            if (const auto* let = std::get_if<Term::LetAssign>(&cur->node)) {
                const VarKind* k = lookup(local, let->var);
                if (!k)
                    return err("assignment to unbound variable '" + let->var +
                                   "'",
                               cur->loc);
                if (k->is_array)
                    return err("scalar assignment to array variable '" +
                                   let->var + "'",
                               cur->loc);
                if (auto r = check_update_visible(let->var, declared, ctx,
                                                  cur->loc);
                    !r)
                    return r;
                if (auto r = check_value_rhs(*let->rhs, local); !r) return r;
                cur = let->body.get();
                continue;
            }
            if (const auto* let = std::get_if<Term::LetWrite>(&cur->node)) {
                const auto& w = std::get<Term::ArrayWrite>(let->write->node);
                if (w.array != let->var)
                    return err("array write on '" + w.array +
                                   "' must rebind the same variable, not '" +
                                   let->var + "'",
                               cur->loc);
                if (auto r = check_array_var(local, w.array, cur->loc); !r)
                    return r;
                if (auto r = check_update_visible(let->var, declared, ctx,
                                                  cur->loc);
                    !r)
                    return r;
                if (auto r = check_pure(*w.index, local, Want::Int, false); !r)
                    return r;
                if (auto r = check_pure(*w.value, local, Want::Int, false); !r)
                    return r;
                written_arrays_.insert(w.array);
                cur = let->body.get();
                continue;
            }
            if (const auto* let = std::get_if<Term::LetStmt>(&cur->node)) {
                for (const std::string& v : let->vars)
                    if (auto r = check_update_visible(v, declared, ctx,
                                                      cur->loc);
                        !r)
                        return r;
                if (auto r = check_let_stmt(*cur, *let, local); !r) return r;
                cur = let->body.get();
                continue;
            }
            if (const auto* ifs = std::get_if<Term::If>(&cur->node)) {
                if (auto r = check_pure(*ifs->test, local, Want::Bool, false);
                    !r)
                    return r;
                if (auto r =
                        check_body(*ifs->then_branch, local, declared, ctx);
                    !r)
                    return r;
                return check_body(*ifs->else_branch, local, declared, ctx);
            }
            return check_terminal(*cur, local, ctx);
        }
    }

    Check check_let_stmt(const Term& t, const Term::LetStmt& let, Kinds& kinds) {
        for (const std::string& v : let.vars) {
            if (!lookup(kinds, v))
                return err("statement binding updates unbound variable '" + v +
                               "'",
                           t.loc);
        }
        std::set<std::string> distinct(let.vars.begin(), let.vars.end());
        if (distinct.size() != let.vars.size())
            return err("statement binding repeats a variable", t.loc);

        if (const auto* ifs = std::get_if<Term::If>(&let.rhs->node)) {
            if (auto r = check_pure(*ifs->test, kinds, Want::Bool, false); !r)
                return r;
            Ctx branch = Ctx::branch(let.vars);
            if (auto r = check_body(*ifs->then_branch, kinds, {}, branch); !r)
                return r;
            return check_body(*ifs->else_branch, kinds, {}, branch);
        }
        const auto* call = std::get_if<Term::Call>(&let.rhs->node);
        if (!call)
            return err("statement binding requires an if or a call", t.loc);
        if (call->fn == fn_.name)
            return err("recursive call outside a control-path ending",
                       let.rhs->loc);
        auto facts = check_call(*let.rhs, *call, kinds);
        if (!facts) return std::move(facts).error();
        const CallFacts& cf = facts.value();
        if (cf.callee->is_loop) {
            // A loop call names the loop's formals directly; the generated
            // while statement refers to those same variables.
            for (std::size_t i = 0; i < call->args.size(); ++i) {
                const auto* v = std::get_if<Term::Var>(&call->args[i]->node);
                if (!v || v->name != cf.callee->params[i].name)
                    return err("argument " + std::to_string(i + 1) + " of loop '" +
                                   call->fn + "' must be the variable '" +
                                   cf.callee->params[i].name + "'",
                               call->args[i]->loc);
                if (!lookup(kinds, v->name))
                    return err("unbound variable '" + v->name + "'",
                               call->args[i]->loc);
            }
            if (let.vars != cf.shape->affected)
                return err("loop '" + call->fn +
                               "' affects (" + join(cf.shape->affected) +
                               "); the binding must name exactly those",
                           t.loc);
            for (const std::string& a : cf.affected_arg_names) {
                const VarKind* k = lookup(kinds, a);
                if (k && k->is_array) written_arrays_.insert(a);
            }
            return ok();
        }
        if (cf.shape->has_result)
            return err("'" + call->fn +
                           "' returns a result; bind it with declar or assign",
                       t.loc);
        if (cf.affected_arg_names.empty())
            return err("'" + call->fn +
                           "' affects nothing; a statement binding is "
                           "meaningless",
                       t.loc);
        if (let.vars != cf.affected_arg_names)
            return err("call to '" + call->fn + "' affects (" +
                           join(cf.affected_arg_names) +
                           "); the binding must name exactly those",
                       t.loc);
        for (const std::string& a : cf.affected_arg_names)
            written_arrays_.insert(a);
        return ok();
    }

    static std::string join(const std::vector<std::string>& xs) {
        std::string out;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out += " ";
            out += xs[i];
        }
        return out;
    }

    Check check_terminal(const Term& t, const Kinds& kinds, const Ctx& ctx) {
        switch (ctx.mode) {
            case Ctx::Mode::Branch: return check_branch_end(t, ctx.bound);
            case Ctx::Mode::Loop: return check_loop_end(t, kinds);
            case Ctx::Mode::Function: return check_function_end(t, kinds);
        }
        return ok();
    }

    Check check_branch_end(const Term& t, const std::vector<std::string>& bound) {
        if (const auto* v = std::get_if<Term::Var>(&t.node)) {
            if (bound.size() == 1 && bound[0] == v->name) return ok();
            return err("branch must end with (" + join(bound) + ")", t.loc);
        }
        if (const auto* mv = std::get_if<Term::Mv>(&t.node)) {
            if (!mv->result && mv->vars == bound) return ok();
            return err("branch must end with (mv " + join(bound) + ")", t.loc);
        }
        return err("branch of a statement binding must end with the bound "
                   "variables",
                   t.loc);
    }

    Check check_loop_end(const Term& t, const Kinds& kinds) {
        if (const auto* call = std::get_if<Term::Call>(&t.node)) {
            if (call->fn != fn_.name)
                return err("loop control paths end with the recursive call or "
                           "the affected variables",
                           t.loc);
            if (call->args.size() != fn_.params.size())
                return err("recursive call arity mismatch", t.loc);
            for (std::size_t i = 0; i < call->args.size(); ++i) {
                const auto* v = std::get_if<Term::Var>(&call->args[i]->node);
                if (!v || v->name != fn_.params[i].name)
                    return err("recursive call argument " +
                                   std::to_string(i + 1) +
                                   " must be the formal '" +
                                   fn_.params[i].name + "'",
                               call->args[i]->loc);
            }
            saw_self_call_ = true;
            return ok();
        }
        std::vector<std::string> tuple;
        if (const auto* v = std::get_if<Term::Var>(&t.node)) {
            tuple = {v->name};
        } else if (const auto* mv = std::get_if<Term::Mv>(&t.node)) {
            if (mv->result)
                return err("loop functions return affected variables only",
                           t.loc);
            tuple = mv->vars;
        } else {
            return err("loop control paths end with the recursive call or the "
                       "affected variables",
                       t.loc);
        }
        std::set<std::string> distinct(tuple.begin(), tuple.end());
        if (distinct.size() != tuple.size())
            return err("affected variables repeat", t.loc);
        for (const std::string& v : tuple) {
            if (!fn_.find_param(v))
                return err("affected variable '" + v + "' is not a formal",
                           t.loc);
            (void)kinds;
        }
        if (loop_tuple_ && *loop_tuple_ != tuple)
            return err("control paths disagree on the affected variables: (" +
                           join(*loop_tuple_) + ") vs (" + join(tuple) + ")",
                       t.loc);
        loop_tuple_ = tuple;
        return ok();
    }

    Check check_function_end(const Term& t, const Kinds& kinds) {
        EndShape shape;
        if (const auto* v = std::get_if<Term::Var>(&t.node)) {
            const VarKind* k = lookup(kinds, v->name);
            if (!k) return err("unbound variable '" + v->name + "'", t.loc);
            if (k->is_array) {
                if (!array_param(v->name))
                    return err("affected array '" + v->name +
                                   "' is not a parameter",
                               t.loc);
                shape = EndShape{false, {v->name}};
            } else {
                shape = EndShape{true, {}};
            }
        } else if (const auto* mv = std::get_if<Term::Mv>(&t.node)) {
            if (mv->result) {
                if (auto r = check_pure(**mv->result, kinds, Want::Int, false);
                    !r)
                    return r;
            }
            std::set<std::string> distinct;
            for (const std::string& a : mv->vars) {
                if (auto r = check_array_var(kinds, a, t.loc); !r) return r;
                if (!array_param(a))
                    return err("affected array '" + a + "' is not a parameter",
                               t.loc);
                if (!distinct.insert(a).second)
                    return err("affected arrays repeat", t.loc);
            }
            shape = EndShape{mv->result.has_value(), mv->vars};
        } else if (const auto* call = std::get_if<Term::Call>(&t.node)) {
            auto facts = check_call(t, *call, kinds);
            if (!facts) return std::move(facts).error();
            const CallFacts& cf = facts.value();
            if (cf.callee->is_loop)
                return err("loop function '" + call->fn +
                               "' must be bound with a wrapperless let or "
                               "mv-let",
                           t.loc);
            shape = EndShape{cf.shape->has_result, cf.affected_arg_names};
            for (const std::string& a : shape.affected) {
                if (!array_param(a))
                    return err("affected array '" + a +
                                   "' is not a parameter",
                               t.loc);
                written_arrays_.insert(a);
            }
        } else {
            if (auto r = check_pure(t, kinds, Want::Int, false); !r) return r;
            shape = EndShape{true, {}};
        }
        if (fn_shape_ && !(*fn_shape_ == shape))
            return err("control paths disagree on the function's outputs",
                       t.loc);
        fn_shape_ = shape;
        return ok();
    }

    bool array_param(const std::string& name) const {
        const IrParam* p = fn_.find_param(name);
        return p && p->type.is_array;
    }

    const IrProgram& p_;
    const ProgramShapes& shapes_;
    const std::set<std::string>& defined_;
    const IrFunction& fn_;
    std::optional<std::vector<std::string>> loop_tuple_;
    std::optional<EndShape> fn_shape_;
    bool saw_self_call_ = false;
    std::set<std::string> written_arrays_;
    std::set<std::string> updated_formals_;
};

}  // namespace

Result<ProgramShapes, IrError> check_ir(const IrProgram& p) {
    ProgramShapes shapes;
    std::set<std::string> defined;
    std::set<std::string> all_names;
    for (const IrFunction& fn : p.functions) {
        if (!all_names.insert(fn.name).second)
            return IrError{"duplicate function '" + fn.name + "'", fn.loc};
        if (!fn.is_loop && !c::is_valid_identifier(fn.name))
            return IrError{"function name '" + fn.name +
                               "' is not a valid C identifier",
                           fn.loc};
        std::set<std::string> pnames;
        for (const IrParam& prm : fn.params) {
            if (!c::is_valid_identifier(prm.name))
                return IrError{"parameter '" + prm.name +
                                   "' is not a valid C identifier",
                               fn.loc};
            if (!pnames.insert(prm.name).second)
                return IrError{"duplicate parameter '" + prm.name + "'", fn.loc};
        }
        FnChecker checker(p, shapes, defined, fn);
        auto shape = checker.run();
        if (!shape) return std::move(shape).error();
        shapes[fn.name] = std::move(shape).value();
        defined.insert(fn.name);
    }
    return shapes;
}

}  // namespace ir2c::ir
