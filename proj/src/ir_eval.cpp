#include "ir2c/ir.hpp"

namespace ir2c::ir {

IrValue make_ir_int(IntegerValue v) { return IrValue{std::move(v)}; }

IrValue make_ir_array(ArrayValue a) {
    return IrValue{IrArray{
        a.elem_type,
        std::make_shared<std::vector<IntegerValue>>(std::move(a.elems))}};
}

bool ir_value_eq(const IrValue& a, const IrValue& b) {
    if (a.v.index() != b.v.index()) return false;
    if (a.is_integer()) return a.as_integer() == b.as_integer();
    if (a.is_bool()) return a.as_bool() == b.as_bool();
    return a.as_array().elem_type == b.as_array().elem_type &&
           *a.as_array().elems == *b.as_array().elems;
}

std::string to_string(const IrValue& v) {
    if (v.is_integer()) return to_string(v.as_integer());
    if (v.is_bool()) return v.as_bool() ? "true" : "false";
    const IrArray& a = v.as_array();
    std::string out = c_type_name(a.elem_type) + "[";
    for (std::size_t i = 0; i < a.elems->size(); ++i) {
        if (i) out += ",";
        out += int128_to_string((*a.elems)[i].value);
    }
    return out + "]";
}

std::string to_string(const EvalError& e) {
    switch (e.kind) {
        case EvalError::Kind::Guard: return "guard violation: " + e.detail;
        case EvalError::Kind::Cap: return "step cap exceeded: " + e.detail;
        case EvalError::Kind::Internal: return "internal: " + e.detail;
    }
    return e.detail;
}

namespace {

using Env = std::map<std::string, IrValue>;

struct Tuple {
    std::vector<IrValue> vals;
};
struct SelfCall {
    std::vector<IrValue> args;
};
using BodyOut = std::variant<Tuple, SelfCall>;

EvalError guard_err(std::string detail) {
    return EvalError{EvalError::Kind::Guard, std::move(detail)};
}
EvalError internal_err(std::string detail) {
    return EvalError{EvalError::Kind::Internal, std::move(detail)};
}

class Evaluator {
public:
    Evaluator(const IrProgram& p, const EvalOptions& opts)
        : p_(p), opts_(opts) {}

    Result<Tuple, EvalError> call_function(const IrFunction& fn,
                                           std::vector<IrValue> args) {
        if (args.size() != fn.params.size())
            return internal_err("'" + fn.name + "' called with " +
                                std::to_string(args.size()) + " arguments");
        Env env;
        for (std::size_t i = 0; i < args.size(); ++i) {
            const IrParam& prm = fn.params[i];
            const IrValue& a = args[i];
            if (prm.type.is_array) {
                if (!a.is_array() || a.as_array().elem_type != prm.type.type)
                    return guard_err("argument '" + prm.name + "' of '" +
                                     fn.name + "' fails its array type guard");
            } else {
                if (!a.is_integer() || a.as_integer().type != prm.type.type)
                    return guard_err("argument '" + prm.name + "' of '" +
                                     fn.name + "' fails its type guard");
            }
            env.emplace(prm.name, a);
        }
        if (!fn.is_loop) {
            auto out = eval_body(*fn.body, env, fn);
            if (!out) return std::move(out).error();
            if (std::holds_alternative<SelfCall>(out.value()))
                return internal_err("non-loop function recursed");
            return std::get<Tuple>(std::move(out).value());
        }
        // Loop driver: iterate the body until a non-recursive ending.
        while (true) {
            auto out = eval_body(*fn.body, env, fn);
            if (!out) return std::move(out).error();
            BodyOut step = std::move(out).value();
            if (auto* tuple = std::get_if<Tuple>(&step))
                return std::move(*tuple);
            SelfCall& next = std::get<SelfCall>(step);
            if (++steps_ > opts_.step_cap)
                return EvalError{EvalError::Kind::Cap,
                                 "loop '" + fn.name + "' exceeded " +
                                     std::to_string(opts_.step_cap) +
                                     " iterations"};
            env.clear();
            for (std::size_t i = 0; i < fn.params.size(); ++i)
                env.emplace(fn.params[i].name, std::move(next.args[i]));
        }
    }

    Result<IrValue, EvalError> eval_pure(const Term& t, const Env& env) {
        using R = Result<IrValue, EvalError>;
        return std::visit(
            [&](const auto& n) -> R {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Term::Var>) {
                    auto it = env.find(n.name);
                    if (it == env.end())
                        return internal_err("unbound variable '" + n.name + "'");
                    return it->second;
                } else if constexpr (std::is_same_v<T, Term::Const>) {
                    auto v = make_int(n.type, n.value, opts_.params);
                    if (!v)
                        return guard_err("constant " +
                                         int128_to_string(n.value) +
                                         " out of range for " +
                                         c_type_name(n.type));
                    return make_ir_int(v.value());
                } else if constexpr (std::is_same_v<T, Term::Unop>) {
                    auto a = eval_int(*n.arg, env, n.operand_type);
                    if (!a) return std::move(a).error();
                    auto r = exec_unary(n.op, a.value(), opts_.params);
                    if (!r) return lift(r.error());
                    return make_ir_int(r.value());
                } else if constexpr (std::is_same_v<T, Term::Binop>) {
                    auto l = eval_int(*n.lhs, env, n.lhs_type);
                    if (!l) return std::move(l).error();
                    auto r = eval_int(*n.rhs, env, n.rhs_type);
                    if (!r) return std::move(r).error();
                    auto out = exec_binary(n.op, l.value(), r.value(),
                                           opts_.params);
                    if (!out) return lift(out.error());
                    return make_ir_int(out.value());
                } else if constexpr (std::is_same_v<T, Term::Convert>) {
                    auto a = eval_int(*n.arg, env, n.from);
                    if (!a) return std::move(a).error();
                    auto r = convert(a.value(), n.to, opts_.params);
                    if (!r) return lift(r.error());
                    return make_ir_int(r.value());
                } else if constexpr (std::is_same_v<T, Term::BoolFrom>) {
                    auto a = eval_int(*n.arg, env, n.from);
                    if (!a) return std::move(a).error();
                    return IrValue{bool_from_int(a.value())};
                } else if constexpr (std::is_same_v<T, Term::IntFromBool>) {
                    auto a = eval_bool(*n.arg, env);
                    if (!a) return std::move(a).error();
                    return make_ir_int(int_from_bool(a.value(), n.to));
                } else if constexpr (std::is_same_v<T, Term::And>) {
                    auto l = eval_bool(*n.lhs, env);
                    if (!l) return std::move(l).error();
                    if (!l.value()) return IrValue{false};
                    auto r = eval_bool(*n.rhs, env);
                    if (!r) return std::move(r).error();
                    return IrValue{r.value()};
                } else if constexpr (std::is_same_v<T, Term::Or>) {
                    auto l = eval_bool(*n.lhs, env);
                    if (!l) return std::move(l).error();
                    if (l.value()) return IrValue{true};
                    auto r = eval_bool(*n.rhs, env);
                    if (!r) return std::move(r).error();
                    return IrValue{r.value()};
                } else if constexpr (std::is_same_v<T, Term::CondExpr>) {
                    auto c = eval_bool(*n.test, env);
                    if (!c) return std::move(c).error();
                    return eval_pure(c.value() ? *n.then_branch : *n.else_branch,
                                     env);
                } else if constexpr (std::is_same_v<T, Term::ArrayRead>) {
                    auto arr = lookup_array(env, n.array, n.elem_type);
                    if (!arr) return std::move(arr).error();
                    auto idx = eval_int(*n.index, env, n.index_type);
                    if (!idx) return std::move(idx).error();
                    ArrayValue snapshot = arr.value().snapshot();
                    auto elem = array_read(snapshot, idx.value());
                    if (!elem)
                        return guard_err("index " +
                                         int128_to_string(idx.value().value) +
                                         " out of bounds for '" + n.array +
                                         "' of length " +
                                         std::to_string(snapshot.length()));
                    return make_ir_int(elem.value());
                } else if constexpr (std::is_same_v<T, Term::IndexOkp>) {
                    auto arr = lookup_array(env, n.array, n.elem_type);
                    if (!arr) return std::move(arr).error();
                    auto idx = eval_int(*n.index, env, n.index_type);
                    if (!idx) return std::move(idx).error();
                    ArrayValue snapshot = arr.value().snapshot();
                    return IrValue{index_in_bounds(snapshot, idx.value())};
                } else {
                    return internal_err(
                        "statement form in an expression position");
                }
            },
            t.node);
    }

    std::uint64_t steps() const { return steps_; }

private:
    static EvalError lift(const WellDefError& e) {
        return guard_err(well_def_kind_name(e.kind) + ": " + e.detail);
    }

    Result<IntegerValue, EvalError> eval_int(const Term& t, const Env& env,
                                             CIntType expect) {
        auto v = eval_pure(t, env);
        if (!v) return std::move(v).error();
        if (!v.value().is_integer())
            return internal_err("expected an integer value");
        const IntegerValue& iv = v.value().as_integer();
        if (iv.type != expect)
            return guard_err("operand has type " + c_type_name(iv.type) +
                             " where " + c_type_name(expect) + " is required");
        return iv;
    }

    Result<bool, EvalError> eval_bool(const Term& t, const Env& env) {
        auto v = eval_pure(t, env);
        if (!v) return std::move(v).error();
        if (!v.value().is_bool())
            return internal_err("expected a boolean term");
        return v.value().as_bool();
    }

    Result<IrArray, EvalError> lookup_array(const Env& env,
                                            const std::string& name,
                                            CIntType elem) {
        auto it = env.find(name);
        if (it == env.end())
            return internal_err("unbound variable '" + name + "'");
        if (!it->second.is_array())
            return internal_err("'" + name + "' is not an array");
        const IrArray& a = it->second.as_array();
        if (a.elem_type != elem)
            return guard_err("array '" + name + "' has element type " +
                             c_type_name(a.elem_type) + ", operation expects " +
                             c_type_name(elem));
        return a;
    }

    // Evaluates a declar/assign right-hand side (pure term or a result-only
    // call).
    Result<IrValue, EvalError> eval_value_rhs(const Term& t, const Env& env) {
        if (const auto* call = std::get_if<Term::Call>(&t.node)) {
            auto out = eval_call(*call, env);
            if (!out) return std::move(out).error();
            if (out.value().vals.size() != 1)
                return internal_err("call result shape mismatch");
            return out.value().vals[0];
        }
        return eval_pure(t, env);
    }

    Result<Tuple, EvalError> eval_call(const Term::Call& call, const Env& env) {
        const IrFunction* callee = p_.find(call.fn);
        if (!callee) return internal_err("call to undefined '" + call.fn + "'");
        std::vector<IrValue> args;
        args.reserve(call.args.size());
        for (const TermPtr& a : call.args) {
            auto v = eval_pure(*a, env);
            if (!v) return std::move(v).error();
            args.push_back(std::move(v).value());
        }
        return call_function(*callee, std::move(args));
    }

    Result<BodyOut, EvalError> eval_body(const Term& t, Env& env,
                                         const IrFunction& fn) {
        using R = Result<BodyOut, EvalError>;
        const Term* cur = &t;
        while (true) {
            if (const auto* let = std::get_if<Term::LetDeclar>(&cur->node)) {
                auto v = eval_value_rhs(*let->rhs, env);
                if (!v) return std::move(v).error();
                env[let->var] = std::move(v).value();
                cur = let->body.get();
                continue;
            }
            if (const auto* let = std::get_if<Term::LetAssign>(&cur->node)) {
                auto v = eval_value_rhs(*let->rhs, env);
                if (!v) return std::move(v).error();
                env[let->var] = std::move(v).value();
                cur = let->body.get();
                continue;
            }
            if (const auto* let = std::get_if<Term::LetWrite>(&cur->node)) {
                const auto& w = std::get<Term::ArrayWrite>(let->write->node);
                auto arr = lookup_array(env, w.array, w.elem_type);
                if (!arr) return std::move(arr).error();
                auto idx = eval_int(*w.index, env, w.index_type);
                if (!idx) return std::move(idx).error();
                auto val = eval_int(*w.value, env, w.elem_type);
                if (!val) return std::move(val).error();
                IrArray a = std::move(arr).value();
                if (!index_in_bounds(ArrayValue{a.elem_type, *a.elems},
                                     idx.value()))
                    return guard_err(
                        "index " + int128_to_string(idx.value().value) +
                        " out of bounds for '" + w.array + "' of length " +
                        std::to_string(a.elems->size()));
                std::size_t i = static_cast<std::size_t>(idx.value().value);
                if (opts_.strategy == ArrayStrategy::CopyOnWrite) {
                    auto fresh =
                        std::make_shared<std::vector<IntegerValue>>(*a.elems);
                    (*fresh)[i] = val.value();
                    env[let->var] = IrValue{IrArray{a.elem_type, fresh}};
                } else {
                    (*a.elems)[i] = val.value();
                    env[let->var] = IrValue{a};
                }
                cur = let->body.get();
                continue;
            }
            if (const auto* let = std::get_if<Term::LetStmt>(&cur->node)) {
                auto bound = eval_stmt_rhs(*let, env, fn);
                if (!bound) return std::move(bound).error();
                Tuple tuple = std::move(bound).value();
                if (tuple.vals.size() != let->vars.size())
                    return internal_err("statement binding shape mismatch");
                for (std::size_t i = 0; i < let->vars.size(); ++i)
                    env[let->vars[i]] = std::move(tuple.vals[i]);
                cur = let->body.get();
                continue;
            }
            if (const auto* ifs = std::get_if<Term::If>(&cur->node)) {
                auto c = eval_bool(*ifs->test, env);
                if (!c) return std::move(c).error();
                cur = c.value() ? ifs->then_branch.get() : ifs->else_branch.get();
                continue;
            }
            if (const auto* call = std::get_if<Term::Call>(&cur->node)) {
                if (call->fn == fn.name) {
                    std::vector<IrValue> args;
                    args.reserve(call->args.size());
                    for (const TermPtr& a : call->args) {
                        auto v = eval_pure(*a, env);
                        if (!v) return std::move(v).error();
                        args.push_back(std::move(v).value());
                    }
                    return R(BodyOut{SelfCall{std::move(args)}});
                }
                auto out = eval_call(*call, env);
                if (!out) return std::move(out).error();
                return R(BodyOut{std::move(out).value()});
            }
            if (const auto* mv = std::get_if<Term::Mv>(&cur->node)) {
                Tuple tuple;
                if (mv->result) {
                    auto v = eval_pure(**mv->result, env);
                    if (!v) return std::move(v).error();
                    tuple.vals.push_back(std::move(v).value());
                }
                for (const std::string& name : mv->vars) {
                    auto it = env.find(name);
                    if (it == env.end())
                        return internal_err("unbound variable '" + name + "'");
                    tuple.vals.push_back(it->second);
                }
                return R(BodyOut{std::move(tuple)});
            }
            auto v = eval_pure(*cur, env);
            if (!v) return std::move(v).error();
            return R(BodyOut{Tuple{{std::move(v).value()}}});
        }
    }

    Result<Tuple, EvalError> eval_stmt_rhs(const Term::LetStmt& let, Env& env,
                                           const IrFunction& fn) {
        if (const auto* ifs = std::get_if<Term::If>(&let.rhs->node)) {
            auto c = eval_bool(*ifs->test, env);
            if (!c) return std::move(c).error();
            Env branch_env = env;
            auto out = eval_body(c.value() ? *ifs->then_branch
                                           : *ifs->else_branch,
                                 branch_env, fn);
            if (!out) return std::move(out).error();
            if (!std::holds_alternative<Tuple>(out.value()))
                return internal_err("statement branch recursed");
            return std::get<Tuple>(std::move(out).value());
        }
        const auto* call = std::get_if<Term::Call>(&let.rhs->node);
        if (!call) return internal_err("statement binding without if or call");
        return eval_call(*call, env);
    }

    const IrProgram& p_;
    const EvalOptions& opts_;
    std::uint64_t steps_ = 0;
};

}  // namespace

Result<std::vector<IrValue>, EvalError> eval_ir(const IrProgram& p,
                                                const std::string& fn,
                                                const std::vector<IrValue>& args,
                                                const EvalOptions& opts) {
    const IrFunction* f = p.find(fn);
    if (!f) return internal_err("no function '" + fn + "'");
    // Clone array arguments so in-place evaluation cannot disturb the
    // caller's copies.
    std::vector<IrValue> owned;
    owned.reserve(args.size());
    for (const IrValue& a : args) {
        if (a.is_array())
            owned.push_back(make_ir_array(a.as_array().snapshot()));
        else
            owned.push_back(a);
    }
    Evaluator ev(p, opts);
    auto out = ev.call_function(*f, std::move(owned));
    if (!out) return std::move(out).error();
    // Snapshot result arrays so callers get independent values.
    Tuple tuple = std::move(out).value();
    std::vector<IrValue> vals;
    for (IrValue& v : tuple.vals) {
        if (v.is_array())
            vals.push_back(make_ir_array(v.as_array().snapshot()));
        else
            vals.push_back(std::move(v));
    }
    return vals;
}

Result<bool, EvalError> eval_guard(const IrProgram& p, const IrFunction& fn,
                                   const TermPtr& guard,
                                   const std::vector<IrValue>& args,
                                   const EvalOptions& opts) {
    if (args.size() != fn.params.size())
        return internal_err("argument count mismatch");
    Evaluator ev(p, opts);
    std::map<std::string, IrValue> env;
    for (std::size_t i = 0; i < args.size(); ++i)
        env.emplace(fn.params[i].name, args[i]);
    auto v = ev.eval_pure(*guard, env);
    if (!v) return std::move(v).error();
    if (!v.value().is_bool())
        return internal_err("guard conjunct is not boolean-valued");
    return v.value().as_bool();
}

}  // namespace ir2c::ir
