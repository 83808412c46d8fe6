#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ir2c/c_ast.hpp"
#include "ir2c/result.hpp"

namespace ir2c::c {

// ---------------------------------------------------------------------------
// Dynamic semantics: computation states and a defensive big-step interpreter.
// Execution never assumes the static checks passed; every requirement is
// re-checked on the dynamic data and failures come back as error values.
//
// Fuel discipline (pinned; the fuel bound calculator depends on it):
//   * exec_fun, exec_block, exec_stmt and exec_stmt_while return `limit`
//     when entered with fuel 0, and pass fuel - 1 to every nested call of
//     one of these four functions.
//   * exec_stmt_while re-enters itself with fuel - 1 after each iteration.
//   * Pure expression evaluation consumes no fuel.
// ---------------------------------------------------------------------------

// Opaque array identity; the semantics performs no arithmetic on addresses.
using Address = std::uint64_t;

struct PointerValue {
    CIntType referent_type;
    std::optional<Address> address;  // absent = null pointer

    bool operator==(const PointerValue&) const = default;
};

struct Value {
    std::variant<IntegerValue, PointerValue> v;

    bool is_integer() const { return v.index() == 0; }
    bool is_pointer() const { return v.index() == 1; }
    const IntegerValue& as_integer() const { return std::get<IntegerValue>(v); }
    const PointerValue& as_pointer() const { return std::get<PointerValue>(v); }

    bool operator==(const Value&) const = default;
};

std::string to_string(const Value& v);

using Scope = std::map<std::string, Value>;

struct Frame {
    Ident function;
    std::vector<Scope> scopes;  // innermost last; never empty

    bool operator==(const Frame&) const = default;
};

enum class DynErrorKind {
    UnboundVar,
    UnboundFun,
    TypeMismatch,
    WellDefinedness,
    Bounds,
    NullDeref,
    NoSuchArray,
    NoFrame,
    Arity,
    MissingReturn,
};

std::string dyn_error_kind_name(DynErrorKind k);

struct DynError {
    DynErrorKind kind;
    std::string detail;
};

std::string to_string(const DynError& e);

struct ComputationState {
    std::vector<Frame> frames;
    std::map<Address, ArrayValue> heap;

    bool operator==(const ComputationState&) const = default;

    // Basic state operations. Updates are value-semantics mutations of this
    // owned state; callers copy the state when they need the original.
    void push_frame(Frame f);
    Result<std::monostate, DynError> pop_frame();
    Result<std::monostate, DynError> push_scope();
    Result<std::monostate, DynError> pop_scope();
    Result<std::monostate, DynError> create_var(const Ident& name, Value v);
    Result<Value, DynError> read_var(const Ident& name) const;
    Result<std::monostate, DynError> write_var(const Ident& name, Value v);
    Result<ArrayValue, DynError> read_array(Address a) const;
    Result<std::monostate, DynError> write_array(Address a, ArrayValue v);
};

struct FunInfo {
    std::vector<std::pair<Ident, CType>> params;
    CType return_type;
    Block body;
};

// Function environment; built once per program, never changes during
// execution.
using FunEnv = std::map<std::string, FunInfo>;

Result<FunEnv, DynError> init_fun_env(const TransUnit& tu);

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

struct Limit {};

// result, semantic error, or fuel exhaustion. Exhaustion is not an error: it
// only says the artificial recursion budget ran out.
template <typename T>
class Outcome {
public:
    Outcome(T v) : v_(std::in_place_index<0>, std::move(v)) {}
    Outcome(DynError e) : v_(std::in_place_index<1>, std::move(e)) {}
    Outcome(Limit) : v_(std::in_place_index<2>, Limit{}) {}

    bool is_result() const { return v_.index() == 0; }
    bool is_error() const { return v_.index() == 1; }
    bool is_limit() const { return v_.index() == 2; }

    const T& result() const { return std::get<0>(v_); }
    T&& take_result() { return std::get<0>(std::move(v_)); }
    const DynError& error() const { return std::get<1>(v_); }

private:
    std::variant<T, DynError, Limit> v_;
};

using Fuel = std::uint64_t;

// How a statement (or block) finished: fell through, or returned (with an
// optional value).
struct Completion {
    bool returned = false;
    std::optional<Value> value;
};

Result<Value, DynError> exec_expr_pure(const Expr& e,
                                       const ComputationState& st,
                                       const ImplParams& params);

Outcome<Completion> exec_stmt(const Stmt& s, ComputationState& st,
                              const FunEnv& env, const ImplParams& params,
                              Fuel fuel);

Outcome<Completion> exec_block(const Block& b, ComputationState& st,
                               const FunEnv& env, const ImplParams& params,
                               Fuel fuel);

// The while case of exec_stmt, exposed so loop-level validation can drive it
// directly. Each iteration runs the body in a fresh scope of the top frame.
Outcome<Completion> exec_stmt_while(const Expr& test, const Block& body,
                                    ComputationState& st, const FunEnv& env,
                                    const ImplParams& params, Fuel fuel);

// Executes a function call: checks arity and exact argument types, runs the
// body in a fresh frame, checks the result against the return type. On any
// non-limit outcome the frame stack is restored; only the heap may differ.
Outcome<std::optional<Value>> exec_fun(const Ident& name,
                                       const std::vector<Value>& args,
                                       ComputationState& st, const FunEnv& env,
                                       const ImplParams& params, Fuel fuel);

}  // namespace ir2c::c
