#include <doctest.h>

#include "ir2c/c_static.hpp"

using namespace ir2c;
using namespace ir2c::c;

namespace {

const ImplParams P{};

VarTable three_ints() {
    VarTable vars;
    vars.declare(Ident{"x"}, CType::integer(ty::sint));
    vars.declare(Ident{"y"}, CType::integer(ty::sint));
    vars.declare(Ident{"z"}, CType::integer(ty::sint));
    return vars;
}

}  // namespace

TEST_CASE("check_expr computes C types") {
    VarTable vars = three_ints();
    FunTable funs;

    ExprPtr f_body = make_binary(
        BinaryOp::Mul, make_binary(BinaryOp::Add, make_var("x"), make_var("y")),
        make_binary(BinaryOp::Sub, make_var("z"), make_const(ty::sint, 3)));
    auto t = check_expr(*f_body, vars, funs, P);
    REQUIRE(t.ok());
    CHECK(t.value() == CType::integer(ty::sint));

    VarTable uvars;
    uvars.declare(Ident{"x"}, CType::integer(ty::uint));
    uvars.declare(Ident{"y"}, CType::integer(ty::uint));
    auto cmp = check_expr(*make_binary(BinaryOp::Lt, make_var("x"),
                                       make_var("y")),
                          uvars, funs, P);
    REQUIRE(cmp.ok());
    CHECK(cmp.value() == CType::integer(ty::sint));

    CHECK_FALSE(check_expr(*make_var("nope"), vars, funs, P).ok());

    // Mixed operands meet at the common type.
    uvars.declare(Ident{"l"}, CType::integer(ty::slong));
    auto mixed = check_expr(*make_binary(BinaryOp::Add, make_var("x"),
                                         make_var("l")),
                            uvars, funs, P);
    REQUIRE(mixed.ok());
    CHECK(mixed.value() == CType::integer(ty::slong));

    // Shifts keep the promoted left type.
    auto sh = check_expr(*make_binary(BinaryOp::Shl, make_var("l"),
                                      make_var("x")),
                         uvars, funs, P);
    REQUIRE(sh.ok());
    CHECK(sh.value() == CType::integer(ty::slong));
}

TEST_CASE("check_expr on arrays and calls") {
    VarTable vars;
    vars.declare(Ident{"a"}, CType::pointer(ty::uchar));
    vars.declare(Ident{"i"}, CType::integer(ty::sint));
    FunTable funs;
    funs["get"] = FunSig{{CType::pointer(ty::uchar), CType::integer(ty::sint)},
                         CType::integer(ty::uchar)};
    funs["put"] = FunSig{{}, CType::void_type()};

    auto idx = check_expr(*make_index("a", make_var("i")), vars, funs, P);
    REQUIRE(idx.ok());
    CHECK(idx.value() == CType::integer(ty::uchar));

    CHECK_FALSE(check_expr(*make_index("i", make_var("i")), vars, funs, P).ok());

    auto call = check_expr(*make_call("get", {make_var("a"), make_var("i")}),
                           vars, funs, P);
    REQUIRE(call.ok());
    CHECK(call.value() == CType::integer(ty::uchar));

    // Arity and argument types must match exactly.
    CHECK_FALSE(check_expr(*make_call("get", {make_var("a")}), vars, funs, P).ok());
    CHECK_FALSE(check_expr(*make_call("get", {make_var("a"), make_var("a")}),
                           vars, funs, P)
                    .ok());
    CHECK_FALSE(check_expr(*make_call("missing", {}), vars, funs, P).ok());
    // No implicit argument conversion: uchar argument where int is declared.
    vars.declare(Ident{"c"}, CType::integer(ty::uchar));
    CHECK_FALSE(check_expr(*make_call("get", {make_var("a"), make_var("c")}),
                           vars, funs, P)
                    .ok());
}

TEST_CASE("check_stmt: sets and scoping") {
    FunTable funs;

    SUBCASE("declare extends the scope once") {
        VarTable vars;
        Stmt d{Stmt::Declare{ty::uint, Ident{"z"}, make_const(ty::uint, 1)}};
        auto r = check_stmt(d, vars, funs, P);
        REQUIRE(r.ok());
        CHECK(r.value().types.count(CType::void_type()) == 1);
        CHECK(vars.lookup(Ident{"z"}) != nullptr);
        CHECK_FALSE(check_stmt(d, vars, funs, P).ok());  // redeclaration
    }

    SUBCASE("declare checks the initializer type exactly") {
        VarTable vars;
        Stmt d{Stmt::Declare{ty::uint, Ident{"z"}, make_const(ty::sint, 1)}};
        CHECK_FALSE(check_stmt(d, vars, funs, P).ok());
    }

    SUBCASE("assignment needs a declared variable of the same type") {
        VarTable vars = three_ints();
        Stmt ok{Stmt::Assign{Ident{"x"}, make_var("y")}};
        CHECK(check_stmt(ok, vars, funs, P).ok());
        Stmt unknown{Stmt::Assign{Ident{"w"}, make_var("y")}};
        CHECK_FALSE(check_stmt(unknown, vars, funs, P).ok());
        Stmt wrong{Stmt::Assign{Ident{"x"}, make_const(ty::uint, 1)}};
        CHECK_FALSE(check_stmt(wrong, vars, funs, P).ok());
    }

    SUBCASE("if without else adds void") {
        VarTable vars = three_ints();
        Block then_b{{Stmt{Stmt::Return{make_const(ty::sint, 1)}}}};
        Stmt s{Stmt::If{make_var("x"), then_b}};
        auto r = check_stmt(s, vars, funs, P);
        REQUIRE(r.ok());
        CHECK(r.value().types.size() == 2);
        CHECK(r.value().types.count(CType::void_type()) == 1);
        CHECK(r.value().types.count(CType::integer(ty::sint)) == 1);
    }

    SUBCASE("index assignment checks pointer, index, and element types") {
        VarTable vars;
        vars.declare(Ident{"a"}, CType::pointer(ty::uchar));
        vars.declare(Ident{"i"}, CType::integer(ty::sint));
        Stmt ok{Stmt::AssignIndex{Ident{"a"}, make_var("i"),
                                  make_cast(ty::uchar, make_const(ty::sint, 1))}};
        CHECK(check_stmt(ok, vars, funs, P).ok());
        Stmt bad_elem{Stmt::AssignIndex{Ident{"a"}, make_var("i"),
                                        make_const(ty::sint, 1)}};
        CHECK_FALSE(check_stmt(bad_elem, vars, funs, P).ok());
        Stmt bad_base{Stmt::AssignIndex{Ident{"i"}, make_var("i"),
                                        make_const(ty::sint, 1)}};
        CHECK_FALSE(check_stmt(bad_base, vars, funs, P).ok());
    }
}

TEST_CASE("check_fundef enforces return consistency") {
    FunTable funs;

    FunDef f;
    f.name = Ident{"f"};
    f.params = {{Ident{"t"}, CType::integer(ty::sint)}};
    f.return_type = CType::integer(ty::sint);

    SUBCASE("complete paths are accepted") {
        Block then_b{{Stmt{Stmt::Return{make_const(ty::sint, 1)}}}};
        Block else_b{{Stmt{Stmt::Return{make_const(ty::sint, 2)}}}};
        f.body.stmts = {Stmt{Stmt::IfElse{make_var("t"), then_b, else_b}}};
        CHECK(check_fundef(f, funs, P).ok());
    }

    SUBCASE("a fall-through path is an error for int functions") {
        Block then_b{{Stmt{Stmt::Return{make_const(ty::sint, 1)}}}};
        f.body.stmts = {Stmt{Stmt::If{make_var("t"), then_b}}};
        auto r = check_fundef(f, funs, P);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error().message.find("missing return") != std::string::npos);
    }

    SUBCASE("void functions must not return values") {
        f.return_type = CType::void_type();
        f.body.stmts = {Stmt{Stmt::Return{make_const(ty::sint, 1)}}};
        CHECK_FALSE(check_fundef(f, funs, P).ok());
        f.body.stmts = {Stmt{Stmt::Return{std::nullopt}}};
        CHECK(check_fundef(f, funs, P).ok());
        f.body.stmts.clear();
        CHECK(check_fundef(f, funs, P).ok());
    }

    SUBCASE("statements after a definite return are still checked") {
        f.body.stmts = {Stmt{Stmt::Return{make_const(ty::sint, 1)}},
                        Stmt{Stmt::Assign{Ident{"w"}, make_const(ty::sint, 0)}}};
        CHECK_FALSE(check_fundef(f, funs, P).ok());
        f.body.stmts[1] = Stmt{Stmt::Assign{Ident{"t"}, make_const(ty::sint, 0)}};
        CHECK(check_fundef(f, funs, P).ok());
    }
}

TEST_CASE("check_transunit works bottom-up") {
    TransUnit tu;
    FunDef callee;
    callee.name = Ident{"one"};
    callee.return_type = CType::integer(ty::sint);
    callee.body.stmts = {Stmt{Stmt::Return{make_const(ty::sint, 1)}}};

    FunDef caller;
    caller.name = Ident{"two"};
    caller.return_type = CType::integer(ty::sint);
    caller.body.stmts = {Stmt{Stmt::Return{make_call("one", {})}}};

    SUBCASE("callee before caller is well-formed") {
        tu.fundefs = {callee, caller};
        CHECK(check_transunit(tu, P).ok());
    }

    SUBCASE("calling a later function fails") {
        tu.fundefs = {caller, callee};
        CHECK_FALSE(check_transunit(tu, P).ok());
    }

    SUBCASE("duplicate names fail") {
        tu.fundefs = {callee, callee};
        CHECK_FALSE(check_transunit(tu, P).ok());
    }
}
