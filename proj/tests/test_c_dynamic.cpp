#include <doctest.h>

#include "ir2c/c_dynamic.hpp"

using namespace ir2c;
using namespace ir2c::c;

namespace {

const ImplParams P{};

Value vint(CIntType t, Int128 v) { return Value{IntegerValue{t, v}}; }

// int f(int x, int y, int z) { return (x + y) * (z - 3); }
FunDef build_f() {
    FunDef f;
    f.name = Ident{"f"};
    f.params = {{Ident{"x"}, CType::integer(ty::sint)},
                {Ident{"y"}, CType::integer(ty::sint)},
                {Ident{"z"}, CType::integer(ty::sint)}};
    f.return_type = CType::integer(ty::sint);
    f.body.stmts = {Stmt{Stmt::Return{make_binary(
        BinaryOp::Mul, make_binary(BinaryOp::Add, make_var("x"), make_var("y")),
        make_binary(BinaryOp::Sub, make_var("z"), make_const(ty::sint, 3)))}}};
    return f;
}

// void i(unsigned char *a, int x, int y) { a[x] = ...1; a[y] = ...2; }
FunDef build_i() {
    FunDef f;
    f.name = Ident{"i"};
    f.params = {{Ident{"a"}, CType::pointer(ty::uchar)},
                {Ident{"x"}, CType::integer(ty::sint)},
                {Ident{"y"}, CType::integer(ty::sint)}};
    f.return_type = CType::void_type();
    f.body.stmts = {
        Stmt{Stmt::AssignIndex{Ident{"a"}, make_var("x"),
                               make_cast(ty::uchar, make_const(ty::sint, 1))}},
        Stmt{Stmt::AssignIndex{Ident{"a"}, make_var("y"),
                               make_cast(ty::uchar, make_const(ty::sint, 2))}}};
    return f;
}

ExprPtr h_test() {
    return make_binary(BinaryOp::Ne, make_var("n"), make_const(ty::uint, 0));
}

Block h_body() {
    return Block{{Stmt{Stmt::Assign{Ident{"r"},
                                    make_binary(BinaryOp::Mul, make_var("r"),
                                                make_var("n"))}},
                  Stmt{Stmt::Assign{Ident{"n"},
                                    make_binary(BinaryOp::Sub, make_var("n"),
                                                make_const(ty::uint, 1))}}}};
}

// unsigned int h(unsigned int n) { unsigned int r = 1U; while ... return r; }
FunDef build_h() {
    FunDef f;
    f.name = Ident{"h"};
    f.params = {{Ident{"n"}, CType::integer(ty::uint)}};
    f.return_type = CType::integer(ty::uint);
    f.body.stmts = {
        Stmt{Stmt::Declare{ty::uint, Ident{"r"}, make_const(ty::uint, 1)}},
        Stmt{Stmt::While{h_test(), h_body()}},
        Stmt{Stmt::Return{make_var("r")}}};
    return f;
}

ComputationState state_with_vars() {
    ComputationState st;
    Frame frame{Ident{"test"}, {Scope{}}};
    st.frames.push_back(frame);
    return st;
}

}  // namespace

TEST_CASE("state operations") {
    ComputationState st = state_with_vars();
    CHECK(st.create_var(Ident{"x"}, vint(ty::sint, 5)).ok());
    CHECK(st.read_var(Ident{"x"}).value() == vint(ty::sint, 5));
    CHECK_FALSE(st.create_var(Ident{"x"}, vint(ty::sint, 6)).ok());

    CHECK(st.write_var(Ident{"x"}, vint(ty::sint, 6)).ok());
    CHECK(st.read_var(Ident{"x"}).value() == vint(ty::sint, 6));
    // Writes preserve the declared type.
    CHECK_FALSE(st.write_var(Ident{"x"}, vint(ty::uint, 6)).ok());
    CHECK_FALSE(st.write_var(Ident{"w"}, vint(ty::sint, 0)).ok());
    CHECK_FALSE(st.read_var(Ident{"w"}).ok());

    SUBCASE("scopes shadow and pop") {
        CHECK(st.push_scope().ok());
        CHECK(st.create_var(Ident{"x"}, vint(ty::uint, 1)).ok());
        CHECK(st.read_var(Ident{"x"}).value() == vint(ty::uint, 1));
        CHECK(st.pop_scope().ok());
        CHECK(st.read_var(Ident{"x"}).value() == vint(ty::sint, 6));
        CHECK_FALSE(st.pop_scope().ok());  // the last scope stays
    }

    SUBCASE("frame-less states refuse variable work") {
        ComputationState empty;
        CHECK_FALSE(empty.read_var(Ident{"x"}).ok());
        CHECK(empty.read_var(Ident{"x"}).error().kind == DynErrorKind::NoFrame);
        CHECK_FALSE(empty.pop_frame().ok());
    }

    SUBCASE("heap operations are defensive") {
        CHECK_FALSE(st.read_array(9).ok());
        CHECK(st.read_array(9).error().kind == DynErrorKind::NoSuchArray);
        ArrayValue a{ty::uchar, {IntegerValue{ty::uchar, 7}}};
        CHECK_FALSE(st.write_array(9, a).ok());
        st.heap.emplace(9, a);
        CHECK(st.read_array(9).value() == a);
    }
}

TEST_CASE("init_fun_env") {
    TransUnit tu;
    tu.fundefs = {build_f(), build_i(), build_h()};
    auto env = init_fun_env(tu);
    REQUIRE(env.ok());
    CHECK(env.value().size() == 3);

    CHECK(init_fun_env(TransUnit{}).value().empty());

    tu.fundefs.push_back(build_f());
    CHECK_FALSE(init_fun_env(tu).ok());
}

TEST_CASE("pure expression evaluation") {
    ComputationState st = state_with_vars();
    REQUIRE(st.create_var(Ident{"x"}, vint(ty::sint, 2)).ok());
    REQUIRE(st.create_var(Ident{"y"}, vint(ty::sint, 3)).ok());
    REQUIRE(st.create_var(Ident{"z"}, vint(ty::sint, 5)).ok());

    ExprPtr e = make_binary(
        BinaryOp::Mul, make_binary(BinaryOp::Add, make_var("x"), make_var("y")),
        make_binary(BinaryOp::Sub, make_var("z"), make_const(ty::sint, 3)));
    auto r = exec_expr_pure(*e, st, P);
    REQUIRE(r.ok());
    CHECK(r.value() == vint(ty::sint, 10));

    SUBCASE("division by zero is a well-definedness error") {
        auto bad = exec_expr_pure(*make_binary(BinaryOp::Div, make_var("x"),
                                               make_const(ty::sint, 0)),
                                  st, P);
        REQUIRE_FALSE(bad.ok());
        CHECK(bad.error().kind == DynErrorKind::WellDefinedness);
    }

    SUBCASE("logical operators are non-strict") {
        // The right operand would divide by zero if evaluated.
        ExprPtr boom = make_binary(BinaryOp::Div, make_var("x"),
                                   make_const(ty::sint, 0));
        auto a = exec_expr_pure(*make_logand(make_const(ty::sint, 0), boom),
                                st, P);
        REQUIRE(a.ok());
        CHECK(a.value() == vint(ty::sint, 0));
        auto o = exec_expr_pure(*make_logor(make_const(ty::sint, 1), boom),
                                st, P);
        REQUIRE(o.ok());
        CHECK(o.value() == vint(ty::sint, 1));
        // When taken, the erroneous operand surfaces.
        CHECK_FALSE(
            exec_expr_pure(*make_logand(make_const(ty::sint, 1), boom), st, P)
                .ok());
    }

    SUBCASE("conditionals evaluate only the taken branch") {
        ExprPtr boom = make_binary(BinaryOp::Div, make_var("x"),
                                   make_const(ty::sint, 0));
        auto ok = exec_expr_pure(
            *make_cond(make_const(ty::sint, 1), make_var("x"), boom), st, P);
        REQUIRE(ok.ok());
        CHECK(ok.value() == vint(ty::sint, 2));
        // The result carries the common type of both branches.
        ExprPtr widened = make_cond(make_const(ty::sint, 1), make_var("x"),
                                    make_const(ty::slong, 7));
        auto w = exec_expr_pure(*widened, st, P);
        REQUIRE(w.ok());
        CHECK(w.value() == vint(ty::slong, 2));
    }

    SUBCASE("array reads go through pointers defensively") {
        st.heap.emplace(1, ArrayValue{ty::uchar,
                                      {IntegerValue{ty::uchar, 9},
                                       IntegerValue{ty::uchar, 8}}});
        REQUIRE(st.create_var(Ident{"a"},
                              Value{PointerValue{ty::uchar, 1}})
                    .ok());
        REQUIRE(st.create_var(Ident{"pnull"},
                              Value{PointerValue{ty::uchar, std::nullopt}})
                    .ok());
        REQUIRE(st.create_var(Ident{"pgone"},
                              Value{PointerValue{ty::uchar, 404}})
                    .ok());

        auto got = exec_expr_pure(*make_index("a", make_const(ty::sint, 1)),
                                  st, P);
        REQUIRE(got.ok());
        CHECK(got.value() == vint(ty::uchar, 8));

        auto oob = exec_expr_pure(*make_index("a", make_const(ty::sint, 2)),
                                  st, P);
        REQUIRE_FALSE(oob.ok());
        CHECK(oob.error().kind == DynErrorKind::Bounds);

        auto null = exec_expr_pure(*make_index("pnull", make_const(ty::sint, 0)),
                                   st, P);
        REQUIRE_FALSE(null.ok());
        CHECK(null.error().kind == DynErrorKind::NullDeref);

        auto gone = exec_expr_pure(*make_index("pgone", make_const(ty::sint, 0)),
                                   st, P);
        REQUIRE_FALSE(gone.ok());
        CHECK(gone.error().kind == DynErrorKind::NoSuchArray);
    }

    SUBCASE("purity: evaluation does not change the state") {
        ComputationState before = st;
        (void)exec_expr_pure(*e, st, P);
        CHECK(st == before);
    }
}

TEST_CASE("statement execution") {
    FunEnv env;

    SUBCASE("assignment updates the state") {
        ComputationState st = state_with_vars();
        REQUIRE(st.create_var(Ident{"z"}, vint(ty::uint, 1)).ok());
        REQUIRE(st.create_var(Ident{"x"}, vint(ty::uint, 4)).ok());
        Stmt s{Stmt::Assign{Ident{"z"}, make_binary(BinaryOp::Add,
                                                    make_var("z"),
                                                    make_var("x"))}};
        auto out = exec_stmt(s, st, env, P, 10);
        REQUIRE(out.is_result());
        CHECK_FALSE(out.result().returned);
        CHECK(st.read_var(Ident{"z"}).value() == vint(ty::uint, 5));
    }

    SUBCASE("fuel 0 yields limit") {
        ComputationState st = state_with_vars();
        Stmt s{Stmt::Return{std::nullopt}};
        CHECK(exec_stmt(s, st, env, P, 0).is_limit());
    }

    SUBCASE("while with a false test does nothing") {
        ComputationState st = state_with_vars();
        REQUIRE(st.create_var(Ident{"n"}, vint(ty::uint, 0)).ok());
        REQUIRE(st.create_var(Ident{"r"}, vint(ty::uint, 7)).ok());
        ComputationState before = st;
        auto out = exec_stmt_while(*h_test(), h_body(), st, env, P, 100);
        REQUIRE(out.is_result());
        CHECK_FALSE(out.result().returned);
        CHECK(st == before);
    }

    SUBCASE("the factorial loop runs to completion") {
        ComputationState st = state_with_vars();
        REQUIRE(st.create_var(Ident{"n"}, vint(ty::uint, 5)).ok());
        REQUIRE(st.create_var(Ident{"r"}, vint(ty::uint, 1)).ok());
        auto out = exec_stmt_while(*h_test(), h_body(), st, env, P, 1000);
        REQUIRE(out.is_result());
        CHECK(st.read_var(Ident{"n"}).value() == vint(ty::uint, 0));
        CHECK(st.read_var(Ident{"r"}).value() == vint(ty::uint, 120));
    }

    SUBCASE("a tight fuel budget stops the loop mid-way") {
        ComputationState st = state_with_vars();
        REQUIRE(st.create_var(Ident{"n"}, vint(ty::uint, 5)).ok());
        REQUIRE(st.create_var(Ident{"r"}, vint(ty::uint, 1)).ok());
        CHECK(exec_stmt_while(*h_test(), h_body(), st, env, P, 7).is_limit());
    }
}

TEST_CASE("function execution") {
    TransUnit tu;
    tu.fundefs = {build_f(), build_i(), build_h()};
    auto env = init_fun_env(tu);
    REQUIRE(env.ok());

    SUBCASE("f computes and leaves the state alone") {
        ComputationState st;
        ComputationState before = st;
        auto out = exec_fun(Ident{"f"},
                            {vint(ty::sint, 3), vint(ty::sint, 4),
                             vint(ty::sint, 5)},
                            st, env.value(), P, 100);
        REQUIRE(out.is_result());
        REQUIRE(out.result().has_value());
        CHECK(*out.result() == vint(ty::sint, 14));
        CHECK(st == before);
    }

    SUBCASE("i writes through its pointer argument") {
        ComputationState st;
        st.heap.emplace(1, ArrayValue{ty::uchar,
                                      {IntegerValue{ty::uchar, 9},
                                       IntegerValue{ty::uchar, 9},
                                       IntegerValue{ty::uchar, 9}}});
        auto out = exec_fun(Ident{"i"},
                            {Value{PointerValue{ty::uchar, 1}},
                             vint(ty::sint, 0), vint(ty::sint, 2)},
                            st, env.value(), P, 100);
        REQUIRE(out.is_result());
        CHECK_FALSE(out.result().has_value());
        ArrayValue want{ty::uchar,
                        {IntegerValue{ty::uchar, 1}, IntegerValue{ty::uchar, 9},
                         IntegerValue{ty::uchar, 2}}};
        CHECK(st.heap.at(1) == want);
        CHECK(st.frames.empty());
    }

    SUBCASE("h computes the wrapped factorial") {
        ComputationState st;
        auto out = exec_fun(Ident{"h"}, {vint(ty::uint, 5)}, st, env.value(),
                            P, 1u << 12);
        REQUIRE(out.is_result());
        CHECK(*out.result() == vint(ty::uint, 120));
    }

    SUBCASE("fuel monotonicity at the observed threshold") {
        // Find the minimal fuel for h(6) and confirm identical results above.
        c::Fuel minimal = 0;
        std::optional<Value> at_min;
        for (c::Fuel fuel = 1; fuel < 4096; ++fuel) {
            ComputationState st;
            auto out = exec_fun(Ident{"h"}, {vint(ty::uint, 6)}, st,
                                env.value(), P, fuel);
            if (out.is_result()) {
                minimal = fuel;
                at_min = out.result();
                break;
            }
            REQUIRE(out.is_limit());
        }
        REQUIRE(minimal > 0);
        for (c::Fuel extra : {minimal + 1, minimal + 7, minimal * 3}) {
            ComputationState st;
            auto out = exec_fun(Ident{"h"}, {vint(ty::uint, 6)}, st,
                                env.value(), P, extra);
            REQUIRE(out.is_result());
            CHECK(*out.result() == *at_min);
        }
    }

    SUBCASE("defensive checks") {
        ComputationState st;
        CHECK(exec_fun(Ident{"nope"}, {}, st, env.value(), P, 10).error().kind ==
              DynErrorKind::UnboundFun);
        CHECK(exec_fun(Ident{"f"}, {vint(ty::sint, 1)}, st, env.value(), P, 10)
                  .error()
                  .kind == DynErrorKind::Arity);
        CHECK(exec_fun(Ident{"f"},
                       {vint(ty::uint, 1), vint(ty::sint, 2), vint(ty::sint, 3)},
                       st, env.value(), P, 10)
                  .error()
                  .kind == DynErrorKind::TypeMismatch);

        // A function missing a return on the taken path.
        FunDef broken;
        broken.name = Ident{"broken"};
        broken.return_type = CType::integer(ty::sint);
        broken.body.stmts = {};
        TransUnit tu2;
        tu2.fundefs = {broken};
        auto env2 = init_fun_env(tu2);
        auto out = exec_fun(Ident{"broken"}, {}, st, env2.value(), P, 10);
        REQUIRE(out.is_error());
        CHECK(out.error().kind == DynErrorKind::MissingReturn);
        // The frame stack is restored even on errors.
        CHECK(st.frames.empty());
    }
}
