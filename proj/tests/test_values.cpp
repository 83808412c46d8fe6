#include <doctest.h>

#include <random>

#include "ir2c/values.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace ir2c;

namespace {
const ImplParams P{};

IntegerValue iv(CIntType t, Int128 v) { return IntegerValue{t, v}; }
}  // namespace

TEST_CASE("make_int accepts in-range values and rejects the rest") {
    auto zero = make_int(ty::sint, 0, P);
    REQUIRE(zero.ok());
    CHECK(zero.value() == iv(ty::sint, 0));

    CHECK_FALSE(make_int(ty::sint, Int128(1) << 31, P).ok());
    auto umax = make_int(ty::uchar, 255, P);
    REQUIRE(umax.ok());
    CHECK(umax.value() == iv(ty::uchar, 255));
    CHECK_FALSE(make_int(ty::uchar, 256, P).ok());
    CHECK_FALSE(make_int(ty::uchar, -1, P).ok());
}

TEST_CASE("integer promotion") {
    CHECK(promote(iv(ty::uchar, 200), P) == iv(ty::sint, 200));
    CHECK(promote(iv(ty::sint, -5), P) == iv(ty::sint, -5));
    CHECK(promote(iv(ty::ushort, 65535), P) == iv(ty::sint, 65535));
    CHECK(promote(iv(ty::ulong, 7), P) == iv(ty::ulong, 7));

    // With 16-bit int, unsigned short no longer fits in signed int.
    ImplParams p16;
    p16.bits_short = 16;
    p16.bits_int = 16;
    p16.bits_long = 32;
    p16.bits_llong = 64;
    REQUIRE_FALSE(p16.validate().has_value());
    CHECK(promote(iv(ty::ushort, 65535), p16) == iv(ty::uint, 65535));
    CHECK(promote(iv(ty::sshort, -3), p16) == iv(ty::sint, -3));
}

TEST_CASE("usual arithmetic conversions") {
    auto c1 = usual_arith_conversions(iv(ty::sint, -1), iv(ty::uint, 0), P);
    CHECK(c1.common == ty::uint);
    CHECK(c1.lhs == iv(ty::uint, 4294967295LL));
    CHECK(c1.rhs == iv(ty::uint, 0));

    auto c2 = usual_arith_conversions(iv(ty::schar, 3), iv(ty::schar, 4), P);
    CHECK(c2.common == ty::sint);
    CHECK(c2.lhs == iv(ty::sint, 3));
    CHECK(c2.rhs == iv(ty::sint, 4));

    // long (64-bit) can represent every unsigned int value.
    auto c3 = usual_arith_conversions(iv(ty::uint, 1), iv(ty::slong, 1), P);
    CHECK(c3.common == ty::slong);

    // With 32-bit long, signed long cannot absorb unsigned int.
    ImplParams p32;
    p32.bits_long = 32;
    p32.bits_llong = 64;
    REQUIRE_FALSE(p32.validate().has_value());
    auto c4 = usual_arith_conversions(iv(ty::uint, 1), iv(ty::slong, -1), p32);
    CHECK(c4.common == ty::ulong);
}

TEST_CASE("conversions") {
    auto wrapped = convert(iv(ty::sint, 300), ty::uchar, P);
    REQUIRE(wrapped.ok());
    CHECK(wrapped.value() == iv(ty::uchar, 44));

    auto same = convert(iv(ty::sint, 7), ty::sint, P);
    REQUIRE(same.ok());
    CHECK(same.value() == iv(ty::sint, 7));

    CHECK_FALSE(convert(iv(ty::uint, Int128(1) << 31), ty::sint, P).ok());

    SUBCASE("identity holds for every type") {
        std::mt19937_64 rng(7);
        for (CIntType t : all_int_types()) {
            for (int k = 0; k < 20; ++k) {
                IntegerValue v = testgen::random_int(rng, t, P);
                auto back = convert(v, t, P);
                REQUIRE(back.ok());
                CHECK(back.value() == v);
            }
        }
    }
}

TEST_CASE("unary operations") {
    auto ln = exec_unary(UnaryOp::Lognot, iv(ty::sint, 0), P);
    REQUIRE(ln.ok());
    CHECK(ln.value() == iv(ty::sint, 1));
    CHECK(exec_unary(UnaryOp::Lognot, iv(ty::uint, 42), P).value() ==
          iv(ty::sint, 0));

    CHECK_FALSE(
        exec_unary(UnaryOp::Minus, iv(ty::sint, type_min(ty::sint, P)), P).ok());

    auto bn = exec_unary(UnaryOp::Bitnot, iv(ty::uint, 0), P);
    REQUIRE(bn.ok());
    CHECK(bn.value() == iv(ty::uint, 4294967295LL));
}

TEST_CASE("binary operations: named cases") {
    CHECK(exec_binary(BinaryOp::Add, iv(ty::sint, 3), iv(ty::sint, 4), P)
              .value() == iv(ty::sint, 7));
    CHECK_FALSE(exec_binary(BinaryOp::Add, iv(ty::sint, type_max(ty::sint, P)),
                            iv(ty::sint, 1), P)
                    .ok());
    // Unsigned subtraction wraps.
    CHECK(exec_binary(BinaryOp::Sub, iv(ty::uint, 0), iv(ty::uint, 1), P)
              .value() == iv(ty::uint, 4294967295LL));
    CHECK(exec_binary(BinaryOp::Ne, iv(ty::uint, 5), iv(ty::uint, 0), P)
              .value() == iv(ty::sint, 1));
    CHECK_FALSE(
        exec_binary(BinaryOp::Div, iv(ty::sint, 1), iv(ty::sint, 0), P).ok());
    CHECK_FALSE(
        exec_binary(BinaryOp::Rem, iv(ty::uint, 1), iv(ty::uint, 0), P).ok());
    CHECK_FALSE(exec_binary(BinaryOp::Div, iv(ty::sint, type_min(ty::sint, P)),
                            iv(ty::sint, -1), P)
                    .ok());
    CHECK_FALSE(exec_binary(BinaryOp::Rem, iv(ty::sint, type_min(ty::sint, P)),
                            iv(ty::sint, -1), P)
                    .ok());
    CHECK_FALSE(
        exec_binary(BinaryOp::Shl, iv(ty::sint, 1), iv(ty::sint, 32), P).ok());
    CHECK_FALSE(
        exec_binary(BinaryOp::Shl, iv(ty::sint, -1), iv(ty::sint, 1), P).ok());
    CHECK_FALSE(
        exec_binary(BinaryOp::Shr, iv(ty::sint, 1), iv(ty::sint, -1), P).ok());
    // The signed comparison pitfall: -1 converts to UINT_MAX.
    CHECK(exec_binary(BinaryOp::Lt, iv(ty::sint, -1), iv(ty::uint, 0), P)
              .value() == iv(ty::sint, 0));
    // Division truncates toward zero; remainder keeps the dividend's sign.
    CHECK(exec_binary(BinaryOp::Div, iv(ty::sint, -7), iv(ty::sint, 2), P)
              .value() == iv(ty::sint, -3));
    CHECK(exec_binary(BinaryOp::Rem, iv(ty::sint, -7), iv(ty::sint, 2), P)
              .value() == iv(ty::sint, -1));
}

TEST_CASE("boolean bridges") {
    CHECK_FALSE(bool_from_int(iv(ty::sint, 0)));
    CHECK(bool_from_int(iv(ty::uint, 42)));
    CHECK(bool_from_int(iv(ty::slong, -1)));
    CHECK(int_from_bool(true, ty::sint) == iv(ty::sint, 1));
    CHECK(int_from_bool(false, ty::sint) == iv(ty::sint, 0));
    CHECK(int_from_bool(true, ty::uchar) == iv(ty::uchar, 1));
}

TEST_CASE("array read and write") {
    ArrayValue a{ty::uchar, {iv(ty::uchar, 10), iv(ty::uchar, 20),
                             iv(ty::uchar, 30)}};
    CHECK(array_read(a, iv(ty::sint, 1)).value() == iv(ty::uchar, 20));
    CHECK_FALSE(array_read(a, iv(ty::sint, 3)).ok());
    CHECK_FALSE(array_read(a, iv(ty::schar, -1)).ok());

    auto written = array_write(a, iv(ty::sint, 1), iv(ty::uchar, 99));
    REQUIRE(written.ok());
    CHECK(written.value().elems[1] == iv(ty::uchar, 99));
    CHECK(written.value().elems[0] == iv(ty::uchar, 10));
    CHECK(written.value().length() == 3);
    // The original is untouched.
    CHECK(a.elems[1] == iv(ty::uchar, 20));

    CHECK_FALSE(array_write(a, iv(ty::sint, 0), iv(ty::sint, 1)).ok());
    CHECK_FALSE(array_write(a, iv(ty::sint, 9), iv(ty::uchar, 1)).ok());

    SUBCASE("write/read round trip over random indices") {
        std::mt19937_64 rng(11);
        for (int k = 0; k < 200; ++k) {
            CIntType et = testgen::random_type(rng);
            std::size_t len = 1 + rng() % 6;
            ArrayValue arr{et, {}};
            for (std::size_t i = 0; i < len; ++i)
                arr.elems.push_back(testgen::random_int(rng, et, P));
            std::size_t at = rng() % len;
            IntegerValue v = testgen::random_int(rng, et, P);
            auto w = array_write(arr, iv(ty::sint, at), v);
            REQUIRE(w.ok());
            CHECK(array_read(w.value(), iv(ty::sint, at)).value() == v);
            for (std::size_t j = 0; j < len; ++j)
                if (j != at)
                    CHECK(array_read(w.value(), iv(ty::sint, j)).value() ==
                          arr.elems[j]);
        }
    }
}

TEST_CASE("round trip: make_int on a value's magnitude reproduces it") {
    std::mt19937_64 rng(3);
    for (CIntType t : all_int_types()) {
        for (int k = 0; k < 50; ++k) {
            IntegerValue v = testgen::random_int(rng, t, P);
            auto again = make_int(t, v.value, P);
            REQUIRE(again.ok());
            CHECK(again.value() == v);
        }
    }
}

TEST_CASE("implementation matches the arbitrary-precision reference") {
    std::mt19937_64 rng(42);

    SUBCASE("all 100 conversion cells") {
        for (CIntType from : all_int_types()) {
            for (CIntType to : all_int_types()) {
                for (int k = 0; k < 30; ++k) {
                    IntegerValue v = testgen::random_int(rng, from, P);
                    auto want = oracle::convert(oracle::from_value(v), to, P);
                    CHECK(oracle::agrees(want, convert(v, to, P)));
                }
            }
        }
    }

    SUBCASE("all 40 unary cells") {
        for (UnaryOp op : all_unary_ops()) {
            for (CIntType t : all_int_types()) {
                for (int k = 0; k < 30; ++k) {
                    IntegerValue v = testgen::random_int(rng, t, P);
                    auto want = oracle::unary(op, oracle::from_value(v), P);
                    CHECK(oracle::agrees(want, exec_unary(op, v, P)));
                }
            }
        }
    }

    SUBCASE("all 1600 binary cells") {
        for (BinaryOp op : all_binary_ops()) {
            for (CIntType ta : all_int_types()) {
                for (CIntType tb : all_int_types()) {
                    for (int k = 0; k < 6; ++k) {
                        IntegerValue a = testgen::random_int(rng, ta, P);
                        IntegerValue b = testgen::random_int(rng, tb, P);
                        auto want = oracle::binary(op, oracle::from_value(a),
                                                   oracle::from_value(b), P);
                        auto got = exec_binary(op, a, b, P);
                        bool match = oracle::agrees(want, got);
                        CHECK(match);
                        if (!match) {
                            CAPTURE(binary_op_name(op));
                            CAPTURE(to_string(a));
                            CAPTURE(to_string(b));
                        }
                    }
                }
            }
        }
    }

    SUBCASE("unsigned add/sub/mul never fail and wrap mod 2^N") {
        // Only types whose arithmetic stays unsigned after promotion; the
        // narrow unsigned types promote to signed int, where overflow is a
        // real error (the classic unsigned short multiplication trap).
        for (CIntType t : all_int_types()) {
            if (t.sign != Sign::Unsigned) continue;
            if (common_type(t, t, P).sign != Sign::Unsigned) continue;
            for (int k = 0; k < 200; ++k) {
                IntegerValue a = testgen::random_int(rng, t, P);
                IntegerValue b = testgen::random_int(rng, t, P);
                for (BinaryOp op :
                     {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul}) {
                    auto got = exec_binary(op, a, b, P);
                    REQUIRE(got.ok());
                    auto want =
                        oracle::binary(op, oracle::from_value(a),
                                       oracle::from_value(b), P);
                    CHECK(oracle::agrees(want, got));
                }
            }
        }
    }

    SUBCASE("result types match the static prediction") {
        for (int k = 0; k < 2000; ++k) {
            CIntType ta = testgen::random_type(rng);
            CIntType tb = testgen::random_type(rng);
            BinaryOp op = all_binary_ops()[rng() % 16];
            IntegerValue a = testgen::random_int(rng, ta, P);
            IntegerValue b = testgen::random_int(rng, tb, P);
            auto got = exec_binary(op, a, b, P);
            if (got.ok())
                CHECK(got.value().type == binary_result_type(op, ta, tb, P));
        }
    }
}

TEST_CASE("ImplParams validation") {
    ImplParams bad;
    bad.bits_char = 16;
    CHECK(bad.validate().has_value());

    ImplParams shrink;
    shrink.bits_int = 8;
    CHECK(shrink.validate().has_value());

    ImplParams order;
    order.bits_short = 64;
    order.bits_int = 32;
    CHECK(order.validate().has_value());

    ImplParams wide;
    wide.bits_llong = 128;
    CHECK(wide.validate().has_value());

    CHECK_FALSE(ImplParams{}.validate().has_value());
}
