#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ir2c/ints.hpp"
#include "ir2c/result.hpp"

namespace ir2c {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class Sign { Signed, Unsigned };
enum class Rank { Char, Short, Int, Long, LongLong };

// One of the ten supported integer types: signed/unsigned char, short, int,
// long, long long. Plain char and _Bool are not modeled.
struct CIntType {
    Sign sign;
    Rank rank;

    bool operator==(const CIntType&) const = default;
    bool is_signed() const { return sign == Sign::Signed; }
};

namespace ty {
inline constexpr CIntType schar{Sign::Signed, Rank::Char};
inline constexpr CIntType uchar{Sign::Unsigned, Rank::Char};
inline constexpr CIntType sshort{Sign::Signed, Rank::Short};
inline constexpr CIntType ushort{Sign::Unsigned, Rank::Short};
inline constexpr CIntType sint{Sign::Signed, Rank::Int};
inline constexpr CIntType uint{Sign::Unsigned, Rank::Int};
inline constexpr CIntType slong{Sign::Signed, Rank::Long};
inline constexpr CIntType ulong{Sign::Unsigned, Rank::Long};
inline constexpr CIntType sllong{Sign::Signed, Rank::LongLong};
inline constexpr CIntType ullong{Sign::Unsigned, Rank::LongLong};
}  // namespace ty

// All ten types, in rank order, signed before unsigned.
const std::array<CIntType, 10>& all_int_types();

// C source spelling, e.g. "unsigned long long".
std::string c_type_name(CIntType t);
// Short tag used in IR operator names, e.g. "ullong".
std::string type_tag(CIntType t);
std::optional<CIntType> type_from_tag(const std::string& tag);

// Bit widths of the five ranks. Two's complement, no padding bits. Widths are
// capped at 64 so magnitudes stay exactly representable in Int128 arithmetic.
struct ImplParams {
    int bits_char = 8;
    int bits_short = 16;
    int bits_int = 32;
    int bits_long = 64;
    int bits_llong = 64;

    int bits(Rank r) const;
    int bits(CIntType t) const { return bits(t.rank); }

    // Validates the C18 constraints: char = 8, widths non-decreasing with
    // rank, each at least the standard minimum (8/16/16/32/64), none above 64.
    // Returns an explanation on failure.
    std::optional<std::string> validate() const;
};

Int128 type_min(CIntType t, const ImplParams& p);
Int128 type_max(CIntType t, const ImplParams& p);
bool fits(CIntType t, Int128 v, const ImplParams& p);

// Integer promotion applied to a type: ranks below int go to signed int if it
// can hold every value of the type, otherwise to unsigned int.
CIntType promote_type(CIntType t, const ImplParams& p);
// The common type of the usual arithmetic conversions (after promotion).
CIntType common_type(CIntType a, CIntType b, const ImplParams& p);

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct IntegerValue {
    CIntType type;
    Int128 value;

    bool operator==(const IntegerValue&) const = default;
};

std::string to_string(const IntegerValue& v);

// A typed, non-empty element sequence. Arrays are immutable values here;
// writes produce a fresh array.
struct ArrayValue {
    CIntType elem_type;
    std::vector<IntegerValue> elems;

    bool operator==(const ArrayValue&) const = default;
    std::size_t length() const { return elems.size(); }
};

enum class UnaryOp { Plus, Minus, Bitnot, Lognot };
enum class BinaryOp {
    Add, Sub, Mul, Div, Rem,
    BitAnd, BitOr, BitXor, Shl, Shr,
    Lt, Gt, Le, Ge, Eq, Ne,
};

const std::array<UnaryOp, 4>& all_unary_ops();
const std::array<BinaryOp, 16>& all_binary_ops();

std::string unary_op_name(UnaryOp op);   // IR tag: plus, minus, bitnot, lognot
std::string binary_op_name(BinaryOp op); // IR tag: add, sub, ..., ne
std::string unary_op_token(UnaryOp op);  // C token: + - ~ !
std::string binary_op_token(BinaryOp op);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// A well-definedness condition required by C18 failed to hold; the operation
// has no defined result.
enum class WellDefKind {
    OutOfRange,       // make_int outside the target range
    Overflow,         // signed arithmetic result unrepresentable
    DivByZero,
    BadShiftCount,    // shift count negative or >= width
    ShiftOfNegative,  // << with negative left operand
    ShiftOverflow,    // signed << result unrepresentable
    Conversion,       // conversion to signed type cannot represent the value
};

struct WellDefError {
    WellDefKind kind;
    std::string detail;
};

std::string well_def_kind_name(WellDefKind k);

struct BoundsError {
    Int128 index;
    std::size_t length;
};

struct ArrayError {
    enum class Kind { Bounds, ElemType } kind;
    Int128 index = 0;
    std::size_t length = 0;
};

template <typename T>
using ValueResult = Result<T, WellDefError>;

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

ValueResult<IntegerValue> make_int(CIntType t, Int128 n, const ImplParams& p);

IntegerValue promote(const IntegerValue& v, const ImplParams& p);

struct Converted {
    IntegerValue lhs;
    IntegerValue rhs;
    CIntType common;
};

// Usual arithmetic conversions on a pair of values. Never fails: every
// conversion these rules perform is either value-preserving or an unsigned
// wrap.
Converted usual_arith_conversions(const IntegerValue& a, const IntegerValue& b,
                                  const ImplParams& p);

ValueResult<IntegerValue> convert(const IntegerValue& v, CIntType target,
                                  const ImplParams& p);

ValueResult<IntegerValue> exec_unary(UnaryOp op, const IntegerValue& v,
                                     const ImplParams& p);

ValueResult<IntegerValue> exec_binary(BinaryOp op, const IntegerValue& a,
                                      const IntegerValue& b, const ImplParams& p);

// The statically known result type of each operation, independent of operand
// values. Shared by the static checker and the code generator so their typing
// agrees with execution.
CIntType unary_result_type(UnaryOp op, CIntType operand, const ImplParams& p);
CIntType binary_result_type(BinaryOp op, CIntType lhs, CIntType rhs,
                            const ImplParams& p);

bool bool_from_int(const IntegerValue& v);
IntegerValue int_from_bool(bool b, CIntType t);

Result<IntegerValue, BoundsError> array_read(const ArrayValue& a,
                                             const IntegerValue& index);
Result<ArrayValue, ArrayError> array_write(const ArrayValue& a,
                                           const IntegerValue& index,
                                           const IntegerValue& value);

// Bounds check shared by reads, writes and the IR-level index guard.
bool index_in_bounds(const ArrayValue& a, const IntegerValue& index);

}  // namespace ir2c
