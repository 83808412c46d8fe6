#include "ir2c/values.hpp"

#include <algorithm>
#include <cassert>

namespace ir2c {

std::string int128_to_string(Int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    UInt128 mag = neg ? -static_cast<UInt128>(v) : static_cast<UInt128>(v);
    std::string digits;
    while (mag != 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
        mag /= 10;
    }
    if (neg) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

bool int128_from_string(const std::string& text, Int128& out) {
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        neg = text[i] == '-';
        ++i;
    }
    if (i >= text.size()) return false;
    UInt128 mag = 0;
    const UInt128 limit = static_cast<UInt128>(1) << 127;  // |INT128_MIN|
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c < '0' || c > '9') return false;
        if (mag > (limit - (c - '0')) / 10) return false;
        mag = mag * 10 + static_cast<UInt128>(c - '0');
    }
    if (neg) {
        if (mag > limit) return false;
        out = mag == 0 ? 0 : -static_cast<Int128>(mag - 1) - 1;
    } else {
        if (mag >= limit) return false;
        out = static_cast<Int128>(mag);
    }
    return true;
}

const std::array<CIntType, 10>& all_int_types() {
    static const std::array<CIntType, 10> types = {
        ty::schar, ty::uchar, ty::sshort, ty::ushort, ty::sint,
        ty::uint,  ty::slong, ty::ulong,  ty::sllong, ty::ullong,
    };
    return types;
}

std::string c_type_name(CIntType t) {
    std::string base;
    switch (t.rank) {
        case Rank::Char: base = "char"; break;
        case Rank::Short: base = "short"; break;
        case Rank::Int: base = "int"; break;
        case Rank::Long: base = "long"; break;
        case Rank::LongLong: base = "long long"; break;
    }
    if (t.sign == Sign::Unsigned) return "unsigned " + base;
    // signed char must be spelled out; the other signed types use the plain
    // spelling.
    if (t.rank == Rank::Char) return "signed char";
    return base;
}

std::string type_tag(CIntType t) {
    std::string base;
    switch (t.rank) {
        case Rank::Char: base = "char"; break;
        case Rank::Short: base = "short"; break;
        case Rank::Int: base = "int"; break;
        case Rank::Long: base = "long"; break;
        case Rank::LongLong: base = "llong"; break;
    }
    return (t.sign == Sign::Signed ? "s" : "u") + base;
}

std::optional<CIntType> type_from_tag(const std::string& tag) {
    for (CIntType t : all_int_types()) {
        if (type_tag(t) == tag) return t;
    }
    return std::nullopt;
}

int ImplParams::bits(Rank r) const {
    switch (r) {
        case Rank::Char: return bits_char;
        case Rank::Short: return bits_short;
        case Rank::Int: return bits_int;
        case Rank::Long: return bits_long;
        case Rank::LongLong: return bits_llong;
    }
    return 0;
}

std::optional<std::string> ImplParams::validate() const {
    if (bits_char != 8) return "bits_char must be 8";
    struct Req { const char* name; int value; int min; };
    const Req reqs[] = {
        {"bits_short", bits_short, 16},
        {"bits_int", bits_int, 16},
        {"bits_long", bits_long, 32},
        {"bits_llong", bits_llong, 64},
    };
    for (const Req& r : reqs) {
        if (r.value < r.min)
            return std::string(r.name) + " below the C18 minimum of " +
                   std::to_string(r.min);
        if (r.value > 64) return std::string(r.name) + " above 64 is not supported";
    }
    if (!(bits_char <= bits_short && bits_short <= bits_int &&
          bits_int <= bits_long && bits_long <= bits_llong))
        return "type widths must be non-decreasing with rank";
    return std::nullopt;
}

Int128 type_min(CIntType t, const ImplParams& p) {
    if (t.sign == Sign::Unsigned) return 0;
    return -(static_cast<Int128>(1) << (p.bits(t) - 1));
}

Int128 type_max(CIntType t, const ImplParams& p) {
    int n = p.bits(t);
    if (t.sign == Sign::Unsigned)
        return static_cast<Int128>((static_cast<UInt128>(1) << n) - 1);
    return (static_cast<Int128>(1) << (n - 1)) - 1;
}

bool fits(CIntType t, Int128 v, const ImplParams& p) {
    return v >= type_min(t, p) && v <= type_max(t, p);
}

CIntType promote_type(CIntType t, const ImplParams& p) {
    if (t.rank == Rank::Char || t.rank == Rank::Short) {
        // signed int can hold the whole type iff the type is narrower, or has
        // the same width and is itself signed.
        if (p.bits(t) < p.bits_int || (p.bits(t) == p.bits_int && t.is_signed()))
            return ty::sint;
        return ty::uint;
    }
    return t;
}

CIntType common_type(CIntType a, CIntType b, const ImplParams& p) {
    a = promote_type(a, p);
    b = promote_type(b, p);
    if (a == b) return a;
    if (a.sign == b.sign) return a.rank > b.rank ? a : b;
    CIntType u = a.sign == Sign::Unsigned ? a : b;
    CIntType s = a.sign == Sign::Signed ? a : b;
    if (u.rank >= s.rank) return u;
    // The signed type has higher rank; it absorbs the unsigned operand only
    // if it is strictly wider.
    if (p.bits(s) > p.bits(u)) return s;
    return CIntType{Sign::Unsigned, s.rank};
}

std::string to_string(const IntegerValue& v) {
    return c_type_name(v.type) + " " + int128_to_string(v.value);
}

const std::array<UnaryOp, 4>& all_unary_ops() {
    static const std::array<UnaryOp, 4> ops = {
        UnaryOp::Plus, UnaryOp::Minus, UnaryOp::Bitnot, UnaryOp::Lognot};
    return ops;
}

const std::array<BinaryOp, 16>& all_binary_ops() {
    static const std::array<BinaryOp, 16> ops = {
        BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div,
        BinaryOp::Rem, BinaryOp::BitAnd, BinaryOp::BitOr, BinaryOp::BitXor,
        BinaryOp::Shl, BinaryOp::Shr, BinaryOp::Lt, BinaryOp::Gt,
        BinaryOp::Le, BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne};
    return ops;
}

std::string unary_op_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::Plus: return "plus";
        case UnaryOp::Minus: return "minus";
        case UnaryOp::Bitnot: return "bitnot";
        case UnaryOp::Lognot: return "lognot";
    }
    return "";
}

std::string binary_op_name(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "add";
        case BinaryOp::Sub: return "sub";
        case BinaryOp::Mul: return "mul";
        case BinaryOp::Div: return "div";
        case BinaryOp::Rem: return "rem";
        case BinaryOp::BitAnd: return "bitand";
        case BinaryOp::BitOr: return "bitor";
        case BinaryOp::BitXor: return "bitxor";
        case BinaryOp::Shl: return "shl";
        case BinaryOp::Shr: return "shr";
        case BinaryOp::Lt: return "lt";
        case BinaryOp::Gt: return "gt";
        case BinaryOp::Le: return "le";
        case BinaryOp::Ge: return "ge";
        case BinaryOp::Eq: return "eq";
        case BinaryOp::Ne: return "ne";
    }
    return "";
}

std::string unary_op_token(UnaryOp op) {
    switch (op) {
        case UnaryOp::Plus: return "+";
        case UnaryOp::Minus: return "-";
        case UnaryOp::Bitnot: return "~";
        case UnaryOp::Lognot: return "!";
    }
    return "";
}

std::string binary_op_token(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Rem: return "%";
        case BinaryOp::BitAnd: return "&";
        case BinaryOp::BitOr: return "|";
        case BinaryOp::BitXor: return "^";
        case BinaryOp::Shl: return "<<";
        case BinaryOp::Shr: return ">>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
    }
    return "";
}

std::string well_def_kind_name(WellDefKind k) {
    switch (k) {
        case WellDefKind::OutOfRange: return "out-of-range";
        case WellDefKind::Overflow: return "overflow";
        case WellDefKind::DivByZero: return "division-by-zero";
        case WellDefKind::BadShiftCount: return "bad-shift-count";
        case WellDefKind::ShiftOfNegative: return "shift-of-negative";
        case WellDefKind::ShiftOverflow: return "shift-overflow";
        case WellDefKind::Conversion: return "conversion";
    }
    return "";
}

ValueResult<IntegerValue> make_int(CIntType t, Int128 n, const ImplParams& p) {
    if (!fits(t, n, p))
        return WellDefError{WellDefKind::OutOfRange,
                            int128_to_string(n) + " does not fit " + c_type_name(t)};
    return IntegerValue{t, n};
}

IntegerValue promote(const IntegerValue& v, const ImplParams& p) {
    CIntType t = promote_type(v.type, p);
    // The promoted type always represents the value: either it is strictly
    // wider, or it is the unsigned promotion of an equally wide unsigned type.
    return IntegerValue{t, v.value};
}

namespace {

// Reduction modulo 2^bits into [0, 2^bits).
Int128 wrap_unsigned(Int128 v, int bits) {
    UInt128 mask = (bits == 128) ? ~static_cast<UInt128>(0)
                                 : (static_cast<UInt128>(1) << bits) - 1;
    return static_cast<Int128>(static_cast<UInt128>(v) & mask);
}

// Value-level conversion for the usual arithmetic conversions: to unsigned it
// wraps, to signed it is only ever applied when value-preserving.
IntegerValue uac_convert(const IntegerValue& v, CIntType target, const ImplParams& p) {
    if (target == v.type) return v;
    if (target.sign == Sign::Unsigned)
        return IntegerValue{target, wrap_unsigned(v.value, p.bits(target))};
    assert(fits(target, v.value, p));
    return IntegerValue{target, v.value};
}

// N-bit two's complement bit pattern of a value, as a non-negative integer.
Int128 to_bits(Int128 v, int bits) { return wrap_unsigned(v, bits); }

// Inverse of to_bits for a type of the given signedness.
Int128 from_bits(Int128 pattern, CIntType t, const ImplParams& p) {
    if (t.sign == Sign::Unsigned) return pattern;
    Int128 half = static_cast<Int128>(1) << (p.bits(t) - 1);
    return pattern >= half ? pattern - (half << 1) : pattern;
}

}  // namespace

Converted usual_arith_conversions(const IntegerValue& a, const IntegerValue& b,
                                  const ImplParams& p) {
    CIntType ct = common_type(a.type, b.type, p);
    IntegerValue pa = promote(a, p);
    IntegerValue pb = promote(b, p);
    return Converted{uac_convert(pa, ct, p), uac_convert(pb, ct, p), ct};
}

ValueResult<IntegerValue> convert(const IntegerValue& v, CIntType target,
                                  const ImplParams& p) {
    if (target == v.type) return v;
    if (target.sign == Sign::Unsigned)
        return IntegerValue{target, wrap_unsigned(v.value, p.bits(target))};
    if (!fits(target, v.value, p))
        return WellDefError{WellDefKind::Conversion,
                            to_string(v) + " not representable in " +
                                c_type_name(target)};
    return IntegerValue{target, v.value};
}

ValueResult<IntegerValue> exec_unary(UnaryOp op, const IntegerValue& v,
                                     const ImplParams& p) {
    if (op == UnaryOp::Lognot)
        return IntegerValue{ty::sint, v.value == 0 ? 1 : 0};
    IntegerValue pv = promote(v, p);
    switch (op) {
        case UnaryOp::Plus:
            return pv;
        case UnaryOp::Minus: {
            if (pv.type.sign == Sign::Unsigned)
                return IntegerValue{pv.type, wrap_unsigned(-pv.value, p.bits(pv.type))};
            if (!fits(pv.type, -pv.value, p))
                return WellDefError{WellDefKind::Overflow,
                                    "negation of " + to_string(pv)};
            return IntegerValue{pv.type, -pv.value};
        }
        case UnaryOp::Bitnot: {
            // Two's complement: ~x is -x-1, always representable.
            Int128 pattern = to_bits(~to_bits(pv.value, p.bits(pv.type)),
                                     p.bits(pv.type));
            return IntegerValue{pv.type, from_bits(pattern, pv.type, p)};
        }
        case UnaryOp::Lognot:
            break;
    }
    return WellDefError{WellDefKind::Overflow, "unreachable"};
}

CIntType unary_result_type(UnaryOp op, CIntType operand, const ImplParams& p) {
    if (op == UnaryOp::Lognot) return ty::sint;
    return promote_type(operand, p);
}

CIntType binary_result_type(BinaryOp op, CIntType lhs, CIntType rhs,
                            const ImplParams& p) {
    switch (op) {
        case BinaryOp::Lt:
        case BinaryOp::Gt:
        case BinaryOp::Le:
        case BinaryOp::Ge:
        case BinaryOp::Eq:
        case BinaryOp::Ne:
            return ty::sint;
        case BinaryOp::Shl:
        case BinaryOp::Shr:
            return promote_type(lhs, p);
        default:
            return common_type(lhs, rhs, p);
    }
}

namespace {

ValueResult<IntegerValue> exec_shift(BinaryOp op, const IntegerValue& a,
                                     const IntegerValue& b, const ImplParams& p) {
    IntegerValue left = promote(a, p);
    IntegerValue right = promote(b, p);
    int width = p.bits(left.type);
    if (right.value < 0 || right.value >= width)
        return WellDefError{WellDefKind::BadShiftCount,
                            "shift count " + int128_to_string(right.value) +
                                " for " + c_type_name(left.type)};
    int count = static_cast<int>(right.value);
    if (op == BinaryOp::Shl) {
        if (left.value < 0)
            return WellDefError{WellDefKind::ShiftOfNegative,
                                "left shift of " + to_string(left)};
        UInt128 shifted = static_cast<UInt128>(left.value) << count;
        if (left.type.sign == Sign::Unsigned)
            return IntegerValue{left.type,
                                wrap_unsigned(static_cast<Int128>(shifted),
                                              width)};
        if (shifted > static_cast<UInt128>(type_max(left.type, p)))
            return WellDefError{WellDefKind::ShiftOverflow,
                                to_string(left) + " << " +
                                    int128_to_string(right.value)};
        return IntegerValue{left.type, static_cast<Int128>(shifted)};
    }
    // Right shift. For negative operands this is the prevalent
    // implementation-defined behavior: arithmetic shift, i.e. floor division
    // by 2^count.
    Int128 q = left.value >> count;
    return IntegerValue{left.type, q};
}

ValueResult<IntegerValue> exec_arith(BinaryOp op, const IntegerValue& a,
                                     const IntegerValue& b, const ImplParams& p) {
    Converted c = usual_arith_conversions(a, b, p);
    Int128 x = c.lhs.value;
    Int128 y = c.rhs.value;
    CIntType t = c.common;
    Int128 result = 0;
    switch (op) {
        case BinaryOp::Add: result = x + y; break;
        case BinaryOp::Sub: result = x - y; break;
        case BinaryOp::Mul: {
            if (mul_overflow(x, y, result)) {
                if (t.sign == Sign::Signed)
                    return WellDefError{WellDefKind::Overflow,
                                        to_string(c.lhs) + " * " +
                                            int128_to_string(y)};
                // Unsigned multiplication wraps; the low bits of the product
                // are exact even when the full product exceeds Int128.
                UInt128 prod = static_cast<UInt128>(x) * static_cast<UInt128>(y);
                return IntegerValue{t, wrap_unsigned(static_cast<Int128>(prod),
                                                     p.bits(t))};
            }
            break;
        }
        case BinaryOp::Div:
        case BinaryOp::Rem: {
            if (y == 0)
                return WellDefError{WellDefKind::DivByZero,
                                    binary_op_name(op) + " by zero"};
            if (t.sign == Sign::Signed && y == -1 && x == type_min(t, p))
                return WellDefError{WellDefKind::Overflow,
                                    to_string(c.lhs) + " " +
                                        binary_op_token(op) + " -1"};
            // Int128 division truncates toward zero, matching C18.
            result = op == BinaryOp::Div ? x / y : x % y;
            break;
        }
        case BinaryOp::BitAnd:
        case BinaryOp::BitOr:
        case BinaryOp::BitXor: {
            int n = p.bits(t);
            Int128 bx = to_bits(x, n);
            Int128 by = to_bits(y, n);
            Int128 pattern = op == BinaryOp::BitAnd   ? (bx & by)
                             : op == BinaryOp::BitOr  ? (bx | by)
                                                      : (bx ^ by);
            return IntegerValue{t, from_bits(pattern, t, p)};
        }
        default:
            break;
    }
    if (t.sign == Sign::Unsigned)
        return IntegerValue{t, wrap_unsigned(result, p.bits(t))};
    if (!fits(t, result, p))
        return WellDefError{WellDefKind::Overflow,
                            int128_to_string(x) + " " + binary_op_token(op) +
                                " " + int128_to_string(y) + " in " +
                                c_type_name(t)};
    return IntegerValue{t, result};
}

}  // namespace

ValueResult<IntegerValue> exec_binary(BinaryOp op, const IntegerValue& a,
                                      const IntegerValue& b, const ImplParams& p) {
    switch (op) {
        case BinaryOp::Shl:
        case BinaryOp::Shr:
            return exec_shift(op, a, b, p);
        case BinaryOp::Lt:
        case BinaryOp::Gt:
        case BinaryOp::Le:
        case BinaryOp::Ge:
        case BinaryOp::Eq:
        case BinaryOp::Ne: {
            Converted c = usual_arith_conversions(a, b, p);
            Int128 x = c.lhs.value;
            Int128 y = c.rhs.value;
            bool r = false;
            switch (op) {
                case BinaryOp::Lt: r = x < y; break;
                case BinaryOp::Gt: r = x > y; break;
                case BinaryOp::Le: r = x <= y; break;
                case BinaryOp::Ge: r = x >= y; break;
                case BinaryOp::Eq: r = x == y; break;
                case BinaryOp::Ne: r = x != y; break;
                default: break;
            }
            return IntegerValue{ty::sint, r ? 1 : 0};
        }
        default:
            return exec_arith(op, a, b, p);
    }
}

bool bool_from_int(const IntegerValue& v) { return v.value != 0; }

IntegerValue int_from_bool(bool b, CIntType t) {
    return IntegerValue{t, b ? 1 : 0};
}

bool index_in_bounds(const ArrayValue& a, const IntegerValue& index) {
    return index.value >= 0 &&
           static_cast<UInt128>(index.value) < a.length();
}

Result<IntegerValue, BoundsError> array_read(const ArrayValue& a,
                                             const IntegerValue& index) {
    if (!index_in_bounds(a, index))
        return BoundsError{index.value, a.length()};
    return a.elems[static_cast<std::size_t>(index.value)];
}

Result<ArrayValue, ArrayError> array_write(const ArrayValue& a,
                                           const IntegerValue& index,
                                           const IntegerValue& value) {
    if (!index_in_bounds(a, index))
        return ArrayError{ArrayError::Kind::Bounds, index.value, a.length()};
    if (value.type != a.elem_type)
        return ArrayError{ArrayError::Kind::ElemType, index.value, a.length()};
    ArrayValue out = a;
    out.elems[static_cast<std::size_t>(index.value)] = value;
    return out;
}

}  // namespace ir2c
