#pragma once

// Arbitrary-precision reference model of the integer operations, written
// directly from the C18 rules on top of boost cpp_int. Kept deliberately
// independent of the library's fixed-width implementation: the two must agree
// cell by cell.

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>

#include "ir2c/values.hpp"

namespace oracle {

using BigInt = boost::multiprecision::cpp_int;

struct Typed {
    ir2c::CIntType type;
    BigInt value;
};

BigInt min_of(ir2c::CIntType t, const ir2c::ImplParams& p);
BigInt max_of(ir2c::CIntType t, const ir2c::ImplParams& p);

ir2c::CIntType promote_type(ir2c::CIntType t, const ir2c::ImplParams& p);
ir2c::CIntType common_type(ir2c::CIntType a, ir2c::CIntType b,
                           const ir2c::ImplParams& p);

// nullopt means the operation has no defined result.
std::optional<Typed> convert(const Typed& v, ir2c::CIntType target,
                             const ir2c::ImplParams& p);
std::optional<Typed> unary(ir2c::UnaryOp op, const Typed& v,
                           const ir2c::ImplParams& p);
std::optional<Typed> binary(ir2c::BinaryOp op, const Typed& a, const Typed& b,
                            const ir2c::ImplParams& p);

Typed from_value(const ir2c::IntegerValue& v);

// true iff the implementation outcome matches the reference outcome
// (including both failing).
bool agrees(const std::optional<Typed>& want,
            const ir2c::ValueResult<ir2c::IntegerValue>& got);

}  // namespace oracle
