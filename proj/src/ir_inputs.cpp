#include <random>

#include "ir2c/ir.hpp"

namespace ir2c::ir {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Unbiased draw in [0, n); independent of library distribution internals so
// streams are stable.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t limit = n * (~std::uint64_t{0} / n);
    while (true) {
        std::uint64_t u = rng();
        if (u < limit) return u % n;
    }
}

Int128 draw_range(std::mt19937_64& rng, Int128 lo, Int128 hi) {
    UInt128 span = static_cast<UInt128>(hi - lo) + 1;
    if (span == 0 || span > ~std::uint64_t{0}) {
        // Full 64-bit (or wider) span: one raw word is uniform already.
        return lo + static_cast<Int128>(rng());
    }
    return lo + static_cast<Int128>(
                    draw_below(rng, static_cast<std::uint64_t>(span)));
}

IntegerValue sample_int(CIntType t, std::mt19937_64& rng, const ImplParams& p) {
    Int128 lo = type_min(t, p);
    Int128 hi = type_max(t, p);
    auto clip = [&](Int128 v) { return v < lo ? lo : (v > hi ? hi : v); };
    std::uint64_t bucket = draw_below(rng, 100);
    Int128 v;
    if (bucket < 25) {
        static const int tiny[] = {0, 1, 2, -1, -2};
        v = clip(tiny[draw_below(rng, 5)]);
    } else if (bucket < 55) {
        v = clip(static_cast<Int128>(draw_below(rng, 129)) - 64);
    } else if (bucket < 75) {
        switch (draw_below(rng, 4)) {
            case 0: v = lo; break;
            case 1: v = clip(lo + 1); break;
            case 2: v = hi; break;
            default: v = clip(hi - 1); break;
        }
    } else if (bucket < 85) {
        Int128 k = static_cast<Int128>(draw_below(rng, 17));
        v = draw_below(rng, 2) == 0 ? clip(lo + k) : clip(hi - k);
    } else {
        v = draw_range(rng, lo, hi);
    }
    return IntegerValue{t, v};
}

IrValue sample_value(const IrType& t, std::mt19937_64& rng,
                     const GenOptions& opts) {
    if (!t.is_array)
        return make_ir_int(sample_int(t.type, rng, opts.params));
    std::size_t len =
        1 + static_cast<std::size_t>(draw_below(
                rng, opts.max_array_len == 0 ? 1 : opts.max_array_len));
    ArrayValue a{t.type, {}};
    a.elems.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
        a.elems.push_back(sample_int(t.type, rng, opts.params));
    return make_ir_array(std::move(a));
}

}  // namespace

Result<std::vector<std::vector<IrValue>>, std::string> gen_inputs(
    const IrProgram& p, const IrFunction& fn, const GenOptions& opts) {
    std::mt19937_64 rng(opts.seed ^ fnv1a(fn.name));
    EvalOptions eval_opts;
    eval_opts.params = opts.params;

    std::vector<std::vector<IrValue>> out;
    out.reserve(opts.count);
    std::size_t attempts = 0;
    const std::size_t max_attempts =
        opts.count * std::max<std::size_t>(opts.max_attempts_factor, 1);
    while (out.size() < opts.count) {
        if (attempts++ >= max_attempts)
            return std::string(
                "sampling exhausted for '" + fn.name + "': " +
                std::to_string(out.size()) + " of " +
                std::to_string(opts.count) + " tuples after " +
                std::to_string(attempts - 1) + " attempts (guards too tight?)");
        std::vector<IrValue> tuple;
        tuple.reserve(fn.params.size());
        for (const IrParam& prm : fn.params)
            tuple.push_back(sample_value(prm.type, rng, opts));
        bool accepted = true;
        for (const TermPtr& g : fn.extra_guards) {
            auto holds = eval_guard(p, fn, g, tuple, eval_opts);
            if (!holds)
                return std::string("guard of '" + fn.name +
                                   "' failed to evaluate: " +
                                   to_string(holds.error()));
            if (!holds.value()) {
                accepted = false;
                break;
            }
        }
        if (accepted) out.push_back(std::move(tuple));
    }
    return out;
}

}  // namespace ir2c::ir
