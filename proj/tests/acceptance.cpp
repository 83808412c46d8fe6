// Acceptance suite: one line per criterion, PASS or FAIL, nonzero exit when
// anything fails. Criteria marked with their stated budgets; wall time is
// printed per criterion.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ir2c/c_pretty.hpp"
#include "ir2c/c_static.hpp"
#include "ir2c/codegen.hpp"
#include "ir2c/harness.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace ir2c;

namespace {

std::string fail_note;

void note(const std::string& s) {
    if (fail_note.empty()) fail_note = s;
}

std::string data_path(const std::string& name) {
    return std::string(IR2C_DATA_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

harness::Loaded load_corpus(const ImplParams& params) {
    auto loaded = harness::load_program(read_file(data_path("corpus.ir")),
                                        params);
    if (!loaded) {
        note("corpus failed to load: " + loaded.error().message);
        std::exit(2);
    }
    return std::move(loaded).value();
}

bool tokens_match(const std::string& got, const std::string& want) {
    return testgen::c_tokens(got) == testgen::c_tokens(want);
}

// ---------------------------------------------------------------------
// 1. Listing reproduction through the command-line tool.
// ---------------------------------------------------------------------
bool criterion_listings() {
    std::string out_c = std::string(std::tmpnam(nullptr)) + ".c";
    std::string cmd = std::string(IR2C_CLI_PATH) + " gen " +
                      data_path("corpus.ir") + " --out " + out_c +
                      " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
        note("gen exited nonzero");
        return false;
    }
    std::string text = read_file(out_c);
    std::remove(out_c.c_str());

    const char* want =
        "int f(int x, int y, int z) { return (x + y) * (z - 3); }"
        "unsigned int g(unsigned int x, unsigned int y) {"
        "  unsigned int z = 1U;"
        "  if (x < y) { z = z + x; } else { z = z + y; }"
        "  return 2U * z; }"
        "unsigned int h(unsigned int n) {"
        "  unsigned int r = 1U;"
        "  while (n != 0U) { r = r * n; n = n - 1U; }"
        "  return r; }"
        "void i(unsigned char *a, int x, int y) {"
        "  a[x] = (unsigned char) 1;"
        "  a[y] = (unsigned char) 2; }";
    if (!tokens_match(text, want)) {
        note("generated tokens differ from the expected listings");
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------
// 2. Static correctness: translation implies well-formedness.
// ---------------------------------------------------------------------
bool criterion_static() {
    ImplParams params;
    harness::Loaded corpus = load_corpus(params);
    if (!c::check_transunit(corpus.translation.tu, params).ok()) {
        note("corpus translation is not well-formed");
        return false;
    }
    std::mt19937_64 rng(4242);
    for (int k = 0; k < 220; ++k) {
        std::string text = testgen::random_ir_program(rng, k % 4 == 0);
        auto p = ir::parse_ir(text);
        if (!p || !ir::check_ir(p.value())) {
            note("random program failed parse/check");
            return false;
        }
        auto t = codegen::translate(p.value(), params);
        if (!t) {
            note("random checked program failed to translate: " +
                 to_string(t.error()));
            return false;
        }
        if (!c::check_transunit(t.value().tu, params).ok()) {
            note("random translation is not well-formed");
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------
// 3. Dynamic correctness: differential validation plus spot values.
// ---------------------------------------------------------------------
bool criterion_dynamic() {
    harness::Config config;
    config.tests = 1000;
    config.seed = 42;
    config.step_cap = 1u << 12;
    config.fuel_cap = 1u << 16;
    harness::Loaded corpus = load_corpus(config.params);
    harness::Report report = harness::validate_program(
        corpus.program, corpus.translation, config, "corpus");
    if (report.static_result != "wellformed") {
        note("validate did not report wellformed");
        return false;
    }
    if (report.functions.size() != 4 || report.loops.size() != 1) {
        note("unexpected record counts");
        return false;
    }
    for (const harness::FnRecord& r : report.functions) {
        if (r.divergences != 0 || r.error) {
            note("divergence in " + r.name +
                 (r.first_divergence ? ": " + r.first_divergence->detail : ""));
            return false;
        }
        if (r.inputs != 1000) {
            note("wrong input count for " + r.name);
            return false;
        }
    }
    for (const harness::FnRecord& r : report.loops) {
        if (r.divergences != 0 || r.error) {
            note("divergence in loop " + r.name);
            return false;
        }
    }

    struct Spot {
        const char* fn;
        std::vector<std::string> args;
        std::string want;
    };
    const Spot spots[] = {
        {"h", {"uint:0"}, "unsigned int 1\n"},
        {"h", {"uint:5"}, "unsigned int 120\n"},
        {"h", {"uint:13"}, "unsigned int 1932053504\n"},
        {"f", {"int:3", "int:4", "int:5"}, "int 14\n"},
        {"i", {"uchar[]:9,9,9", "int:0", "int:2"},
         "void\na = unsigned char[1,9,2]\n"},
    };
    for (const Spot& s : spots) {
        auto out = harness::run_function(corpus, s.fn, s.args, config);
        if (!out || out.value() != s.want) {
            note(std::string("spot value for ") + s.fn + " differs: " +
                 (out ? out.value() : out.error().message));
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------
// 4. Exhaustive well-definedness matrix against the big-integer reference.
// ---------------------------------------------------------------------
bool criterion_matrix() {
    ImplParams params;
    std::mt19937_64 rng(8);

    for (CIntType from : all_int_types()) {
        for (CIntType to : all_int_types()) {
            IntegerValue v = testgen::random_int(rng, from, params);
            if (!oracle::agrees(oracle::convert(oracle::from_value(v), to,
                                                params),
                                convert(v, to, params))) {
                note("conversion cell " + type_tag(from) + "->" + type_tag(to));
                return false;
            }
        }
    }
    for (UnaryOp op : all_unary_ops()) {
        for (CIntType t : all_int_types()) {
            IntegerValue v = testgen::random_int(rng, t, params);
            if (!oracle::agrees(oracle::unary(op, oracle::from_value(v), params),
                                exec_unary(op, v, params))) {
                note("unary cell " + unary_op_name(op) + "-" + type_tag(t));
                return false;
            }
        }
    }
    for (BinaryOp op : all_binary_ops()) {
        for (CIntType ta : all_int_types()) {
            for (CIntType tb : all_int_types()) {
                IntegerValue a = testgen::random_int(rng, ta, params);
                IntegerValue b = testgen::random_int(rng, tb, params);
                if (!oracle::agrees(
                        oracle::binary(op, oracle::from_value(a),
                                       oracle::from_value(b), params),
                        exec_binary(op, a, b, params))) {
                    note("binary cell " + binary_op_name(op) + "-" +
                         type_tag(ta) + "-" + type_tag(tb));
                    return false;
                }
            }
        }
    }

    // Forced cases.
    auto iv = [](CIntType t, Int128 v) { return IntegerValue{t, v}; };
    bool ok = true;
    ok &= !exec_binary(BinaryOp::Add, iv(ty::sint, type_max(ty::sint, params)),
                       iv(ty::sint, 1), params)
               .ok();
    auto wrap = exec_binary(BinaryOp::Sub, iv(ty::uint, 0), iv(ty::uint, 1),
                            params);
    ok &= wrap.ok() && wrap.value() == iv(ty::uint, 4294967295LL);
    ok &= !exec_binary(BinaryOp::Shl, iv(ty::sint, 1), iv(ty::sint, 32), params)
               .ok();
    ok &= !exec_binary(BinaryOp::Div, iv(ty::sint, 1), iv(ty::sint, 0), params)
               .ok();
    ok &= !exec_binary(BinaryOp::Div, iv(ty::sint, type_min(ty::sint, params)),
                       iv(ty::sint, -1), params)
               .ok();
    ArrayValue arr{ty::uchar, {iv(ty::uchar, 1)}};
    ok &= !array_read(arr, iv(ty::sint, 1)).ok();
    ok &= !array_write(arr, iv(ty::sint, -1), iv(ty::uchar, 0)).ok();
    if (!ok) note("a forced well-definedness case failed");
    return ok;
}

// ---------------------------------------------------------------------
// 5. Fuel properties: monotonicity and exactness of constant bounds.
// ---------------------------------------------------------------------
bool criterion_fuel() {
    ImplParams params;
    std::mt19937_64 rng(515);
    std::size_t monotonic_pairs = 0;
    std::size_t exact_runs = 0;

    for (int k = 0; k < 120 && (monotonic_pairs < 520 || exact_runs < 1100);
         ++k) {
        std::string text = testgen::random_ir_program(rng, k % 4 == 0);
        auto p = ir::parse_ir(text);
        if (!p) continue;
        auto t = codegen::translate(p.value(), params);
        if (!t) continue;
        auto env = c::init_fun_env(t.value().tu);
        if (!env) continue;

        for (const ir::IrFunction& fn : p.value().functions) {
            if (fn.is_loop) continue;
            const codegen::FuelBound& bound = t.value().fuel.at(fn.name);
            for (int trial = 0; trial < 6; ++trial) {
                auto args_ir = testgen::random_args(rng, fn, params, 4);
                std::vector<c::Value> args;
                c::ComputationState base;
                c::Address next = 1;
                for (std::size_t ai = 0; ai < fn.params.size(); ++ai) {
                    if (fn.params[ai].type.is_array) {
                        c::Address addr = next++;
                        base.heap.emplace(addr,
                                          args_ir[ai].as_array().snapshot());
                        args.push_back(c::Value{c::PointerValue{
                            fn.params[ai].type.type, addr}});
                    } else {
                        args.push_back(c::Value{args_ir[ai].as_integer()});
                    }
                }

                auto run = [&](c::Fuel fuel) {
                    c::ComputationState st = base;
                    auto out = c::exec_fun(c::Ident{fn.name}, args, st,
                                           env.value(), params, fuel);
                    return std::make_pair(std::move(out), std::move(st));
                };

                if (bound.is_constant) {
                    auto [out, st] = run(bound.value);
                    if (out.is_limit()) {
                        note("constant bound hit limit in " + fn.name);
                        return false;
                    }
                    ++exact_runs;

                    // Monotonicity: the same outcome at larger budgets.
                    for (c::Fuel extra :
                         {bound.value + 1, bound.value + 13, bound.value * 2}) {
                        auto [out2, st2] = run(extra);
                        if (out2.is_limit()) {
                            note("larger budget regressed to limit");
                            return false;
                        }
                        bool same =
                            out.is_result() == out2.is_result() &&
                            (!out.is_result() ||
                             (out.result() == out2.result() && st == st2)) &&
                            (!out.is_error() ||
                             out.error().kind == out2.error().kind);
                        if (!same) {
                            note("outcome changed with more fuel in " + fn.name);
                            return false;
                        }
                        ++monotonic_pairs;
                    }
                } else {
                    // Find a sufficient budget by doubling, then confirm
                    // stability above it.
                    c::Fuel fuel = 64;
                    auto [out, st] = run(fuel);
                    while (out.is_limit() && fuel < (1u << 18)) {
                        fuel *= 2;
                        std::tie(out, st) = run(fuel);
                    }
                    if (out.is_limit()) continue;
                    for (c::Fuel extra : {fuel + 1, fuel * 2}) {
                        auto [out2, st2] = run(extra);
                        bool same =
                            !out2.is_limit() &&
                            out.is_result() == out2.is_result() &&
                            (!out.is_result() ||
                             (out.result() == out2.result() && st == st2)) &&
                            (!out.is_error() ||
                             out.error().kind == out2.error().kind);
                        if (!same) {
                            note("outcome changed with more fuel in " + fn.name);
                            return false;
                        }
                        ++monotonic_pairs;
                    }
                }
            }
        }
    }
    if (monotonic_pairs < 500) {
        note("only " + std::to_string(monotonic_pairs) + " monotonicity pairs");
        return false;
    }
    if (exact_runs < 1000) {
        note("only " + std::to_string(exact_runs) + " exact-bound runs");
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------
// 6. Pretty-printer properties.
// ---------------------------------------------------------------------
bool criterion_pretty() {
    ImplParams params;
    std::mt19937_64 rng(606);
    for (int k = 0; k < 5200; ++k) {
        c::ExprPtr e = testgen::random_expr(rng, 4, params);
        std::string text = c::print_expr(*e);
        auto back = c::parse_expr(text, params);
        if (!back || !(*back.value() == *e)) {
            note("round trip failed on: " + text);
            return false;
        }
    }
    int exprs = 0;
    for (int k = 0; k < 520; ++k) {
        c::ExprPtr e = testgen::random_expr(rng, 4, params);
        std::string text = c::print_expr(*e);
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] != '(') continue;
            int depth = 1;
            std::size_t j = i + 1;
            for (; j < text.size() && depth > 0; ++j) {
                if (text[j] == '(') ++depth;
                if (text[j] == ')') --depth;
            }
            std::string mutated = text;
            mutated.erase(j - 1, 1);
            mutated.erase(i, 1);
            auto back = c::parse_expr(mutated, params);
            if (back.ok() && *back.value() == *e) {
                note("removable parentheses in: " + text);
                return false;
            }
        }
        ++exprs;
    }
    return exprs >= 500;
}

// ---------------------------------------------------------------------
// 7. Copy-on-write and in-place array evaluation agree.
// ---------------------------------------------------------------------
bool criterion_single_threaded() {
    ImplParams params;
    ir::EvalOptions cow;
    cow.step_cap = 4096;
    ir::EvalOptions inplace = cow;
    inplace.strategy = ir::ArrayStrategy::InPlace;

    auto agree_on = [&](const ir::IrProgram& p, std::mt19937_64& rng,
                        int runs) -> bool {
        for (const ir::IrFunction& fn : p.functions) {
            for (int k = 0; k < runs; ++k) {
                auto args = testgen::random_args(rng, fn, params, 5);
                auto a = ir::eval_ir(p, fn.name, args, cow);
                auto b = ir::eval_ir(p, fn.name, args, inplace);
                if (a.ok() != b.ok()) return false;
                if (!a.ok()) {
                    if (a.error().kind != b.error().kind) return false;
                    continue;
                }
                if (a.value().size() != b.value().size()) return false;
                for (std::size_t i = 0; i < a.value().size(); ++i)
                    if (!ir::ir_value_eq(a.value()[i], b.value()[i]))
                        return false;
            }
        }
        return true;
    };

    std::mt19937_64 rng(707);
    harness::Loaded corpus = load_corpus(params);
    if (!agree_on(corpus.program, rng, 40)) {
        note("strategies disagree on the corpus");
        return false;
    }
    for (int k = 0; k < 210; ++k) {
        std::string text = testgen::random_ir_program(rng, k % 3 == 0);
        auto p = ir::parse_ir(text);
        if (!p || !ir::check_ir(p.value())) {
            note("random program rejected");
            return false;
        }
        if (!agree_on(p.value(), rng, 3)) {
            note("strategies disagree on a random program");
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------
// 8. Reproducibility: byte-identical reports.
// ---------------------------------------------------------------------
bool criterion_reproducible() {
    harness::Config config;
    config.tests = 150;
    config.seed = 42;
    config.step_cap = 1u << 12;
    config.fuel_cap = 1u << 16;
    harness::Loaded corpus = load_corpus(config.params);
    harness::Report r1 = harness::validate_program(
        corpus.program, corpus.translation, config, "corpus");
    harness::Report r2 = harness::validate_program(
        corpus.program, corpus.translation, config, "corpus");
    if (r1.to_json() != r2.to_json()) {
        note("reports differ between identical runs");
        return false;
    }
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool()> run;
    };
    const Criterion criteria[] = {
        {"1. listing reproduction", criterion_listings},
        {"2. static correctness", criterion_static},
        {"3. dynamic correctness", criterion_dynamic},
        {"4. well-definedness matrix", criterion_matrix},
        {"5. fuel properties", criterion_fuel},
        {"6. pretty-printer properties", criterion_pretty},
        {"7. single-threaded array strategies", criterion_single_threaded},
        {"8. reproducible reports", criterion_reproducible},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        fail_note.clear();
        auto start = std::chrono::steady_clock::now();
        bool ok = c.run();
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        std::cout << (ok ? "PASS" : "FAIL") << "  " << c.name << "  (" << ms
                  << " ms)";
        if (!ok && !fail_note.empty()) std::cout << "  -- " << fail_note;
        std::cout << "\n";
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
