#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "ir2c/c_pretty.hpp"
#include "ir2c/c_static.hpp"
#include "ir2c/codegen.hpp"
#include "support/generators.hpp"

using namespace ir2c;

namespace {

const ImplParams P{};

ir::IrProgram load_corpus() {
    std::ifstream in(std::string(IR2C_DATA_DIR) + "/corpus.ir");
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    auto p = ir::parse_ir(buf.str());
    REQUIRE_MESSAGE(p.ok(), to_string(p.error()));
    return std::move(p).value();
}

bool tokens_equal(const std::string& got, const std::string& want) {
    return testgen::c_tokens(got) == testgen::c_tokens(want);
}

}  // namespace

TEST_CASE("translating the corpus reproduces the expected C") {
    ir::IrProgram p = load_corpus();
    auto t = codegen::translate(p, P);
    REQUIRE_MESSAGE(t.ok(), to_string(t.error()));
    const codegen::Translation& tr = t.value();

    REQUIRE(tr.tu.fundefs.size() == 4);
    CHECK(tr.tu.fundefs[0].name.name == "f");
    CHECK(tr.tu.fundefs[1].name.name == "g");
    CHECK(tr.tu.fundefs[2].name.name == "h");
    CHECK(tr.tu.fundefs[3].name.name == "i");

    std::string text = c::print_transunit(tr.tu);
    CHECK(tokens_equal(
        c::print_transunit(c::TransUnit{{tr.tu.fundefs[0]}}),
        "int f(int x, int y, int z) { return (x + y) * (z - 3); }"));
    CHECK(tokens_equal(
        c::print_transunit(c::TransUnit{{tr.tu.fundefs[1]}}),
        "unsigned int g(unsigned int x, unsigned int y) {"
        "    unsigned int z = 1U;"
        "    if (x < y) { z = z + x; } else { z = z + y; }"
        "    return 2U * z; }"));
    CHECK(tokens_equal(
        c::print_transunit(c::TransUnit{{tr.tu.fundefs[2]}}),
        "unsigned int h(unsigned int n) {"
        "    unsigned int r = 1U;"
        "    while (n != 0U) { r = r * n; n = n - 1U; }"
        "    return r; }"));
    CHECK(tokens_equal(
        c::print_transunit(c::TransUnit{{tr.tu.fundefs[3]}}),
        "void i(unsigned char *a, int x, int y) {"
        "    a[x] = (unsigned char) 1;"
        "    a[y] = (unsigned char) 2; }"));

    SUBCASE("the result is statically well-formed") {
        CHECK(c::check_transunit(tr.tu, P).ok());
    }

    SUBCASE("fuel bounds") {
        CHECK(tr.fuel.at("f").is_constant);
        CHECK(tr.fuel.at("g").is_constant);
        CHECK(tr.fuel.at("i").is_constant);
        CHECK_FALSE(tr.fuel.at("h").is_constant);
    }

    SUBCASE("output shapes") {
        const codegen::FunOutputs& f_out = tr.outputs.at("f");
        REQUIRE(f_out.result.has_value());
        CHECK(*f_out.result == c::CType::integer(ty::sint));
        CHECK(f_out.affected_arrays.empty());

        const codegen::FunOutputs& i_out = tr.outputs.at("i");
        CHECK_FALSE(i_out.result.has_value());
        CHECK(i_out.affected_arrays == std::vector<std::string>{"a"});

        const codegen::FunOutputs& loop_out = tr.outputs.at("h$loop");
        CHECK(loop_out.affected_vars == std::vector<std::string>{"n", "r"});
    }

    SUBCASE("the loop translation is recorded for validation") {
        const codegen::LoopTranslation& lt = tr.loops.at("h$loop");
        CHECK(c::print_expr(*lt.test) == "n != 0U");
        CHECK(lt.affected == std::vector<std::string>{"n", "r"});
        CHECK(lt.body.stmts.size() == 2);
    }

    SUBCASE("translation is deterministic") {
        auto again = codegen::translate(p, P);
        REQUIRE(again.ok());
        CHECK(c::print_transunit(again.value().tu) == text);
    }
}

TEST_CASE("translation errors carry locations and reasons") {
    SUBCASE("operand type does not match the operator tag") {
        auto p = ir::parse_ir(
            "(defun |t| (|x|) (declare (xargs :guard (uintp |x|)))"
            " (add-sint-sint |x| (sint-dec-const 1)))");
        REQUIRE(p.ok());
        auto t = codegen::translate(p.value(), P);
        REQUIRE_FALSE(t.ok());
        CHECK(to_string(t.error()).find("add-sint-sint") != std::string::npos);
    }

    SUBCASE("boolean term used as an integer") {
        auto p = ir::parse_ir(
            "(defun |t| (|x|) (declare (xargs :guard (sintp |x|)))"
            " (add-sint-sint |x| (boolean-from-sint |x|)))");
        REQUIRE(p.ok());
        CHECK_FALSE(codegen::translate(p.value(), P).ok());
    }

    SUBCASE("conditional branches must have one type") {
        auto p = ir::parse_ir(
            "(defun |t| (|x|) (declare (xargs :guard (sintp |x|)))"
            " (condexpr (if (boolean-from-sint |x|) |x| (uint-dec-const 1))))");
        REQUIRE(p.ok());
        auto t = codegen::translate(p.value(), P);
        REQUIRE_FALSE(t.ok());
        CHECK(to_string(t.error()).find("branches") != std::string::npos);
    }

    SUBCASE("assignment must preserve the declared type") {
        auto p = ir::parse_ir(
            "(defun |t| (|x|) (declare (xargs :guard (sintp |x|)))"
            " (let ((|x| (assign (uint-dec-const 1)))) |x|))");
        REQUIRE(p.ok());
        CHECK_FALSE(codegen::translate(p.value(), P).ok());
    }

    SUBCASE("loops with statements on the exit path have no while image") {
        auto p = ir::parse_ir(
            "(defun |e$| (|n|) (declare (xargs :guard (uintp |n|)))"
            " (if (boolean-from-sint (ne-uint-uint |n| (uint-dec-const 0)))"
            "   (let ((|n| (assign (sub-uint-uint |n| (uint-dec-const 1)))))"
            "     (|e$| |n|))"
            "   (let ((|n| (assign (add-uint-uint |n| (uint-dec-const 1)))))"
            "     |n|)))");
        REQUIRE(p.ok());
        auto t = codegen::translate(p.value(), P);
        REQUIRE_FALSE(t.ok());
        CHECK(to_string(t.error()).find("while") != std::string::npos);
    }
}

TEST_CASE("condexpr and logical operators translate to C forms") {
    auto p = ir::parse_ir(
        "(defun |pick| (|x| |y|)"
        " (declare (xargs :guard (and (sintp |x|) (sintp |y|))))"
        " (condexpr (if (and (boolean-from-sint (lt-sint-sint |x| |y|))"
        "                    (boolean-from-sint |y|))"
        "               |x| |y|)))");
    REQUIRE_MESSAGE(p.ok(), to_string(p.error()));
    auto t = codegen::translate(p.value(), P);
    REQUIRE_MESSAGE(t.ok(), to_string(t.error()));
    std::string text = c::print_transunit(t.value().tu);
    CHECK(text.find("return x < y && y ? x : y;") != std::string::npos);
}

TEST_CASE("every random checked program translates to well-formed C") {
    std::mt19937_64 rng(2025);
    for (int k = 0; k < 100; ++k) {
        std::string text = testgen::random_ir_program(rng, k % 4 == 0);
        auto p = ir::parse_ir(text);
        REQUIRE(p.ok());
        auto t = codegen::translate(p.value(), P);
        REQUIRE_MESSAGE(t.ok(), to_string(t.error()), "\n", text);
        auto wf = c::check_transunit(t.value().tu, P);
        REQUIRE_MESSAGE(wf.ok(), wf.error().message, "\n",
                        c::print_transunit(t.value().tu));
        // Order preservation: one C function per non-loop IR function.
        std::size_t non_loops = 0;
        for (const ir::IrFunction& fn : p.value().functions)
            if (!fn.is_loop) {
                CHECK(t.value().tu.fundefs[non_loops].name.name == fn.name);
                ++non_loops;
            }
        CHECK(t.value().tu.fundefs.size() == non_loops);
    }
}
