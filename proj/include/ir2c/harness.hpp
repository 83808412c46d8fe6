#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ir2c/c_dynamic.hpp"
#include "ir2c/codegen.hpp"
#include "ir2c/ir.hpp"

namespace ir2c::harness {

// ---------------------------------------------------------------------------
// Configuration: flat `key = value` text, flags layered on top by the CLI.
// ---------------------------------------------------------------------------

struct Config {
    ImplParams params{};
    std::uint64_t seed = 42;
    std::size_t tests = 1000;
    c::Fuel fuel_cap = 1u << 24;
    std::uint64_t step_cap = 1u << 20;
    std::size_t max_array_len = 8;
    int indent = 4;

    static constexpr c::Fuel fuel_doubling_base = 64;
};

// Applies `key = value` lines (# and ; comments, blank lines ignored) on top
// of `base`. Keys: bits_char, bits_short, bits_int, bits_long, bits_llong,
// tests, seed, fuel_cap, step_cap, max_array_len, indent.
Result<Config, std::string> apply_config_text(const std::string& text,
                                              Config base);
Result<Config, std::string> apply_config_file(const std::string& path,
                                              Config base);

// ---------------------------------------------------------------------------
// Staged pipeline
// ---------------------------------------------------------------------------

struct StageError {
    std::string stage;  // parse | check | translate | io | args
    std::string message;
};

struct Loaded {
    ir::IrProgram program;
    codegen::Translation translation;
};

Result<Loaded, StageError> load_program(const std::string& text,
                                        const ImplParams& params);

// ---------------------------------------------------------------------------
// Differential validation
// ---------------------------------------------------------------------------

struct Divergence {
    std::size_t input_index = 0;
    std::string inputs;
    std::string detail;
};

struct FnRecord {
    std::string name;
    bool is_loop = false;
    std::size_t inputs = 0;
    std::size_t agreements = 0;
    std::size_t divergences = 0;
    std::size_t inconclusive = 0;
    std::optional<Divergence> first_divergence;
    std::string fuel;  // "constant:<n>" or "doubling"
    std::optional<std::string> error;  // e.g. sampling exhausted
};

// Differentially runs one non-loop function: for each generated input tuple,
// the reference evaluation and exec_fun on a state with each array argument
// at a fresh distinct address must agree on the result value, the final
// content of every array argument, and leave frames and the rest of the heap
// untouched.
FnRecord validate_function(const ir::IrFunction& fn, const c::TransUnit& tu,
                           const codegen::Translation& tr,
                           const ir::IrProgram& p, const Config& config);

// Loop-level validation: drives exec_stmt_while on a single frame holding the
// loop's formals and compares the final variable and array values with the
// reference evaluation of the loop function.
FnRecord validate_loop(const ir::IrFunction& loop_fn,
                       const codegen::Translation& tr, const ir::IrProgram& p,
                       const Config& config);

struct Report {
    std::string program;
    std::uint64_t seed = 0;
    ImplParams params{};
    std::string static_result;
    std::vector<FnRecord> functions;  // sorted by name
    std::vector<FnRecord> loops;      // sorted by name

    std::size_t total_divergences() const;
    std::size_t total_inconclusive() const;
    bool has_errors() const;
    // 0 ok, 3 divergences, 4 inconclusive or per-function errors.
    int exit_code() const;
    std::string to_json() const;
};

// Runs the whole validation, bottom-up over the program's functions.
Report validate_program(const ir::IrProgram& p,
                        const codegen::Translation& tr, const Config& config,
                        const std::string& program_id);

// ---------------------------------------------------------------------------
// Ad-hoc execution (the `run` subcommand)
// ---------------------------------------------------------------------------

// Argument syntax: `int:3`, `uint:5`, `uchar[]:1,2,3`; type names are the IR
// tags without the sign prefix doubled: char, uchar, short, ushort, int,
// uint, long, ulong, llong, ullong (bare names are signed).
Result<std::string, StageError> run_function(const Loaded& loaded,
                                             const std::string& fn,
                                             const std::vector<std::string>& args,
                                             const Config& config);

}  // namespace ir2c::harness
