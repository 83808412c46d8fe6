#include "ir2c/harness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ir2c/c_pretty.hpp"

namespace ir2c::harness {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Result<Config, std::string> apply_config_text(const std::string& text,
                                              Config base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            return "line " + std::to_string(lineno) + ": expected key = value";
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        char* end = nullptr;
        unsigned long long num = std::strtoull(value.c_str(), &end, 10);
        if (value.empty() || *end != '\0')
            return "line " + std::to_string(lineno) + ": '" + key +
                   "' needs a non-negative integer, got '" + value + "'";
        if (key == "bits_char") base.params.bits_char = static_cast<int>(num);
        else if (key == "bits_short") base.params.bits_short = static_cast<int>(num);
        else if (key == "bits_int") base.params.bits_int = static_cast<int>(num);
        else if (key == "bits_long") base.params.bits_long = static_cast<int>(num);
        else if (key == "bits_llong") base.params.bits_llong = static_cast<int>(num);
        else if (key == "tests") base.tests = static_cast<std::size_t>(num);
        else if (key == "seed") base.seed = num;
        else if (key == "fuel_cap") base.fuel_cap = num;
        else if (key == "step_cap") base.step_cap = num;
        else if (key == "max_array_len") base.max_array_len = static_cast<std::size_t>(num);
        else if (key == "indent") base.indent = static_cast<int>(num);
        else
            return "line " + std::to_string(lineno) + ": unknown key '" + key +
                   "'";
    }
    if (auto bad = base.params.validate()) return *bad;
    if (base.tests == 0) return std::string("tests must be positive");
    if (base.fuel_cap == 0) return std::string("fuel_cap must be positive");
    if (base.step_cap == 0) return std::string("step_cap must be positive");
    if (base.max_array_len == 0)
        return std::string("max_array_len must be positive");
    if (base.indent <= 0) return std::string("indent must be positive");
    return base;
}

Result<Config, std::string> apply_config_file(const std::string& path,
                                              Config base) {
    std::ifstream in(path);
    if (!in) return "cannot open config file '" + path + "'";
    std::stringstream buf;
    buf << in.rdbuf();
    return apply_config_text(buf.str(), std::move(base));
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

Result<Loaded, StageError> load_program(const std::string& text,
                                        const ImplParams& params) {
    auto parsed = ir::parse_ir(text);
    if (!parsed) return StageError{"parse", to_string(parsed.error())};
    auto checked = ir::check_ir(parsed.value());
    if (!checked) return StageError{"check", to_string(checked.error())};
    auto translated = codegen::translate(parsed.value(), params);
    if (!translated)
        return StageError{"translate", to_string(translated.error())};
    return Loaded{std::move(parsed).value(), std::move(translated).value()};
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::string print_tuple(const std::vector<ir::IrValue>& vals) {
    std::string out = "(";
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out += ", ";
        out += ir::to_string(vals[i]);
    }
    return out + ")";
}

struct ExecSetup {
    c::ComputationState state;
    std::vector<c::Value> args;
    // Address of each array argument, indexed by parameter position (0 when
    // the parameter is an integer).
    std::vector<c::Address> addresses;
};

// Builds the initial state: every array argument lands in the heap at a
// fresh, pairwise-distinct address.
ExecSetup make_setup(const std::vector<ir::IrParam>& params,
                     const std::vector<ir::IrValue>& tuple) {
    ExecSetup setup;
    c::Address next = 1;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].type.is_array) {
            c::Address addr = next++;
            setup.state.heap.emplace(addr, tuple[i].as_array().snapshot());
            setup.args.push_back(
                c::Value{c::PointerValue{params[i].type.type, addr}});
            setup.addresses.push_back(addr);
        } else {
            setup.args.push_back(c::Value{tuple[i].as_integer()});
            setup.addresses.push_back(0);
        }
    }
    return setup;
}

struct FuelPlan {
    bool constant = false;
    c::Fuel amount = 0;  // the constant bound, or the doubling base
};

// Runs `body` (which executes from a fresh state copy) under the fuel plan:
// once at the constant bound, or doubling until non-limit or the cap.
template <typename RunFn>
c::Outcome<std::monostate> run_with_fuel(const FuelPlan& plan, c::Fuel cap,
                                         RunFn&& body, c::Fuel& used) {
    if (plan.constant) {
        used = plan.amount;
        return body(plan.amount);
    }
    c::Fuel fuel = std::min<c::Fuel>(Config::fuel_doubling_base, cap);
    while (true) {
        used = fuel;
        auto out = body(fuel);
        if (!out.is_limit()) return out;
        if (fuel >= cap) return c::Limit{};
        fuel = fuel >= cap / 2 ? cap : fuel * 2;
    }
}

bool integer_equal(const c::Value& exec_value, const ir::IrValue& eval_value) {
    return exec_value.is_integer() && eval_value.is_integer() &&
           exec_value.as_integer() == eval_value.as_integer();
}

}  // namespace

FnRecord validate_function(const ir::IrFunction& fn, const c::TransUnit& tu,
                           const codegen::Translation& tr,
                           const ir::IrProgram& p, const Config& config) {
    FnRecord rec;
    rec.name = fn.name;
    rec.is_loop = false;

    const codegen::FuelBound& bound = tr.fuel.at(fn.name);
    rec.fuel = bound.is_constant ? "constant:" + std::to_string(bound.value)
                                 : "doubling";
    FuelPlan plan{bound.is_constant, bound.value};

    auto env = c::init_fun_env(tu);
    if (!env) {
        rec.error = "function environment: " + to_string(env.error());
        return rec;
    }

    ir::GenOptions gen;
    gen.params = config.params;
    gen.seed = config.seed;
    gen.count = config.tests;
    gen.max_array_len = config.max_array_len;
    auto inputs = ir::gen_inputs(p, fn, gen);
    if (!inputs) {
        rec.error = inputs.error();
        return rec;
    }

    ir::EvalOptions eval_opts;
    eval_opts.params = config.params;
    eval_opts.step_cap = config.step_cap;

    const codegen::FunOutputs& outputs = tr.outputs.at(fn.name);

    auto diverge = [&](std::size_t idx, const std::vector<ir::IrValue>& tuple,
                       std::string detail) {
        rec.divergences++;
        if (!rec.first_divergence)
            rec.first_divergence =
                Divergence{idx, print_tuple(tuple), std::move(detail)};
    };

    for (std::size_t idx = 0; idx < inputs.value().size(); ++idx) {
        const std::vector<ir::IrValue>& tuple = inputs.value()[idx];
        rec.inputs++;

        auto eval = ir::eval_ir(p, fn.name, tuple, eval_opts);
        if (!eval) {
            if (eval.error().kind == ir::EvalError::Kind::Cap) {
                rec.inconclusive++;
                continue;
            }
            // The inputs satisfy the stated guards, so a guard violation in
            // the body means the guards do not cover the function; the C side
            // errors the same way, which the correspondence rules out.
            diverge(idx, tuple,
                    "reference evaluation failed: " + to_string(eval.error()));
            continue;
        }

        ExecSetup setup = make_setup(fn.params, tuple);
        c::ComputationState final_state;
        std::optional<c::Value> result;
        c::Fuel used = 0;
        auto outcome = run_with_fuel(
            plan, config.fuel_cap,
            [&](c::Fuel fuel) -> c::Outcome<std::monostate> {
                c::ComputationState st = setup.state;
                auto out = c::exec_fun(c::Ident{fn.name}, setup.args, st,
                                       env.value(), config.params, fuel);
                if (out.is_limit()) return c::Limit{};
                if (out.is_error()) return out.error();
                final_state = std::move(st);
                result = out.result();
                return std::monostate{};
            },
            used);
        if (outcome.is_limit()) {
            rec.inconclusive++;
            continue;
        }
        if (outcome.is_error()) {
            diverge(idx, tuple,
                    "execution error: " + to_string(outcome.error()));
            continue;
        }

        // Compare the outcome with the reference values.
        const std::vector<ir::IrValue>& vals = eval.value();
        if (vals.size() != (outputs.result ? 1 : 0) +
                               outputs.affected_arrays.size()) {
            diverge(idx, tuple, "reference produced " +
                                    std::to_string(vals.size()) + " values");
            continue;
        }
        std::size_t vi = 0;
        std::string mismatch;
        if (outputs.result) {
            if (!result)
                mismatch = "expected a result value, got none";
            else if (!integer_equal(*result, vals[vi]))
                mismatch = "result " + to_string(*result) + " differs from " +
                           ir::to_string(vals[vi]);
            ++vi;
        } else if (result) {
            mismatch = "void function produced " + to_string(*result);
        }
        std::map<std::string, const ir::IrValue*> eval_arrays;
        for (const std::string& name : outputs.affected_arrays)
            eval_arrays[name] = &vals[vi++];
        for (std::size_t i = 0; i < fn.params.size() && mismatch.empty(); ++i) {
            if (!fn.params[i].type.is_array) continue;
            auto heap_it = final_state.heap.find(setup.addresses[i]);
            if (heap_it == final_state.heap.end()) {
                mismatch = "array '" + fn.params[i].name +
                           "' vanished from the heap";
                break;
            }
            auto expect = eval_arrays.find(fn.params[i].name);
            ArrayValue want = expect != eval_arrays.end()
                                  ? expect->second->as_array().snapshot()
                                  : tuple[i].as_array().snapshot();
            if (!(heap_it->second == want))
                mismatch = "array '" + fn.params[i].name +
                           "' ends as " +
                           ir::to_string(ir::make_ir_array(heap_it->second)) +
                           ", expected " +
                           ir::to_string(ir::make_ir_array(want));
        }
        if (mismatch.empty() && !final_state.frames.empty())
            mismatch = "frame stack not restored";
        if (mismatch.empty() &&
            final_state.heap.size() != setup.state.heap.size())
            mismatch = "heap gained or lost arrays";
        if (!mismatch.empty()) {
            diverge(idx, tuple, mismatch);
            continue;
        }
        rec.agreements++;
    }
    return rec;
}

FnRecord validate_loop(const ir::IrFunction& loop_fn,
                       const codegen::Translation& tr, const ir::IrProgram& p,
                       const Config& config) {
    FnRecord rec;
    rec.name = loop_fn.name;
    rec.is_loop = true;
    rec.fuel = "doubling";

    auto lt_it = tr.loops.find(loop_fn.name);
    if (lt_it == tr.loops.end()) {
        rec.error = "loop was not translated";
        return rec;
    }
    const codegen::LoopTranslation& lt = lt_it->second;

    auto env = c::init_fun_env(tr.tu);
    if (!env) {
        rec.error = "function environment: " + to_string(env.error());
        return rec;
    }

    ir::GenOptions gen;
    gen.params = config.params;
    gen.seed = config.seed;
    gen.count = config.tests;
    gen.max_array_len = config.max_array_len;
    auto inputs = ir::gen_inputs(p, loop_fn, gen);
    if (!inputs) {
        rec.error = inputs.error();
        return rec;
    }

    ir::EvalOptions eval_opts;
    eval_opts.params = config.params;
    eval_opts.step_cap = config.step_cap;

    auto diverge = [&](std::size_t idx, const std::vector<ir::IrValue>& tuple,
                       std::string detail) {
        rec.divergences++;
        if (!rec.first_divergence)
            rec.first_divergence =
                Divergence{idx, print_tuple(tuple), std::move(detail)};
    };

    for (std::size_t idx = 0; idx < inputs.value().size(); ++idx) {
        const std::vector<ir::IrValue>& tuple = inputs.value()[idx];
        rec.inputs++;

        auto eval = ir::eval_ir(p, loop_fn.name, tuple, eval_opts);
        if (!eval) {
            if (eval.error().kind == ir::EvalError::Kind::Cap) {
                rec.inconclusive++;
                continue;
            }
            diverge(idx, tuple,
                    "reference evaluation failed: " + to_string(eval.error()));
            continue;
        }

        // One frame holding the loop's formals as variables.
        ExecSetup setup = make_setup(loop_fn.params, tuple);
        c::Frame frame{c::Ident{loop_fn.name}, {c::Scope{}}};
        for (std::size_t i = 0; i < loop_fn.params.size(); ++i)
            frame.scopes.back().emplace(loop_fn.params[i].name, setup.args[i]);
        setup.state.frames.push_back(std::move(frame));

        c::ComputationState final_state;
        bool returned_value = false;
        c::Fuel used = 0;
        auto outcome = run_with_fuel(
            FuelPlan{false, 0}, config.fuel_cap,
            [&](c::Fuel fuel) -> c::Outcome<std::monostate> {
                c::ComputationState st = setup.state;
                auto out = c::exec_stmt_while(*lt.test, lt.body, st,
                                              env.value(), config.params, fuel);
                if (out.is_limit()) return c::Limit{};
                if (out.is_error()) return out.error();
                final_state = std::move(st);
                returned_value = out.result().value.has_value();
                return std::monostate{};
            },
            used);
        if (outcome.is_limit()) {
            rec.inconclusive++;
            continue;
        }
        if (outcome.is_error()) {
            diverge(idx, tuple,
                    "execution error: " + to_string(outcome.error()));
            continue;
        }

        std::string mismatch;
        if (returned_value) mismatch = "loop produced a return value";

        const std::vector<ir::IrValue>& vals = eval.value();
        if (vals.size() != lt.affected.size()) {
            diverge(idx, tuple, "reference produced " +
                                    std::to_string(vals.size()) + " values");
            continue;
        }
        std::map<std::string, const ir::IrValue*> affected;
        for (std::size_t i = 0; i < lt.affected.size(); ++i)
            affected[lt.affected[i]] = &vals[i];

        for (std::size_t i = 0;
             i < loop_fn.params.size() && mismatch.empty(); ++i) {
            const ir::IrParam& prm = loop_fn.params[i];
            auto expect = affected.find(prm.name);
            if (prm.type.is_array) {
                auto heap_it = final_state.heap.find(setup.addresses[i]);
                if (heap_it == final_state.heap.end()) {
                    mismatch = "array '" + prm.name + "' vanished";
                    break;
                }
                ArrayValue want = expect != affected.end()
                                      ? expect->second->as_array().snapshot()
                                      : tuple[i].as_array().snapshot();
                if (!(heap_it->second == want))
                    mismatch = "array '" + prm.name + "' ends as " +
                               ir::to_string(ir::make_ir_array(heap_it->second)) +
                               ", expected " +
                               ir::to_string(ir::make_ir_array(want));
            } else {
                auto read = final_state.read_var(c::Ident{prm.name});
                if (!read) {
                    mismatch = "variable '" + prm.name + "' unreadable: " +
                               to_string(read.error());
                    break;
                }
                IntegerValue want = expect != affected.end()
                                        ? expect->second->as_integer()
                                        : tuple[i].as_integer();
                if (!(read.value() ==
                      c::Value{want}))
                    mismatch = "variable '" + prm.name + "' ends as " +
                               to_string(read.value()) + ", expected " +
                               to_string(want);
            }
        }
        if (mismatch.empty() &&
            (final_state.frames.size() != 1 ||
             final_state.frames.back().scopes.size() != 1))
            mismatch = "frame or scope stack not restored";
        if (!mismatch.empty()) {
            diverge(idx, tuple, mismatch);
            continue;
        }
        rec.agreements++;
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

std::size_t Report::total_divergences() const {
    std::size_t n = 0;
    for (const FnRecord& r : functions) n += r.divergences;
    for (const FnRecord& r : loops) n += r.divergences;
    return n;
}

std::size_t Report::total_inconclusive() const {
    std::size_t n = 0;
    for (const FnRecord& r : functions) n += r.inconclusive;
    for (const FnRecord& r : loops) n += r.inconclusive;
    return n;
}

bool Report::has_errors() const {
    for (const FnRecord& r : functions)
        if (r.error) return true;
    for (const FnRecord& r : loops)
        if (r.error) return true;
    return false;
}

int Report::exit_code() const {
    if (static_result != "wellformed") return 1;
    if (total_divergences() > 0) return 3;
    if (total_inconclusive() > 0 || has_errors()) return 4;
    return 0;
}

namespace {

ordered_json record_json(const FnRecord& r) {
    ordered_json j;
    j["name"] = r.name;
    j["kind"] = r.is_loop ? "loop" : "function";
    j["inputs"] = r.inputs;
    j["agreements"] = r.agreements;
    j["divergences"] = r.divergences;
    j["inconclusive"] = r.inconclusive;
    if (r.first_divergence) {
        ordered_json d;
        d["input_index"] = r.first_divergence->input_index;
        d["inputs"] = r.first_divergence->inputs;
        d["detail"] = r.first_divergence->detail;
        j["first_divergence"] = d;
    } else {
        j["first_divergence"] = nullptr;
    }
    j["fuel"] = r.fuel;
    if (r.error) j["error"] = *r.error;
    return j;
}

}  // namespace

std::string Report::to_json() const {
    ordered_json j;
    j["program"] = program;
    j["seed"] = seed;
    ordered_json sizes;
    sizes["bits_char"] = params.bits_char;
    sizes["bits_short"] = params.bits_short;
    sizes["bits_int"] = params.bits_int;
    sizes["bits_long"] = params.bits_long;
    sizes["bits_llong"] = params.bits_llong;
    j["impl_params"] = sizes;
    j["static"] = static_result;
    j["functions"] = ordered_json::array();
    for (const FnRecord& r : functions) j["functions"].push_back(record_json(r));
    j["loops"] = ordered_json::array();
    for (const FnRecord& r : loops) j["loops"].push_back(record_json(r));
    j["divergences"] = total_divergences();
    j["inconclusive"] = total_inconclusive();
    return j.dump(2) + "\n";
}

Report validate_program(const ir::IrProgram& p,
                        const codegen::Translation& tr, const Config& config,
                        const std::string& program_id) {
    Report report;
    report.program = program_id;
    report.seed = config.seed;
    report.params = config.params;
    report.static_result = "wellformed";
    for (const ir::IrFunction& fn : p.functions) {
        if (fn.is_loop)
            report.loops.push_back(validate_loop(fn, tr, p, config));
        else
            report.functions.push_back(
                validate_function(fn, tr.tu, tr, p, config));
    }
    auto by_name = [](const FnRecord& a, const FnRecord& b) {
        return a.name < b.name;
    };
    std::sort(report.functions.begin(), report.functions.end(), by_name);
    std::sort(report.loops.begin(), report.loops.end(), by_name);
    return report;
}

// ---------------------------------------------------------------------------
// Ad-hoc runs
// ---------------------------------------------------------------------------

namespace {

std::optional<CIntType> run_type_from_name(const std::string& name) {
    if (name.empty()) return std::nullopt;
    if (name[0] == 'u') return type_from_tag(name);
    return type_from_tag("s" + name);
}

Result<ir::IrValue, std::string> parse_run_arg(const std::string& text,
                                               const ImplParams& params) {
    std::size_t colon = text.find(':');
    if (colon == std::string::npos)
        return "argument '" + text + "' needs the form type:value";
    std::string tyname = text.substr(0, colon);
    std::string value = text.substr(colon + 1);
    bool array = false;
    if (tyname.size() > 2 && tyname.substr(tyname.size() - 2) == "[]") {
        array = true;
        tyname = tyname.substr(0, tyname.size() - 2);
    }
    auto t = run_type_from_name(tyname);
    if (!t) return "unknown type '" + tyname + "'";
    auto parse_one = [&](const std::string& s)
        -> Result<IntegerValue, std::string> {
        Int128 v = 0;
        if (!int128_from_string(s, v)) return "bad integer '" + s + "'";
        auto iv = make_int(*t, v, params);
        if (!iv)
            return s + " does not fit " + c_type_name(*t);
        return iv.value();
    };
    if (!array) {
        auto iv = parse_one(value);
        if (!iv) return iv.error();
        return ir::make_ir_int(iv.value());
    }
    ArrayValue a{*t, {}};
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        std::string piece = comma == std::string::npos
                                ? value.substr(start)
                                : value.substr(start, comma - start);
        auto iv = parse_one(trim(piece));
        if (!iv) return iv.error();
        a.elems.push_back(iv.value());
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (a.elems.empty()) return std::string("arrays must be non-empty");
    return ir::make_ir_array(std::move(a));
}

}  // namespace

Result<std::string, StageError> run_function(const Loaded& loaded,
                                             const std::string& fn,
                                             const std::vector<std::string>& args,
                                             const Config& config) {
    const ir::IrFunction* f = loaded.program.find(fn);
    if (!f) return StageError{"args", "no function named '" + fn + "'"};
    if (f->is_loop)
        return StageError{"args",
                          "'" + fn + "' is a loop; run its enclosing function"};
    if (args.size() != f->params.size())
        return StageError{"args", "expected " +
                                      std::to_string(f->params.size()) +
                                      " arguments, got " +
                                      std::to_string(args.size())};
    std::vector<ir::IrValue> tuple;
    for (std::size_t i = 0; i < args.size(); ++i) {
        auto v = parse_run_arg(args[i], config.params);
        if (!v) return StageError{"args", v.error()};
        bool want_array = f->params[i].type.is_array;
        if (want_array != v.value().is_array())
            return StageError{"args", "argument " + std::to_string(i + 1) +
                                          (want_array ? " must be an array"
                                                      : " must be an integer")};
        CIntType want = f->params[i].type.type;
        CIntType got = want_array ? v.value().as_array().elem_type
                                  : v.value().as_integer().type;
        if (!(got == want))
            return StageError{"args", "argument " + std::to_string(i + 1) +
                                          " has type " + c_type_name(got) +
                                          ", parameter wants " +
                                          c_type_name(want)};
        tuple.push_back(std::move(v).value());
    }

    auto env = c::init_fun_env(loaded.translation.tu);
    if (!env) return StageError{"translate", to_string(env.error())};

    const codegen::FuelBound& bound = loaded.translation.fuel.at(fn);
    FuelPlan plan{bound.is_constant, bound.value};
    ExecSetup setup = make_setup(f->params, tuple);

    c::ComputationState final_state;
    std::optional<c::Value> result;
    c::Fuel used = 0;
    auto outcome = run_with_fuel(
        plan, config.fuel_cap,
        [&](c::Fuel fuel) -> c::Outcome<std::monostate> {
            c::ComputationState st = setup.state;
            auto out = c::exec_fun(c::Ident{fn}, setup.args, st, env.value(),
                                   config.params, fuel);
            if (out.is_limit()) return c::Limit{};
            if (out.is_error()) return out.error();
            final_state = std::move(st);
            result = out.result();
            return std::monostate{};
        },
        used);

    std::string out;
    if (outcome.is_limit()) {
        out = "limit (fuel cap " + std::to_string(config.fuel_cap) +
              " exhausted)\n";
        return out;
    }
    if (outcome.is_error()) {
        out = "error: " + to_string(outcome.error()) + "\n";
        return out;
    }
    if (result)
        out = to_string(*result) + "\n";
    else
        out = "void\n";
    for (std::size_t i = 0; i < f->params.size(); ++i) {
        if (!f->params[i].type.is_array) continue;
        const ArrayValue& a = final_state.heap.at(setup.addresses[i]);
        out += f->params[i].name + " = " +
               ir::to_string(ir::make_ir_array(a)) + "\n";
    }
    return out;
}

}  // namespace ir2c::harness
