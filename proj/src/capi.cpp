#include "ir2c.h"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "ir2c/c_pretty.hpp"
#include "ir2c/harness.hpp"

using namespace ir2c;

struct ir2c_session {
    harness::Config config;
    std::optional<harness::Loaded> loaded;
    std::string program_id = "<string>";
    std::string error;
    // Storage for strings handed out through the C interface.
    std::string c_source;
    std::string fuel_table;
    std::string report;
    std::string run_output;
};

namespace {

ir2c_status fail(ir2c_session* s, ir2c_status code, std::string message) {
    s->error = std::move(message);
    return code;
}

ir2c_status stage_code(const std::string& stage) {
    if (stage == "parse") return IR2C_ERR_PARSE;
    if (stage == "check") return IR2C_ERR_CHECK;
    if (stage == "translate") return IR2C_ERR_TRANSLATE;
    if (stage == "io") return IR2C_ERR_IO;
    return IR2C_ERR_ARGS;
}

}  // namespace

extern "C" {

ir2c_session* ir2c_session_new(void) { return new ir2c_session(); }

void ir2c_session_free(ir2c_session* s) { delete s; }

const char* ir2c_error(const ir2c_session* s) {
    return s ? s->error.c_str() : "";
}

ir2c_status ir2c_config_set(ir2c_session* s, const char* key,
                            const char* value) {
    if (!s || !key || !value) return IR2C_ERR_ARGS;
    auto updated = harness::apply_config_text(
        std::string(key) + " = " + value, s->config);
    if (!updated) return fail(s, IR2C_ERR_CONFIG, updated.error());
    s->config = std::move(updated).value();
    s->error.clear();
    return IR2C_OK;
}

ir2c_status ir2c_config_load_file(ir2c_session* s, const char* path) {
    if (!s || !path) return IR2C_ERR_ARGS;
    std::ifstream in(path);
    if (!in) return fail(s, IR2C_ERR_IO, std::string("cannot open '") + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    auto updated = harness::apply_config_text(buf.str(), s->config);
    if (!updated) return fail(s, IR2C_ERR_CONFIG, updated.error());
    s->config = std::move(updated).value();
    s->error.clear();
    return IR2C_OK;
}

ir2c_status ir2c_load_string(ir2c_session* s, const char* text) {
    if (!s || !text) return IR2C_ERR_ARGS;
    auto loaded = harness::load_program(text, s->config.params);
    if (!loaded) {
        s->loaded.reset();
        return fail(s, stage_code(loaded.error().stage),
                    loaded.error().stage + ": " + loaded.error().message);
    }
    s->loaded = std::move(loaded).value();
    s->program_id = "<string>";
    s->error.clear();
    return IR2C_OK;
}

ir2c_status ir2c_load_file(ir2c_session* s, const char* path) {
    if (!s || !path) return IR2C_ERR_ARGS;
    std::ifstream in(path);
    if (!in) {
        s->loaded.reset();
        return fail(s, IR2C_ERR_IO, std::string("cannot open '") + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    ir2c_status st = ir2c_load_string(s, buf.str().c_str());
    if (st == IR2C_OK) s->program_id = path;
    return st;
}

const char* ir2c_c_source(ir2c_session* s) {
    if (!s || !s->loaded) return nullptr;
    c::PrintOptions opts;
    opts.indent = s->config.indent;
    opts.params = s->config.params;
    s->c_source = c::print_transunit(s->loaded->translation.tu, opts);
    return s->c_source.c_str();
}

const char* ir2c_fuel_table(ir2c_session* s) {
    if (!s || !s->loaded) return nullptr;
    s->fuel_table = s->loaded->translation.fuel_table();
    return s->fuel_table.c_str();
}

ir2c_status ir2c_validate(ir2c_session* s, const char** report_json,
                          int* exit_code) {
    if (!s) return IR2C_ERR_ARGS;
    if (!s->loaded) return fail(s, IR2C_ERR_STATE, "no program loaded");
    harness::Report report = harness::validate_program(
        s->loaded->program, s->loaded->translation, s->config, s->program_id);
    s->report = report.to_json();
    if (report_json) *report_json = s->report.c_str();
    if (exit_code) *exit_code = report.exit_code();
    s->error.clear();
    return IR2C_OK;
}

ir2c_status ir2c_run(ir2c_session* s, const char* fn, const char* const* args,
                     size_t nargs, const char** output) {
    if (!s || !fn) return IR2C_ERR_ARGS;
    if (!s->loaded) return fail(s, IR2C_ERR_STATE, "no program loaded");
    std::vector<std::string> argv;
    for (size_t i = 0; i < nargs; ++i) argv.emplace_back(args[i]);
    auto out = harness::run_function(*s->loaded, fn, argv, s->config);
    if (!out)
        return fail(s, stage_code(out.error().stage), out.error().message);
    s->run_output = std::move(out).value();
    if (output) *output = s->run_output.c_str();
    s->error.clear();
    return IR2C_OK;
}

}  // extern "C"
