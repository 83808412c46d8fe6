// Command-line driver. Everything goes through the C interface in ir2c.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ir2c.h"

namespace {

struct SessionDeleter {
    void operator()(ir2c_session* s) const { ir2c_session_free(s); }
};
using Session = std::unique_ptr<ir2c_session, SessionDeleter>;

struct CommonOpts {
    std::string config_file;
    std::string sizes_file;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_file,
                    "configuration file (key = value lines)");
    cmd->add_option("--sizes", opts.sizes_file,
                    "type-size file (bits_* keys), applied after --config");
    auto add_override = [&opts, cmd](const std::string& key,
                                     const std::string& help) {
        cmd->add_option_function<std::string>(
            "--" + key,
            [&opts, key](const std::string& v) {
                opts.overrides.emplace_back(key, v);
            },
            help);
    };
    add_override("seed", "random seed for input generation");
    add_override("tests", "inputs per function");
    add_override("fuel-cap", "fuel ceiling for the doubling strategy");
    add_override("step-cap", "loop-iteration cap for the reference evaluator");
    add_override("max-array-len", "largest generated array length");
    add_override("indent", "indent width of the emitted C");
}

int exit_code_for(ir2c_status st) {
    switch (st) {
        case IR2C_OK: return 0;
        case IR2C_ERR_IO: return 2;
        case IR2C_ERR_CONFIG: return 2;
        case IR2C_ERR_DIVERGENCE: return 3;
        case IR2C_ERR_INCONCLUSIVE: return 4;
        default: return 1;
    }
}

int apply_config(ir2c_session* s, const CommonOpts& opts) {
    if (!opts.config_file.empty()) {
        ir2c_status st = ir2c_config_load_file(s, opts.config_file.c_str());
        if (st != IR2C_OK) {
            std::cerr << "config: " << ir2c_error(s) << "\n";
            return exit_code_for(st);
        }
    }
    if (!opts.sizes_file.empty()) {
        ir2c_status st = ir2c_config_load_file(s, opts.sizes_file.c_str());
        if (st != IR2C_OK) {
            std::cerr << "sizes: " << ir2c_error(s) << "\n";
            return exit_code_for(st);
        }
    }
    for (const auto& [key, value] : opts.overrides) {
        std::string k = key;
        for (char& c : k)
            if (c == '-') c = '_';
        ir2c_status st = ir2c_config_set(s, k.c_str(), value.c_str());
        if (st != IR2C_OK) {
            std::cerr << "--" << key << ": " << ir2c_error(s) << "\n";
            return exit_code_for(st);
        }
    }
    return 0;
}

int load(ir2c_session* s, const std::string& path) {
    ir2c_status st = ir2c_load_file(s, path.c_str());
    if (st != IR2C_OK) {
        std::cerr << path << ": " << ir2c_error(s) << "\n";
        return exit_code_for(st);
    }
    return 0;
}

int write_output(const std::string& path, const char* text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write '" << path << "'\n";
        return 2;
    }
    out << text;
    if (!out.flush()) {
        std::cerr << "write to '" << path << "' failed\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ir2c: generate C from a first-order functional IR and validate the "
        "translation by differential execution"};
    app.require_subcommand(1);

    std::string ir_path;
    std::string out_path;
    std::string run_fn;
    std::vector<std::string> run_args;

    CommonOpts gen_opts, check_opts, validate_opts, run_opts;

    CLI::App* gen = app.add_subcommand(
        "gen", "translate an IR file and write the .c output");
    gen->add_option("ir", ir_path, "IR source file")->required();
    gen->add_option("--out", out_path, "output .c path (default stdout)");
    add_common(gen, gen_opts);

    CLI::App* check = app.add_subcommand(
        "check", "parse, check the representation rules, and run the static "
                 "semantics");
    check->add_option("ir", ir_path, "IR source file")->required();
    add_common(check, check_opts);

    CLI::App* validate = app.add_subcommand(
        "validate", "differentially execute the translation against the IR");
    validate->add_option("ir", ir_path, "IR source file")->required();
    validate->add_option("--out", out_path, "report path (default stdout)");
    add_common(validate, validate_opts);

    CLI::App* run = app.add_subcommand(
        "run", "run one function under the defensive interpreter");
    run->add_option("ir", ir_path, "IR source file")->required();
    run->add_option("--fn", run_fn, "function name")->required();
    run->add_option("--args", run_args,
                    "typed arguments, e.g. int:3 uchar[]:1,2,3");
    add_common(run, run_opts);

    CLI11_PARSE(app, argc, argv);

    Session session(ir2c_session_new());
    ir2c_session* s = session.get();

    if (gen->parsed()) {
        if (int rc = apply_config(s, gen_opts)) return rc;
        if (int rc = load(s, ir_path)) return rc;
        if (int rc = write_output(out_path, ir2c_c_source(s))) return rc;
        std::cout << ir2c_fuel_table(s);
        return 0;
    }
    if (check->parsed()) {
        if (int rc = apply_config(s, check_opts)) return rc;
        if (int rc = load(s, ir_path)) return rc;
        std::cout << "wellformed\n";
        return 0;
    }
    if (validate->parsed()) {
        if (int rc = apply_config(s, validate_opts)) return rc;
        if (int rc = load(s, ir_path)) return rc;
        const char* report = nullptr;
        int verdict = 0;
        ir2c_status st = ir2c_validate(s, &report, &verdict);
        if (st != IR2C_OK) {
            std::cerr << "validate: " << ir2c_error(s) << "\n";
            return exit_code_for(st);
        }
        if (int rc = write_output(out_path, report)) return rc;
        return verdict;
    }
    if (run->parsed()) {
        if (int rc = apply_config(s, run_opts)) return rc;
        if (int rc = load(s, ir_path)) return rc;
        std::vector<const char*> argv_c;
        argv_c.reserve(run_args.size());
        for (const std::string& a : run_args) argv_c.push_back(a.c_str());
        const char* output = nullptr;
        ir2c_status st =
            ir2c_run(s, run_fn.c_str(), argv_c.data(), argv_c.size(), &output);
        if (st != IR2C_OK) {
            std::cerr << "run: " << ir2c_error(s) << "\n";
            return exit_code_for(st);
        }
        std::cout << output;
        return 0;
    }
    return 1;
}
