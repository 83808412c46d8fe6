#include "ir2c/ir.hpp"

namespace ir2c::ir {

namespace {

std::string quote(const std::string& name) { return "|" + name + "|"; }

void print_term(const Term& t, std::string& out);

void print_list(const std::string& head, std::initializer_list<const Term*> args,
                std::string& out) {
    out += "(" + head;
    for (const Term* a : args) {
        out += " ";
        print_term(*a, out);
    }
    out += ")";
}

void print_term(const Term& t, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Term::Var>) {
                out += quote(n.name);
            } else if constexpr (std::is_same_v<T, Term::Const>) {
                out += "(" + type_tag(n.type) + "-dec-const " +
                       int128_to_string(n.value) + ")";
            } else if constexpr (std::is_same_v<T, Term::Unop>) {
                print_list(unary_op_name(n.op) + "-" + type_tag(n.operand_type),
                           {n.arg.get()}, out);
            } else if constexpr (std::is_same_v<T, Term::Binop>) {
                print_list(binary_op_name(n.op) + "-" + type_tag(n.lhs_type) +
                               "-" + type_tag(n.rhs_type),
                           {n.lhs.get(), n.rhs.get()}, out);
            } else if constexpr (std::is_same_v<T, Term::Convert>) {
                print_list(type_tag(n.to) + "-from-" + type_tag(n.from),
                           {n.arg.get()}, out);
            } else if constexpr (std::is_same_v<T, Term::BoolFrom>) {
                print_list("boolean-from-" + type_tag(n.from), {n.arg.get()},
                           out);
            } else if constexpr (std::is_same_v<T, Term::IntFromBool>) {
                print_list(type_tag(n.to) + "-from-boolean", {n.arg.get()},
                           out);
            } else if constexpr (std::is_same_v<T, Term::And>) {
                print_list("and", {n.lhs.get(), n.rhs.get()}, out);
            } else if constexpr (std::is_same_v<T, Term::Or>) {
                print_list("or", {n.lhs.get(), n.rhs.get()}, out);
            } else if constexpr (std::is_same_v<T, Term::If>) {
                print_list("if",
                           {n.test.get(), n.then_branch.get(),
                            n.else_branch.get()},
                           out);
            } else if constexpr (std::is_same_v<T, Term::CondExpr>) {
                out += "(condexpr ";
                print_list("if",
                           {n.test.get(), n.then_branch.get(),
                            n.else_branch.get()},
                           out);
                out += ")";
            } else if constexpr (std::is_same_v<T, Term::ArrayRead>) {
                out += "(" + type_tag(n.elem_type) + "-array-read-" +
                       type_tag(n.index_type) + " " + quote(n.array) + " ";
                print_term(*n.index, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, Term::ArrayWrite>) {
                out += "(" + type_tag(n.elem_type) + "-array-write-" +
                       type_tag(n.index_type) + " " + quote(n.array) + " ";
                print_term(*n.index, out);
                out += " ";
                print_term(*n.value, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, Term::IndexOkp>) {
                out += "(" + type_tag(n.elem_type) + "-array-" +
                       type_tag(n.index_type) + "-index-okp " + quote(n.array) +
                       " ";
                print_term(*n.index, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, Term::LetDeclar>) {
                out += "(let ((" + quote(n.var) + " (declar ";
                print_term(*n.rhs, out);
                out += "))) ";
                print_term(*n.body, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, Term::LetAssign>) {
                out += "(let ((" + quote(n.var) + " (assign ";
                print_term(*n.rhs, out);
                out += "))) ";
                print_term(*n.body, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, Term::LetWrite>) {
                out += "(let ((" + quote(n.var) + " ";
                print_term(*n.write, out);
                out += ")) ";
                print_term(*n.body, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, Term::LetStmt>) {
                if (n.vars.size() == 1) {
                    out += "(let ((" + quote(n.vars[0]) + " ";
                    print_term(*n.rhs, out);
                    out += ")) ";
                    print_term(*n.body, out);
                    out += ")";
                } else {
                    out += "(mv-let (";
                    for (std::size_t i = 0; i < n.vars.size(); ++i) {
                        if (i) out += " ";
                        out += quote(n.vars[i]);
                    }
                    out += ") ";
                    print_term(*n.rhs, out);
                    out += " ";
                    print_term(*n.body, out);
                    out += ")";
                }
            } else if constexpr (std::is_same_v<T, Term::Call>) {
                out += "(" + quote(n.fn);
                for (const TermPtr& a : n.args) {
                    out += " ";
                    print_term(*a, out);
                }
                out += ")";
            } else {
                static_assert(std::is_same_v<T, Term::Mv>);
                out += "(mv";
                if (n.result) {
                    out += " (retval ";
                    print_term(**n.result, out);
                    out += ")";
                }
                for (const std::string& v : n.vars) out += " " + quote(v);
                out += ")";
            }
        },
        t.node);
}

}  // namespace

std::string print_ir(const IrProgram& p) {
    std::string out;
    for (const IrFunction& fn : p.functions) {
        out += "(defun " + quote(fn.name) + " (";
        for (std::size_t i = 0; i < fn.params.size(); ++i) {
            if (i) out += " ";
            out += quote(fn.params[i].name);
        }
        out += ")\n  (declare (xargs :guard ";
        std::size_t conjuncts = fn.params.size() + fn.extra_guards.size();
        if (conjuncts != 1) out += "(and";
        for (const IrParam& prm : fn.params) {
            std::string pred = prm.type.is_array
                                   ? type_tag(prm.type.type) + "-arrayp"
                                   : type_tag(prm.type.type) + "p";
            out += (conjuncts != 1 ? " " : "") + std::string("(") + pred + " " +
                   quote(prm.name) + ")";
        }
        for (const TermPtr& g : fn.extra_guards) {
            if (conjuncts != 1) out += " ";
            print_term(*g, out);
        }
        if (conjuncts != 1) out += ")";
        out += "))\n  ";
        print_term(*fn.body, out);
        out += ")\n\n";
    }
    return out;
}

}  // namespace ir2c::ir
