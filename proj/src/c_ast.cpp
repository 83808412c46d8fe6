#include "ir2c/c_ast.hpp"

#include <set>

namespace ir2c::c {

bool is_c_keyword(const std::string& s) {
    static const std::set<std::string> keywords = {
        "auto", "break", "case", "char", "const", "continue", "default",
        "do", "double", "else", "enum", "extern", "float", "for", "goto",
        "if", "inline", "int", "long", "register", "restrict", "return",
        "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
        "union", "unsigned", "void", "volatile", "while", "_Alignas",
        "_Alignof", "_Atomic", "_Bool", "_Complex", "_Generic", "_Imaginary",
        "_Noreturn", "_Static_assert", "_Thread_local",
    };
    return keywords.count(s) != 0;
}

bool is_valid_identifier(const std::string& s) {
    if (s.empty() || is_c_keyword(s)) return false;
    auto alpha = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s[0])) return false;
    for (char c : s)
        if (!alpha(c) && !digit(c)) return false;
    return true;
}

std::string to_string(const CType& t) {
    switch (t.kind) {
        case CType::Kind::Integer: return c_type_name(t.base);
        case CType::Kind::Pointer: return c_type_name(t.base) + " *";
        case CType::Kind::Void: return "void";
    }
    return "";
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&b](const auto& an) -> bool {
            using T = std::decay_t<decltype(an)>;
            const auto& bn = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Expr::Const>) {
                return an.type == bn.type && an.value == bn.value;
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                return an.name == bn.name;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                return an.op == bn.op && *an.arg == *bn.arg;
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                return an.op == bn.op && *an.lhs == *bn.lhs && *an.rhs == *bn.rhs;
            } else if constexpr (std::is_same_v<T, Expr::Cond>) {
                return *an.test == *bn.test && *an.then_branch == *bn.then_branch &&
                       *an.else_branch == *bn.else_branch;
            } else if constexpr (std::is_same_v<T, Expr::Cast>) {
                return an.target == bn.target && *an.arg == *bn.arg;
            } else if constexpr (std::is_same_v<T, Expr::Index>) {
                return an.array == bn.array && *an.index == *bn.index;
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                if (an.fn != bn.fn || an.args.size() != bn.args.size())
                    return false;
                for (std::size_t i = 0; i < an.args.size(); ++i)
                    if (!(*an.args[i] == *bn.args[i])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, Expr::LogAnd>) {
                return *an.lhs == *bn.lhs && *an.rhs == *bn.rhs;
            } else {
                static_assert(std::is_same_v<T, Expr::LogOr>);
                return *an.lhs == *bn.lhs && *an.rhs == *bn.rhs;
            }
        },
        a.node);
}

ExprPtr make_const(CIntType type, Int128 value) {
    return std::make_shared<Expr>(Expr{Expr::Const{type, value}});
}
ExprPtr make_var(std::string name) {
    return std::make_shared<Expr>(Expr{Expr::Var{Ident{std::move(name)}}});
}
ExprPtr make_unary(UnaryOp op, ExprPtr arg) {
    return std::make_shared<Expr>(Expr{Expr::Unary{op, std::move(arg)}});
}
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<Expr>(
        Expr{Expr::Binary{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr make_cond(ExprPtr test, ExprPtr then_branch, ExprPtr else_branch) {
    return std::make_shared<Expr>(Expr{Expr::Cond{
        std::move(test), std::move(then_branch), std::move(else_branch)}});
}
ExprPtr make_cast(CIntType target, ExprPtr arg) {
    return std::make_shared<Expr>(Expr{Expr::Cast{target, std::move(arg)}});
}
ExprPtr make_index(std::string array, ExprPtr index) {
    return std::make_shared<Expr>(
        Expr{Expr::Index{Ident{std::move(array)}, std::move(index)}});
}
ExprPtr make_call(std::string fn, std::vector<ExprPtr> args) {
    return std::make_shared<Expr>(
        Expr{Expr::Call{Ident{std::move(fn)}, std::move(args)}});
}
ExprPtr make_logand(ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<Expr>(
        Expr{Expr::LogAnd{std::move(lhs), std::move(rhs)}});
}
ExprPtr make_logor(ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<Expr>(
        Expr{Expr::LogOr{std::move(lhs), std::move(rhs)}});
}

bool is_pure(const Expr& e) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const> ||
                          std::is_same_v<T, Expr::Var>) {
                return true;
            } else if constexpr (std::is_same_v<T, Expr::Unary> ||
                                 std::is_same_v<T, Expr::Cast>) {
                return is_pure(*n.arg);
            } else if constexpr (std::is_same_v<T, Expr::Binary> ||
                                 std::is_same_v<T, Expr::LogAnd> ||
                                 std::is_same_v<T, Expr::LogOr>) {
                return is_pure(*n.lhs) && is_pure(*n.rhs);
            } else if constexpr (std::is_same_v<T, Expr::Cond>) {
                return is_pure(*n.test) && is_pure(*n.then_branch) &&
                       is_pure(*n.else_branch);
            } else if constexpr (std::is_same_v<T, Expr::Index>) {
                return is_pure(*n.index);
            } else {
                static_assert(std::is_same_v<T, Expr::Call>);
                return false;
            }
        },
        e.node);
}

bool operator==(const Block& a, const Block& b) {
    if (a.stmts.size() != b.stmts.size()) return false;
    for (std::size_t i = 0; i < a.stmts.size(); ++i)
        if (!(a.stmts[i] == b.stmts[i])) return false;
    return true;
}

namespace {
bool opt_expr_eq(const std::optional<ExprPtr>& a, const std::optional<ExprPtr>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a.has_value() || **a == **b;
}
}  // namespace

bool operator==(const Stmt& a, const Stmt& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&b](const auto& an) -> bool {
            using T = std::decay_t<decltype(an)>;
            const auto& bn = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Stmt::Declare>) {
                return an.type == bn.type && an.name == bn.name &&
                       *an.init == *bn.init;
            } else if constexpr (std::is_same_v<T, Stmt::Assign>) {
                return an.name == bn.name && *an.rhs == *bn.rhs;
            } else if constexpr (std::is_same_v<T, Stmt::AssignIndex>) {
                return an.array == bn.array && *an.index == *bn.index &&
                       *an.rhs == *bn.rhs;
            } else if constexpr (std::is_same_v<T, Stmt::If>) {
                return *an.test == *bn.test && an.then_block == bn.then_block;
            } else if constexpr (std::is_same_v<T, Stmt::IfElse>) {
                return *an.test == *bn.test && an.then_block == bn.then_block &&
                       an.else_block == bn.else_block;
            } else if constexpr (std::is_same_v<T, Stmt::While>) {
                return *an.test == *bn.test && an.body == bn.body;
            } else if constexpr (std::is_same_v<T, Stmt::Return>) {
                return opt_expr_eq(an.value, bn.value);
            } else {
                static_assert(std::is_same_v<T, Stmt::ExprStmt>);
                return *an.call == *bn.call;
            }
        },
        a.node);
}

// ---------------------------------------------------------------------------
// syntax_check
// ---------------------------------------------------------------------------

namespace {

struct Checker {
    const ImplParams& params;
    std::optional<SyntaxError> error;

    bool fail(std::string message, std::string location) {
        if (!error) error = SyntaxError{std::move(message), std::move(location)};
        return false;
    }

    bool check_ident(const Ident& id, const std::string& loc) {
        if (!is_valid_identifier(id.name))
            return fail("invalid C identifier '" + id.name + "'", loc);
        return true;
    }

    bool check_const(const Expr::Const& c, const std::string& loc) {
        if (c.type.rank < Rank::Int)
            return fail("constant of sub-int type " + c_type_name(c.type), loc);
        if (c.value < 0)
            return fail("negative constant " + int128_to_string(c.value), loc);
        if (!fits(c.type, c.value, params))
            return fail("constant " + int128_to_string(c.value) +
                            " out of range for " + c_type_name(c.type),
                        loc);
        return true;
    }

    // allow_call: a top-level call is permitted here (with pure arguments).
    bool check_expr(const Expr& e, const std::string& loc, bool allow_call) {
        return std::visit(
            [&](const auto& n) -> bool {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Expr::Const>) {
                    return check_const(n, loc);
                } else if constexpr (std::is_same_v<T, Expr::Var>) {
                    return check_ident(n.name, loc);
                } else if constexpr (std::is_same_v<T, Expr::Unary> ||
                                     std::is_same_v<T, Expr::Cast>) {
                    return check_expr(*n.arg, loc, false);
                } else if constexpr (std::is_same_v<T, Expr::Binary> ||
                                     std::is_same_v<T, Expr::LogAnd> ||
                                     std::is_same_v<T, Expr::LogOr>) {
                    return check_expr(*n.lhs, loc, false) &&
                           check_expr(*n.rhs, loc, false);
                } else if constexpr (std::is_same_v<T, Expr::Cond>) {
                    return check_expr(*n.test, loc, false) &&
                           check_expr(*n.then_branch, loc, false) &&
                           check_expr(*n.else_branch, loc, false);
                } else if constexpr (std::is_same_v<T, Expr::Index>) {
                    return check_ident(n.array, loc) &&
                           check_expr(*n.index, loc, false);
                } else {
                    static_assert(std::is_same_v<T, Expr::Call>);
                    if (!allow_call)
                        return fail("call to '" + n.fn.name +
                                        "' in a nested expression position",
                                    loc);
                    if (!check_ident(n.fn, loc)) return false;
                    for (const ExprPtr& a : n.args)
                        if (!check_expr(*a, loc, false)) return false;
                    return true;
                }
            },
            e.node);
    }

    bool check_block(const Block& b, const std::string& loc);

    bool check_stmt(const Stmt& s, const std::string& loc) {
        return std::visit(
            [&](const auto& n) -> bool {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Stmt::Declare>) {
                    return check_ident(n.name, loc) &&
                           check_expr(*n.init, loc, true);
                } else if constexpr (std::is_same_v<T, Stmt::Assign>) {
                    return check_ident(n.name, loc) &&
                           check_expr(*n.rhs, loc, true);
                } else if constexpr (std::is_same_v<T, Stmt::AssignIndex>) {
                    return check_ident(n.array, loc) &&
                           check_expr(*n.index, loc, false) &&
                           check_expr(*n.rhs, loc, true);
                } else if constexpr (std::is_same_v<T, Stmt::If>) {
                    return check_expr(*n.test, loc, false) &&
                           check_block(n.then_block, loc);
                } else if constexpr (std::is_same_v<T, Stmt::IfElse>) {
                    return check_expr(*n.test, loc, false) &&
                           check_block(n.then_block, loc) &&
                           check_block(n.else_block, loc);
                } else if constexpr (std::is_same_v<T, Stmt::While>) {
                    return check_expr(*n.test, loc, false) &&
                           check_block(n.body, loc);
                } else if constexpr (std::is_same_v<T, Stmt::Return>) {
                    return !n.value || check_expr(**n.value, loc, true);
                } else {
                    static_assert(std::is_same_v<T, Stmt::ExprStmt>);
                    if (!std::holds_alternative<Expr::Call>(n.call->node))
                        return fail("expression statement must be a call", loc);
                    return check_expr(*n.call, loc, true);
                }
            },
            s.node);
    }
};

bool Checker::check_block(const Block& b, const std::string& loc) {
    for (const Stmt& s : b.stmts)
        if (!check_stmt(s, loc)) return false;
    return true;
}

}  // namespace

std::optional<SyntaxError> syntax_check(const TransUnit& tu,
                                        const ImplParams& params) {
    Checker ck{params, std::nullopt};
    std::set<std::string> fnames;
    for (const FunDef& f : tu.fundefs) {
        std::string loc = "function " + f.name.name;
        if (!ck.check_ident(f.name, loc)) return ck.error;
        if (!fnames.insert(f.name.name).second) {
            ck.fail("duplicate function name '" + f.name.name + "'", loc);
            return ck.error;
        }
        std::set<std::string> pnames;
        for (const auto& [pname, ptype] : f.params) {
            if (!ck.check_ident(pname, loc + ", parameter " + pname.name))
                return ck.error;
            if (ptype.is_void()) {
                ck.fail("void parameter '" + pname.name + "'", loc);
                return ck.error;
            }
            if (!pnames.insert(pname.name).second) {
                ck.fail("duplicate parameter name '" + pname.name + "'", loc);
                return ck.error;
            }
        }
        if (!ck.check_block(f.body, loc)) return ck.error;
    }
    return ck.error;
}

}  // namespace ir2c::c
