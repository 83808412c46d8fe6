#include "ir2c/c_pretty.hpp"

#include <cassert>
#include <cctype>
#include <set>

namespace ir2c::c {

namespace {

int binary_level(BinaryOp op) {
    switch (op) {
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Rem: return 12;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 11;
        case BinaryOp::Shl:
        case BinaryOp::Shr: return 10;
        case BinaryOp::Lt:
        case BinaryOp::Gt:
        case BinaryOp::Le:
        case BinaryOp::Ge: return 9;
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 8;
        case BinaryOp::BitAnd: return 7;
        case BinaryOp::BitXor: return 6;
        case BinaryOp::BitOr: return 5;
    }
    return 0;
}

std::string const_suffix(CIntType t) {
    if (t == ty::sint) return "";
    if (t == ty::uint) return "U";
    if (t == ty::slong) return "L";
    if (t == ty::ulong) return "UL";
    if (t == ty::sllong) return "LL";
    return "ULL";
}

}  // namespace

Precedence precedence(const Expr& e) {
    return std::visit(
        [](const auto& n) -> Precedence {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const> ||
                          std::is_same_v<T, Expr::Var>) {
                return {16, Assoc::None};
            } else if constexpr (std::is_same_v<T, Expr::Index> ||
                                 std::is_same_v<T, Expr::Call>) {
                return {15, Assoc::Left};
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                return {14, Assoc::Right};
            } else if constexpr (std::is_same_v<T, Expr::Cast>) {
                return {13, Assoc::Right};
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                return {binary_level(n.op), Assoc::Left};
            } else if constexpr (std::is_same_v<T, Expr::LogAnd>) {
                return {4, Assoc::Left};
            } else if constexpr (std::is_same_v<T, Expr::LogOr>) {
                return {3, Assoc::Left};
            } else {
                static_assert(std::is_same_v<T, Expr::Cond>);
                return {2, Assoc::Right};
            }
        },
        e.node);
}

namespace {

// min_level: the loosest precedence the grammar admits in this position;
// anything looser gets parenthesized.
void print_into(const Expr& e, int min_level, std::string& out) {
    bool paren = precedence(e).level < min_level;
    if (paren) out += '(';
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const>) {
                out += int128_to_string(n.value);
                out += const_suffix(n.type);
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                out += n.name.name;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                out += unary_op_token(n.op);
                // Parenthesize -(-x) and +(+x); without this the tokens would
                // fuse into -- or ++.
                bool fuse = false;
                if (const auto* u = std::get_if<Expr::Unary>(&n.arg->node))
                    fuse = (n.op == UnaryOp::Minus && u->op == UnaryOp::Minus) ||
                           (n.op == UnaryOp::Plus && u->op == UnaryOp::Plus);
                if (fuse) {
                    out += '(';
                    print_into(*n.arg, 0, out);
                    out += ')';
                } else {
                    print_into(*n.arg, 13, out);
                }
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                int level = binary_level(n.op);
                print_into(*n.lhs, level, out);
                out += ' ';
                out += binary_op_token(n.op);
                out += ' ';
                print_into(*n.rhs, level + 1, out);
            } else if constexpr (std::is_same_v<T, Expr::Cond>) {
                print_into(*n.test, 3, out);
                out += " ? ";
                print_into(*n.then_branch, 2, out);
                out += " : ";
                print_into(*n.else_branch, 2, out);
            } else if constexpr (std::is_same_v<T, Expr::Cast>) {
                out += '(';
                out += c_type_name(n.target);
                out += ") ";
                print_into(*n.arg, 13, out);
            } else if constexpr (std::is_same_v<T, Expr::Index>) {
                out += n.array.name;
                out += '[';
                print_into(*n.index, 0, out);
                out += ']';
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                out += n.fn.name;
                out += '(';
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i > 0) out += ", ";
                    print_into(*n.args[i], 2, out);
                }
                out += ')';
            } else if constexpr (std::is_same_v<T, Expr::LogAnd>) {
                print_into(*n.lhs, 4, out);
                out += " && ";
                print_into(*n.rhs, 5, out);
            } else {
                static_assert(std::is_same_v<T, Expr::LogOr>);
                print_into(*n.lhs, 3, out);
                out += " || ";
                print_into(*n.rhs, 4, out);
            }
        },
        e.node);
    if (paren) out += ')';
}

void print_block(const Block& b, int level, const PrintOptions& opts,
                 std::string& out);

void print_stmt_into(const Stmt& s, int level, const PrintOptions& opts,
                     std::string& out) {
    std::string pad(static_cast<std::size_t>(level) *
                        static_cast<std::size_t>(opts.indent),
                    ' ');
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Stmt::Declare>) {
                out += pad + c_type_name(n.type) + " " + n.name.name + " = ";
                print_into(*n.init, 0, out);
                out += ";\n";
            } else if constexpr (std::is_same_v<T, Stmt::Assign>) {
                out += pad + n.name.name + " = ";
                print_into(*n.rhs, 0, out);
                out += ";\n";
            } else if constexpr (std::is_same_v<T, Stmt::AssignIndex>) {
                out += pad + n.array.name + "[";
                print_into(*n.index, 0, out);
                out += "] = ";
                print_into(*n.rhs, 0, out);
                out += ";\n";
            } else if constexpr (std::is_same_v<T, Stmt::If>) {
                out += pad + "if (";
                print_into(*n.test, 0, out);
                out += ") {\n";
                print_block(n.then_block, level + 1, opts, out);
                out += pad + "}\n";
            } else if constexpr (std::is_same_v<T, Stmt::IfElse>) {
                out += pad + "if (";
                print_into(*n.test, 0, out);
                out += ") {\n";
                print_block(n.then_block, level + 1, opts, out);
                out += pad + "} else {\n";
                print_block(n.else_block, level + 1, opts, out);
                out += pad + "}\n";
            } else if constexpr (std::is_same_v<T, Stmt::While>) {
                out += pad + "while (";
                print_into(*n.test, 0, out);
                out += ") {\n";
                print_block(n.body, level + 1, opts, out);
                out += pad + "}\n";
            } else if constexpr (std::is_same_v<T, Stmt::Return>) {
                if (n.value) {
                    out += pad + "return ";
                    print_into(**n.value, 0, out);
                    out += ";\n";
                } else {
                    out += pad + "return;\n";
                }
            } else {
                static_assert(std::is_same_v<T, Stmt::ExprStmt>);
                out += pad;
                print_into(*n.call, 0, out);
                out += ";\n";
            }
        },
        s.node);
}

void print_block(const Block& b, int level, const PrintOptions& opts,
                 std::string& out) {
    for (const Stmt& s : b.stmts) print_stmt_into(s, level, opts, out);
}

std::string param_text(const std::pair<Ident, CType>& p) {
    const auto& [name, type] = p;
    if (type.is_pointer()) return c_type_name(type.base) + " *" + name.name;
    return to_string(type) + " " + name.name;
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::string out;
    print_into(e, 0, out);
    return out;
}

std::string print_stmt(const Stmt& s, int indent_level, const PrintOptions& opts) {
    std::string out;
    print_stmt_into(s, indent_level, opts, out);
    return out;
}

std::string print_transunit(const TransUnit& tu, const PrintOptions& opts) {
    if (tu.fundefs.empty()) return "\n";
    std::string out;
    bool first = true;
    for (const FunDef& f : tu.fundefs) {
        if (!first) out += "\n";
        first = false;
        out += to_string(f.return_type) + " " + f.name.name + "(";
        for (std::size_t i = 0; i < f.params.size(); ++i) {
            if (i > 0) out += ", ";
            out += param_text(f.params[i]);
        }
        if (f.params.empty()) out += "void";
        out += ") {\n";
        print_block(f.body, 1, opts, out);
        out += "}\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expression parsing
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End } kind;
    std::string text;    // identifier name, digits, or punctuation
    std::string suffix;  // number suffix, normalized to lower case
    std::size_t offset;
};

class Lexer {
public:
    Lexer(const std::string& text) : text_(text) {}

    Result<std::vector<Token>, ParseError> run() {
        std::vector<Token> out;
        while (true) {
            while (pos_ < text_.size() && std::isspace(
                       static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ >= text_.size()) break;
            std::size_t start = pos_;
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string digits;
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    digits.push_back(text_[pos_++]);
                std::string suffix;
                while (pos_ < text_.size() &&
                       std::isalpha(static_cast<unsigned char>(text_[pos_])))
                    suffix.push_back(static_cast<char>(std::tolower(
                        static_cast<unsigned char>(text_[pos_++]))));
                out.push_back({Token::Kind::Number, digits, suffix, start});
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string name;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                        text_[pos_] == '_'))
                    name.push_back(text_[pos_++]);
                out.push_back({Token::Kind::Ident, name, "", start});
            } else {
                static const char* two_char[] = {"<<", ">>", "<=", ">=", "==",
                                                 "!=", "&&", "||", "--", "++"};
                std::string punct(1, c);
                if (pos_ + 1 < text_.size()) {
                    std::string pair = text_.substr(pos_, 2);
                    for (const char* t : two_char)
                        if (pair == t) {
                            punct = pair;
                            break;
                        }
                }
                static const std::string singles = "+-*/%~!&|^<>()[]?:,=";
                if (punct.size() == 1 && singles.find(c) == std::string::npos)
                    return ParseError{std::string("unexpected character '") +
                                          c + "'",
                                      start};
                pos_ += punct.size();
                out.push_back({Token::Kind::Punct, punct, "", start});
            }
        }
        out.push_back({Token::Kind::End, "", "", text_.size()});
        return out;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
};

const std::set<std::string>& type_keywords() {
    static const std::set<std::string> kws = {"signed", "unsigned", "char",
                                              "short", "int", "long"};
    return kws;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, const ImplParams& params)
        : tokens_(std::move(tokens)), params_(params) {}

    Result<ExprPtr, ParseError> run() {
        auto e = parse_cond();
        if (!e) return e;
        if (!at_end())
            return err("trailing input after expression");
        return e;
    }

private:
    using R = Result<ExprPtr, ParseError>;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    bool is_punct(const std::string& p, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Token::Kind::Punct && t.text == p;
    }
    void advance() { ++pos_; }
    ParseError err(std::string message) const {
        return ParseError{std::move(message), peek().offset};
    }

    R parse_cond() {
        auto test = parse_logor();
        if (!test) return test;
        if (!is_punct("?")) return test;
        advance();
        auto then_branch = parse_cond();
        if (!then_branch) return then_branch;
        if (!is_punct(":")) return err("expected ':' in conditional");
        advance();
        auto else_branch = parse_cond();
        if (!else_branch) return else_branch;
        return make_cond(std::move(test).value(), std::move(then_branch).value(),
                         std::move(else_branch).value());
    }

    R parse_logor() {
        auto lhs = parse_logand();
        if (!lhs) return lhs;
        ExprPtr acc = std::move(lhs).value();
        while (is_punct("||")) {
            advance();
            auto rhs = parse_logand();
            if (!rhs) return rhs;
            acc = make_logor(std::move(acc), std::move(rhs).value());
        }
        return acc;
    }

    R parse_logand() {
        auto lhs = parse_binary_level(5);
        if (!lhs) return lhs;
        ExprPtr acc = std::move(lhs).value();
        while (is_punct("&&")) {
            advance();
            auto rhs = parse_binary_level(5);
            if (!rhs) return rhs;
            acc = make_logand(std::move(acc), std::move(rhs).value());
        }
        return acc;
    }

    // Levels 5..12 are the left-associative binary operators.
    R parse_binary_level(int level) {
        if (level > 12) return parse_cast_expr();
        auto lhs = parse_binary_level(level + 1);
        if (!lhs) return lhs;
        ExprPtr acc = std::move(lhs).value();
        while (true) {
            std::optional<BinaryOp> op = match_binary_op(level);
            if (!op) break;
            advance();
            auto rhs = parse_binary_level(level + 1);
            if (!rhs) return rhs;
            acc = make_binary(*op, std::move(acc), std::move(rhs).value());
        }
        return acc;
    }

    std::optional<BinaryOp> match_binary_op(int level) const {
        const Token& t = peek();
        if (t.kind != Token::Kind::Punct) return std::nullopt;
        for (BinaryOp op : all_binary_ops()) {
            if (binary_level(op) == level && binary_op_token(op) == t.text)
                return op;
        }
        return std::nullopt;
    }

    bool at_cast() const {
        return is_punct("(") && peek(1).kind == Token::Kind::Ident &&
               type_keywords().count(peek(1).text) != 0;
    }

    R parse_cast_expr() {
        if (at_cast()) {
            advance();  // '('
            auto t = parse_type_name();
            if (!t) return std::move(t).error();
            if (!is_punct(")")) return err("expected ')' after type name");
            advance();
            auto arg = parse_cast_expr();
            if (!arg) return arg;
            return make_cast(std::move(t).value(), std::move(arg).value());
        }
        return parse_unary();
    }

    Result<CIntType, ParseError> parse_type_name() {
        std::vector<std::string> words;
        while (peek().kind == Token::Kind::Ident &&
               type_keywords().count(peek().text) != 0) {
            words.push_back(peek().text);
            advance();
        }
        bool saw_signed = false, saw_unsigned = false;
        bool saw_char = false, saw_short = false, saw_int = false;
        int longs = 0;
        for (const std::string& w : words) {
            if (w == "signed") saw_signed = true;
            else if (w == "unsigned") saw_unsigned = true;
            else if (w == "char") saw_char = true;
            else if (w == "short") saw_short = true;
            else if (w == "int") saw_int = true;
            else if (w == "long") ++longs;
        }
        if (words.empty() || (saw_signed && saw_unsigned) || longs > 2 ||
            (saw_char && (saw_short || saw_int || longs > 0)) ||
            (saw_short && longs > 0))
            return err("invalid type name");
        Sign sign = saw_unsigned ? Sign::Unsigned : Sign::Signed;
        if (saw_char) {
            if (!saw_signed && !saw_unsigned)
                return err("plain char is not supported");
            return CIntType{sign, Rank::Char};
        }
        if (saw_short) return CIntType{sign, Rank::Short};
        if (longs == 2) return CIntType{sign, Rank::LongLong};
        if (longs == 1) return CIntType{sign, Rank::Long};
        if (saw_int || saw_signed || saw_unsigned)
            return CIntType{sign, Rank::Int};
        return err("invalid type name");
    }

    R parse_unary() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Punct) {
            for (UnaryOp op : all_unary_ops()) {
                if (unary_op_token(op) == t.text) {
                    advance();
                    auto arg = parse_cast_expr();
                    if (!arg) return arg;
                    return make_unary(op, std::move(arg).value());
                }
            }
            if (t.text == "--" || t.text == "++")
                return err("'" + t.text + "' is not supported");
        }
        return parse_postfix();
    }

    R parse_postfix() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Number) {
            advance();
            return parse_constant(t);
        }
        if (t.kind == Token::Kind::Ident) {
            if (is_c_keyword(t.text)) return err("unexpected keyword '" + t.text + "'");
            advance();
            if (is_punct("(")) {
                advance();
                std::vector<ExprPtr> args;
                if (!is_punct(")")) {
                    while (true) {
                        auto a = parse_cond();
                        if (!a) return a;
                        args.push_back(std::move(a).value());
                        if (is_punct(",")) {
                            advance();
                            continue;
                        }
                        break;
                    }
                }
                if (!is_punct(")")) return err("expected ')' in call");
                advance();
                return make_call(t.text, std::move(args));
            }
            if (is_punct("[")) {
                advance();
                auto idx = parse_cond();
                if (!idx) return idx;
                if (!is_punct("]")) return err("expected ']' in subscript");
                advance();
                return make_index(t.text, std::move(idx).value());
            }
            return make_var(t.text);
        }
        if (is_punct("(")) {
            advance();
            auto e = parse_cond();
            if (!e) return e;
            if (!is_punct(")")) return err("expected ')'");
            advance();
            return e;
        }
        return err("expected expression");
    }

    R parse_constant(const Token& t) {
        Int128 value = 0;
        if (!int128_from_string(t.text, value))
            return ParseError{"integer constant too large", t.offset};
        bool uns = false;
        int longs = 0;
        std::string s = t.suffix;
        // Accept u/l in either order: u, l, ul, lu, ll, ull, llu.
        std::size_t i = 0;
        if (i < s.size() && s[i] == 'u') { uns = true; ++i; }
        while (i < s.size() && s[i] == 'l' && longs < 2) { ++longs; ++i; }
        if (i < s.size() && s[i] == 'u' && !uns) { uns = true; ++i; }
        if (i != s.size())
            return ParseError{"invalid constant suffix '" + t.suffix + "'",
                              t.offset};
        std::vector<CIntType> candidates;
        Sign sign = uns ? Sign::Unsigned : Sign::Signed;
        if (longs == 0) candidates = {CIntType{sign, Rank::Int},
                                      CIntType{sign, Rank::Long},
                                      CIntType{sign, Rank::LongLong}};
        else if (longs == 1) candidates = {CIntType{sign, Rank::Long},
                                           CIntType{sign, Rank::LongLong}};
        else candidates = {CIntType{sign, Rank::LongLong}};
        for (CIntType c : candidates)
            if (value <= type_max(c, params_)) return make_const(c, value);
        return ParseError{"constant does not fit any candidate type", t.offset};
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const ImplParams& params_;
};

}  // namespace

Result<ExprPtr, ParseError> parse_expr(const std::string& text,
                                       const ImplParams& params) {
    auto tokens = Lexer(text).run();
    if (!tokens) return std::move(tokens).error();
    return Parser(std::move(tokens).value(), params).run();
}

}  // namespace ir2c::c
