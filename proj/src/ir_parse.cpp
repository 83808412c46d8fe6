#include <cctype>
#include <functional>

#include "ir2c/c_ast.hpp"
#include "ir2c/ir.hpp"

namespace ir2c::ir {

const IrParam* IrFunction::find_param(const std::string& pname) const {
    for (const IrParam& p : params)
        if (p.name == pname) return &p;
    return nullptr;
}

const IrFunction* IrProgram::find(const std::string& fname) const {
    for (const IrFunction& f : functions)
        if (f.name == fname) return &f;
    return nullptr;
}

std::string to_string(const IrError& e) {
    if (e.loc.line == 0) return e.message;
    return std::to_string(e.loc.line) + ":" + std::to_string(e.loc.col) + ": " +
           e.message;
}

namespace {

// ---------------------------------------------------------------------------
// S-expressions
// ---------------------------------------------------------------------------

struct Sexp {
    enum class Kind { Symbol, Number, List };
    Kind kind;
    std::string sym;       // upcased unless bar-quoted
    bool bar_quoted = false;
    Int128 num = 0;
    std::vector<Sexp> items;
    SrcLoc loc;

    bool is_symbol(const std::string& upcased) const {
        return kind == Kind::Symbol && !bar_quoted && sym == upcased;
    }
};

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    Result<std::vector<Sexp>, IrError> read_all() {
        std::vector<Sexp> out;
        while (true) {
            skip_space();
            if (at_end()) return out;
            auto s = read_one();
            if (!s) return std::move(s).error();
            out.push_back(std::move(s).value());
        }
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char cur() const { return text_[pos_]; }
    SrcLoc loc() const { return SrcLoc{line_, col_}; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (!at_end()) {
            char c = cur();
            if (c == ';') {
                while (!at_end() && cur() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    static bool symbol_char(char c) {
        return !std::isspace(static_cast<unsigned char>(c)) && c != '(' &&
               c != ')' && c != ';' && c != '|';
    }

    Result<Sexp, IrError> read_one() {
        SrcLoc at = loc();
        char c = cur();
        if (c == '(') {
            advance();
            Sexp list{Sexp::Kind::List, "", false, 0, {}, at};
            while (true) {
                skip_space();
                if (at_end())
                    return IrError{"unterminated list", at};
                if (cur() == ')') {
                    advance();
                    return list;
                }
                auto item = read_one();
                if (!item) return item;
                list.items.push_back(std::move(item).value());
            }
        }
        if (c == ')') return IrError{"unexpected ')'", at};
        if (c == '|') {
            advance();
            std::string name;
            while (!at_end() && cur() != '|') {
                name.push_back(cur());
                advance();
            }
            if (at_end()) return IrError{"unterminated |symbol|", at};
            advance();
            return Sexp{Sexp::Kind::Symbol, name, true, 0, {}, at};
        }
        std::string word;
        while (!at_end() && symbol_char(cur())) {
            word.push_back(cur());
            advance();
        }
        if (word.empty()) return IrError{"unexpected character", at};
        bool numeric = true;
        std::size_t start = (word[0] == '-' || word[0] == '+') ? 1 : 0;
        if (start == word.size()) numeric = false;
        for (std::size_t i = start; i < word.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(word[i])))
                numeric = false;
        if (numeric) {
            Int128 value = 0;
            if (!int128_from_string(word, value))
                return IrError{"number out of range", at};
            return Sexp{Sexp::Kind::Number, "", false, value, {}, at};
        }
        for (char& ch : word)
            ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        return Sexp{Sexp::Kind::Symbol, word, false, 0, {}, at};
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Operator name recognition
// ---------------------------------------------------------------------------

std::string upcase(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::optional<CIntType> tag_from_upcased(const std::string& word) {
    for (CIntType t : all_int_types())
        if (upcase(type_tag(t)) == word) return t;
    return std::nullopt;
}

std::vector<std::string> split_dashes(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == '-') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::optional<UnaryOp> unary_from_upcased(const std::string& word) {
    for (UnaryOp op : all_unary_ops())
        if (upcase(unary_op_name(op)) == word) return op;
    return std::nullopt;
}

std::optional<BinaryOp> binary_from_upcased(const std::string& word) {
    for (BinaryOp op : all_binary_ops())
        if (upcase(binary_op_name(op)) == word) return op;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Term parsing
// ---------------------------------------------------------------------------

using TermResult = Result<TermPtr, IrError>;

class TermParser {
public:
    TermResult parse(const Sexp& s) {
        if (s.kind == Sexp::Kind::Number)
            return IrError{"bare number outside a constant form", s.loc};
        if (s.kind == Sexp::Kind::Symbol) {
            if (!s.bar_quoted && (s.sym == "T" || s.sym == "NIL"))
                return IrError{"boolean literals are not part of the language",
                               s.loc};
            return term(Term::Var{var_name(s)}, s.loc);
        }
        if (s.items.empty()) return IrError{"empty form", s.loc};
        const Sexp& head = s.items.front();
        if (head.kind == Sexp::Kind::List)
            return IrError{"operator position holds a list", head.loc};

        if (head.bar_quoted) return parse_call(s);

        const std::string& op = head.sym;
        if (op == "LET" || op == "LET*") return parse_let(s, op == "LET*");
        if (op == "MV-LET") return parse_mv_let(s);
        if (op == "IF") return parse_if(s);
        if (op == "CONDEXPR") return parse_condexpr(s);
        if (op == "AND" || op == "OR") return parse_and_or(s, op == "AND");
        if (op == "MV") return parse_mv(s);
        if (op == "DECLAR" || op == "ASSIGN")
            return IrError{"'" + op + "' wrapper outside a let binding", s.loc};
        if (op == "RETVAL")
            return IrError{"(retval ...) outside an mv form", s.loc};

        // Typed operator families, by name shape.
        auto parts = split_dashes(op);
        if (parts.size() == 3 && parts[1] == "DEC" && parts[2] == "CONST")
            return parse_const(s, parts[0]);
        if (parts.size() == 3 && parts[1] == "FROM" && parts[0] == "BOOLEAN")
            return parse_bool_from(s, parts[2]);
        if (parts.size() == 3 && parts[1] == "FROM" && parts[2] == "BOOLEAN")
            return parse_int_from_bool(s, parts[0]);
        if (parts.size() == 3 && parts[1] == "FROM")
            return parse_convert(s, parts[0], parts[2]);
        if (parts.size() == 4 && parts[1] == "ARRAY" &&
            (parts[2] == "READ" || parts[2] == "WRITE"))
            return parse_array_access(s, parts[0], parts[3], parts[2] == "WRITE");
        if (parts.size() == 5 && parts[1] == "ARRAY" && parts[3] == "INDEX" &&
            parts[4] == "OKP")
            return parse_index_okp(s, parts[0], parts[2]);
        if (parts.size() == 2) {
            if (auto uop = unary_from_upcased(parts[0])) {
                if (auto t = tag_from_upcased(parts[1]))
                    return parse_unop(s, *uop, *t);
            }
        }
        if (parts.size() == 3) {
            if (auto bop = binary_from_upcased(parts[0])) {
                auto t1 = tag_from_upcased(parts[1]);
                auto t2 = tag_from_upcased(parts[2]);
                if (t1 && t2) return parse_binop(s, *bop, *t1, *t2);
            }
        }
        // Bare (unquoted) function names are read upcased, like any symbol.
        return parse_call(s);
    }

private:
    static std::string var_name(const Sexp& s) { return s.sym; }

    static TermResult term(Term::Node node, SrcLoc loc) {
        return TermPtr(std::make_shared<Term>(Term{std::move(node), loc}));
    }

    Result<std::monostate, IrError> expect_arity(const Sexp& s, std::size_t n) {
        if (s.items.size() != n + 1)
            return IrError{"expected " + std::to_string(n) + " arguments",
                           s.loc};
        return std::monostate{};
    }

    TermResult parse_const(const Sexp& s, const std::string& tag) {
        auto t = tag_from_upcased(tag);
        if (!t) return IrError{"unknown type tag in constant", s.loc};
        if (t->rank < Rank::Int)
            return IrError{"constants must have rank int or higher", s.loc};
        if (auto a = expect_arity(s, 1); !a) return std::move(a).error();
        const Sexp& arg = s.items[1];
        if (arg.kind != Sexp::Kind::Number || arg.num < 0)
            return IrError{"constant requires a non-negative decimal", arg.loc};
        return term(Term::Const{*t, arg.num}, s.loc);
    }

    TermResult parse_unop(const Sexp& s, UnaryOp op, CIntType t) {
        if (auto a = expect_arity(s, 1); !a) return std::move(a).error();
        auto arg = parse(s.items[1]);
        if (!arg) return arg;
        return term(Term::Unop{op, t, std::move(arg).value()}, s.loc);
    }

    TermResult parse_binop(const Sexp& s, BinaryOp op, CIntType t1, CIntType t2) {
        if (auto a = expect_arity(s, 2); !a) return std::move(a).error();
        auto lhs = parse(s.items[1]);
        if (!lhs) return lhs;
        auto rhs = parse(s.items[2]);
        if (!rhs) return rhs;
        return term(Term::Binop{op, t1, t2, std::move(lhs).value(),
                                std::move(rhs).value()},
                    s.loc);
    }

    TermResult parse_convert(const Sexp& s, const std::string& to,
                             const std::string& from) {
        auto tt = tag_from_upcased(to);
        auto ft = tag_from_upcased(from);
        if (!tt || !ft)
            return IrError{"unknown operator '" + s.items[0].sym + "'", s.loc};
        if (auto a = expect_arity(s, 1); !a) return std::move(a).error();
        auto arg = parse(s.items[1]);
        if (!arg) return arg;
        return term(Term::Convert{*tt, *ft, std::move(arg).value()}, s.loc);
    }

    TermResult parse_bool_from(const Sexp& s, const std::string& from) {
        auto ft = tag_from_upcased(from);
        if (!ft) return IrError{"unknown type tag '" + from + "'", s.loc};
        if (auto a = expect_arity(s, 1); !a) return std::move(a).error();
        auto arg = parse(s.items[1]);
        if (!arg) return arg;
        return term(Term::BoolFrom{*ft, std::move(arg).value()}, s.loc);
    }

    TermResult parse_int_from_bool(const Sexp& s, const std::string& to) {
        auto tt = tag_from_upcased(to);
        if (!tt) return IrError{"unknown type tag '" + to + "'", s.loc};
        if (auto a = expect_arity(s, 1); !a) return std::move(a).error();
        auto arg = parse(s.items[1]);
        if (!arg) return arg;
        return term(Term::IntFromBool{*tt, std::move(arg).value()}, s.loc);
    }

    TermResult parse_array_access(const Sexp& s, const std::string& elem,
                                  const std::string& idx, bool is_write) {
        auto et = tag_from_upcased(elem);
        auto it = tag_from_upcased(idx);
        if (!et || !it)
            return IrError{"unknown operator '" + s.items[0].sym + "'", s.loc};
        if (auto a = expect_arity(s, is_write ? 3 : 2); !a)
            return std::move(a).error();
        const Sexp& arr = s.items[1];
        if (arr.kind != Sexp::Kind::Symbol)
            return IrError{"array operand must be a variable", arr.loc};
        auto index = parse(s.items[2]);
        if (!index) return index;
        if (!is_write)
            return term(Term::ArrayRead{*et, *it, var_name(arr),
                                        std::move(index).value()},
                        s.loc);
        auto value = parse(s.items[3]);
        if (!value) return value;
        return term(Term::ArrayWrite{*et, *it, var_name(arr),
                                     std::move(index).value(),
                                     std::move(value).value()},
                    s.loc);
    }

    TermResult parse_index_okp(const Sexp& s, const std::string& elem,
                               const std::string& idx) {
        auto et = tag_from_upcased(elem);
        auto it = tag_from_upcased(idx);
        if (!et || !it)
            return IrError{"unknown operator '" + s.items[0].sym + "'", s.loc};
        if (auto a = expect_arity(s, 2); !a) return std::move(a).error();
        const Sexp& arr = s.items[1];
        if (arr.kind != Sexp::Kind::Symbol)
            return IrError{"array operand must be a variable", arr.loc};
        auto index = parse(s.items[2]);
        if (!index) return index;
        return term(Term::IndexOkp{*et, *it, var_name(arr),
                                   std::move(index).value()},
                    s.loc);
    }

    TermResult parse_if(const Sexp& s) {
        if (auto a = expect_arity(s, 3); !a) return std::move(a).error();
        auto test = parse(s.items[1]);
        if (!test) return test;
        auto then_b = parse(s.items[2]);
        if (!then_b) return then_b;
        auto else_b = parse(s.items[3]);
        if (!else_b) return else_b;
        return term(Term::If{std::move(test).value(), std::move(then_b).value(),
                             std::move(else_b).value()},
                    s.loc);
    }

    TermResult parse_condexpr(const Sexp& s) {
        if (auto a = expect_arity(s, 1); !a) return std::move(a).error();
        const Sexp& inner = s.items[1];
        if (inner.kind != Sexp::Kind::List || inner.items.empty() ||
            !inner.items[0].is_symbol("IF"))
            return IrError{"condexpr requires an (if ...) form", s.loc};
        if (inner.items.size() != 4)
            return IrError{"expected 3 arguments", inner.loc};
        auto test = parse(inner.items[1]);
        if (!test) return test;
        auto then_b = parse(inner.items[2]);
        if (!then_b) return then_b;
        auto else_b = parse(inner.items[3]);
        if (!else_b) return else_b;
        return term(Term::CondExpr{std::move(test).value(),
                                   std::move(then_b).value(),
                                   std::move(else_b).value()},
                    s.loc);
    }

    TermResult parse_and_or(const Sexp& s, bool is_and) {
        if (s.items.size() < 3)
            return IrError{"and/or need at least 2 arguments", s.loc};
        // Fold n-ary and/or to nested binary forms, right-associated.
        auto build = [&](std::size_t i, auto&& self) -> TermResult {
            auto first = parse(s.items[i]);
            if (!first) return first;
            if (i + 1 == s.items.size()) return first;
            auto rest = self(i + 1, self);
            if (!rest) return rest;
            if (is_and)
                return term(Term::And{std::move(first).value(),
                                      std::move(rest).value()},
                            s.loc);
            return term(Term::Or{std::move(first).value(),
                                 std::move(rest).value()},
                        s.loc);
        };
        return build(1, build);
    }

    TermResult parse_mv(const Sexp& s) {
        if (s.items.size() < 2)
            return IrError{"mv needs at least one component", s.loc};
        Term::Mv mv;
        for (std::size_t i = 1; i < s.items.size(); ++i) {
            const Sexp& comp = s.items[i];
            if (comp.kind == Sexp::Kind::List && !comp.items.empty() &&
                comp.items[0].is_symbol("RETVAL")) {
                if (i != 1)
                    return IrError{"(retval ...) must be the first mv component",
                                   comp.loc};
                if (comp.items.size() != 2)
                    return IrError{"retval takes one argument", comp.loc};
                auto r = parse(comp.items[1]);
                if (!r) return r;
                mv.result = std::move(r).value();
                continue;
            }
            if (comp.kind != Sexp::Kind::Symbol)
                return IrError{"mv components must be variables", comp.loc};
            mv.vars.push_back(var_name(comp));
        }
        if (!mv.result && mv.vars.size() < 2)
            return IrError{"mv of a single variable is just the variable",
                           s.loc};
        return term(std::move(mv), s.loc);
    }

    TermResult parse_call(const Sexp& s) {
        Term::Call call;
        call.fn = var_name(s.items[0]);
        for (std::size_t i = 1; i < s.items.size(); ++i) {
            auto a = parse(s.items[i]);
            if (!a) return a;
            call.args.push_back(std::move(a).value());
        }
        return term(std::move(call), s.loc);
    }

    // (let ((v rhs)) body...) possibly with (declare ...) forms before the
    // body. let* unfolds into nested lets.
    TermResult parse_let(const Sexp& s, bool star) {
        if (s.items.size() < 3)
            return IrError{"let needs bindings and a body", s.loc};
        const Sexp& bindings = s.items[1];
        if (bindings.kind != Sexp::Kind::List || bindings.items.empty())
            return IrError{"let needs a non-empty binding list", s.loc};
        if (!star && bindings.items.size() > 1)
            return IrError{"parallel let with several bindings; use let*",
                           s.loc};
        std::vector<const Sexp*> body_forms;
        for (std::size_t i = 2; i < s.items.size(); ++i)
            body_forms.push_back(&s.items[i]);
        return parse_let_chain(s, bindings.items, 0, body_forms);
    }

    TermResult parse_let_chain(const Sexp& s,
                               const std::vector<Sexp>& bindings,
                               std::size_t i,
                               std::vector<const Sexp*> body_forms) {
        const Sexp& binding = bindings[i];
        if (binding.kind != Sexp::Kind::List || binding.items.size() != 2 ||
            binding.items[0].kind != Sexp::Kind::Symbol)
            return IrError{"binding must be (variable term)", binding.loc};
        std::string var = var_name(binding.items[0]);
        const Sexp& rhs = binding.items[1];

        TermResult body = [&]() -> TermResult {
            if (i + 1 < bindings.size())
                return parse_let_chain(s, bindings, i + 1, body_forms);
            return parse_body_forms(body_forms, s.loc);
        }();
        if (!body) return body;
        return finish_let(var, rhs, std::move(body).value(), binding.loc);
    }

    // Skips (declare (ignore ...)) / (declare (ignorable ...)) forms; exactly
    // one term must remain.
    TermResult parse_body_forms(const std::vector<const Sexp*>& forms,
                                SrcLoc at) {
        const Sexp* body = nullptr;
        for (const Sexp* f : forms) {
            if (f->kind == Sexp::Kind::List && !f->items.empty() &&
                f->items[0].is_symbol("DECLARE"))
                continue;
            if (body) return IrError{"more than one body form", f->loc};
            body = f;
        }
        if (!body) return IrError{"missing body", at};
        return parse(*body);
    }

    TermResult finish_let(const std::string& var, const Sexp& rhs,
                          TermPtr body, SrcLoc at) {
        if (rhs.kind == Sexp::Kind::List && !rhs.items.empty() &&
            rhs.items[0].kind == Sexp::Kind::Symbol && !rhs.items[0].bar_quoted) {
            const std::string& op = rhs.items[0].sym;
            if (op == "DECLAR" || op == "ASSIGN") {
                if (rhs.items.size() != 2)
                    return IrError{"wrapper takes one argument", rhs.loc};
                auto inner = parse(rhs.items[1]);
                if (!inner) return inner;
                if (op == "DECLAR")
                    return term(Term::LetDeclar{var, std::move(inner).value(),
                                                std::move(body)},
                                at);
                return term(Term::LetAssign{var, std::move(inner).value(),
                                            std::move(body)},
                            at);
            }
        }
        auto rhs_term = parse(rhs);
        if (!rhs_term) return rhs_term;
        const Term& rt = *rhs_term.value();
        if (std::holds_alternative<Term::ArrayWrite>(rt.node))
            return term(Term::LetWrite{var, std::move(rhs_term).value(),
                                       std::move(body)},
                        at);
        if (std::holds_alternative<Term::If>(rt.node) ||
            std::holds_alternative<Term::Call>(rt.node))
            return term(Term::LetStmt{{var}, std::move(rhs_term).value(),
                                      std::move(body)},
                        at);
        return IrError{
            "let binding requires a declar/assign wrapper, an array write, "
            "an if, or a call",
            rhs.loc};
    }

    TermResult parse_mv_let(const Sexp& s) {
        if (s.items.size() < 4)
            return IrError{"mv-let needs variables, a term, and a body", s.loc};
        const Sexp& vars = s.items[1];
        if (vars.kind != Sexp::Kind::List || vars.items.size() < 2)
            return IrError{"mv-let needs at least two variables", vars.loc};
        Term::LetStmt st;
        for (const Sexp& v : vars.items) {
            if (v.kind != Sexp::Kind::Symbol)
                return IrError{"mv-let variables must be symbols", v.loc};
            st.vars.push_back(var_name(v));
        }
        auto rhs = parse(s.items[2]);
        if (!rhs) return rhs;
        const Term& rt = *rhs.value();
        if (!std::holds_alternative<Term::If>(rt.node) &&
            !std::holds_alternative<Term::Call>(rt.node))
            return IrError{"mv-let must bind an if or a call", s.items[2].loc};
        st.rhs = std::move(rhs).value();
        std::vector<const Sexp*> body_forms;
        for (std::size_t i = 3; i < s.items.size(); ++i)
            body_forms.push_back(&s.items[i]);
        auto body = parse_body_forms(body_forms, s.loc);
        if (!body) return body;
        st.body = std::move(body).value();
        return term(std::move(st), s.loc);
    }
};

// ---------------------------------------------------------------------------
// defun parsing
// ---------------------------------------------------------------------------

// A guard conjunct of the form (<tag>p |x|) or (<tag>-arrayp |a|) assigns the
// parameter its type.
std::optional<IrType> type_conjunct(const Sexp& s, std::string& param_out) {
    if (s.kind != Sexp::Kind::List || s.items.size() != 2) return std::nullopt;
    const Sexp& head = s.items[0];
    const Sexp& arg = s.items[1];
    if (head.kind != Sexp::Kind::Symbol || head.bar_quoted) return std::nullopt;
    if (arg.kind != Sexp::Kind::Symbol) return std::nullopt;
    const std::string& w = head.sym;
    for (CIntType t : all_int_types()) {
        if (w == upcase(type_tag(t)) + "P") {
            param_out = arg.sym;
            return IrType{false, t};
        }
        if (w == upcase(type_tag(t)) + "-ARRAYP") {
            param_out = arg.sym;
            return IrType{true, t};
        }
    }
    return std::nullopt;
}

Result<IrFunction, IrError> parse_defun(const Sexp& s) {
    if (s.items.size() < 4)
        return IrError{"defun needs a name, parameters, and a body", s.loc};
    const Sexp& name = s.items[1];
    if (name.kind != Sexp::Kind::Symbol)
        return IrError{"function name must be a symbol", name.loc};
    IrFunction fn;
    fn.name = name.sym;
    fn.loc = s.loc;

    const Sexp& params = s.items[2];
    if (params.kind != Sexp::Kind::List)
        return IrError{"parameter list expected", params.loc};
    std::vector<std::string> param_names;
    for (const Sexp& p : params.items) {
        if (p.kind != Sexp::Kind::Symbol)
            return IrError{"parameter must be a symbol", p.loc};
        param_names.push_back(p.sym);
    }

    // One (declare (xargs :guard G ...)) is required; other declare forms and
    // other xargs keywords are accepted and ignored.
    const Sexp* guard = nullptr;
    std::vector<const Sexp*> body_forms;
    for (std::size_t i = 3; i < s.items.size(); ++i) {
        const Sexp& form = s.items[i];
        if (form.kind == Sexp::Kind::List && !form.items.empty() &&
            form.items[0].is_symbol("DECLARE")) {
            for (std::size_t j = 1; j < form.items.size(); ++j) {
                const Sexp& d = form.items[j];
                if (d.kind == Sexp::Kind::List && !d.items.empty() &&
                    d.items[0].is_symbol("XARGS")) {
                    for (std::size_t k = 1; k + 1 < d.items.size(); k += 2) {
                        if (d.items[k].is_symbol(":GUARD"))
                            guard = &d.items[k + 1];
                    }
                }
            }
            continue;
        }
        body_forms.push_back(&form);
    }
    if (!guard)
        return IrError{"missing (declare (xargs :guard ...))", s.loc};
    if (body_forms.size() != 1)
        return IrError{"defun needs exactly one body form", s.loc};

    // Split the guard into conjuncts.
    std::vector<const Sexp*> conjuncts;
    if (guard->kind == Sexp::Kind::List && !guard->items.empty() &&
        guard->items[0].is_symbol("AND")) {
        for (std::size_t i = 1; i < guard->items.size(); ++i)
            conjuncts.push_back(&guard->items[i]);
    } else {
        conjuncts.push_back(guard);
    }

    std::map<std::string, IrType> types;
    TermParser tp;
    for (const Sexp* c : conjuncts) {
        std::string pname;
        if (auto t = type_conjunct(*c, pname)) {
            if (!types.emplace(pname, *t).second)
                return IrError{"duplicate type conjunct for '" + pname + "'",
                               c->loc};
            continue;
        }
        auto g = tp.parse(*c);
        if (!g) return std::move(g).error();
        fn.extra_guards.push_back(std::move(g).value());
    }
    for (const std::string& pname : param_names) {
        auto it = types.find(pname);
        if (it == types.end())
            return IrError{"guard missing a type conjunct for parameter '" +
                               pname + "'",
                           params.loc};
        fn.params.push_back(IrParam{pname, it->second});
    }
    if (types.size() != param_names.size())
        return IrError{"type conjunct for a non-parameter", guard->loc};

    auto body = tp.parse(*body_forms[0]);
    if (!body) return std::move(body).error();
    fn.body = std::move(body).value();

    // Recursive self reference anywhere marks a loop function.
    std::function<bool(const Term&)> has_self = [&](const Term& t) -> bool {
        bool found = false;
        auto visit_child = [&](const TermPtr& c) {
            if (c && !found) found = has_self(*c);
        };
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Term::Call>) {
                    if (n.fn == fn.name) {
                        found = true;
                        return;
                    }
                    for (const TermPtr& a : n.args) visit_child(a);
                } else if constexpr (std::is_same_v<T, Term::Unop> ||
                                     std::is_same_v<T, Term::Convert> ||
                                     std::is_same_v<T, Term::BoolFrom> ||
                                     std::is_same_v<T, Term::IntFromBool>) {
                    visit_child(n.arg);
                } else if constexpr (std::is_same_v<T, Term::Binop>) {
                    visit_child(n.lhs);
                    visit_child(n.rhs);
                } else if constexpr (std::is_same_v<T, Term::And> ||
                                     std::is_same_v<T, Term::Or>) {
                    visit_child(n.lhs);
                    visit_child(n.rhs);
                } else if constexpr (std::is_same_v<T, Term::If> ||
                                     std::is_same_v<T, Term::CondExpr>) {
                    visit_child(n.test);
                    visit_child(n.then_branch);
                    visit_child(n.else_branch);
                } else if constexpr (std::is_same_v<T, Term::ArrayRead> ||
                                     std::is_same_v<T, Term::IndexOkp>) {
                    visit_child(n.index);
                } else if constexpr (std::is_same_v<T, Term::ArrayWrite>) {
                    visit_child(n.index);
                    visit_child(n.value);
                } else if constexpr (std::is_same_v<T, Term::LetDeclar> ||
                                     std::is_same_v<T, Term::LetAssign> ||
                                     std::is_same_v<T, Term::LetWrite>) {
                    if constexpr (std::is_same_v<T, Term::LetWrite>)
                        visit_child(n.write);
                    else
                        visit_child(n.rhs);
                    visit_child(n.body);
                } else if constexpr (std::is_same_v<T, Term::LetStmt>) {
                    visit_child(n.rhs);
                    visit_child(n.body);
                } else if constexpr (std::is_same_v<T, Term::Mv>) {
                    if (n.result) visit_child(*n.result);
                }
            },
            t.node);
        return found;
    };
    fn.is_loop = has_self(*fn.body);
    return fn;
}

}  // namespace

Result<IrProgram, IrError> parse_ir(const std::string& text) {
    auto forms = Reader(text).read_all();
    if (!forms) return std::move(forms).error();
    IrProgram program;
    for (const Sexp& form : forms.value()) {
        if (form.kind != Sexp::Kind::List || form.items.empty() ||
            !form.items[0].is_symbol("DEFUN"))
            return IrError{"top-level forms must be (defun ...)", form.loc};
        auto fn = parse_defun(form);
        if (!fn) return std::move(fn).error();
        program.functions.push_back(std::move(fn).value());
    }
    return program;
}

}  // namespace ir2c::ir
