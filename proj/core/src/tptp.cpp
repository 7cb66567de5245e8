#include "entcop/tptp.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace entcop::tptp {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Lower, Upper, Dollar, Quoted, Distinct, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            Token t;
            t.line = line_;
            t.column = column_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            char c = text_[pos_];
            if (std::islower(static_cast<unsigned char>(c))) {
                t.kind = Tok::Lower;
                t.text = take_word();
            } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Upper;
                t.text = take_word();
            } else if (c == '$') {
                advance();
                t.kind = Tok::Dollar;
                t.text = "$" + take_word();
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                t.kind = Tok::Number;
                t.text = take_word();
            } else if (c == '\'' || c == '"') {
                t.kind = c == '\'' ? Tok::Quoted : Tok::Distinct;
                t.text = take_quoted(c, t);
            } else {
                t.kind = Tok::Punct;
                t.text = take_punct(t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                int l = line_, col = column_;
                advance();
                advance();
                while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) advance();
                if (pos_ + 1 >= text_.size()) throw ParseError("unterminated block comment", l, col);
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    std::string take_word() {
        std::string out;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            out += text_[pos_];
            advance();
        }
        return out;
    }

    std::string take_quoted(char quote, const Token& start) {
        std::string out(1, quote);
        advance();
        while (pos_ < text_.size() && text_[pos_] != quote) {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                out += text_[pos_];
                advance();
            }
            out += text_[pos_];
            advance();
        }
        if (pos_ >= text_.size()) throw ParseError("unterminated quoted name", start.line, start.column);
        out += quote;
        advance();
        return out;
    }

    std::string take_punct(const Token& start) {
        // The last group only occurs in typed languages; lexing it lets the
        // parser report those as unsupported rather than malformed.
        static const char* const kPuncts[] = {"<=>", "<~>", "=>", "<=", "~|", "~&", "!=", "(", ")", "[", "]", ",",
                                              ".",   ":",   "!",  "?",  "~",  "&",  "|",  "=",
                                              "-->", ":=",  ">",  "<",  "*",  "+",  "@",  "^"};
        for (const char* p : kPuncts) {
            std::string_view sv(p);
            if (text_.substr(pos_, sv.size()) == sv) {
                for (std::size_t i = 0; i < sv.size(); ++i) advance();
                return std::string(sv);
            }
        }
        throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", start.line, start.column);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

const std::unordered_map<std::string, Role>& role_table() {
    static const std::unordered_map<std::string, Role> table = {
        {"axiom", Role::Axiom},
        {"hypothesis", Role::Hypothesis},
        {"definition", Role::Definition},
        {"assumption", Role::Assumption},
        {"lemma", Role::Lemma},
        {"theorem", Role::Theorem},
        {"corollary", Role::Corollary},
        {"conjecture", Role::Conjecture},
        {"negated_conjecture", Role::NegatedConjecture},
        {"plain", Role::Plain},
    };
    return table;
}

bool is_binary_nonassoc(const std::string& op) {
    return op == "<=>" || op == "=>" || op == "<=" || op == "<~>" || op == "~|" || op == "~&";
}

FormulaKind binary_kind(const std::string& op) {
    if (op == "<=>") return FormulaKind::Iff;
    if (op == "=>") return FormulaKind::Implies;
    if (op == "<=") return FormulaKind::ReverseImplies;
    if (op == "<~>") return FormulaKind::Xor;
    if (op == "~|") return FormulaKind::Nor;
    return FormulaKind::Nand;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::filesystem::path base_dir)
        : toks_(std::move(tokens)), base_dir_(std::move(base_dir)) {}

    Problem document() {
        Problem problem;
        while (peek().kind != Tok::End) {
            const Token& head = peek();
            if (head.kind != Tok::Lower) error("expected 'cnf', 'fof' or 'include'");
            if (head.text == "include") {
                include(problem);
            } else if (head.text == "cnf" || head.text == "fof") {
                problem.formulas.push_back(annotated());
            } else if (head.text == "thf" || head.text == "tff" || head.text == "tcf" || head.text == "tpi") {
                unsupported("typed or higher-order language '" + head.text + "'");
            } else {
                error("unknown directive '" + head.text + "'");
            }
        }
        return problem;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    Token next() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool is_punct(const std::string& p, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
    }
    [[noreturn]] void error(const std::string& message) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(message + ", found " + found, t.line, t.column);
    }
    [[noreturn]] void unsupported(const std::string& what) const {
        throw UnsupportedError("unsupported construct: " + what, peek().line, peek().column);
    }
    void expect(const std::string& p) {
        if (!is_punct(p)) error("expected '" + p + "'");
        next();
    }

    void include(Problem& problem) {
        next();
        expect("(");
        if (peek().kind != Tok::Quoted) error("expected quoted file name");
        Token file = next();
        if (is_punct(",")) unsupported("include with formula selection");
        expect(")");
        expect(".");
        std::string inner = file.text.substr(1, file.text.size() - 2);
        auto path = base_dir_ / inner;
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open included file '" + path.string() + "'", file.line, file.column);
        std::stringstream buf;
        buf << in.rdbuf();
        Problem sub = parse_problem(buf.str(), path.parent_path());
        for (auto& f : sub.formulas) problem.formulas.push_back(std::move(f));
    }

    AnnotatedFormula annotated() {
        AnnotatedFormula out;
        out.language = next().text == "cnf" ? Language::Cnf : Language::Fof;
        expect("(");
        const Token& name = peek();
        if (name.kind != Tok::Lower && name.kind != Tok::Quoted && name.kind != Tok::Number &&
            name.kind != Tok::Upper) {
            error("expected formula name");
        }
        out.name = next().text;
        expect(",");
        if (peek().kind != Tok::Lower) error("expected formula role");
        auto it = role_table().find(peek().text);
        if (it == role_table().end()) unsupported("role '" + peek().text + "'");
        out.role = it->second;
        next();
        expect(",");
        out.formula = formula();
        if (out.language == Language::Cnf) check_cnf(out.formula, false);
        if (is_punct(",")) {
            // Source and useful-info annotations are skipped.
            next();
            skip_balanced();
        }
        expect(")");
        expect(".");
        return out;
    }

    void skip_balanced() {
        int depth = 0;
        while (peek().kind != Tok::End) {
            if (is_punct("(") || is_punct("[")) ++depth;
            if (is_punct(")") || is_punct("]")) {
                if (depth == 0) return;
                --depth;
            }
            next();
        }
    }

    void check_cnf(const Formula& f, bool under_not) {
        switch (f.kind) {
            case FormulaKind::Atom:
            case FormulaKind::Equal:
            case FormulaKind::NotEqual:
            case FormulaKind::True:
            case FormulaKind::False:
                return;
            case FormulaKind::Not:
                if (!under_not) {
                    check_cnf(f.children[0], true);
                    const auto k = f.children[0].kind;
                    if (k == FormulaKind::Atom || k == FormulaKind::Equal || k == FormulaKind::NotEqual ||
                        k == FormulaKind::True || k == FormulaKind::False) {
                        return;
                    }
                }
                break;
            case FormulaKind::Or:
                if (!under_not) {
                    for (const auto& c : f.children) check_cnf(c, false);
                    return;
                }
                break;
            default:
                break;
        }
        error("cnf formula must be a disjunction of literals");
    }

    Formula formula() {
        Formula left = unitary();
        if (peek().kind == Tok::Punct) {
            const std::string op = peek().text;
            if (op == "|" || op == "&") {
                Formula chain;
                chain.kind = op == "|" ? FormulaKind::Or : FormulaKind::And;
                chain.children.push_back(std::move(left));
                while (is_punct(op)) {
                    next();
                    chain.children.push_back(unitary());
                }
                if (peek().kind == Tok::Punct && (is_binary_nonassoc(peek().text) || peek().text == "|" ||
                                                  peek().text == "&")) {
                    error("mixed connectives need parentheses");
                }
                return chain;
            }
            if (is_binary_nonassoc(op)) {
                next();
                Formula bin;
                bin.kind = binary_kind(op);
                bin.children.push_back(std::move(left));
                bin.children.push_back(unitary());
                if (peek().kind == Tok::Punct && (is_binary_nonassoc(peek().text) || peek().text == "|" ||
                                                  peek().text == "&")) {
                    error("non-associative connective needs parentheses");
                }
                return bin;
            }
        }
        return left;
    }

    Formula unitary() {
        if (is_punct("~")) {
            next();
            Formula f;
            f.kind = FormulaKind::Not;
            f.children.push_back(unitary());
            return f;
        }
        if (is_punct("!") || is_punct("?")) {
            Formula f;
            f.kind = next().text == "!" ? FormulaKind::ForAll : FormulaKind::Exists;
            expect("[");
            for (;;) {
                if (peek().kind != Tok::Upper) error("expected variable");
                f.variables.push_back(next().text);
                if (is_punct(":") ) unsupported("typed variable");
                if (is_punct(",")) {
                    next();
                    continue;
                }
                break;
            }
            expect("]");
            expect(":");
            f.children.push_back(unitary());
            return f;
        }
        if (is_punct("(")) {
            next();
            Formula f = formula();
            expect(")");
            return f;
        }
        return atomic();
    }

    Formula atomic() {
        if (peek().kind == Tok::Dollar && (peek().text == "$true" || peek().text == "$false") &&
            !is_punct("=", 1) && !is_punct("!=", 1)) {
            Formula f;
            f.kind = next().text == "$true" ? FormulaKind::True : FormulaKind::False;
            return f;
        }
        const Token start = peek();
        AstTerm lhs = term();
        if (is_punct("=") || is_punct("!=")) {
            Formula f;
            f.kind = next().text == "=" ? FormulaKind::Equal : FormulaKind::NotEqual;
            f.args.push_back(std::move(lhs));
            f.args.push_back(term());
            return f;
        }
        if (lhs.variable) throw ParseError("variable used as a formula", start.line, start.column);
        Formula f;
        f.kind = FormulaKind::Atom;
        f.predicate = std::move(lhs.name);
        f.args = std::move(lhs.args);
        return f;
    }

    AstTerm term() {
        const Token& t = peek();
        AstTerm out;
        switch (t.kind) {
            case Tok::Upper:
                out.variable = true;
                out.name = next().text;
                return out;
            case Tok::Lower:
            case Tok::Quoted:
            case Tok::Number:
            case Tok::Distinct:
                out.name = next().text;
                break;
            case Tok::Dollar:
                unsupported("defined symbol '" + t.text + "'");
            default:
                error("expected term");
        }
        if (is_punct("(")) {
            next();
            for (;;) {
                out.args.push_back(term());
                if (is_punct(",")) {
                    next();
                    continue;
                }
                break;
            }
            expect(")");
        }
        return out;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::filesystem::path base_dir_;
};

// ------------------------------------------------------------------- Printer

void print_term(std::ostream& os, const AstTerm& t) {
    os << t.name;
    if (t.args.empty()) return;
    os << '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << ',';
        print_term(os, t.args[i]);
    }
    os << ')';
}

bool is_atomic(FormulaKind k) {
    return k == FormulaKind::Atom || k == FormulaKind::Equal || k == FormulaKind::NotEqual ||
           k == FormulaKind::True || k == FormulaKind::False;
}

void print(std::ostream& os, const Formula& f);

void print_wrapped(std::ostream& os, const Formula& f) {
    bool unary = is_atomic(f.kind) || f.kind == FormulaKind::Not || f.kind == FormulaKind::ForAll ||
                 f.kind == FormulaKind::Exists;
    if (unary) {
        print(os, f);
    } else {
        os << '(';
        print(os, f);
        os << ')';
    }
}

void print(std::ostream& os, const Formula& f) {
    switch (f.kind) {
        case FormulaKind::Atom:
            print_term(os, AstTerm{f.predicate, false, f.args});
            return;
        case FormulaKind::Equal:
        case FormulaKind::NotEqual:
            print_term(os, f.args[0]);
            os << (f.kind == FormulaKind::Equal ? " = " : " != ");
            print_term(os, f.args[1]);
            return;
        case FormulaKind::True:
            os << "$true";
            return;
        case FormulaKind::False:
            os << "$false";
            return;
        case FormulaKind::Not:
            os << '~';
            if (is_atomic(f.children[0].kind)) {
                print(os, f.children[0]);
            } else {
                os << ' ';
                print_wrapped(os, f.children[0]);
            }
            return;
        case FormulaKind::ForAll:
        case FormulaKind::Exists: {
            os << (f.kind == FormulaKind::ForAll ? "! [" : "? [");
            for (std::size_t i = 0; i < f.variables.size(); ++i) {
                if (i) os << ',';
                os << f.variables[i];
            }
            os << "] : ";
            print_wrapped(os, f.children[0]);
            return;
        }
        case FormulaKind::And:
        case FormulaKind::Or: {
            const char* op = f.kind == FormulaKind::And ? " & " : " | ";
            for (std::size_t i = 0; i < f.children.size(); ++i) {
                if (i) os << op;
                print_wrapped(os, f.children[i]);
            }
            return;
        }
        default: {
            const char* op = "";
            switch (f.kind) {
                case FormulaKind::Implies: op = " => "; break;
                case FormulaKind::ReverseImplies: op = " <= "; break;
                case FormulaKind::Iff: op = " <=> "; break;
                case FormulaKind::Xor: op = " <~> "; break;
                case FormulaKind::Nor: op = " ~| "; break;
                case FormulaKind::Nand: op = " ~& "; break;
                default: break;
            }
            print_wrapped(os, f.children[0]);
            os << op;
            print_wrapped(os, f.children[1]);
            return;
        }
    }
}

}  // namespace

Problem parse_problem(std::string_view text, const std::filesystem::path& base_dir) {
    Parser parser(Lexer(text).run(), base_dir);
    return parser.document();
}

Problem parse_problem_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string print_formula(const Formula& f) {
    std::ostringstream os;
    print(os, f);
    return os.str();
}

std::string_view role_name(Role role) {
    for (const auto& [name, r] : role_table()) {
        if (r == role) return name;
    }
    return "axiom";
}

std::string print_problem(const Problem& problem) {
    std::ostringstream os;
    for (const auto& af : problem.formulas) {
        os << (af.language == Language::Cnf ? "cnf(" : "fof(") << af.name << ", " << role_name(af.role) << ", ";
        print(os, af.formula);
        os << ").\n";
    }
    return os.str();
}

}  // namespace entcop::tptp
