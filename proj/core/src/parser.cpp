#include "lfppl/parser.hpp"

#include <map>
#include <optional>

namespace lfppl {

namespace {

struct OpSpec {
    size_t min_arity;
    size_t max_arity;  // SIZE_MAX = unbounded
};

const std::map<std::string, OpSpec>& op_table() {
    static const std::map<std::string, OpSpec> table = {
        {"+", {1, SIZE_MAX}}, {"-", {1, 2}},      {"*", {1, SIZE_MAX}},
        {"/", {2, 2}},        {"exp", {1, 1}},    {"log", {1, 1}},
        {"sqrt", {1, 1}},     {"<", {2, 2}},      {"max", {2, 2}},
        {"vector", {1, SIZE_MAX}},                {"nth", {2, 2}},
    };
    return table;
}

const std::map<std::string, size_t>& dist_table() {
    static const std::map<std::string, size_t> table = {
        {"normal", 2}, {"uniform", 2}, {"bernoulli", 1},
        {"categorical", 1}, {"factor", 1},
    };
    return table;
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

    ExprPtr run() {
        if (tokens_.empty()) throw parse_error("empty program");
        ExprPtr root = expression();
        if (pos_ != tokens_.size())
            throw parse_error("trailing input after program", peek().pos);
        return root;
    }

private:
    const std::vector<Token>& tokens_;
    size_t pos_ = 0;

    const Token& peek() const {
        if (pos_ >= tokens_.size())
            throw parse_error("unexpected end of input (unbalanced parentheses?)",
                              tokens_.empty() ? SourcePos{} : tokens_.back().pos);
        return tokens_[pos_];
    }

    const Token& next() {
        const Token& t = peek();
        ++pos_;
        return t;
    }

    void expect(TokenKind kind, const char* what) {
        const Token& t = peek();
        if (t.kind != kind) throw parse_error(std::string("expected ") + what, t.pos);
        ++pos_;
    }

    ExprPtr expression() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Number:
                next();
                return make_const(t.number, t.pos);
            case TokenKind::Symbol:
                next();
                return make_var(t.text, t.pos);
            case TokenKind::OpenBracket:
                return bracket_list();
            case TokenKind::OpenParen:
                return form();
            case TokenKind::CloseParen:
                throw parse_error("unexpected ')'", t.pos);
            case TokenKind::CloseBracket:
                throw parse_error("unexpected ']'", t.pos);
        }
        throw parse_error("unexpected token", t.pos);
    }

    ExprPtr bracket_list() {
        SourcePos pos = peek().pos;
        expect(TokenKind::OpenBracket, "'['");
        std::vector<ExprPtr> elems;
        while (peek().kind != TokenKind::CloseBracket) elems.push_back(expression());
        expect(TokenKind::CloseBracket, "']'");
        return make_list(std::move(elems), pos);
    }

    ExprPtr form() {
        SourcePos pos = peek().pos;
        expect(TokenKind::OpenParen, "'('");
        const Token& head = peek();
        if (head.kind != TokenKind::Symbol)
            throw parse_error("expected operator or special form after '('", head.pos);
        next();

        ExprPtr result;
        if (head.text == "let") {
            result = let_form(pos);
        } else if (head.text == "if") {
            result = if_form(pos);
        } else if (head.text == "sample") {
            result = sample_form(pos);
        } else if (head.text == "observe") {
            result = observe_form(pos);
        } else if (auto it = op_table().find(head.text); it != op_table().end()) {
            std::vector<ExprPtr> args;
            while (peek().kind != TokenKind::CloseParen) args.push_back(expression());
            if (args.size() < it->second.min_arity || args.size() > it->second.max_arity)
                throw parse_error("wrong number of arguments for '" + head.text + "'", pos);
            result = make_primop(head.text, std::move(args), pos);
        } else if (dist_table().count(head.text)) {
            throw parse_error("distribution '" + head.text +
                                  "' is only valid inside sample or observe",
                              head.pos);
        } else {
            throw parse_error("unknown operator '" + head.text + "'", head.pos);
        }
        expect(TokenKind::CloseParen, "')'");
        return result;
    }

    ExprPtr let_form(SourcePos pos) {
        expect(TokenKind::OpenBracket, "'[' to open let bindings");
        std::vector<LetBinding> bindings;
        while (peek().kind != TokenKind::CloseBracket) {
            const Token& name = peek();
            if (name.kind != TokenKind::Symbol)
                throw parse_error("let binding name must be an identifier", name.pos);
            next();
            bindings.push_back({name.text, expression()});
        }
        expect(TokenKind::CloseBracket, "']' to close let bindings");
        if (bindings.empty()) throw parse_error("let needs at least one binding", pos);
        std::vector<ExprPtr> bodies;
        while (peek().kind != TokenKind::CloseParen) bodies.push_back(expression());
        if (bodies.empty()) throw parse_error("let needs a body", pos);
        return make_let(std::move(bindings), std::move(bodies), pos);
    }

    ExprPtr if_form(SourcePos pos) {
        ExprPtr cond = expression();
        if (cond->kind != ExprKind::PrimOp || cond->name != "<")
            throw parse_error("if condition must have the form (< e e)", pos);
        ExprPtr then_branch = expression();
        ExprPtr else_branch = expression();
        if (peek().kind != TokenKind::CloseParen)
            throw parse_error("if takes exactly three arguments", pos);
        return make_if(std::move(cond), std::move(then_branch), std::move(else_branch), pos);
    }

    // Parses "(dist e ... e)" for sample/observe operands.
    std::pair<std::string, std::vector<ExprPtr>> dist_object(bool allow_factor) {
        SourcePos pos = peek().pos;
        expect(TokenKind::OpenParen, "'(' to open a distribution object");
        const Token& head = peek();
        if (head.kind != TokenKind::Symbol || !dist_table().count(head.text))
            throw parse_error("expected a distribution constructor", head.pos);
        next();
        if (head.text == "factor" && !allow_factor)
            throw parse_error("factor can only be used with observe", head.pos);
        std::vector<ExprPtr> args;
        while (peek().kind != TokenKind::CloseParen) args.push_back(expression());
        if (args.size() != dist_table().at(head.text))
            throw parse_error("wrong number of arguments for '" + head.text + "'", pos);
        expect(TokenKind::CloseParen, "')'");
        return {head.text, std::move(args)};
    }

    ExprPtr sample_form(SourcePos pos) {
        auto [dist, args] = dist_object(/*allow_factor=*/false);
        if (peek().kind != TokenKind::CloseParen)
            throw parse_error("sample takes exactly one distribution object", pos);
        return make_sample(dist, std::move(args), pos);
    }

    ExprPtr observe_form(SourcePos pos) {
        auto [dist, args] = dist_object(/*allow_factor=*/true);
        ExprPtr observed = expression();
        if (peek().kind != TokenKind::CloseParen)
            throw parse_error("observe takes a distribution object and an observed value", pos);
        if (observed->kind == ExprKind::Var && observed->name == "_") {
            if (dist != "factor")
                throw parse_error("'_' observed value is only valid with factor", pos);
            observed = make_const(0.0, observed->pos);
        }
        return make_observe(dist, std::move(args), std::move(observed), pos);
    }
};

}  // namespace

ExprPtr parse_tokens(const std::vector<Token>& tokens) {
    return Parser(tokens).run();
}

ExprPtr parse_text(std::string_view source) {
    return parse_tokens(tokenize(source));
}

bool is_core_op(const std::string& name) {
    return name == "+" || name == "-" || name == "*" || name == "/" ||
           name == "exp" || name == "log" || name == "sqrt";
}

bool is_distribution_name(const std::string& name) {
    return dist_table().count(name) > 0;
}

}  // namespace lfppl
