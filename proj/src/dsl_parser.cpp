#include "fuselage/dsl.hpp"

#include <algorithm>
#include <limits>

namespace fuselage::dsl {

namespace {

enum class Tok {
    Ident,
    String,
    Int,
    LBrace,
    RBrace,
    Arrow,
    Bang,
    Plus,
    Minus,
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Eof,
};

const char* describe(Tok t)
{
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::Int: return "integer";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Arrow: return "'->'";
    case Tok::Bang: return "'!'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Eq: return "'='";
    case Tok::Ge: return "'>='";
    case Tok::Gt: return "'>'";
    case Tok::Eof: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    std::int64_t value = 0;
    SourceSpan span;
};

// Length in bytes of the UTF-8 sequence starting at s[i], or 0 if invalid.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i)
{
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80)
        return 1;
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
    else return 0;
    if (i + len > s.size())
        return 0;
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80)
            return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000))
        return 0;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        return 0;
    return len;
}

bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    Lexer(std::string_view src, const std::string& file, Diagnostics& diags)
        : src_(src), file_(file), diags_(diags)
    {
    }

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            if (pos_ >= src_.size()) {
                Token eof;
                eof.kind = Tok::Eof;
                eof.span = span_here(0);
                out.push_back(eof);
                return out;
            }
            if (auto t = next())
                out.push_back(std::move(*t));
        }
    }

private:
    SourceSpan span_here(std::uint32_t length) const { return {file_, line_, col_, length}; }

    void error(SourceSpan span, const char* code, std::string msg)
    {
        diags_.push_back({Severity::Error, code, std::move(msg), std::move(span), {}});
    }

    // Advances over one character (one code point, or one byte if invalid).
    void bump()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
            ++pos_;
            return;
        }
        std::size_t n = utf8_sequence_length(src_, pos_);
        pos_ += n == 0 ? 1 : n;
        ++col_;
    }

    void skip_trivia()
    {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    check_utf8();
                    bump();
                }
            } else {
                break;
            }
        }
    }

    void check_utf8()
    {
        if (utf8_sequence_length(src_, pos_) == 0)
            error(span_here(1), "lex-invalid-utf8", "invalid UTF-8 byte sequence");
    }

    std::optional<Token> next()
    {
        Token t;
        t.span = span_here(0);
        const std::uint32_t start_col = col_;
        const char c = src_[pos_];
        auto single = [&](Tok k) {
            t.kind = k;
            bump();
            t.span.length = 1;
            return t;
        };
        auto peek = [&](std::size_t off) { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; };

        if (is_alpha(c)) {
            t.kind = Tok::Ident;
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                if (d == '-' && peek(1) == '>')
                    break;
                if (!(is_alpha(d) || is_digit(d) || d == '-'))
                    break;
                t.text += d;
                bump();
            }
            t.span.length = col_ - start_col;
            return t;
        }
        if (is_digit(c)) {
            t.kind = Tok::Int;
            bool overflow = false;
            std::int64_t v = 0;
            while (pos_ < src_.size() && is_digit(src_[pos_])) {
                int digit = src_[pos_] - '0';
                if (v > (std::numeric_limits<std::int64_t>::max() - digit) / 10)
                    overflow = true;
                else
                    v = v * 10 + digit;
                t.text += src_[pos_];
                bump();
            }
            t.span.length = col_ - start_col;
            t.value = v;
            if (overflow)
                error(t.span, "lex-int-overflow", "integer literal is too large");
            return t;
        }
        switch (c) {
        case '"': return string_literal();
        case '{': return single(Tok::LBrace);
        case '}': return single(Tok::RBrace);
        case '!': return single(Tok::Bang);
        case '+': return single(Tok::Plus);
        case '=': return single(Tok::Eq);
        case '-':
            if (peek(1) == '>') {
                bump();
                bump();
                t.kind = Tok::Arrow;
                t.span.length = 2;
                return t;
            }
            return single(Tok::Minus);
        case '<':
        case '>': {
            const bool lt = c == '<';
            bump();
            if (pos_ < src_.size() && src_[pos_] == '=') {
                bump();
                t.kind = lt ? Tok::Le : Tok::Ge;
                t.span.length = 2;
            } else {
                t.kind = lt ? Tok::Lt : Tok::Gt;
                t.span.length = 1;
            }
            return t;
        }
        default:
            break;
        }
        if (utf8_sequence_length(src_, pos_) == 0)
            error(span_here(1), "lex-invalid-utf8", "invalid UTF-8 byte sequence");
        else
            error(span_here(1), "lex-unexpected-char", "unexpected character");
        bump();
        return std::nullopt;
    }

    Token string_literal()
    {
        Token t;
        t.kind = Tok::String;
        t.span = span_here(0);
        const SourceSpan open = span_here(1);
        const std::uint32_t start_col = col_;
        bump(); // opening quote
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') {
                error(open, "lex-unterminated-string", "unterminated string literal");
                t.span.length = col_ - start_col;
                return t;
            }
            char c = src_[pos_];
            if (c == '"') {
                bump();
                t.span.length = col_ - start_col;
                return t;
            }
            if (c == '\\') {
                SourceSpan esc = span_here(2);
                bump();
                if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\\')) {
                    t.text += src_[pos_];
                    bump();
                } else {
                    if (pos_ >= src_.size() || src_[pos_] == '\n')
                        esc.length = 1;
                    error(esc, "lex-bad-escape", "only \\\" and \\\\ escapes are allowed");
                }
                continue;
            }
            std::size_t n = utf8_sequence_length(src_, pos_);
            if (n == 0) {
                error(span_here(1), "lex-invalid-utf8", "invalid UTF-8 byte sequence");
                bump();
                continue;
            }
            t.text.append(src_.substr(pos_, n));
            bump();
        }
    }

    std::string_view src_;
    const std::string& file_;
    Diagnostics& diags_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1;
    std::uint32_t col_ = 1;
};

struct SyntaxError {};
struct TooManyErrors {};

class Parser {
public:
    Parser(std::vector<Token> toks, Diagnostics& diags) : toks_(std::move(toks)), diags_(diags) {}

    std::optional<Ast> run()
    {
        Ast ast;
        try {
            header(ast);
            declarations(ast);
        } catch (const SyntaxError&) {
            recover();
        } catch (const TooManyErrors&) {
            return std::nullopt;
        }
        try {
            if (!at_keyword("node") && !failed_)
                fail_expected("'node'");
        } catch (const SyntaxError&) {
            recover();
        } catch (const TooManyErrors&) {
            return std::nullopt;
        }
        while (peek().kind != Tok::Eof) {
            try {
                if (!at_keyword("node"))
                    fail_expected("'node'");
                ast.nodes.push_back(node());
            } catch (const SyntaxError&) {
                recover();
            } catch (const TooManyErrors&) {
                return std::nullopt;
            }
        }
        if (failed_)
            return std::nullopt;
        return ast;
    }

private:
    const Token& peek(std::size_t off = 0) const
    {
        std::size_t i = std::min(pos_ + off, toks_.size() - 1);
        return toks_[i];
    }

    Token take()
    {
        Token t = peek();
        if (pos_ < toks_.size() - 1)
            ++pos_;
        return t;
    }

    bool at_keyword(std::string_view kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

    [[noreturn]] void fail_expected(const std::string& what)
    {
        const Token& t = peek();
        std::string found = t.kind == Tok::Ident ? "'" + t.text + "'" : describe(t.kind);
        failed_ = true;
        diags_.push_back({Severity::Error, "parse-expected", "expected " + what + ", found " + found, t.span, {}});
        if (error_count(diags_) >= kMaxErrorsPerFile)
            throw TooManyErrors{};
        throw SyntaxError{};
    }

    // Skips to the next `node` keyword that begins a definition.
    void recover()
    {
        if (peek().kind != Tok::Eof)
            take();
        while (peek().kind != Tok::Eof && !at_keyword("node"))
            take();
    }

    Token expect(Tok k)
    {
        if (peek().kind != k)
            fail_expected(describe(k));
        return take();
    }

    void expect_keyword(std::string_view kw)
    {
        if (!at_keyword(kw))
            fail_expected("'" + std::string(kw) + "'");
        take();
    }

    Name name()
    {
        Token t = expect(Tok::Ident);
        return {t.text, t.span};
    }

    StringLit string()
    {
        Token t = expect(Tok::String);
        return {t.text, t.span};
    }

    std::int64_t integer()
    {
        bool neg = false;
        if (peek().kind == Tok::Minus) {
            take();
            neg = true;
        }
        if (peek().kind != Tok::Int)
            fail_expected("integer");
        std::int64_t v = take().value;
        return neg ? -v : v;
    }

    void header(Ast& ast)
    {
        if (!at_keyword("story"))
            fail_expected("'story'");
        ast.span = take().span;
        ast.title = string();
        expect_keyword("start");
        ast.start = name();
    }

    void declarations(Ast& ast)
    {
        while (true) {
            if (at_keyword("meter")) {
                take();
                AstMeter m;
                m.name = name();
                expect_keyword("min");
                m.min = integer();
                expect_keyword("max");
                m.max = integer();
                expect_keyword("init");
                m.init = integer();
                ast.meters.push_back(std::move(m));
            } else if (at_keyword("item")) {
                take();
                AstItem i;
                i.name = name();
                if (peek().kind == Tok::String)
                    i.label = string();
                ast.items.push_back(std::move(i));
            } else if (at_keyword("flag")) {
                take();
                ast.flags.push_back(name());
            } else {
                return;
            }
        }
    }

    bool at_effect() const
    {
        return at_keyword("set") || at_keyword("clear") || at_keyword("give") || at_keyword("take") || at_keyword("meter");
    }

    AstEffect effect()
    {
        AstEffect e;
        Token kw = take();
        e.span = kw.span;
        if (kw.text == "set") e.kind = Effect::Kind::SetFlag;
        else if (kw.text == "clear") e.kind = Effect::Kind::ClearFlag;
        else if (kw.text == "give") e.kind = Effect::Kind::GiveItem;
        else if (kw.text == "take") e.kind = Effect::Kind::TakeItem;
        else e.kind = Effect::Kind::MeterDelta;
        e.name = name();
        if (e.kind == Effect::Kind::MeterDelta) {
            bool neg = false;
            if (peek().kind == Tok::Plus)
                take();
            else if (peek().kind == Tok::Minus) {
                take();
                neg = true;
            } else
                fail_expected("'+' or '-'");
            if (peek().kind != Tok::Int)
                fail_expected("integer");
            std::int64_t v = take().value;
            e.delta = neg ? -v : v;
        }
        return e;
    }

    std::vector<AstEffect> effects()
    {
        std::vector<AstEffect> out;
        while (at_effect())
            out.push_back(effect());
        return out;
    }

    AstGuard guard()
    {
        AstGuard g;
        g.span = take().span; // `if`
        bool negate = false;
        if (peek().kind == Tok::Bang) {
            take();
            negate = true;
        }
        if (at_keyword("flag")) {
            take();
            g.kind = negate ? Guard::Kind::FlagClear : Guard::Kind::FlagSet;
            g.name = name();
            return g;
        }
        if (negate)
            fail_expected("'flag'");
        if (at_keyword("item")) {
            take();
            g.kind = Guard::Kind::ItemHeld;
            g.name = name();
            return g;
        }
        if (at_keyword("meter")) {
            take();
            g.kind = Guard::Kind::Meter;
            g.name = name();
            switch (peek().kind) {
            case Tok::Lt: g.cmp = "<"; break;
            case Tok::Le: g.cmp = "<="; break;
            case Tok::Eq: g.cmp = "="; break;
            case Tok::Ge: g.cmp = ">="; break;
            case Tok::Gt: g.cmp = ">"; break;
            default: fail_expected("comparison operator");
            }
            take();
            g.value = integer();
            return g;
        }
        fail_expected("'flag', 'item' or 'meter'");
    }

    AstNode node()
    {
        AstNode n;
        n.span = take().span; // `node`
        n.id = name();
        Token kind = expect(Tok::Ident);
        if (kind.text == "narration") {
            n.body = AstNarration{};
        } else if (kind.text == "choice") {
            n.body = AstChoice{};
        } else if (kind.text == "minigame") {
            AstMiniGame mg;
            mg.game = name();
            n.body = std::move(mg);
        } else if (kind.text == "ending") {
            AstEnding e;
            e.ending = name();
            n.body = std::move(e);
        } else {
            --pos_;
            fail_expected("node kind ('narration', 'choice', 'minigame' or 'ending')");
        }
        if (at_keyword("channel")) {
            take();
            n.channel = name();
        }
        expect(Tok::LBrace);
        std::visit([&](auto& b) { body(b); }, n.body);
        expect(Tok::RBrace);
        return n;
    }

    void body(AstNarration& b)
    {
        do {
            expect_keyword("text");
            b.pages.push_back(string());
        } while (at_keyword("text"));
        expect_keyword("next");
        b.next = name();
        b.effects = effects();
    }

    void body(AstChoice& b)
    {
        expect_keyword("prompt");
        b.prompt = string();
        while (at_keyword("option")) {
            take();
            AstOption o;
            o.label = string();
            while (at_keyword("if"))
                o.guards.push_back(guard());
            expect(Tok::Arrow);
            o.target = name();
            o.effects = effects();
            b.options.push_back(std::move(o));
        }
    }

    void body(AstMiniGame& b)
    {
        if (!at_keyword("params"))
            fail_expected("'params'");
        b.params_span = take().span;
        expect(Tok::LBrace);
        while (peek().kind == Tok::Ident) {
            AstParam p;
            p.key = name();
            const Token& v = peek();
            p.value.span = v.span;
            if (v.kind == Tok::String) {
                p.value.type = ParamValue::Type::String;
                p.value.text = take().text;
            } else if (v.kind == Tok::Ident) {
                p.value.type = ParamValue::Type::Ident;
                p.value.text = take().text;
            } else if (v.kind == Tok::Int || v.kind == Tok::Minus) {
                p.value.type = ParamValue::Type::Int;
                p.value.integer = integer();
                p.value.text = std::to_string(p.value.integer);
            } else {
                fail_expected("parameter value");
            }
            b.params.push_back(std::move(p));
        }
        expect(Tok::RBrace);
        expect_keyword("success");
        expect(Tok::Arrow);
        b.success = name();
        expect_keyword("failure");
        expect(Tok::Arrow);
        b.failure = name();
    }

    void body(AstEnding& b)
    {
        expect_keyword("text");
        b.text = string();
    }

    std::vector<Token> toks_;
    Diagnostics& diags_;
    std::size_t pos_ = 0;
    bool failed_ = false;
};

} // namespace

ParseResult parse(std::string_view source, std::string file)
{
    ParseResult result;
    Diagnostics lex_diags;
    auto tokens = Lexer(source, file, lex_diags).run();

    Diagnostics parse_diags;
    // Lexer errors already count toward the cap.
    parse_diags = lex_diags;
    auto ast = Parser(std::move(tokens), parse_diags).run();

    auto& diags = parse_diags;
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::pair(a.span->line, a.span->column) < std::pair(b.span->line, b.span->column);
    });
    if (diags.size() > kMaxErrorsPerFile)
        diags.resize(kMaxErrorsPerFile);
    result.diagnostics = std::move(diags);
    if (!has_errors(result.diagnostics))
        result.ast = std::move(ast);
    return result;
}

} // namespace fuselage::dsl
