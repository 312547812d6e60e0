#include "cline/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "cline/error.hpp"
#include "cline/line.hpp"
#include "term_node.hpp"

namespace cline {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v)
{
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t hash_text(const std::string& s)
{
    return std::hash<std::string>{}(s);
}

std::shared_ptr<TermNode> make_node(TermKind kind)
{
    auto node = std::make_shared<TermNode>();
    node->kind = kind;
    return node;
}

Term finish(std::shared_ptr<TermNode> node)
{
    std::uint64_t h = mix(0x51ed270b, static_cast<std::uint64_t>(node->kind));
    h = mix(h, node->n);
    for (const Term& c : node->children)
        h = mix(h, c.hash());
    for (const FiberException& e : node->exceptions) {
        h = mix(h, hash_text(e.point.to_string()));
        h = mix(h, e.fiber.hash());
    }
    if (node->kind == TermKind::Ordinal)
        h = mix(h, hash_text(node->ordinal.to_string()));
    node->hash = h;
    return Term(std::shared_ptr<const TermNode>(std::move(node)));
}

std::vector<FiberException> check_exceptions(const Term& base, std::vector<FiberException> exc)
{
    for (const auto& e : exc)
        validate_point(base, e.point);
    std::sort(exc.begin(), exc.end(), [&](const FiberException& a, const FiberException& b) {
        return compare(base, a.point, b.point) < 0;
    });
    for (std::size_t i = 1; i < exc.size(); ++i)
        if (exc[i].point == exc[i - 1].point)
            throw ValidationError("duplicate exception point " + exc[i].point.to_string());
    return exc;
}

const Term& single_instance()
{
    static const Term t = finish(make_node(TermKind::Single));
    return t;
}

void require_kind(const TermNode* n, std::initializer_list<TermKind> kinds, const char* what)
{
    for (TermKind k : kinds)
        if (n->kind == k)
            return;
    throw ValidationError(std::string("term accessor '") + what + "' used on the wrong kind");
}

}  // namespace

Term::Term() : node_(single_instance().node_) {}

Term Term::single()
{
    return single_instance();
}

Term Term::chain(std::uint64_t n)
{
    if (n == 0)
        throw ValidationError("chain needs at least one point");
    auto node = make_node(TermKind::Chain);
    node->n = n;
    return finish(std::move(node));
}

Term Term::concat(std::vector<Term> parts)
{
    if (parts.empty())
        throw ValidationError("concat needs at least one part");
    auto node = make_node(TermKind::Concat);
    node->children = std::move(parts);
    return finish(std::move(node));
}

Term Term::omega_up(Term block, Term top)
{
    auto node = make_node(TermKind::OmegaUp);
    node->children = {std::move(block), std::move(top)};
    return finish(std::move(node));
}

Term Term::rev(Term inner)
{
    auto node = make_node(TermKind::Rev);
    node->children = {std::move(inner)};
    return finish(std::move(node));
}

Term Term::lexsum(Term base, Term default_fiber, std::vector<Exception> exceptions)
{
    auto node = make_node(TermKind::LexSum);
    node->exceptions = check_exceptions(base, std::move(exceptions));
    node->children = {std::move(base), std::move(default_fiber)};
    return finish(std::move(node));
}

Term Term::ordinal_segment(const Ordinal& alpha)
{
    auto node = make_node(TermKind::Ordinal);
    node->ordinal = alpha;
    node->children = {compile_ordinal_segment(alpha)};
    return finish(std::move(node));
}

Term Term::omega_iter(Term seed, Term base, std::vector<Exception> exceptions, Term top)
{
    auto node = make_node(TermKind::OmegaIter);
    node->exceptions = check_exceptions(base, std::move(exceptions));
    node->children = {std::move(seed), std::move(base), std::move(top)};
    return finish(std::move(node));
}

TermKind Term::kind() const
{
    return node_->kind;
}

std::uint64_t Term::chain_size() const
{
    require_kind(node_.get(), {TermKind::Chain}, "chain_size");
    return node_->n;
}

const std::vector<Term>& Term::parts() const
{
    require_kind(node_.get(), {TermKind::Concat}, "parts");
    return node_->children;
}

Term Term::block(std::uint64_t k) const
{
    require_kind(node_.get(), {TermKind::OmegaUp, TermKind::OmegaIter}, "block");
    if (node_->kind == TermKind::OmegaUp)
        return node_->children[0];
    std::lock_guard<std::mutex> lock(node_->block_mutex);
    auto& blocks = node_->blocks;
    if (blocks.empty())
        blocks.push_back(node_->children[0]);
    while (blocks.size() <= k) {
        Term next = Term::lexsum(node_->children[1], blocks.back(), node_->exceptions);
        blocks.push_back(std::move(next));
    }
    return blocks[k];
}

const Term& Term::top() const
{
    require_kind(node_.get(), {TermKind::OmegaUp, TermKind::OmegaIter}, "top");
    return node_->kind == TermKind::OmegaUp ? node_->children[1] : node_->children[2];
}

const Term& Term::inner() const
{
    require_kind(node_.get(), {TermKind::Rev}, "inner");
    return node_->children[0];
}

const Term& Term::base() const
{
    require_kind(node_.get(), {TermKind::LexSum, TermKind::OmegaIter}, "base");
    return node_->kind == TermKind::LexSum ? node_->children[0] : node_->children[1];
}

const Term& Term::default_fiber() const
{
    require_kind(node_.get(), {TermKind::LexSum}, "default_fiber");
    return node_->children[1];
}

const Term& Term::seed() const
{
    require_kind(node_.get(), {TermKind::OmegaIter}, "seed");
    return node_->children[0];
}

const std::vector<FiberException>& Term::exceptions() const
{
    require_kind(node_.get(), {TermKind::LexSum, TermKind::OmegaIter}, "exceptions");
    return node_->exceptions;
}

const Ordinal& Term::ordinal() const
{
    require_kind(node_.get(), {TermKind::Ordinal}, "ordinal");
    return node_->ordinal;
}

const Term& Term::compiled() const
{
    require_kind(node_.get(), {TermKind::Ordinal}, "compiled");
    return node_->children[0];
}

const Term& Term::unwrap() const
{
    const Term* t = this;
    while (t->kind() == TermKind::Ordinal)
        t = &t->compiled();
    return *t;
}

int Term::exception_index(const LinePoint& b) const
{
    const auto& exc = exceptions();
    for (std::size_t i = 0; i < exc.size(); ++i)
        if (exc[i].point == b)
            return static_cast<int>(i);
    return -1;
}

const Term& Term::fiber_at(const LinePoint& b) const
{
    int i = exception_index(b);
    return i < 0 ? default_fiber() : node_->exceptions[static_cast<std::size_t>(i)].fiber;
}

std::uint64_t Term::hash() const
{
    return node_->hash;
}

bool operator==(const Term& a, const Term& b)
{
    const TermNode* x = a.node();
    const TermNode* y = b.node();
    if (x == y)
        return true;
    if (x->hash != y->hash || x->kind != y->kind || x->n != y->n)
        return false;
    if (x->kind == TermKind::Ordinal)
        return x->ordinal == y->ordinal;
    if (x->children.size() != y->children.size() || x->exceptions.size() != y->exceptions.size())
        return false;
    for (std::size_t i = 0; i < x->children.size(); ++i)
        if (!(x->children[i] == y->children[i]))
            return false;
    for (std::size_t i = 0; i < x->exceptions.size(); ++i) {
        if (!(x->exceptions[i].point == y->exceptions[i].point))
            return false;
        if (!(x->exceptions[i].fiber == y->exceptions[i].fiber))
            return false;
    }
    return true;
}

std::string Term::to_sexpr() const
{
    const TermNode* n = node_.get();
    auto exceptions_text = [&]() {
        std::string out;
        for (const auto& e : n->exceptions)
            out += " :at \"" + e.point.to_string() + "\" " + e.fiber.to_sexpr();
        return out;
    };
    switch (n->kind) {
    case TermKind::Single: return "single";
    case TermKind::Chain: return "(chain " + std::to_string(n->n) + ")";
    case TermKind::Concat: {
        std::string out = "(concat";
        for (const Term& p : n->children)
            out += " " + p.to_sexpr();
        return out + ")";
    }
    case TermKind::OmegaUp:
        return "(omega-up " + n->children[0].to_sexpr() + " " + n->children[1].to_sexpr() + ")";
    case TermKind::Rev: return "(rev " + n->children[0].to_sexpr() + ")";
    case TermKind::LexSum:
        return "(lexsum " + n->children[0].to_sexpr() + " :default " + n->children[1].to_sexpr() +
               exceptions_text() + ")";
    case TermKind::Ordinal: return "(ordinal \"" + n->ordinal.to_string() + "\")";
    case TermKind::OmegaIter:
        return "(omega-iter " + n->children[0].to_sexpr() + " " + n->children[1].to_sexpr() + " " +
               n->children[2].to_sexpr() + exceptions_text() + ")";
    }
    return "?";
}

Term term_b()
{
    static const Term b = Term::omega_up(Term::single(), Term::rev(Term::omega_up(Term::single(), Term::single())));
    return b;
}

LinePoint b_zero()
{
    return LinePoint({Step::top(), Step::top()});
}

Term term_b_n(std::uint64_t n)
{
    if (n == 0)
        throw ValidationError("B_n needs n >= 1");
    Term t = term_b();
    for (std::uint64_t i = 2; i <= n; ++i)
        t = Term::lexsum(term_b(), t, {{b_zero(), Term::single()}});
    return t;
}

Term term_bigode_l()
{
    return Term::omega_iter(term_b(), term_b(), {{b_zero(), Term::single()}}, Term::single());
}

Term term_double(Term x)
{
    return Term::lexsum(std::move(x), Term::chain(2));
}

namespace {

struct Token {
    enum class Kind { Open, Close, Atom, String, End } kind;
    std::string text;
    std::size_t pos;
};

class TermParser {
public:
    explicit TermParser(std::string_view s) : s_(s) {}

    Term parse_all()
    {
        Term t = term();
        Token end = next();
        if (end.kind != Token::Kind::End)
            throw ParseError("trailing input after term", end.pos);
        return t;
    }

private:
    Token next()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ >= s_.size())
            return {Token::Kind::End, "", pos_};
        std::size_t start = pos_;
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            return {Token::Kind::Open, "(", start};
        }
        if (c == ')') {
            ++pos_;
            return {Token::Kind::Close, ")", start};
        }
        if (c == '"') {
            ++pos_;
            std::string text;
            while (pos_ < s_.size() && s_[pos_] != '"')
                text += s_[pos_++];
            if (pos_ >= s_.size())
                throw ParseError("unterminated string", start);
            ++pos_;
            return {Token::Kind::String, text, start};
        }
        std::string text;
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
               s_[pos_] != ')' && s_[pos_] != '"')
            text += s_[pos_++];
        return {Token::Kind::Atom, text, start};
    }

    Token peek()
    {
        std::size_t save = pos_;
        Token t = next();
        pos_ = save;
        return t;
    }

    std::uint64_t integer(const Token& t)
    {
        if (t.kind != Token::Kind::Atom || t.text.empty())
            throw ParseError("expected an integer", t.pos);
        std::uint64_t v = 0;
        for (char c : t.text) {
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw ParseError("expected an integer, got '" + t.text + "'", t.pos);
            v = v * 10 + static_cast<std::uint64_t>(c - '0');
        }
        return v;
    }

    void expect_close()
    {
        Token t = next();
        if (t.kind != Token::Kind::Close)
            throw ParseError("expected ')'", t.pos);
    }

    LinePoint point_in(const Term& base, const Token& t)
    {
        try {
            if (t.kind == Token::Kind::String)
                return parse_point(t.text);
            if (t.kind != Token::Kind::Atom)
                throw ParseError("expected a point", t.pos);
            if (base.kind() == TermKind::Ordinal)
                return ordinal_point(base, parse_ordinal(t.text));
            return parse_point(t.text);
        } catch (const ParseError& e) {
            throw ParseError(std::string("bad point: ") + e.what(), t.pos);
        } catch (const ValidationError& e) {
            throw ParseError(std::string("bad point: ") + e.what(), t.pos);
        }
    }

    std::vector<FiberException> exception_list(const Term& base)
    {
        std::vector<FiberException> out;
        while (peek().kind == Token::Kind::Atom && peek().text == ":at") {
            next();
            Token pt = next();
            LinePoint p = point_in(base, pt);
            try {
                validate_point(base, p);
            } catch (const ValidationError& e) {
                throw ParseError(std::string("exception point: ") + e.what(), pt.pos);
            }
            out.push_back({p, term()});
        }
        return out;
    }

    Term term()
    {
        Token t = next();
        if (t.kind == Token::Kind::Atom) {
            if (t.text == "single")
                return Term::single();
            throw ParseError("unknown term '" + t.text + "'", t.pos);
        }
        if (t.kind != Token::Kind::Open)
            throw ParseError("expected a term", t.pos);
        Token head = next();
        if (head.kind != Token::Kind::Atom)
            throw ParseError("expected a constructor name", head.pos);
        const std::string& h = head.text;
        Term out;
        try {
            if (h == "single") {
                out = Term::single();
            } else if (h == "chain") {
                Token nt = next();
                std::uint64_t n = integer(nt);
                if (n == 0)
                    throw ParseError("chain needs at least one point", nt.pos);
                out = Term::chain(n);
            } else if (h == "concat") {
                std::vector<Term> parts;
                while (peek().kind != Token::Kind::Close) {
                    if (peek().kind == Token::Kind::End)
                        throw ParseError("unterminated concat", peek().pos);
                    parts.push_back(term());
                }
                if (parts.empty())
                    throw ParseError("concat needs at least one part", head.pos);
                out = Term::concat(std::move(parts));
            } else if (h == "omega-up") {
                Term block = term();
                Term top = term();
                out = Term::omega_up(block, top);
            } else if (h == "rev") {
                out = Term::rev(term());
            } else if (h == "lexsum") {
                Term base = term();
                Token kw = next();
                if (kw.kind != Token::Kind::Atom || kw.text != ":default")
                    throw ParseError("expected :default", kw.pos);
                Term fiber = term();
                auto exc = exception_list(base);
                out = Term::lexsum(base, fiber, std::move(exc));
            } else if (h == "ordinal") {
                Token ot = next();
                if (ot.kind != Token::Kind::String && ot.kind != Token::Kind::Atom)
                    throw ParseError("expected ordinal notation", ot.pos);
                Ordinal a;
                try {
                    a = parse_ordinal(ot.text);
                } catch (const ParseError& e) {
                    throw ParseError(std::string("bad ordinal: ") + e.what(), ot.pos + e.position());
                }
                if (a.degree() > 64)
                    throw ParseError("ordinal exponent too large", ot.pos);
                out = Term::ordinal_segment(a);
            } else if (h == "omega-iter") {
                Term seed = term();
                Term base = term();
                Term top = term();
                auto exc = exception_list(base);
                out = Term::omega_iter(seed, base, std::move(exc), top);
            } else if (h == "b") {
                Token nt = next();
                std::uint64_t n = integer(nt);
                if (n == 0 || n > 4096)
                    throw ParseError("(b n) needs 1 <= n <= 4096", nt.pos);
                out = term_b_n(n);
            } else if (h == "double") {
                out = term_double(term());
            } else if (h == "bigode-l") {
                out = term_bigode_l();
            } else {
                throw ParseError("unknown constructor '" + h + "'", head.pos);
            }
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), head.pos);
        }
        expect_close();
        return out;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(std::string_view text)
{
    return TermParser(text).parse_all();
}

}  // namespace cline
