#include "cline/ordinal.hpp"

#include <cctype>

#include "cline/error.hpp"

namespace cline {

Ordinal Ordinal::finite(std::uint64_t n)
{
    Ordinal o;
    if (n > 0)
        o.terms_.push_back({0, n});
    return o;
}

Ordinal Ordinal::power(std::uint32_t e, std::uint64_t c)
{
    Ordinal o;
    if (c > 0)
        o.terms_.push_back({e, c});
    return o;
}

Ordinal Ordinal::from_terms(std::vector<Term> terms)
{
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].coef == 0)
            throw ValidationError("ordinal term with zero coefficient");
        if (i > 0 && terms[i].exp >= terms[i - 1].exp)
            throw ValidationError("ordinal exponents must strictly decrease");
    }
    Ordinal o;
    o.terms_ = std::move(terms);
    return o;
}

std::uint64_t Ordinal::finite_value() const
{
    if (!is_finite())
        throw ValidationError("ordinal " + to_string() + " is not finite");
    return terms_.empty() ? 0 : terms_[0].coef;
}

std::string Ordinal::to_string() const
{
    if (terms_.empty())
        return "0";
    std::string out;
    for (const Term& t : terms_) {
        if (!out.empty())
            out += '+';
        if (t.exp == 0) {
            out += std::to_string(t.coef);
            continue;
        }
        out += 'w';
        if (t.exp > 1)
            out += '^' + std::to_string(t.exp);
        if (t.coef > 1)
            out += '.' + std::to_string(t.coef);
    }
    return out;
}

std::strong_ordering compare(const Ordinal& a, const Ordinal& b)
{
    const auto& x = a.terms();
    const auto& y = b.terms();
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i].exp != y[i].exp)
            return x[i].exp <=> y[i].exp;
        if (x[i].coef != y[i].coef)
            return x[i].coef <=> y[i].coef;
    }
    return x.size() <=> y.size();
}

std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b)
{
    return compare(a, b);
}

Ordinal add(const Ordinal& a, const Ordinal& b)
{
    if (b.is_zero())
        return a;
    const auto& y = b.terms();
    const std::uint32_t lead = y.front().exp;
    std::vector<Ordinal::Term> out;
    for (const auto& t : a.terms()) {
        if (t.exp < lead)
            break;
        out.push_back(t);
    }
    std::size_t start = 0;
    if (!out.empty() && out.back().exp == lead) {
        out.back().coef += y.front().coef;
        start = 1;
    }
    for (std::size_t i = start; i < y.size(); ++i)
        out.push_back(y[i]);
    return Ordinal::from_terms(std::move(out));
}

Ordinal successor(const Ordinal& a)
{
    return add(a, Ordinal::finite(1));
}

Ordinal left_subtract(const Ordinal& a, const Ordinal& b)
{
    if (compare(a, b) > 0)
        throw ValidationError("left_subtract: " + a.to_string() + " > " + b.to_string());
    const auto& x = a.terms();
    const auto& y = b.terms();
    std::size_t i = 0;
    while (i < x.size() && i < y.size() && x[i] == y[i])
        ++i;
    std::vector<Ordinal::Term> out;
    if (i < x.size()) {
        // a < b and they first differ at i, so y[i] exists and is larger.
        if (x[i].exp == y[i].exp) {
            out.push_back({y[i].exp, y[i].coef - x[i].coef});
            ++i;
        }
    }
    for (; i < y.size(); ++i)
        out.push_back(y[i]);
    return Ordinal::from_terms(std::move(out));
}

LimitSplit split_limit(const Ordinal& a)
{
    if (!a.is_limit())
        throw ValidationError("ordinal " + a.to_string() + " is not a limit");
    std::vector<Ordinal::Term> terms = a.terms();
    Ordinal::Term last = terms.back();
    terms.pop_back();
    if (last.coef > 1)
        terms.push_back({last.exp, last.coef - 1});
    return {Ordinal::from_terms(std::move(terms)), last.exp};
}

Ordinal fundamental_sequence(const Ordinal& a, std::uint64_t k)
{
    LimitSplit s = split_limit(a);
    return add(s.base, Ordinal::power(s.exp - 1, k + 1));
}

Ordinal interval_type(const Ordinal& b, const Ordinal& g)
{
    if (compare(b, g) >= 0)
        throw ValidationError("interval_type requires " + b.to_string() + " < " + g.to_string());
    return left_subtract(successor(b), g);
}

namespace {

class OrdinalParser {
public:
    explicit OrdinalParser(std::string_view s) : s_(s) {}

    Ordinal parse()
    {
        std::vector<Ordinal::Term> terms;
        skip_ws();
        if (pos_ == s_.size())
            throw ParseError("empty ordinal", pos_);
        for (;;) {
            std::size_t at = pos_;
            Ordinal::Term t = term();
            if (!terms.empty() && t.exp >= terms.back().exp)
                throw ParseError("ordinal exponents must strictly decrease", at);
            if (t.coef == 0) {
                if (!terms.empty() || peek() == '+')
                    throw ParseError("zero term inside ordinal sum", at);
            } else {
                terms.push_back(t);
            }
            skip_ws();
            if (pos_ == s_.size())
                break;
            if (s_[pos_] != '+')
                throw ParseError("expected '+'", pos_);
            ++pos_;
            skip_ws();
        }
        return Ordinal::from_terms(std::move(terms));
    }

private:
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    std::uint64_t number()
    {
        std::size_t start = pos_;
        std::uint64_t v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            std::uint64_t d = static_cast<std::uint64_t>(s_[pos_] - '0');
            if (v > (UINT64_MAX - d) / 10)
                throw ParseError("number too large", start);
            v = v * 10 + d;
            ++pos_;
        }
        if (pos_ == start)
            throw ParseError("expected a number", pos_);
        return v;
    }

    Ordinal::Term term()
    {
        if (peek() == 'w') {
            ++pos_;
            std::uint64_t e = 1;
            std::uint64_t c = 1;
            if (peek() == '^') {
                ++pos_;
                std::size_t at = pos_;
                e = number();
                if (e == 0 || e > UINT32_MAX)
                    throw ParseError("bad exponent", at);
            }
            if (peek() == '.') {
                ++pos_;
                std::size_t at = pos_;
                c = number();
                if (c == 0)
                    throw ParseError("zero coefficient", at);
            }
            return {static_cast<std::uint32_t>(e), c};
        }
        return {0, number()};
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Ordinal parse_ordinal(std::string_view text)
{
    return OrdinalParser(text).parse();
}

}  // namespace cline
