#include "cline/rational.hpp"

#include <cctype>

#include "cline/error.hpp"

namespace cline {

Rational parse_rational(std::string_view text)
{
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '-' || text[i] == '+'))
        ++i;
    std::size_t digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        ++i;
        ++digits;
    }
    if (digits == 0)
        throw ParseError("expected digits in rational '" + std::string(text) + "'", i);
    if (i < text.size()) {
        if (text[i] != '/')
            throw ParseError("unexpected character in rational '" + std::string(text) + "'", i);
        ++i;
        std::size_t den_digits = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            ++den_digits;
        }
        if (den_digits == 0 || i != text.size())
            throw ParseError("bad denominator in rational '" + std::string(text) + "'", i);
    }
    Rational q;
    std::string s(text);
    if (!s.empty() && s[0] == '+')
        s.erase(0, 1);
    if (q.set_str(s, 10) != 0)
        throw ParseError("invalid rational '" + std::string(text) + "'", 0);
    if (q.get_den() == 0)
        throw ParseError("zero denominator in '" + std::string(text) + "'", 0);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q)
{
    return q.get_str();
}

}  // namespace cline
