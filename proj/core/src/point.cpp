#include "cline/point.hpp"

#include <cctype>

#include "cline/error.hpp"

namespace cline {

Step Step::lex(LinePoint base)
{
    return {StepKind::Lex, 0, std::make_shared<const LinePoint>(std::move(base))};
}

LinePoint LinePoint::with_prefix(const Step& s) const
{
    std::vector<Step> out;
    out.reserve(steps_.size() + 1);
    out.push_back(s);
    out.insert(out.end(), steps_.begin(), steps_.end());
    return LinePoint(std::move(out));
}

LinePoint LinePoint::with_prefix(const std::vector<Step>& prefix) const
{
    std::vector<Step> out;
    out.reserve(prefix.size() + steps_.size());
    out.insert(out.end(), prefix.begin(), prefix.end());
    out.insert(out.end(), steps_.begin(), steps_.end());
    return LinePoint(std::move(out));
}

LinePoint LinePoint::suffix(std::size_t from) const
{
    if (from >= steps_.size())
        return LinePoint();
    return LinePoint(std::vector<Step>(steps_.begin() + static_cast<std::ptrdiff_t>(from), steps_.end()));
}

std::string LinePoint::to_string() const
{
    if (steps_.empty())
        return "_";
    std::string out;
    for (const Step& s : steps_) {
        if (!out.empty())
            out += '.';
        switch (s.kind) {
        case StepKind::Index: out += 'i' + std::to_string(s.n); break;
        case StepKind::Part: out += 'p' + std::to_string(s.n); break;
        case StepKind::Copy: out += 'c' + std::to_string(s.n); break;
        case StepKind::Top: out += 'T'; break;
        case StepKind::Lex: out += "L(" + s.base->to_string() + ")"; break;
        }
    }
    return out;
}

std::strong_ordering structural_compare(const Step& a, const Step& b)
{
    if (a.kind != b.kind)
        return a.kind <=> b.kind;
    if (a.kind == StepKind::Lex)
        return *a.base <=> *b.base;
    return a.n <=> b.n;
}

bool operator==(const Step& a, const Step& b)
{
    return structural_compare(a, b) == 0;
}

bool operator==(const LinePoint& a, const LinePoint& b)
{
    if (a.steps_.size() != b.steps_.size())
        return false;
    for (std::size_t i = 0; i < a.steps_.size(); ++i)
        if (!(a.steps_[i] == b.steps_[i]))
            return false;
    return true;
}

std::strong_ordering operator<=>(const LinePoint& a, const LinePoint& b)
{
    std::size_t n = std::min(a.steps_.size(), b.steps_.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto c = structural_compare(a.steps_[i], b.steps_[i]);
        if (c != 0)
            return c;
    }
    return a.steps_.size() <=> b.steps_.size();
}

namespace {

class PointParser {
public:
    explicit PointParser(std::string_view s) : s_(s) {}

    LinePoint parse_all()
    {
        LinePoint p = path();
        if (pos_ != s_.size())
            throw ParseError("trailing characters in point", pos_);
        return p;
    }

private:
    LinePoint path()
    {
        std::vector<Step> steps;
        if (pos_ < s_.size() && s_[pos_] == '_') {
            ++pos_;
            return LinePoint();
        }
        for (;;) {
            steps.push_back(step());
            if (pos_ < s_.size() && s_[pos_] == '.') {
                ++pos_;
                continue;
            }
            break;
        }
        return LinePoint(std::move(steps));
    }

    std::uint64_t number()
    {
        std::size_t start = pos_;
        std::uint64_t v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + static_cast<std::uint64_t>(s_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start)
            throw ParseError("expected a number in point", pos_);
        return v;
    }

    Step step()
    {
        if (pos_ >= s_.size())
            throw ParseError("unexpected end of point", pos_);
        char c = s_[pos_++];
        switch (c) {
        case 'i': return Step::index(number());
        case 'p': return Step::part(number());
        case 'c': return Step::copy(number());
        case 'T': return Step::top();
        case 'L': {
            if (pos_ >= s_.size() || s_[pos_] != '(')
                throw ParseError("expected '(' after L", pos_);
            ++pos_;
            LinePoint base = path();
            if (pos_ >= s_.size() || s_[pos_] != ')')
                throw ParseError("expected ')' closing L(", pos_);
            ++pos_;
            return Step::lex(std::move(base));
        }
        default:
            throw ParseError(std::string("unknown step '") + c + "'", pos_ - 1);
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

LinePoint parse_point(std::string_view text)
{
    return PointParser(text).parse_all();
}

}  // namespace cline
