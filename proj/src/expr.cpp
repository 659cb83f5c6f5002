#include "symnet/expr.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace symnet {

namespace {

[[noreturn]] void bad(std::string_view text, const char* why) {
    throw std::invalid_argument("expression '" + std::string(text) + "': " + why);
}

}  // namespace

ParamExpr ParamExpr::parse(std::string_view text) {
    ParamExpr expr;
    expr.text_.assign(text.begin(), text.end());

    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    };
    bool divide_next = false;
    skip_ws();
    if (pos == text.size()) bad(text, "empty");
    while (pos < text.size()) {
        Factor f;
        f.divide = divide_next;
        char c = text[pos];
        if (c == 'n' || c == 'h' || c == 'R') {
            f.kind = c == 'n'   ? Factor::Kind::dim
                     : c == 'h' ? Factor::Kind::step
                                : Factor::Kind::radius;
            ++pos;
            if (pos < text.size() && text[pos] == '^') {
                if (f.kind == Factor::Kind::step) bad(text, "h takes no exponent");
                ++pos;
                auto res = std::from_chars(text.data() + pos, text.data() + text.size(),
                                           f.exponent);
                if (res.ec != std::errc{}) bad(text, "bad exponent");
                pos = static_cast<std::size_t>(res.ptr - text.data());
            }
        } else if ((c >= '0' && c <= '9') || c == '.') {
            f.kind = Factor::Kind::number;
            auto res = std::from_chars(text.data() + pos, text.data() + text.size(),
                                       f.number);
            if (res.ec != std::errc{}) bad(text, "bad number");
            pos = static_cast<std::size_t>(res.ptr - text.data());
        } else {
            bad(text, "unexpected character");
        }
        expr.factors_.push_back(f);
        skip_ws();
        if (pos == text.size()) break;
        if (text[pos] == '*')
            divide_next = false;
        else if (text[pos] == '/')
            divide_next = true;
        else
            bad(text, "expected * or /");
        ++pos;
        skip_ws();
        if (pos == text.size()) bad(text, "trailing operator");
    }
    return expr;
}

double ParamExpr::eval(int n, double h, double R) const {
    if (factors_.empty()) throw std::logic_error("eval on default ParamExpr");
    double value = 1.0;
    for (const Factor& f : factors_) {
        double part = 0.0;
        switch (f.kind) {
            case Factor::Kind::number: part = f.number; break;
            case Factor::Kind::dim:
                part = std::pow(static_cast<double>(n), f.exponent);
                break;
            case Factor::Kind::step:
                if (std::isnan(h)) bad(text_, "h is not available here");
                part = h;
                break;
            case Factor::Kind::radius:
                if (std::isnan(R)) bad(text_, "R is not available here");
                part = std::pow(R, f.exponent);
                break;
        }
        if (f.divide)
            value /= part;
        else
            value *= part;
    }
    return value;
}

bool ParamExpr::uses_step() const {
    for (const Factor& f : factors_)
        if (f.kind == Factor::Kind::step) return true;
    return false;
}

}  // namespace symnet
