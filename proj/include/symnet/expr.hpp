#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace symnet {

// Tiny closed form for run parameters: a product/quotient of numeric
// literals, n^k, h, and R^k, where n is the input dimension, h the step
// size, and R the norm scale (n^(3/2) unless a caller measures one).
// Examples: "n^-6", "n^3*h", "R^2*h", "10*n", "0.1", "n^4/10".
class ParamExpr {
public:
    ParamExpr() = default;
    static ParamExpr parse(std::string_view text);

    // h or R may be NaN when the expression must not use them
    double eval(int n, double h, double R) const;

    const std::string& text() const { return text_; }
    bool uses_step() const;

private:
    struct Factor {
        enum class Kind { number, dim, step, radius };
        Kind kind = Kind::number;
        double number = 0.0;
        int exponent = 1;
        bool divide = false;
    };
    std::string text_;
    std::vector<Factor> factors_;
};

}  // namespace symnet
