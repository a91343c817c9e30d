#pragma once

#include "nambu/scalar_field.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nambu {

/// Parse failure with a 1-based column into the source text.
struct ParseError : std::runtime_error {
    int column;
    ParseError(const std::string& what, int col)
        : std::runtime_error(what), column(col) {}
};

/// A parsed arithmetic expression over named coordinates. Supports
/// + - * / ^ sqrt, parentheses, and numeric literals. Gradients come from
/// forward-mode dual numbers, so expression fields are exact.
class Expression {
public:
    static Expression parse(std::string_view text,
                            std::span<const std::string> coordinate_names);

    double value(std::span<const double> x) const;
    /// d/dx_j via one dual pass per direction.
    double derivative(std::span<const double> x, int direction) const;

    int dim() const { return dim_; }

    /// Wrap as a ScalarField with the dual-number gradient.
    ScalarField field() const;

    struct Tree;

private:
    std::shared_ptr<const Tree> tree_;
    int dim_ = 0;
};

/// Convenience: parse and wrap in one step.
ScalarField expression_field(std::string_view text,
                             std::span<const std::string> coordinate_names);

} // namespace nambu
