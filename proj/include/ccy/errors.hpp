#pragma once

#include <stdexcept>
#include <string>

namespace ccy {

// Error categories map to CLI exit codes: structural -> 2, numeric -> 1, io -> 3.
enum class error_kind { structural, numeric, io };

class error : public std::runtime_error {
public:
    error(error_kind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    error_kind kind() const noexcept { return kind_; }

private:
    error_kind kind_;
};

struct structural_error : error {
    explicit structural_error(std::string msg) : error(error_kind::structural, std::move(msg)) {}
};
struct numeric_error : error {
    explicit numeric_error(std::string msg) : error(error_kind::numeric, std::move(msg)) {}
};
struct io_error : error {
    explicit io_error(std::string msg) : error(error_kind::io, std::move(msg)) {}
};

// cone_core
struct empty_input_error : structural_error {
    empty_input_error() : structural_error("EmptyInput: no rays given") {}
};
struct not_full_dimensional_error : structural_error {
    not_full_dimensional_error() : structural_error("NotFullDimensional: rays do not span R^m") {}
};
struct contains_line_error : structural_error {
    contains_line_error() : structural_error("ContainsLine: cone is not pointed") {}
};
struct not_gorenstein_error : structural_error {
    not_gorenstein_error() : structural_error("NotGorenstein: rays do not lie on one affine hyperplane") {}
};
struct not_interior_reeb_error : numeric_error {
    not_interior_reeb_error() : numeric_error("NotInteriorReeb: xi is not interior to the cone") {}
};
struct degenerate_basis_error : structural_error {
    degenerate_basis_error() : structural_error("DegenerateBasis: basis of xi-perp is degenerate") {}
};
struct degenerate_triangulation_error : structural_error {
    degenerate_triangulation_error() : structural_error("DegenerateTriangulation") {}
};

// volmin
struct cutoff_too_small_error : numeric_error {
    cutoff_too_small_error() : numeric_error("CutoffTooSmall: estimated lattice tail exceeds 10% of the sum") {}
};

// ma_variational
struct barycenter_not_zero_error : numeric_error {
    barycenter_not_zero_error() : numeric_error("BarycenterNotZero: slope polytope barycenter is not the origin") {}
};
struct barycenter_zero_error : numeric_error {
    barycenter_zero_error() : numeric_error("BarycenterZero: nothing to certify, barycenter vanishes") {}
};
struct unbounded_error : numeric_error {
    unbounded_error() : numeric_error("Unbounded: Legendre transform is +inf outside conv(slopes)") {}
};
struct non_integrable_error : numeric_error {
    non_integrable_error() : numeric_error("NonIntegrable: 0 is not interior to conv(slopes)") {}
};
struct line_search_failure_error : numeric_error {
    line_search_failure_error() : numeric_error("LineSearchFailure: backtracking could not reduce the objective") {}
};

// certify
struct q_too_small_error : structural_error {
    q_too_small_error() : structural_error("QTooSmall: need q > n") {}
};
struct step_underflow_error : numeric_error {
    step_underflow_error() : numeric_error("StepUnderflow: finite-difference step too small") {}
};

} // namespace ccy
