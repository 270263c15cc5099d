#pragma once

// Serial reference kernels. They index through the periodic accessor and use
// extended-precision accumulation, sharing no loop structure with the OpenMP
// kernels. Tests and the benchmark compare the two paths.

#include <optional>

#include "acfh/grid.hpp"

namespace acfh::reference {

EdgeField gradient(const Field& phi);
Field divergence(const EdgeField& f);
Field laplacian(const Field& phi);

/// h^dim * sum a*b accumulated left to right in long double.
double inner_product(const Field& a, const Field& b);
double inner_product(const EdgeField& a, const EdgeField& b);

/// Cellwise safeguarded Newton in a plain serial loop.
Field solve_field(double rho, const Field& m, const Field* x_init = nullptr);

}  // namespace acfh::reference
