#pragma once

#include "ddsgps/problem.hpp"

#include <string_view>

namespace ddsgps {

/// Total demand of the 7-generator IEEE 57-bus dispatch case, in MW.
inline constexpr double kIeee57Demand = 1575.88;

/// Seven generators (buses 1, 2, 3, 6, 8, 9, 12, in that order) with
/// C_i(p) = a p^2 + b p, output limits [0, p_max], A_i = 1 and b_i set to the
/// local demand at the generator's bus.
ProblemInstance ieee57();

/// Looks up a built-in instance by name ("ieee57"); throws ConfigError otherwise.
ProblemInstance builtin_problem(std::string_view name);

}  // namespace ddsgps
