#pragma once

#include <string>
#include <vector>

#include "bpire/env.hpp"

namespace bpire {

// Named test environments shipped with the binary so the verification
// suite needs no external files.
//
//   D1        single state {lf(0.5,0.5), poisson(1)}; strongly subcritical
//   E_weak    x = +/-1 with P(+1) = 0.3, poisson(1) immigration; weak
//   E_weak2   nonlattice weak pair (x = ln 2, -ln 3), poisson(1)
//   E_inter   x = +/-1 with P(+1) = 1/(1+e^2); intermediate
//   E_strong2 nonlattice strong pair (x = ln 1.5, ln 0.3), poisson(1)
//   E_case2   E_weak2 geometry with heavy immigration (poisson(6))
EnvModel builtin_env(const std::string& name);

std::vector<std::string> builtin_env_names();

}  // namespace bpire
