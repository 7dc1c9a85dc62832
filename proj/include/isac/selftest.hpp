#pragma once
#include <string>
#include <utility>
#include <vector>

namespace isac {

/// Fast invariant smoke suite backing the `selftest` subcommand: steering
/// norms, polar-vs-Cartesian propagation, Jacobian finite differences,
/// quadratic-transform tightness, and seeded determinism.
std::vector<std::pair<std::string, bool>> selftest();

}  // namespace isac
