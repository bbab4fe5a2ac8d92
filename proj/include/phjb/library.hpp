#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phjb/dynamics.hpp"

namespace phjb {

/// Optional overrides for a library entry.
struct LibraryParams {
  std::optional<double> lipschitz;
  std::optional<std::vector<Control>> controls;
  /// Direction c of the transport terminal cost (c, gamma(T)); defaults to e_1.
  std::optional<std::vector<double>> direction;
};

/// F = u e_1, q = 0, phi = |gamma(T)|, U = {-1, 0, 1}, L = 1.
Coefficients eikonal(const SpacePtr& space, const LibraryParams& params = {});

/// F = u e_1, q = 0, phi = ||gamma_T||_0, U = {-1, 0, 1}, L = 1.
Coefficients runmax(const SpacePtr& space, const LibraryParams& params = {});

/// Path-dependent drift
///   F = u e_1 - pi(gamma(t))/2 - min(1, ||gamma_t||_0) e_1 / 2,
/// pi the radial projection onto the unit ball; q = |u|/4, phi = |gamma(T)|, L = 2.
Coefficients feedback(const SpacePtr& space, const LibraryParams& params = {});

/// F = 0, q = 0, phi = (c, gamma(T)), U = {0}, L = max(|c|, 1).
Coefficients transport(const SpacePtr& space, const LibraryParams& params = {});

/// Library lookup by name; throws PreconditionError for unknown names.
Coefficients make_coefficients(const std::string& name, const SpacePtr& space,
                               const LibraryParams& params = {});

std::vector<std::string> library_names();

}  // namespace phjb
