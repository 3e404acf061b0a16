#pragma once

// Spherical geometry helpers shared by the window families, the analysis
// integrals, and the samplers.
//
// A direction on S^{n-1} is stored as n-1 angles: the first n-2 lie in
// [0, pi] and the last lives on the circle (-pi, pi].  Registers may be
// "undef" (disengaged): once some angle hits a pole {0, pi}, every later
// register is undef because the remaining coordinates vanish.

#include <optional>
#include <vector>

namespace curvelet {

// surface area of S^{n-1} embedded in R^n (n = 1 gives 2, n = 2 gives 2*pi)
double sphere_surface_area(int n);

using SphericalDirection = std::vector<std::optional<double>>;

// checks register count, ranges, and the poles-disengage-tail invariant
bool direction_valid(const SphericalDirection& dir, int n);

std::vector<double> direction_to_vector(const SphericalDirection& dir);

// inverse of direction_to_vector; a register becomes a pole (and the tail
// undef) when the residual norm drops below pole_tol * |v|
SphericalDirection direction_from_vector(const std::vector<double>& v,
                                         double pole_tol = 1e-12);

// shortest-path distance on the circle, in [0, pi]
double circle_distance(double alpha, double beta);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm(const std::vector<double>& a);

// angle in [0, pi] between nonzero vectors
double angle_between(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace curvelet
