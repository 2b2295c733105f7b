#pragma once

#include <array>

#include "sabrnet/sabr_point.hpp"

namespace sabrnet {

/// Geometry-driven features, all evaluated on the strike manifold F = K.
struct GeomFeatures {
  double q = 0.0;          // CEV-flattened coordinate of the strike
  double sigma_min = 0.0;  // terminal vol minimising the geodesic action
  double d_h = 0.0;        // hyperbolic geodesic distance (signed like q)
  double sigma0 = 0.0;     // leading-order implied vol

  [[nodiscard]] std::array<double, 4> as_array() const { return {q, sigma_min, d_h, sigma0}; }
};

/// Point of the Poincare upper half-plane.
struct HalfPlanePoint {
  double u = 0.0;
  double v = 1.0;
};

// The SABR diffusion has covariance sigma^2 [[F^2b, rho nu F^b], [rho nu F^b, nu^2]] dt;
// after q = int F^-b dF and the rotation below, its inverse is the half-plane
// metric (du^2 + dv^2) / v^2. Nothing here stores that matrix.

/// q = (K^(1-b) - F0^(1-b)) / (1-b), or ln(K/F0) once 1-b < 1e-9.
double q_transform(double F0, double K, double beta);

/// sqrt(alpha^2 + 2 rho alpha q + q^2).
double sigma_min(double alpha, double rho, double q);

/// ln((sigma_min + rho alpha + q) / ((1 + rho) alpha)); negative when q < 0.
double geodesic_distance(double alpha, double rho, double q);

/// ln(K/F0) / d_h, or alpha F0^(beta-1) at the money.
double sigma0_leading(const SabrPoint& p, double q, double d_h);

GeomFeatures features(const SabrPoint& p);

/// (u, v) = ((q - rho sigma) / sqrt(1 - rho^2), sigma).
HalfPlanePoint to_halfplane(double q, double sigma, double rho);

}  // namespace sabrnet
