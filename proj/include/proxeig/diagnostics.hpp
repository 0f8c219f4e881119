#pragma once

#include <optional>
#include <vector>

#include "proxeig/functional.hpp"
#include "proxeig/signal.hpp"

namespace proxeig {

/// <u, Tu> / ||u||^2.
double rayleigh(const Signal& u, const Signal& Tu);

/// Centered quotient <u - mean(u), Tu - mean(Tu)> / ||u - mean(u)||^2.
double rayleigh_dagger(const Signal& u, const Signal& Tu);

/// Angle between u and Tu in degrees, in [0, 180].
double angle_deg(const Signal& u, const Signal& Tu);

/// Scale-free eigenvector affinity of a subgradient:
///
///   ||p||^2 / (J(p) * Jd(p)),
///
/// where Jd(p) estimates the dual seminorm J_*(p). For l1 it is exact
/// (||p||_inf). For composite functionals Jd(p) is the largest of ||p||^2/J(p)
/// and |<p, w>|/J(w) for the prox point w the subgradient was recovered at;
/// both are lower bounds of J_*(p), so the value lies in [0, 1] and is 1 when
/// p is an eigenvector of the subdifferential.
double affinity(const Functional& J, const Subgradient& p);

struct PixelLambdaMap {
  Signal values;                     // 0 where masked
  std::vector<unsigned char> valid;  // 1 where the ratio was evaluated
};

/// (Tu_i - mean(Tu)) / (u_i - mean(u)) where |u_i - mean(u)| exceeds
/// mask_tol * ||u - mean(u)||_inf.
PixelLambdaMap per_pixel_lambda(const Signal& u, const Signal& Tu,
                                double mask_tol = 0.05);

/// 10 log10(peak^2 n / ||a - b||^2); +inf for identical signals.
double psnr(const Signal& reference, const Signal& x, double peak);
double psnr_gain(const Signal& clean, const Signal& noisy,
                 const Signal& denoised, double peak);

/// ||lambda u - Tu||.
double eigen_residual(const Signal& u, const Signal& Tu, double lambda);

/// ||lambda (u - mean u) - (Tu - mean Tu)|| / ||u - mean u||.
double relaxed_residual(const Signal& u, const Signal& Tu, double lambda);

struct DiagnosticReport {
  double rayleigh = 0.0;
  double rayleigh_dagger = 0.0;
  double angle_deg = 0.0;
  std::optional<double> affinity;
  double eigen_residual = 0.0;
  double relaxed_residual = 0.0;
  std::optional<PixelLambdaMap> per_pixel_lambda;
};

/// Evaluates all measures for the pair (u, Tu). eigen_residual uses
/// lambda = rayleigh, relaxed_residual uses rayleigh_dagger. Affinity is
/// filled in when J and a subgradient are given; the pixel map when u is a
/// non-constant grid signal.
DiagnosticReport diagnose(const Signal& u, const Signal& Tu,
                          const Functional* J = nullptr,
                          const Subgradient* p = nullptr);

}  // namespace proxeig
