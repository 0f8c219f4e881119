#include "proxeig/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "proxeig/core.hpp"
#include "proxeig/error.hpp"

namespace proxeig {

namespace {

void check_sizes(const Signal& a, const Signal& b, const char* what) {
  require(a.size() == b.size(), ErrorKind::kInvalidInput,
          std::string(what) + ": length mismatch");
}

bool is_constant(const Signal& u) {
  const MeanSplit s = mean_project(u);
  return norm(s.centered) <= 1e-14 * std::max(1.0, std::abs(s.mean) * std::sqrt(double(u.size())));
}

}  // namespace

double rayleigh(const Signal& u, const Signal& Tu) {
  check_sizes(u, Tu, "rayleigh");
  const double n2 = dot(u, u);
  require(n2 > 0.0, ErrorKind::kInvalidInput, "rayleigh: u = 0");
  return dot(u, Tu) / n2;
}

double rayleigh_dagger(const Signal& u, const Signal& Tu) {
  check_sizes(u, Tu, "rayleigh_dagger");
  require(!is_constant(u), ErrorKind::kInvalidInput, "rayleigh_dagger: u is constant");
  const Signal uc = mean_project(u).centered;
  const Signal tc = mean_project(Tu).centered;
  return dot(uc, tc) / dot(uc, uc);
}

double angle_deg(const Signal& u, const Signal& Tu) {
  check_sizes(u, Tu, "angle_deg");
  const double nu = norm(u), nt = norm(Tu);
  require(nu > 0.0 && nt > 0.0, ErrorKind::kInvalidInput, "angle_deg: zero vector");
  // 2 atan2(|a - b|, |a + b|) for the unit vectors a, b; unlike acos of the
  // cosine it keeps full relative accuracy for tiny angles.
  const Signal a = (1.0 / nu) * u, b = (1.0 / nt) * Tu;
  return 2.0 * std::atan2(norm(a - b), norm(a + b)) * 180.0 / std::numbers::pi;
}

double affinity(const Functional& J, const Subgradient& p) {
  require(!J.is_null(p.p), ErrorKind::kNullSpaceInput, "affinity: J(p) = 0");
  const double jp = J.evaluate(p.p);
  const double raw = dot(p.p, p.p) / jp;
  double dual;
  if (!J.composite()) {
    dual = dual_norm_exact_l1(p.p);
  } else {
    dual = raw;
    if (p.at && !J.is_null(*p.at)) {
      dual = std::max(dual, std::abs(dot(p.p, *p.at)) / J.evaluate(*p.at));
    }
  }
  return std::clamp(raw / dual, 0.0, 1.0);
}

PixelLambdaMap per_pixel_lambda(const Signal& u, const Signal& Tu, double mask_tol) {
  check_sizes(u, Tu, "per_pixel_lambda");
  require(!is_constant(u), ErrorKind::kInvalidInput, "per_pixel_lambda: u is constant");
  const Signal uc = mean_project(u).centered;
  const Signal tc = mean_project(Tu).centered;
  const double threshold = mask_tol * max_abs(uc);
  std::vector<double> vals(u.size(), 0.0);
  std::vector<unsigned char> valid(u.size(), 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(uc[i]) > threshold) {
      vals[i] = tc[i] / uc[i];
      valid[i] = 1;
    }
  }
  return {u.with_data(std::move(vals)), std::move(valid)};
}

double psnr(const Signal& reference, const Signal& x, double peak) {
  check_sizes(reference, x, "psnr");
  require(peak > 0.0, ErrorKind::kInvalidInput, "psnr: peak <= 0");
  const double d = distance(reference, x);
  if (d == 0.0) return kInfinity;
  return 10.0 * std::log10(peak * peak * double(x.size()) / (d * d));
}

double psnr_gain(const Signal& clean, const Signal& noisy, const Signal& denoised,
                 double peak) {
  const double after = psnr(clean, denoised, peak);
  const double before = psnr(clean, noisy, peak);
  if (std::isinf(after) && std::isinf(before)) return 0.0;
  if (std::isinf(after)) return kInfinity;
  return after - before;
}

double eigen_residual(const Signal& u, const Signal& Tu, double lambda) {
  check_sizes(u, Tu, "eigen_residual");
  return norm(lambda * u - Tu);
}

double relaxed_residual(const Signal& u, const Signal& Tu, double lambda) {
  check_sizes(u, Tu, "relaxed_residual");
  const Signal uc = mean_project(u).centered;
  const Signal tc = mean_project(Tu).centered;
  const double nu = norm(uc);
  require(nu > 0.0, ErrorKind::kInvalidInput, "relaxed_residual: u is constant");
  return norm(lambda * uc - tc) / nu;
}

DiagnosticReport diagnose(const Signal& u, const Signal& Tu, const Functional* J,
                          const Subgradient* p) {
  DiagnosticReport r;
  r.rayleigh = rayleigh(u, Tu);
  r.angle_deg = norm(Tu) > 0.0 ? angle_deg(u, Tu) : 90.0;
  r.eigen_residual = eigen_residual(u, Tu, r.rayleigh);
  if (!is_constant(u)) {
    r.rayleigh_dagger = rayleigh_dagger(u, Tu);
    r.relaxed_residual = relaxed_residual(u, Tu, r.rayleigh_dagger);
    if (u.shape().grid) r.per_pixel_lambda = per_pixel_lambda(u, Tu);
  }
  if (J && p && !J->is_null(p->p)) r.affinity = affinity(*J, *p);
  return r;
}

}  // namespace proxeig
