#include "proxeig/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "proxeig/error.hpp"
#include "proxeig/kernels.hpp"

namespace proxeig {

void ProxConfig::validate() const {
  require(inner_max_iters > 0, ErrorKind::kInvalidInput, "inner_max_iters must be positive");
  require(inner_tol > 0.0, ErrorKind::kInvalidInput, "inner_tol must be positive");
  require(backtrack_factor > 0.0 && backtrack_factor < 1.0, ErrorKind::kInvalidInput,
          "backtrack_factor must lie in (0, 1)");
  require(backtrack_max >= 0, ErrorKind::kInvalidInput, "backtrack_max must be nonnegative");
  require(decrease_slack >= 0.0, ErrorKind::kInvalidInput, "decrease_slack must be nonnegative");
}

Signal soft_threshold(const Signal& u, double alpha) {
  require(alpha >= 0.0, ErrorKind::kInvalidInput, "soft_threshold: alpha < 0");
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u[i]) - alpha;
    out[i] = mag > 0.0 ? std::copysign(mag, u[i]) : 0.0;
  }
  return u.with_data(std::move(out));
}

Signal prox_eigen_closed_form(const Signal& u, double mu, double alpha) {
  require(mu >= 0.0, ErrorKind::kInvalidInput, "prox_eigen_closed_form: mu < 0");
  require(alpha >= 0.0, ErrorKind::kInvalidInput, "prox_eigen_closed_form: alpha < 0");
  return std::max(1.0 - alpha * mu, 0.0) * u;
}

namespace detail {

void project_l2_ball(std::vector<double>& q, double r) {
  const double n = std::sqrt(kernels::dot(q, q));
  if (n > r) {
    const double s = r / n;
    for (double& x : q) x *= s;
  }
}

void project_l1_ball(std::vector<double>& q, double r) {
  if (kernels::sum_abs(q) <= r) return;
  std::vector<double> a(q.size());
  std::transform(q.begin(), q.end(), a.begin(), [](double x) { return std::abs(x); });
  std::sort(a.begin(), a.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    cumsum += a[j];
    const double t = (cumsum - r) / static_cast<double>(j + 1);
    if (a[j] - t > 0.0) theta = t;
  }
  for (double& x : q) {
    const double mag = std::abs(x) - theta;
    x = mag > 0.0 ? std::copysign(mag, x) : 0.0;
  }
}

void project_lq_ball(std::vector<double>& q, double s, double r) {
  if (s == 2.0) return project_l2_ball(q, r);
  if (s == 1.0) return project_l1_ball(q, r);
  if (std::isinf(s)) return kernels::clip_box(q, r);
  double total = 0.0;
  for (double x : q) total += std::pow(std::abs(x), s);
  if (total <= std::pow(r, s)) return;

  // Magnitudes solve t + nu*s*t^(s-1) = |q_i|; nu is chosen so the result
  // lies on the sphere. Both solves are monotone bisections.
  const std::vector<double> a = [&] {
    std::vector<double> m(q.size());
    std::transform(q.begin(), q.end(), m.begin(), [](double x) { return std::abs(x); });
    return m;
  }();
  auto magnitude = [&](double ai, double nu) {
    double lo = 0.0, hi = ai;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * ai; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid + nu * s * std::pow(mid, s - 1.0) > ai) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto radius_pow = [&](double nu) {
    double t = 0.0;
    for (double ai : a) t += std::pow(magnitude(ai, nu), s);
    return t;
  };
  const double target = std::pow(r, s);
  double nu_lo = 0.0, nu_hi = 1.0;
  while (radius_pow(nu_hi) > target) nu_hi *= 2.0;
  for (int it = 0; it < 100 && nu_hi - nu_lo > 1e-15 * nu_hi; ++it) {
    const double mid = 0.5 * (nu_lo + nu_hi);
    if (radius_pow(mid) > target) nu_lo = mid; else nu_hi = mid;
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = std::copysign(magnitude(a[i], nu_hi), q[i]);
  }
}

}  // namespace detail

ProxSolver::ProxSolver(Functional J, ProxConfig cfg)
    : J_(std::move(J)), cfg_(cfg) {
  cfg_.validate();
}

void ProxSolver::reset_warm_start() {
  dual_.clear();
  dual_alpha_ = 0.0;
}

void ProxSolver::project_dual(std::vector<double>& q, double radius) const {
  // The dual of ||.||_p is ||.||_q with 1/p + 1/q = 1.
  const double p = J_.p();
  if (p == 1.0) {
    kernels::clip_box(q, radius);
  } else if (p == 2.0) {
    detail::project_l2_ball(q, radius);
  } else if (std::isinf(p)) {
    detail::project_l1_ball(q, radius);
  } else {
    detail::project_lq_ball(q, p / (p - 1.0), radius);
  }
}

ProxResult ProxSolver::solve_composite(const Signal& u, double alpha) {
  const LinearOp& D = J_.op();
  const std::size_t n = D.in_size(), m = D.out_size();
  const auto mask = J_.fixed_zero_mask();
  const double half_u2 = 0.5 * kernels::dot(u.values(), u.values());

  ProxResult res;
  res.alpha_used = alpha;
  if (half_u2 == 0.0 || J_.op_norm() == 0.0) {
    res.v = u;
    res.inner_iters = 1;
    return res;
  }

  std::vector<double> q(m, 0.0);
  if (cfg_.warm_start && dual_.size() == m && dual_alpha_ > 0.0) {
    const double scale = alpha / dual_alpha_;
    for (std::size_t e = 0; e < m; ++e) q[e] = dual_[e] * scale;
    project_dual(q, alpha);
  }

  std::vector<double> dtq(n), dv(m), w(n);
  // Primal point induced by a dual point: argmin_v 1/2||v - u||^2 + <D v, q>
  // over the admissible space.
  auto dual_induced = [&](const std::vector<double>& dual, std::vector<double>& out) {
    D.adjoint(dual, dtq);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = (!mask.empty() && mask[i]) ? 0.0 : u[i] - dtq[i];
    }
  };
  auto primal_objective = [&](const std::vector<double>& x) {
    D.apply(x, dv);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (x[i] - u[i]) * (x[i] - u[i]);
    return 0.5 * d2 + alpha * J_.edge_norm(dv);
  };

  double best_gap = kInfinity;
  std::vector<double> best;
  // Evaluates the normalized gap at the dual point q (and at the primal
  // iterate v when given); keeps the best primal candidate.
  auto check = [&](const std::vector<double>* v) {
    dual_induced(q, w);
    const double dual_obj = half_u2 - 0.5 * kernels::dot(w, w);
    const double pw = primal_objective(w);
    double p_best = pw;
    const std::vector<double>* cand = &w;
    if (v) {
      const double pv = primal_objective(*v);
      if (pv < pw) {
        p_best = pv;
        cand = v;
      }
    }
    const double gap = (p_best - dual_obj) / half_u2;
    if (gap < best_gap) {
      best_gap = gap;
      best = *cand;
    }
    require(std::isfinite(gap) && kernels::max_abs(*cand) < 1e12, ErrorKind::kSolverFailure,
            "prox inner iteration diverged");
    return gap <= cfg_.inner_tol;
  };

  const double L = J_.op_norm();
  int it = 0;
  if (cfg_.inner_solver == InnerSolver::kPdhg) {
    const double step = 0.99 / L;
    std::vector<double> v(n), vbar(n);
    dual_induced(q, v);
    vbar = v;
    for (it = 1; it <= cfg_.inner_max_iters; ++it) {
      D.apply(vbar, dv);
      kernels::pdhg_dual_ascent(q, dv, step);
      project_dual(q, alpha);
      D.adjoint(q, dtq);
      kernels::pdhg_primal_step(v, dtq, u.values(), step, mask, vbar);
      if ((it == 1 || it % 10 == 0 || it == cfg_.inner_max_iters) && check(&v)) break;
    }
  } else {
    // Accelerated projected gradient on the dual
    //   min_{||q||_* <= alpha} 1/2 ||P(u - D^T q)||^2,
    // gradient -D P(u - D^T q), step 1/||D||^2, momentum restarted whenever
    // it points against the last step.
    const double step = 1.0 / (L * L);
    std::vector<double> y = q, q_prev = q;
    double t = 1.0;
    for (it = 1; it <= cfg_.inner_max_iters; ++it) {
      dual_induced(y, w);
      D.apply(w, dv);
      std::swap(q_prev, q);
      q = y;
      kernels::pdhg_dual_ascent(q, dv, step);
      project_dual(q, alpha);
      double align = 0.0;
      for (std::size_t e = 0; e < m; ++e) align += (y[e] - q[e]) * (q[e] - q_prev[e]);
      double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      double beta = (t - 1.0) / t_next;
      if (align > 0.0) {
        t_next = 1.0;
        beta = 0.0;
      }
      for (std::size_t e = 0; e < m; ++e) y[e] = q[e] + beta * (q[e] - q_prev[e]);
      t = t_next;
      if ((it == 1 || it % 10 == 0 || it == cfg_.inner_max_iters) && check(nullptr)) break;
    }
  }
  dual_ = q;
  dual_alpha_ = alpha;

  res.v = u.with_data(std::move(best));
  res.inner_iters = std::min(it, cfg_.inner_max_iters);
  res.achieved_gap = std::max(best_gap, 0.0);
  return res;
}

ProxResult ProxSolver::prox(const Signal& u, double alpha) {
  require(alpha > 0.0, ErrorKind::kInvalidInput, "prox: alpha must be positive");
  J_.check_compatible(u);
  const double nu = norm(u);
  ProxResult res;
  if (!J_.composite()) {
    res.v = soft_threshold(u, alpha);
    res.alpha_used = alpha;
  } else {
    const Signal u_perp = J_.null_space_project(u);
    // Null-space part of u inside the admissible space (pinned entries zeroed).
    std::vector<double> adm(u.data());
    const auto mask = J_.fixed_zero_mask();
    for (std::size_t i = 0; i < mask.size(); ++i) if (mask[i]) adm[i] = 0.0;
    const Signal null_part = u.with_data(std::move(adm)) - u_perp;
    res = solve_composite(u_perp, alpha);
    res.v = res.v + null_part;
  }
  res.extinct = nu > 0.0 && norm(res.v) <= 1e-8 * nu;
  return res;
}

ProxResult ProxSolver::prox_backtracked(const Signal& u, double alpha) {
  require(alpha > 0.0, ErrorKind::kInvalidInput, "prox_backtracked: alpha must be positive");
  require(!J_.is_null(u), ErrorKind::kNullSpaceInput, "prox_backtracked: J(u) = 0");
  const double ratio_u = J_.evaluate(u) / norm(u);
  double a = alpha;
  for (int attempt = 0; attempt <= cfg_.backtrack_max; ++attempt) {
    ProxResult r = prox(u, a);
    r.backtracks = attempt;
    if (r.extinct) return r;
    double ratio_v = J_.evaluate(r.v) / norm(r.v);
    if (ratio_v > ratio_u + cfg_.decrease_slack && J_.composite() && r.achieved_gap > 0.0) {
      // Near an eigenvector the decrease holds with equality, so a failed
      // check is often solver error; continue from the warm dual with a
      // tighter tolerance before shrinking alpha.
      const double tol = cfg_.inner_tol;
      cfg_.inner_tol = std::max(tol * 1e-3, 1e-15);
      const int used = r.inner_iters;
      r = prox(u, a);
      r.inner_iters += used;
      r.backtracks = attempt;
      cfg_.inner_tol = tol;
      if (r.extinct) return r;
      ratio_v = J_.evaluate(r.v) / norm(r.v);
    }
    if (ratio_v <= ratio_u + cfg_.decrease_slack) return r;
    a *= cfg_.backtrack_factor;
  }
  fail(ErrorKind::kBacktrackExhausted,
       "prox_backtracked: no step size gave an energy decrease after " +
           std::to_string(cfg_.backtrack_max) + " backtracks");
}

ProxResult prox_composite(const Functional& J, const Signal& u, double alpha,
                          const ProxConfig& cfg) {
  require(J.composite(), ErrorKind::kUnsupported,
          "iterative prox needs a composite functional ||D u||_p");
  ProxSolver solver(J, cfg);
  return solver.prox(u, alpha);
}

ProxResult prox_pdhg(const Functional& J, const Signal& u, double alpha,
                     const ProxConfig& cfg) {
  ProxConfig c = cfg;
  c.inner_solver = InnerSolver::kPdhg;
  return prox_composite(J, u, alpha, c);
}

ProxResult prox_backtracked(const Functional& J, const Signal& u, double alpha,
                            const ProxConfig& cfg) {
  ProxSolver solver(J, cfg);
  return solver.prox_backtracked(u, alpha);
}

double moreau_residual_check(const Functional& J, const Signal& u,
                             const Signal& v, double alpha) {
  require(alpha > 0.0, ErrorKind::kInvalidInput, "moreau_residual_check: alpha <= 0");
  const Signal r = (1.0 / alpha) * (u - v);
  if (!J.composite()) return std::max(0.0, max_abs(r) - 1.0);

  // Lower estimate of J_*(r) from test directions, plus any mass of r in the
  // null space (where J_* is infinite).
  double est = 0.0;
  for (const Signal* w : {&r, &v, &u}) {
    if (J.is_null(*w)) continue;
    est = std::max(est, std::abs(dot(r, *w)) / J.evaluate(*w));
  }
  const double nr = norm(r);
  const double null_mass = nr > 0.0 ? norm(r - J.null_space_project(r)) / nr : 0.0;
  return std::max(0.0, est - 1.0) + null_mass;
}

}  // namespace proxeig
