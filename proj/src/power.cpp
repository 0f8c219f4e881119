#include "proxeig/power.hpp"

#include <chrono>
#include <cmath>

#include "proxeig/core.hpp"
#include "proxeig/diagnostics.hpp"
#include "proxeig/error.hpp"

namespace proxeig {

const char* to_string(Status s) {
  switch (s) {
    case Status::kConverged: return "converged";
    case Status::kMaxIters: return "max_iters";
    case Status::kKernelHit: return "kernel_hit";
    case Status::kStalled: return "stalled";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_options(const PowerOptions& opts) {
  require(opts.eps > 0.0, ErrorKind::kInvalidInput, "eps must be positive");
  require(opts.max_iters > 0, ErrorKind::kInvalidInput, "max_iters must be positive");
}

bool non_constant(const Signal& u) {
  const MeanSplit s = mean_project(u);
  return norm(s.centered) > 1e-14 * (std::abs(s.mean) * std::sqrt(double(u.size())) + 1e-300);
}

bool is_kernel_value(const Signal& u, const Signal& Tu) {
  return norm(Tu) <= 1e-12 * (1.0 + norm(u));
}

/// Measures common to every method, evaluated at (u^k, T(u^k)).
TraceRecord base_record(int k, const Signal& u, const Signal& Tu) {
  TraceRecord r;
  r.k = k;
  r.t_norm = norm(Tu);
  if (dot(u, u) > 0.0) r.rayleigh = rayleigh(u, Tu);
  if (non_constant(u)) r.rayleigh_dagger = rayleigh_dagger(u, Tu);
  if (r.t_norm > 0.0 && norm(u) > 0.0) r.angle_deg = angle_deg(u, Tu);
  return r;
}

double terminal_angle(const Signal& u, const Signal& Tu) {
  return norm(Tu) > 0.0 ? angle_deg(u, Tu) : 90.0;
}

}  // namespace

PowerResult simple_power(OperatorHandle T, const Signal& f, const PowerOptions& opts) {
  check_options(opts);
  require(!f.empty() && norm(f) > 0.0, ErrorKind::kInvalidInput, "simple_power: f = 0");
  const auto t0 = Clock::now();
  PowerResult res;
  Signal u = normalized(f);
  for (int k = 0; k < opts.max_iters; ++k) {
    if (opts.on_iterate) opts.on_iterate(k, u);
    const Signal Tu = T(u);
    require(Tu.size() == u.size(), ErrorKind::kInvalidInput,
            "simple_power: T must map signals to signals of the same length");
    TraceRecord rec = base_record(k, u, Tu);
    if (is_kernel_value(u, Tu)) {
      res.trace.records.push_back(rec);
      res.trace.status = Status::kKernelHit;
      res.trace.message = "T(u) vanished; u is a kernel element";
      break;
    }
    Signal next = (1.0 / rec.t_norm) * Tu;
    rec.step_norm = distance(next, u);
    res.trace.records.push_back(rec);
    u = std::move(next);
    if (rec.step_norm < opts.eps) {
      res.trace.status = Status::kConverged;
      break;
    }
  }
  res.iters = int(res.trace.records.size());
  if (res.trace.status == Status::kKernelHit) {
    res.lambda = 0.0;
    res.angle_deg = 90.0;
  } else {
    const Signal Tu = T(u);
    res.lambda = rayleigh(u, Tu);
    res.angle_deg = terminal_angle(u, Tu);
  }
  res.u = std::move(u);
  res.wall_ms = elapsed_ms(t0);
  return res;
}

PowerResult proximal_power(const Functional& J, const ParameterRule& rule, const Signal& f,
                           const PowerOptions& opts, const ProxConfig& cfg) {
  check_options(opts);
  rule.validate();
  cfg.validate();
  J.check_compatible(f);
  const auto t0 = Clock::now();

  PowerResult res;
  const Signal fp = J.null_space_project(f);
  res.removed_null_component = f - fp;
  require(norm(fp) > 0.0 && !J.is_null(fp), ErrorKind::kNullSpaceInput,
          "proximal_power: the initial signal lies in the null space of J");

  Signal u = normalized(fp);
  const double J0 = J.evaluate(u);
  res.energy_initial = J0;
  ProxSolver solver(J, cfg);

  for (int k = 0; k < opts.max_iters; ++k) {
    if (opts.on_iterate) opts.on_iterate(k, u);
    const double Ju = J.evaluate(u);
    const double alpha = make_alpha(rule, J0, Ju);
    ProxResult pr;
    try {
      pr = solver.prox_backtracked(u, alpha);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kBacktrackExhausted) throw;
      res.trace.status = Status::kStalled;
      res.trace.message = e.what();
      break;
    }
    require(!pr.extinct, ErrorKind::kRuleViolation,
            "proximal_power: prox step extinguished the iterate at k=" + std::to_string(k) +
                " (alpha=" + std::to_string(pr.alpha_used) + ")");
    const Signal& v = pr.v;
    TraceRecord rec = base_record(k, u, v);
    const Subgradient p{(1.0 / pr.alpha_used) * (u - v), pr.alpha_used, v, pr.achieved_gap};
    if (!J.is_null(p.p)) rec.affinity = affinity(J, p);
    rec.energy_J = Ju;
    rec.alpha = pr.alpha_used;
    rec.collinearity_gap = rec.t_norm - dot(v, u);
    // The null space is an eigenspace with eigenvalue 1, so rounding errors
    // along it would grow by 1/lambda per step; keep iterates in N(J)^perp.
    const Signal vp = J.null_space_project(v);
    Signal next = (1.0 / norm(vp)) * vp;
    rec.step_norm = distance(next, u);
    res.trace.records.push_back(rec);
    res.lambda = rec.t_norm;
    res.angle_deg = rec.angle_deg.value_or(90.0);
    u = std::move(next);
    if (rec.step_norm < opts.eps) {
      res.trace.status = Status::kConverged;
      break;
    }
  }
  res.iters = int(res.trace.records.size());
  res.energy_final = J.evaluate(u);
  res.u = std::move(u);
  res.wall_ms = elapsed_ms(t0);
  return res;
}

namespace {

/// One range-sensitive step: centered T(u) rescaled to `target`, plus mean(u).
Signal range_step(const Signal& u, const Signal& Tu, double target,
                  const std::vector<Signal>* basis) {
  const MeanSplit ts = mean_project(Tu);
  Signal c = basis ? subspace_project(ts.centered, *basis) : ts.centered;
  const double cn = norm(c);
  if (basis) {
    require(cn > 1e-12 * norm(ts.centered), ErrorKind::kRestartFailure,
            "restart_orthogonal: projection annihilated the iterate");
  } else {
    require(cn > 1e-14 * std::max(norm(Tu), 1e-300), ErrorKind::kDegenerateOutput,
            "range_power: T(u) is constant");
  }
  return add_constant((target / cn) * c, mean(u));
}

double centered_norm(const Signal& f) {
  const double n = norm(mean_project(f).centered);
  require(n > 0.0 && non_constant(f), ErrorKind::kInvalidInput,
          "range_power: initial signal is constant");
  return n;
}

void finish_range(OperatorHandle& T, PowerResult& res) {
  const Signal Tu = T(res.u);
  res.lambda = rayleigh_dagger(res.u, Tu);
  res.relaxed_residual = relaxed_residual(res.u, Tu, res.lambda);
  res.angle_deg = terminal_angle(res.u, Tu);
}

}  // namespace

PowerResult range_power(OperatorHandle T, const Signal& f, const PowerOptions& opts) {
  check_options(opts);
  const auto t0 = Clock::now();
  const double target = centered_norm(f);
  PowerResult res;
  Signal u = f;
  for (int k = 0; k < opts.max_iters; ++k) {
    if (opts.on_iterate) opts.on_iterate(k, u);
    const Signal Tu = T(u);
    require(Tu.size() == u.size(), ErrorKind::kInvalidInput,
            "range_power: T must map signals to signals of the same length");
    TraceRecord rec = base_record(k, u, Tu);
    Signal next = range_step(u, Tu, target, nullptr);
    rec.step_norm = distance(next, u);
    res.trace.records.push_back(rec);
    u = std::move(next);
    if (rec.step_norm < opts.eps) {
      res.trace.status = Status::kConverged;
      break;
    }
  }
  res.iters = int(res.trace.records.size());
  res.u = std::move(u);
  finish_range(T, res);
  res.wall_ms = elapsed_ms(t0);
  return res;
}

PowerResult restart_orthogonal(OperatorHandle T, const Signal& f,
                               const std::vector<Signal>& known_modes, int n_proj_iters,
                               RestartMethod method, const PowerOptions& opts) {
  check_options(opts);
  require(n_proj_iters >= 0, ErrorKind::kInvalidInput, "n_proj_iters must be >= 0");
  auto unconstrained = [&](const Signal& start) {
    return method == RestartMethod::kSimple ? simple_power(T, start, opts)
                                            : range_power(T, start, opts);
  };
  if (n_proj_iters == 0) return unconstrained(f);

  const auto t0 = Clock::now();
  std::vector<Signal> modes;
  for (const Signal& m : known_modes) {
    require(m.size() == f.size(), ErrorKind::kInvalidInput,
            "restart_orthogonal: mode length differs from f");
    modes.push_back(method == RestartMethod::kRange ? mean_project(m).centered : m);
  }
  const std::vector<Signal> basis = orthonormalize(modes);

  std::vector<TraceRecord> head;
  Signal u;
  if (method == RestartMethod::kSimple) {
    const Signal start = subspace_project(f, basis);
    require(norm(start) > 1e-12 * norm(f), ErrorKind::kRestartFailure,
            "restart_orthogonal: f lies in the span of the known modes");
    u = normalized(start);
    for (int k = 0; k < n_proj_iters; ++k) {
      const Signal Tu = T(u);
      TraceRecord rec = base_record(k, u, Tu);
      const Signal w = subspace_project(Tu, basis);
      const double nw = norm(w);
      require(nw > 1e-12 * std::max(rec.t_norm, 1e-300), ErrorKind::kRestartFailure,
              "restart_orthogonal: projection annihilated the iterate");
      Signal next = (1.0 / nw) * w;
      rec.step_norm = distance(next, u);
      head.push_back(rec);
      u = std::move(next);
    }
  } else {
    const double target = centered_norm(f);
    const MeanSplit fs = mean_project(f);
    const Signal c = subspace_project(fs.centered, basis);
    require(norm(c) > 1e-12 * target, ErrorKind::kRestartFailure,
            "restart_orthogonal: f lies in the span of the known modes");
    u = add_constant((target / norm(c)) * c, fs.mean);
    for (int k = 0; k < n_proj_iters; ++k) {
      const Signal Tu = T(u);
      TraceRecord rec = base_record(k, u, Tu);
      Signal next = range_step(u, Tu, target, &basis);
      rec.step_norm = distance(next, u);
      head.push_back(rec);
      u = std::move(next);
    }
  }

  PowerResult res = unconstrained(u);
  for (TraceRecord& r : res.trace.records) r.k += n_proj_iters;
  res.trace.records.insert(res.trace.records.begin(), head.begin(), head.end());
  res.iters += n_proj_iters;
  res.wall_ms = elapsed_ms(t0);
  return res;
}

double unbiased_lambda_check(OperatorHandle T, const Signal& u) {
  for (double x : u.values())
    require(x >= 0.0, ErrorKind::kInvalidInput, "unbiased_lambda_check: u has negative entries");
  const double su = sum(u);
  require(su > 0.0, ErrorKind::kInvalidInput, "unbiased_lambda_check: <u, 1> = 0");
  const Signal Tu = T(u);
  require(Tu.size() == u.size(), ErrorKind::kInvalidInput,
          "unbiased_lambda_check: size mismatch");
  return sum(Tu) / su;
}

}  // namespace proxeig
