#include "proxeig/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "proxeig/builtins.hpp"
#include "proxeig/cli/config.hpp"
#include "proxeig/core.hpp"
#include "proxeig/diagnostics.hpp"
#include "proxeig/error.hpp"
#include "proxeig/io.hpp"
#include "proxeig/nets.hpp"
#include "proxeig/operator.hpp"
#include "proxeig/power.hpp"

namespace proxeig::cli {

namespace fs = std::filesystem;

namespace {

using FailedRuns = std::vector<std::string>;

// ---------------------------------------------------------------- parsing

std::uint64_t seed_of(const ConfigNode& n, const RunOptions& o, std::uint64_t fallback = 1) {
  const auto s = n.get<std::uint64_t>("seed", fallback);
  return o.seed ? *o.seed : s;
}

template <typename F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidInput) fail(ErrorKind::kConfig, e.what());
    throw;
  }
}

ParameterRule parse_rule(const ConfigNode& n) {
  const auto type = n.get<std::string>("type", "variable");
  const double c = n.get<double>("c", 0.9);
  ParameterRule r;
  if (type == "variable") {
    r = ParameterRule::variable(c);
  } else if (type == "constant") {
    r = ParameterRule::constant(c);
  } else if (type == "feld") {
    r = ParameterRule::feld(c, n.get_positive("tau", 1.0));
  } else {
    fail(ErrorKind::kConfig, "rule.type must be \"constant\", \"variable\" or \"feld\"");
  }
  as_config_error([&] { r.validate(); return 0; });
  return r;
}

ProxConfig parse_prox(const ConfigNode& n) {
  ProxConfig c;
  const auto solver = n.get<std::string>("inner_solver", "dual_gradient");
  if (solver == "pdhg") {
    c.inner_solver = InnerSolver::kPdhg;
  } else {
    require(solver == "dual_gradient", ErrorKind::kConfig,
            "prox.inner_solver must be \"dual_gradient\" or \"pdhg\"");
  }
  c.inner_max_iters = n.get_positive_int("inner_max_iters", c.inner_max_iters);
  c.inner_tol = n.get_positive("inner_tol", c.inner_tol);
  c.backtrack_factor = n.get_positive("backtrack_factor", c.backtrack_factor);
  c.backtrack_max = n.get<int>("backtrack_max", c.backtrack_max);
  c.warm_start = n.get<bool>("warm_start", c.warm_start);
  as_config_error([&] { c.validate(); return 0; });
  return c;
}

PowerOptions parse_power(const ConfigNode& n, int default_max_iters) {
  PowerOptions p;
  p.eps = n.get_positive("eps", 1e-8);
  p.max_iters = n.get_positive_int("max_iters", default_max_iters);
  return p;
}

Signal read_signal_file(const std::string& path) {
  return io::signal_from_json(io::read_json(path));
}

Signal parse_image(const ConfigNode& n, const RunOptions& o) {
  const auto type = n.get<std::string>("type", "noisy_disk");
  if (type == "noisy_disk") {
    const int size = n.get_positive_int("size", 64);
    const double noise = n.get<double>("noise_std", 0.1);
    require(noise >= 0.0, ErrorKind::kConfig, "initializer.noise_std must be >= 0");
    return noisy_disk(std::size_t(size), noise, seed_of(n, o));
  }
  if (type == "constant") {
    const int rows = n.get_positive_int("rows", 64), cols = n.get_positive_int("cols", 64);
    return Signal::constant(Shape::image(rows, cols), n.get<double>("value", 1.0));
  }
  if (type == "random") {
    const int rows = n.get_positive_int("rows", 64), cols = n.get_positive_int("cols", 64);
    return random_signal(Shape::image(rows, cols), seed_of(n, o));
  }
  if (type == "file") return read_signal_file(n.get_required<std::string>("path"));
  fail(ErrorKind::kConfig, "unknown initializer type \"" + type + "\"");
}

WeightedGraph parse_graph(const ConfigNode& n, const RunOptions& o) {
  const auto type = n.get<std::string>("type", "two_moons");
  if (type == "two_moons") {
    const int per = n.get_positive_int("n_per_moon", 100);
    const double noise = n.get<double>("noise_std", 0.08);
    const int k = n.get_positive_int("k", 10);
    return as_config_error(
        [&] { return two_moons(std::size_t(per), noise, std::size_t(k), seed_of(n, o)); });
  }
  if (type == "path") {
    const int size = n.get_positive_int("n", 20);
    auto boundary = n.get<std::vector<std::uint32_t>>("boundary", {});
    return as_config_error([&] { return path_graph(std::size_t(size), boundary); });
  }
  if (type == "grid") {
    const int rows = n.get_positive_int("rows", 10), cols = n.get_positive_int("cols", 10);
    const auto boundary = n.get<std::string>("boundary", "none");
    require(boundary == "none" || boundary == "border", ErrorKind::kConfig,
            "graph.boundary must be \"none\" or \"border\"");
    return grid_graph(std::size_t(rows), std::size_t(cols), boundary == "border");
  }
  if (type == "file") return io::graph_from_json(io::read_json(n.get_required<std::string>("path")));
  fail(ErrorKind::kConfig, "unknown graph type \"" + type + "\"");
}

RandomNetOptions parse_net_options(const ConfigNode& n) {
  RandomNetOptions r;
  r.mean = n.get<double>("mean", 0.0);
  r.std = n.get<double>("std", 0.0);
  require(r.std >= 0.0, ErrorKind::kConfig, "net.std must be >= 0");
  r.bias = n.get<bool>("bias", false);
  r.relu_last = n.get<bool>("relu_last", true);
  return r;
}

FeedForwardNet parse_net(const ConfigNode& n, const RunOptions& o) {
  const auto type = n.get<std::string>("type", "file");
  if (type == "file") return io::net_from_json(io::read_json(n.get_required<std::string>("path")));
  if (type == "toy") return toy_two_pixel_net();
  if (type == "identity") {
    const int size = n.get_positive_int("n", 2);
    return FeedForwardNet({Layer::dense(DenseMatrix::identity(std::size_t(size)), std::nullopt,
                                        Activation::kNone)});
  }
  if (type == "random_dense") {
    const auto widths = n.get_required<std::vector<std::size_t>>("widths");
    const RandomNetOptions r = parse_net_options(n);
    return as_config_error([&] { return random_dense_net(widths, r, seed_of(n, o)); });
  }
  if (type == "random_conv") {
    const auto channels = n.get_required<std::vector<std::size_t>>("channels");
    const int k = n.get_positive_int("k", 3);
    const RandomNetOptions r = parse_net_options(n);
    return as_config_error(
        [&] { return random_conv_net(channels, std::size_t(k), r, seed_of(n, o)); });
  }
  fail(ErrorKind::kConfig, "unknown net type \"" + type + "\"");
}

// ---------------------------------------------------------------- output

void write_run(const fs::path& dir, PowerResult r, const RunOptions& o) {
  if (!o.record_timing) r.wall_ms = 0.0;
  io::write_file_atomic(dir / "trace.csv", io::trace_csv(r.trace));
  io::write_json_atomic(dir / "summary.json", io::summary_json(r));
}

std::string pad3(std::size_t i) {
  std::ostringstream os;
  os.width(3);
  os.fill('0');
  os << i;
  return os.str();
}

// ---------------------------------------------------------------- commands

FailedRuns cmd_prox_power(const ConfigNode& cfg, const RunOptions& o) {
  const ConfigNode fn = cfg.child("functional");
  const auto ftype = fn.get<std::string>("type", "aniso_tv");
  const Signal f = parse_image(cfg.child("initializer"), o);
  const ParameterRule rule = parse_rule(cfg.child("rule"));
  const ProxConfig pc = parse_prox(cfg.child("prox"));
  PowerOptions po = parse_power(cfg, 2000);
  const auto snapshots = cfg.get<std::vector<int>>("snapshots", {2, 4, 10, 20, 30});
  cfg.check_unknown();

  Functional J = Functional::l1();
  if (ftype == "aniso_tv") {
    require(f.shape().grid, ErrorKind::kConfig, "aniso_tv needs an image initializer");
    J = Functional::aniso_tv(f.shape().rows, f.shape().cols);
  } else {
    require(ftype == "l1", ErrorKind::kConfig, "functional.type must be \"aniso_tv\" or \"l1\"");
  }

  std::map<int, Signal> snaps;
  po.on_iterate = [&](int k, const Signal& u) {
    if (std::find(snapshots.begin(), snapshots.end(), k) != snapshots.end()) snaps[k] = u;
  };
  const PowerResult r = proximal_power(J, rule, f, po, pc);
  write_run(o.out_dir, r, o);
  for (int k : snapshots) {
    const auto it = snaps.find(k);
    // Iterates past termination equal the final one.
    const Signal& s = it != snaps.end() ? it->second : r.u;
    io::write_file_atomic(o.out_dir / ("it_" + std::to_string(k) + ".pgm"), io::pgm_bytes(s));
  }
  io::write_file_atomic(o.out_dir / "final.pgm", io::pgm_bytes(r.u));
  io::write_json_atomic(o.out_dir / "final.json", io::signal_to_json(r.u));

  const double alpha = make_alpha(rule, *r.energy_initial, J.evaluate(r.u));
  ProxSolver solver(J, pc);
  const Signal v = solver.prox(r.u, alpha).v;
  const Subgradient p{(1.0 / alpha) * (r.u - v), alpha, v, 0.0};
  json report = io::report_json(diagnose(r.u, v, &J, &p));
  report["lambda"] = r.lambda;
  report["status"] = to_string(r.trace.status);
  report["energy_initial"] = *r.energy_initial;
  report["energy_final"] = *r.energy_final;
  io::write_json_atomic(o.out_dir / "report.json", report);
  return {};
}

FailedRuns cmd_graph_eig(const ConfigNode& cfg, const RunOptions& o) {
  const WeightedGraph g = parse_graph(cfg.child("graph"), o);
  const double p = cfg.get_exponent("p", 1.0);
  const bool zero_on_boundary = cfg.get<bool>("zero_on_boundary", !g.boundary().empty());
  const ConfigNode init = cfg.child("initializer");
  const auto itype = init.get<std::string>("type", g.boundary().empty() ? "fiedler" : "ones");
  Signal f;
  if (itype == "fiedler") {
    f = fiedler_vector(g);
  } else if (itype == "ones") {
    f = Signal::constant(Shape::flat(g.n_vertices()), 1.0);
  } else if (itype == "random") {
    f = random_signal(Shape::flat(g.n_vertices()), seed_of(init, o));
  } else if (itype == "file") {
    f = read_signal_file(init.get_required<std::string>("path"));
  } else {
    fail(ErrorKind::kConfig, "unknown initializer type \"" + itype + "\"");
  }
  const ParameterRule rule = parse_rule(cfg.child("rule"));
  const ProxConfig pc = parse_prox(cfg.child("prox"));
  const PowerOptions po = parse_power(cfg, 2000);
  cfg.check_unknown();

  const Functional J = Functional::graph_p(g, p, zero_on_boundary);
  const PowerResult r = proximal_power(J, rule, f, po, pc);
  write_run(o.out_dir, r, o);

  json metrics = json::object();
  std::vector<double> dist;
  if (!g.boundary().empty()) dist = g.bfs_distance(g.boundary());
  std::ostringstream csv;
  csv << "vertex,value";
  if (g.labels()) csv << ",label";
  if (!dist.empty()) csv << ",distance";
  csv << '\n';
  for (std::size_t i = 0; i < g.n_vertices(); ++i) {
    csv << i << ',' << io::format_double(r.u[i]);
    if (g.labels()) csv << ',' << (*g.labels())[i];
    if (!dist.empty()) csv << ',' << io::format_double(dist[i]);
    csv << '\n';
  }
  io::write_file_atomic(o.out_dir / "vertex_values.csv", csv.str());

  if (g.labels()) {
    std::size_t agree = 0;
    for (std::size_t i = 0; i < g.n_vertices(); ++i)
      agree += (r.u[i] > 0.0) == ((*g.labels())[i] == 1);
    const double a = double(agree) / double(g.n_vertices());
    metrics["accuracy"] = std::max(a, 1.0 - a);
  }
  if (!dist.empty()) {
    double ud = 0.0, uu = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (dist[i] < 0.0) continue;
      ud += r.u[i] * dist[i];
      uu += r.u[i] * r.u[i];
    }
    const double scale = uu > 0.0 ? ud / uu : 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i)
      if (dist[i] > 0.0) dev = std::max(dev, std::abs(scale * r.u[i] - dist[i]) / dist[i]);
    metrics["distance_scale"] = scale;
    metrics["distance_max_relative_deviation"] = dev;
  }
  metrics["lambda"] = r.lambda;
  metrics["status"] = to_string(r.trace.status);
  io::write_json_atomic(o.out_dir / "metrics.json", metrics);
  return {};
}

struct SweepRun {
  std::optional<PowerResult> result;
  std::string error;
};

enum class SweepMethod { kSimple, kRange };

std::vector<SweepRun> run_sweep(const OperatorHandle& T, const std::vector<Signal>& inits,
                                SweepMethod method, const PowerOptions& po, int jobs) {
  std::vector<SweepRun> runs(inits.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    OperatorHandle local = T;
    for (std::size_t i = next++; i < inits.size(); i = next++) {
      try {
        local.reset();
        runs[i].result = method == SweepMethod::kSimple ? simple_power(local, inits[i], po)
                                                        : range_power(local, inits[i], po);
      } catch (const Error& e) {
        runs[i].error = std::string(to_string(e.kind())) + ": " + e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, int(inits.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return runs;
}

FailedRuns write_modes(const OperatorHandle& T_in, const std::vector<SweepRun>& runs,
                       SweepMethod method, double dedup_deg, const fs::path& dir,
                       const std::string& prefix, json& summary) {
  OperatorHandle T = T_in;
  struct Mode {
    Signal u;
    const PowerResult* r;
    std::vector<std::size_t> members;
  };
  std::vector<Mode> modes;
  FailedRuns failed;
  json failures = json::array();
  json not_converged = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string id = prefix + pad3(i);
    if (!runs[i].result) {
      failed.push_back(id);
      failures.push_back({{"run", id}, {"error", runs[i].error}});
      continue;
    }
    const PowerResult& r = *runs[i].result;
    if (r.trace.status != Status::kConverged && r.trace.status != Status::kKernelHit) {
      not_converged.push_back(id);
      continue;
    }
    auto same = std::find_if(modes.begin(), modes.end(), [&](const Mode& m) {
      return angle_deg(m.u, r.u) < dedup_deg;
    });
    if (same != modes.end()) {
      same->members.push_back(i);
    } else {
      modes.push_back({r.u, &r, {i}});
    }
  }
  json list = json::array();
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const Mode& mode = modes[m];
    T.reset();
    const Signal Tu = T(mode.u);
    json j;
    j["lambda"] = mode.r->lambda;
    j["status"] = to_string(mode.r->trace.status);
    j["angle_deg"] = mode.r->angle_deg;
    if (method == SweepMethod::kSimple) {
      j["eigen_residual"] = eigen_residual(mode.u, Tu, mode.r->lambda);
    } else {
      j["relaxed_residual"] = relaxed_residual(mode.u, Tu, mode.r->lambda);
    }
    json members = json::array();
    for (std::size_t i : mode.members) members.push_back(prefix + pad3(i));
    j["runs"] = members;
    j["signal"] = io::signal_to_json(mode.u);
    const std::string stem = prefix + "mode_" + pad3(m);
    io::write_json_atomic(dir / (stem + ".json"), j);
    if (mode.u.shape().grid) io::write_file_atomic(dir / (stem + ".pgm"), io::pgm_bytes(mode.u));
    list.push_back({{"file", stem + ".json"}, {"lambda", mode.r->lambda},
                    {"runs", mode.members.size()}});
  }
  summary[prefix + "modes"] = list;
  summary[prefix + "not_converged"] = not_converged;
  summary[prefix + "failed_runs"] = failures;
  return failed;
}

FailedRuns cmd_net_modes(const ConfigNode& cfg, const RunOptions& o) {
  const FeedForwardNet net = parse_net(cfg.child("net"), o);
  const ConfigNode init = cfg.child("initializers");
  const auto itype = init.get<std::string>("type", "pixel_basis");
  std::vector<Signal> inits;
  const Layer& first = net.layers().front();
  const int default_rows = first.type == Layer::Type::kDense ? int(first.cols) : 0;
  if (itype == "pixel_basis" || itype == "random_sweep") {
    const int rows = init.get_positive_int("rows", std::max(default_rows, 1));
    const int cols = init.get_positive_int("cols", 1);
    if (itype == "pixel_basis") {
      inits = pixel_basis(std::size_t(rows), std::size_t(cols),
                          std::size_t(init.get_positive_int("k", 6)));
    } else {
      const int count = init.get_positive_int("count", 36);
      const std::uint64_t seed = seed_of(init, o);
      const Shape shape = cols > 1 ? Shape::image(rows, cols) : Shape::flat(rows);
      for (int i = 0; i < count; ++i) inits.push_back(random_signal(shape, seed + std::uint64_t(i)));
    }
  } else if (itype == "files") {
    for (const auto& p : init.get_required<std::vector<std::string>>("paths"))
      inits.push_back(read_signal_file(p));
  } else {
    fail(ErrorKind::kConfig, "unknown initializers type \"" + itype + "\"");
  }
  require(!inits.empty(), ErrorKind::kConfig, "no initializers");
  const auto method_name = cfg.get<std::string>("method", "auto");
  SweepMethod method;
  if (method_name == "auto") {
    method = net.bias_free() ? SweepMethod::kSimple : SweepMethod::kRange;
  } else if (method_name == "simple" || method_name == "range") {
    method = method_name == "simple" ? SweepMethod::kSimple : SweepMethod::kRange;
  } else {
    fail(ErrorKind::kConfig, "method must be \"auto\", \"simple\" or \"range\"");
  }
  const double dedup = cfg.get_positive("dedup_angle_deg", 0.5);
  const bool complement = cfg.get<bool>("complement", false);
  const PowerOptions po = parse_power(cfg, 5000);
  cfg.check_unknown();

  // Dimension check up front so a mismatch is a config error, not N failures.
  try {
    const Signal out = net.forward(inits.front());
    require(out.size() == inits.front().size(), ErrorKind::kConfig,
            "net output size differs from its input size");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidInput) fail(ErrorKind::kConfig, e.what());
    throw;
  }

  json summary;
  summary["runs"] = inits.size();
  summary["method"] = method == SweepMethod::kSimple ? "simple" : "range";
  const fs::path dir = o.out_dir / "modes";
  const OperatorHandle T = OperatorHandle::net(net);
  FailedRuns failed =
      write_modes(T, run_sweep(T, inits, method, po, o.jobs), method, dedup, dir, "", summary);
  if (complement) {
    const OperatorHandle Tc = OperatorHandle::complement(T);
    FailedRuns fc = write_modes(Tc, run_sweep(Tc, inits, method, po, o.jobs), method, dedup,
                                dir, "complement_", summary);
    failed.insert(failed.end(), fc.begin(), fc.end());
  }
  io::write_json_atomic(o.out_dir / "summary.json", summary);
  return failed;
}

FailedRuns cmd_kernel(const ConfigNode& cfg, const RunOptions& o) {
  const FeedForwardNet net = parse_net(cfg.child("net"), o);
  const int samples = cfg.get_positive_int("samples", 10000);
  const int cone_samples = cfg.get_positive_int("cone_samples", 500);
  const std::uint64_t seed = seed_of(cfg, o);
  const auto input_shape = cfg.get<std::vector<std::size_t>>("input_shape", {});
  cfg.check_unknown();
  require(net.all_relu(), ErrorKind::kUnsupported,
          "kernel analysis needs ReLU activations in every layer");

  const Layer& first = net.layers().front();
  Shape shape = Shape::flat(first.cols);
  if (!input_shape.empty()) {
    require(input_shape.size() == 2, ErrorKind::kConfig, "input_shape must be [rows, cols]");
    shape = Shape::image(input_shape[0], input_shape[1]);
  } else {
    require(first.type == Layer::Type::kDense, ErrorKind::kConfig,
            "conv nets need input_shape");
  }

  json report;
  std::optional<KernelCone> cone;
  std::optional<FeedForwardNet> layer1;
  if (first.type == Layer::Type::kDense) {
    const DenseMatrix a{first.rows, first.cols, first.weights};
    const std::vector<double> b = first.bias ? *first.bias : std::vector<double>(first.rows, 0.0);
    cone = kernel_cone_single(a, b);
    layer1.emplace(std::vector<Layer>{first});
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Signal tip = cone ? cone->tip : Signal::zeros(shape);
  const double scale = 1.0 + norm(tip);
  auto is_zero = [](const Signal& x, const Signal& out) {
    return norm(out) <= 1e-12 * (1.0 + norm(x));
  };
  std::size_t l1_agree = 0, l1_members = 0, ml_agree = 0, ml_members = 0;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> x(shape.size());
    const double sd = s % 3 == 2 ? 0.01 * scale : scale;
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = (s % 3 == 0 ? 0.0 : tip[i]) + sd * gauss(rng);
    const Signal u(std::move(x), shape);
    if (cone) {
      const bool member = cone->contains(u);
      l1_members += member;
      l1_agree += member == is_zero(u, layer1->forward(u));
    }
    const bool member = kernel_member_multilayer(net, u);
    ml_members += member;
    ml_agree += member == is_zero(u, net.forward(u));
  }
  if (cone) {
    const ConeReport cr = cone_property_test(*cone, std::size_t(cone_samples), seed + 1);
    report["layer1"] = {{"tip", io::signal_to_json(cone->tip)},
                        {"residual", cone->residual},
                        {"range_condition", cone->range_condition},
                        {"samples", samples},
                        {"members", l1_members},
                        {"agreement", double(l1_agree) / samples},
                        {"cone_test_applicable", cr.applicable},
                        {"cone_samples", cr.samples},
                        {"cone_checks", cr.checks},
                        {"cone_violations", cr.violations}};
  } else {
    report["layer1"] = nullptr;
  }
  report["multilayer"] = {{"layers", net.n_layers()},
                          {"samples", samples},
                          {"members", ml_members},
                          {"kernel_fraction", double(ml_members) / samples},
                          {"agreement", double(ml_agree) / samples}};
  report["lipschitz_bound"] = net.lipschitz_bound();
  io::write_json_atomic(o.out_dir / "kernel_report.json", report);
  return {};
}

FailedRuns cmd_robustness(const ConfigNode& cfg, const RunOptions& o) {
  const ConfigNode mn = cfg.child("mode");
  const auto mtype = mn.get<std::string>("type", "file");
  require(mtype == "file", ErrorKind::kConfig, "mode.type must be \"file\"");
  const Signal mode = read_signal_file(mn.get_required<std::string>("path"));
  const auto ftype = cfg.child("functional").get<std::string>("type", "aniso_tv");
  const ParameterRule rule = parse_rule(cfg.child("rule"));
  const ProxConfig pc = parse_prox(cfg.child("prox"));
  const double noise_std = cfg.get<double>("noise_std", 0.01);
  require(noise_std >= 0.0, ErrorKind::kConfig, "noise_std must be >= 0");
  const int iterations = cfg.get_positive_int("iterations", 10);
  const bool rescale = cfg.get<bool>("rescale", true);
  const std::uint64_t seed = seed_of(cfg, o);
  cfg.check_unknown();

  Functional J = Functional::l1();
  if (ftype == "aniso_tv") {
    require(mode.shape().grid, ErrorKind::kConfig, "aniso_tv needs an image-shaped mode");
    J = Functional::aniso_tv(mode.shape().rows, mode.shape().cols);
  } else {
    require(ftype == "l1", ErrorKind::kConfig, "functional.type must be \"aniso_tv\" or \"l1\"");
  }
  require(max_abs(mode) > 0.0, ErrorKind::kInvalidInput, "mode is zero");
  const Signal m = rescale ? (1.0 / max_abs(mode)) * mode : mode;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noisy_data(m.data());
  for (double& x : noisy_data) x += noise_std * gauss(rng);
  const Signal noisy = m.with_data(std::move(noisy_data));

  const Signal ref = normalized(J.null_space_project(m));
  const double before = distance(normalized(J.null_space_project(noisy)), ref);
  PowerOptions po;
  po.eps = 1e-14;
  po.max_iters = iterations;
  const PowerResult r = proximal_power(J, rule, noisy, po, pc);
  const double after = distance(r.u, ref);

  write_run(o.out_dir, r, o);
  io::write_file_atomic(o.out_dir / "noisy.pgm", io::pgm_bytes(noisy));
  io::write_file_atomic(o.out_dir / "restored.pgm", io::pgm_bytes(r.u));
  io::write_json_atomic(o.out_dir / "restored.json", io::signal_to_json(r.u));
  io::write_json_atomic(
      o.out_dir / "robustness.json",
      {{"noise_std", noise_std},
       {"iterations", r.iters},
       {"distance_before", before},
       {"distance_after", after},
       {"reduction_factor", io::number_or_string(after > 0.0 ? before / after : kInfinity)}});
  return {};
}

using Command = FailedRuns (*)(const ConfigNode&, const RunOptions&);

const std::map<std::string, Command>& registry() {
  static const std::map<std::string, Command> r{{"prox-power", cmd_prox_power},
                                                 {"graph-eig", cmd_graph_eig},
                                                 {"net-modes", cmd_net_modes},
                                                 {"kernel", cmd_kernel},
                                                 {"robustness", cmd_robustness}};
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

int run_command(const std::string& name, const json& config, const RunOptions& opts,
                std::ostream& err) {
  try {
    const auto it = registry().find(name);
    require(it != registry().end(), ErrorKind::kConfig, "unknown command \"" + name + "\"");
    require(opts.jobs > 0, ErrorKind::kConfig, "--jobs must be positive");
    const ConfigNode root(config);
    const FailedRuns failed = it->second(root, opts);
    if (failed.empty()) return 0;
    err << json{{"error", "partial-failure"},
                {"message", std::to_string(failed.size()) + " run(s) failed"},
                {"failed_runs", failed}}
               .dump()
        << '\n';
    return 1;
  } catch (const Error& e) {
    err << json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump() << '\n';
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
  }
  return 1;
}

}  // namespace proxeig::cli
