#include "proxeig/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "proxeig/error.hpp"

namespace proxeig::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

namespace {

template <typename T>
T get_field(const json& j, const char* key, const char* what) {
  require(j.is_object() && j.contains(key), ErrorKind::kInvalidInput,
          std::string(what) + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidInput, std::string(what) + ": bad \"" + key + "\": " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  require(j.is_object(), ErrorKind::kInvalidInput, std::string(what) + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return k == a; });
    require(ok, ErrorKind::kInvalidInput, std::string(what) + ": unknown key \"" + k + "\"");
  }
}

}  // namespace

json signal_to_json(const Signal& s) {
  json j;
  if (s.shape().grid) {
    j["shape"] = {s.shape().rows, s.shape().cols};
  } else {
    j["shape"] = {s.size()};
  }
  j["data"] = s.data();
  return j;
}

Signal signal_from_json(const json& j) {
  check_keys(j, {"shape", "data"}, "signal");
  auto data = get_field<std::vector<double>>(j, "data", "signal");
  if (!j.contains("shape")) return Signal(std::move(data));
  const auto shape = get_field<std::vector<std::size_t>>(j, "shape", "signal");
  if (shape.size() == 1) {
    require(shape[0] == data.size(), ErrorKind::kInvalidInput, "signal: shape/data mismatch");
    return Signal(std::move(data));
  }
  require(shape.size() == 2, ErrorKind::kInvalidInput, "signal: shape must be [n] or [r, c]");
  return Signal(std::move(data), Shape::image(shape[0], shape[1]));
}

json graph_to_json(const WeightedGraph& g) {
  json j;
  j["n"] = g.n_vertices();
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.i, e.j, e.w});
  j["edges"] = std::move(edges);
  j["boundary"] = g.boundary();
  if (g.labels()) j["labels"] = *g.labels();
  return j;
}

WeightedGraph graph_from_json(const json& j) {
  check_keys(j, {"n", "edges", "boundary", "labels"}, "graph");
  const auto n = get_field<std::size_t>(j, "n", "graph");
  std::vector<Edge> edges;
  for (const json& e : get_field<json>(j, "edges", "graph")) {
    require(e.is_array() && e.size() == 3, ErrorKind::kInvalidInput,
            "graph: every edge must be [i, j, w]");
    edges.push_back({e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>(), e[2].get<double>()});
  }
  std::vector<std::uint32_t> boundary;
  if (j.contains("boundary") && !j["boundary"].is_null())
    boundary = j["boundary"].get<std::vector<std::uint32_t>>();
  std::optional<std::vector<int>> labels;
  if (j.contains("labels") && !j["labels"].is_null()) labels = j["labels"].get<std::vector<int>>();
  return WeightedGraph(n, std::move(edges), std::move(boundary), std::move(labels));
}

json net_to_json(const FeedForwardNet& net) {
  json layers = json::array();
  for (const Layer& l : net.layers()) {
    json jl;
    if (l.type == Layer::Type::kDense) {
      jl["type"] = "dense";
      jl["rows"] = l.rows;
      jl["cols"] = l.cols;
    } else {
      jl["type"] = "conv";
      jl["shape"] = l.shape;
    }
    jl["weights"] = l.weights;
    jl["bias"] = l.bias ? json(*l.bias) : json(nullptr);
    jl["activation"] = l.activation == Activation::kRelu ? "relu" : "none";
    layers.push_back(std::move(jl));
  }
  return json{{"layers", std::move(layers)}};
}

FeedForwardNet net_from_json(const json& j) {
  check_keys(j, {"layers"}, "net");
  std::vector<Layer> layers;
  for (const json& jl : get_field<json>(j, "layers", "net")) {
    const auto type = get_field<std::string>(jl, "type", "net layer");
    std::optional<std::vector<double>> bias;
    if (jl.contains("bias") && !jl["bias"].is_null())
      bias = jl["bias"].get<std::vector<double>>();
    Activation act = Activation::kRelu;
    if (jl.contains("activation")) {
      const auto a = jl["activation"].get<std::string>();
      require(a == "relu" || a == "none", ErrorKind::kInvalidInput,
              "net layer: activation must be \"relu\" or \"none\"");
      act = a == "relu" ? Activation::kRelu : Activation::kNone;
    }
    auto weights = get_field<std::vector<double>>(jl, "weights", "net layer");
    if (type == "dense") {
      check_keys(jl, {"type", "rows", "cols", "weights", "bias", "activation"}, "net layer");
      DenseMatrix a{get_field<std::size_t>(jl, "rows", "net layer"),
                    get_field<std::size_t>(jl, "cols", "net layer"), std::move(weights)};
      layers.push_back(Layer::dense(std::move(a), std::move(bias), act));
    } else if (type == "conv") {
      check_keys(jl, {"type", "shape", "weights", "bias", "activation"}, "net layer");
      const auto shape = get_field<std::vector<std::size_t>>(jl, "shape", "net layer");
      require(shape.size() == 4, ErrorKind::kInvalidInput, "conv layer: shape must have 4 entries");
      layers.push_back(Layer::conv({shape[0], shape[1], shape[2], shape[3]}, std::move(weights),
                                   std::move(bias), act));
    } else {
      fail(ErrorKind::kInvalidInput, "net layer: unknown type \"" + type + "\"");
    }
  }
  return FeedForwardNet(std::move(layers));
}

std::string trace_csv(const IterationTrace& trace) {
  std::ostringstream os;
  os << "k,rayleigh,rayleigh_dagger,angle_deg,affinity,energy_J,alpha,collinearity_gap,"
        "step_norm,t_norm\n";
  auto opt = [&](const std::optional<double>& x) {
    os << ',';
    if (x) os << format_double(*x);
  };
  for (const TraceRecord& r : trace.records) {
    os << r.k << ',' << format_double(r.rayleigh);
    opt(r.rayleigh_dagger);
    opt(r.angle_deg);
    opt(r.affinity);
    opt(r.energy_J);
    opt(r.alpha);
    opt(r.collinearity_gap);
    os << ',' << format_double(r.step_norm) << ',' << format_double(r.t_norm) << '\n';
  }
  return os.str();
}

json summary_json(const PowerResult& r) {
  return json{{"status", to_string(r.trace.status)},
              {"lambda", number_or_string(r.lambda)},
              {"angle_deg", number_or_string(r.angle_deg)},
              {"iters", r.iters},
              {"wall_ms", r.wall_ms}};
}

json report_json(const DiagnosticReport& r) {
  json j{{"rayleigh", number_or_string(r.rayleigh)},
         {"rayleigh_dagger", number_or_string(r.rayleigh_dagger)},
         {"angle_deg", number_or_string(r.angle_deg)},
         {"affinity", r.affinity ? number_or_string(*r.affinity) : json(nullptr)},
         {"eigen_residual", number_or_string(r.eigen_residual)},
         {"relaxed_residual", number_or_string(r.relaxed_residual)}};
  if (r.per_pixel_lambda) {
    json vals = json::array();
    const auto& m = *r.per_pixel_lambda;
    for (std::size_t i = 0; i < m.valid.size(); ++i)
      vals.push_back(m.valid[i] ? json(m.values[i]) : json(nullptr));
    j["per_pixel_lambda"] = std::move(vals);
  } else {
    j["per_pixel_lambda"] = nullptr;
  }
  return j;
}

std::string pgm_bytes(const Signal& s) {
  const std::size_t rows = s.shape().grid ? s.shape().rows : 1;
  const std::size_t cols = s.shape().grid ? s.shape().cols : s.size();
  double lo = 0.0, hi = 0.0;
  if (!s.empty()) {
    const auto [mn, mx] = std::minmax_element(s.data().begin(), s.data().end());
    lo = *mn;
    hi = *mx;
  }
  std::string out = "P5\n# min=" + format_double(lo) + " max=" + format_double(hi) + "\n" +
                    std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  const double range = hi - lo;
  for (double x : s.values()) {
    const double t = range > 0.0 ? (x - lo) / range : 0.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  require(!ec, ErrorKind::kIo, "cannot create directory " + path.parent_path().string());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorKind::kIo, "cannot open " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    require(out.good(), ErrorKind::kIo, "write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  require(!ec, ErrorKind::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

void write_json_atomic(const fs::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kInvalidInput, path.string() + ": " + e.what());
  }
}

}  // namespace proxeig::io
