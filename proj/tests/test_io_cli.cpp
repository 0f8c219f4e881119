#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "proxeig/cli/commands.hpp"
#include "proxeig/cli/config.hpp"
#include "proxeig/error.hpp"
#include "proxeig/graph.hpp"
#include "proxeig/io.hpp"
#include "proxeig/nets.hpp"
#include "test_util.hpp"

using namespace proxeig;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("proxeig_test_" + name);
  fs::remove_all(p);
  return p;
}

struct CommandOutcome {
  int code;
  json error;
};

CommandOutcome run(const std::string& cmd, const json& cfg, const fs::path& out) {
  cli::RunOptions o;
  o.out_dir = out;
  o.record_timing = false;
  std::ostringstream err;
  const int code = cli::run_command(cmd, cfg, o, err);
  return {code, err.str().empty() ? json() : json::parse(err.str())};
}

}  // namespace

TEST(Io, SignalRoundTripIsExact) {
  const Signal s = proxeig::testing::gaussian_signal(Shape::image(3, 4), 1);
  const Signal back = io::signal_from_json(json::parse(io::signal_to_json(s).dump()));
  EXPECT_EQ(back.data(), s.data());
  EXPECT_EQ(back.shape(), s.shape());
  EXPECT_EQ(io::signal_from_json(io::signal_to_json(Signal({1.0, 2.0}))).shape(), Shape::flat(2));
}

TEST(Io, SignalJsonValidation) {
  EXPECT_THROW(io::signal_from_json(json{{"shape", {2}}, {"data", {1.0}}}), Error);
  EXPECT_THROW(io::signal_from_json(json{{"shape", {1}}, {"data", {1.0}}, {"extra", 1}}), Error);
  EXPECT_THROW(io::signal_from_json(json{{"shape", {1}}}), Error);
  EXPECT_THROW(io::signal_from_json(json{{"shape", {1, 1, 1}}, {"data", {1.0}}}), Error);
}

TEST(Io, GraphAndNetRoundTrip) {
  const WeightedGraph g = two_moons(10, 0.1, 3, 2).with_boundary({0, 3});
  const WeightedGraph gb = io::graph_from_json(io::graph_to_json(g));
  EXPECT_EQ(gb.edges(), g.edges());
  EXPECT_EQ(gb.boundary(), g.boundary());
  EXPECT_EQ(gb.labels(), g.labels());

  const FeedForwardNet n = random_conv_net({1, 2, 1}, 3, {0.0, 0.0, true, true}, 3);
  const FeedForwardNet nb = io::net_from_json(io::net_to_json(n));
  const Signal u = proxeig::testing::gaussian_signal(Shape::image(5, 5), 4);
  EXPECT_EQ(nb.forward(u).data(), n.forward(u).data());
  EXPECT_THROW(io::net_from_json(json{{"layers", json::array()}}), Error);
}

TEST(Io, TraceCsvLeavesAbsentCellsEmpty) {
  IterationTrace t;
  TraceRecord r;
  r.k = 0;
  r.rayleigh = 0.5;
  r.step_norm = 0.25;
  r.t_norm = 1.0;
  t.records.push_back(r);
  const std::string csv = io::trace_csv(t);
  EXPECT_EQ(csv,
            "k,rayleigh,rayleigh_dagger,angle_deg,affinity,energy_J,alpha,collinearity_gap,"
            "step_norm,t_norm\n0,0.5,,,,,,,0.25,1\n");
}

TEST(Io, PgmHeaderAndScaling) {
  const std::string pgm = io::pgm_bytes(Signal({0.0, 1.0, 2.0, 4.0}, Shape::image(2, 2)));
  EXPECT_EQ(pgm.substr(0, 3), "P5\n");
  EXPECT_NE(pgm.find("# min=0 max=4\n2 2\n255\n"), std::string::npos);
  EXPECT_EQ(static_cast<unsigned char>(pgm.back()), 255);
  EXPECT_EQ(static_cast<unsigned char>(pgm[pgm.size() - 4]), 0);
}

TEST(Io, AtomicWriteCreatesDirectories) {
  const fs::path dir = fresh_dir("atomic");
  io::write_file_atomic(dir / "a" / "b.txt", "hello");
  EXPECT_EQ(io::read_text(dir / "a" / "b.txt"), "hello");
  EXPECT_THROW(io::read_text(dir / "missing.txt"), Error);
  fs::remove_all(dir);
}

TEST(Io, NonFiniteNumbersBecomeStrings) {
  EXPECT_EQ(io::number_or_string(kInfinity), json("inf"));
  EXPECT_EQ(io::number_or_string(1.5), json(1.5));
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(Config, UnknownKeysAreRejected) {
  cli::ConfigNode root(json{{"rule", {{"c", 0.5}, {"typo", 1}}}, {"eps", 1e-6}});
  const auto rule = root.child("rule");
  EXPECT_DOUBLE_EQ(rule.get<double>("c", 0.9), 0.5);
  EXPECT_DOUBLE_EQ(root.get_positive("eps", 1.0), 1e-6);
  try {
    root.check_unknown();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("rule.typo"), std::string::npos);
  }
}

TEST(Config, TypedAccess) {
  cli::ConfigNode root(json{{"p", "inf"}, {"n", -2}, {"s", "x"}});
  EXPECT_TRUE(std::isinf(root.get_exponent("p", 1.0)));
  EXPECT_THROW(root.get_positive_int("n", 1), Error);
  EXPECT_THROW(root.get<double>("s", 0.0), Error);
  EXPECT_THROW(root.get_required<int>("missing"), Error);
  EXPECT_EQ(root.child("absent").get<int>("k", 3), 3);
}

TEST(Config, Overrides) {
  json j = json::object();
  cli::apply_override(j, "rule.c=0.5");
  cli::apply_override(j, "rule.type=constant");
  cli::apply_override(j, "snapshots=[1,2]");
  EXPECT_EQ(j["rule"]["c"], 0.5);
  EXPECT_EQ(j["rule"]["type"], "constant");
  EXPECT_EQ(j["snapshots"], json::array({1, 2}));
  EXPECT_THROW(cli::apply_override(j, "novalue"), Error);
}

TEST(Cli, ProxPowerIsDeterministic) {
  const json cfg{{"initializer", {{"size", 24}}}, {"max_iters", 50}};
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  ASSERT_EQ(run("prox-power", cfg, a).code, 0);
  ASSERT_EQ(run("prox-power", cfg, b).code, 0);
  for (const char* f : {"trace.csv", "summary.json", "report.json", "final.json", "final.pgm", "it_2.pgm"})
    EXPECT_EQ(io::read_text(a / f), io::read_text(b / f)) << f;
  const json summary = io::read_json(a / "summary.json");
  EXPECT_EQ(summary["status"], "converged");
  EXPECT_EQ(summary["wall_ms"], 0.0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, ConstantImageGivesNullSpaceError) {
  const fs::path d = fresh_dir("null");
  const CommandOutcome r = run("prox-power", {{"initializer", {{"type", "constant"}, {"rows", 8}, {"cols", 8}}}}, d);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.error["error"], "null-space-input");
  fs::remove_all(d);
}

TEST(Cli, UnknownKeyAndCommand) {
  const fs::path d = fresh_dir("unknown");
  CommandOutcome r = run("prox-power", {{"rule", {{"cc", 1}}}}, d);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.error["error"], "config-error");
  r = run("no-such-command", json::object(), d);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.error["error"], "config-error");
  EXPECT_FALSE(fs::exists(d / "trace.csv"));
  fs::remove_all(d);
}

TEST(Cli, GraphEigOnPath) {
  const fs::path d = fresh_dir("graph");
  const json cfg{{"graph", {{"type", "path"}, {"n", 20}, {"boundary", {0}}}}, {"p", "inf"}};
  ASSERT_EQ(run("graph-eig", cfg, d).code, 0);
  const json m = io::read_json(d / "metrics.json");
  EXPECT_LT(m["distance_max_relative_deviation"].get<double>(), 0.02);
  EXPECT_TRUE(fs::exists(d / "vertex_values.csv"));
  fs::remove_all(d);
}

TEST(Cli, NetModesOnToyNet) {
  const fs::path d = fresh_dir("toy");
  const json cfg{{"net", {{"type", "toy"}}},
                 {"method", "simple"},
                 {"initializers", {{"type", "random_sweep"}, {"rows", 2}, {"count", 10}}}};
  ASSERT_EQ(run("net-modes", cfg, d).code, 0);
  const json s = io::read_json(d / "summary.json");
  ASSERT_EQ(s["modes"].size(), 1u);
  EXPECT_EQ(s["modes"][0]["lambda"], 0.0);
  fs::remove_all(d);
}

TEST(Cli, KernelRejectsNonRelu) {
  const fs::path d = fresh_dir("kernel");
  const json cfg{{"net", {{"type", "identity"}, {"n", 3}}}, {"samples", 10}};
  const CommandOutcome r = run("kernel", cfg, d);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.error["error"], "unsupported");
  fs::remove_all(d);
}
