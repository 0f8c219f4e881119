#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "proxeig/diagnostics.hpp"
#include "proxeig/graph.hpp"
#include "proxeig/nets.hpp"
#include "proxeig/power.hpp"
#include "proxeig/signal.hpp"

namespace proxeig::io {

using nlohmann::json;

/// "%.17g"; round-trips every finite double.
std::string format_double(double x);

/// {"shape": [r, c] or [n], "data": [...]}
json signal_to_json(const Signal& s);
Signal signal_from_json(const json& j);

/// {"n": int, "edges": [[i, j, w], ...], "boundary": [...], "labels": [...]}
json graph_to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const json& j);

/// {"layers": [{"type": "dense"|"conv", "rows", "cols" | "shape",
///              "weights", "bias", "activation"}]}
json net_to_json(const FeedForwardNet& net);
FeedForwardNet net_from_json(const json& j);

/// CSV with header
/// k,rayleigh,rayleigh_dagger,angle_deg,affinity,energy_J,alpha,collinearity_gap,step_norm,t_norm
/// and empty cells for absent values.
std::string trace_csv(const IterationTrace& trace);

/// {"status", "lambda", "angle_deg", "iters", "wall_ms"}
json summary_json(const PowerResult& r);

json report_json(const DiagnosticReport& r);

/// Binary 8-bit PGM of a grid signal, min-max scaled; the scale is recorded
/// in a "# min=... max=..." header comment. Flat signals are written as a
/// single row.
std::string pgm_bytes(const Signal& s);

/// Writes to a temporary sibling and renames it over path; creates parent
/// directories. Throws kIo.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
void write_json_atomic(const std::filesystem::path& path, const json& j);

std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);

/// Numbers that are not finite (inf) are written as the strings "inf"/"-inf".
json number_or_string(double x);

}  // namespace proxeig::io
