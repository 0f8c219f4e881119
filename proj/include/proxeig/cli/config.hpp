#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "proxeig/error.hpp"

namespace proxeig::cli {

using nlohmann::json;

/// Read-only view of a JSON config object that remembers which keys were
/// read. check_unknown() on the root then rejects every key nobody asked for.
class ConfigNode {
 public:
  /// Root node; keeps its own copy of the document.
  explicit ConfigNode(json root);

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const;

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!has(key)) {
      mark(key);
      return fallback;
    }
    return get_required<T>(key);
  }

  template <typename T>
  T get_required(const std::string& key) const {
    require(has(key), ErrorKind::kConfig, "missing config key \"" + full(key) + "\"");
    mark(key);
    try {
      return (*node_)[key].template get<T>();
    } catch (const json::exception&) {
      fail(ErrorKind::kConfig, "config key \"" + full(key) + "\" has the wrong type");
    }
  }

  double get_positive(const std::string& key, double fallback) const;
  int get_positive_int(const std::string& key, int fallback) const;
  /// A number, or the string "inf".
  double get_exponent(const std::string& key, double fallback) const;

  /// The raw value (not descended into by check_unknown).
  json raw(const std::string& key) const;

  /// Nested object; an absent key gives an empty object.
  ConfigNode child(const std::string& key) const;

  /// Throws kConfig naming the first key that was never read.
  void check_unknown() const;

 private:
  struct State {
    json root;
    std::set<std::string> read;
    std::set<std::string> descended;
  };
  ConfigNode(std::shared_ptr<State> state, const json* node, std::string path);
  std::string full(const std::string& key) const;
  void mark(const std::string& key) const;
  void check_object(const json& obj, const std::string& path) const;

  std::shared_ptr<State> state_;
  const json* node_;
  std::string path_;
};

/// Applies "a.b.c=value" to root. The value is parsed as JSON when possible
/// and taken as a string otherwise.
void apply_override(json& root, const std::string& assignment);

}  // namespace proxeig::cli
