#include "proxeig/cli/config.hpp"

#include <cmath>

namespace proxeig::cli {

namespace {
const json& empty_object() {
  static const json e = json::object();
  return e;
}
}  // namespace

ConfigNode::ConfigNode(json root) : state_(std::make_shared<State>()), path_() {
  require(root.is_object() || root.is_null(), ErrorKind::kConfig,
          "config must be a JSON object");
  state_->root = root.is_null() ? json::object() : std::move(root);
  node_ = &state_->root;
}

ConfigNode::ConfigNode(std::shared_ptr<State> state, const json* node, std::string path)
    : state_(std::move(state)), node_(node), path_(std::move(path)) {}

std::string ConfigNode::full(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

void ConfigNode::mark(const std::string& key) const { state_->read.insert(full(key)); }

bool ConfigNode::has(const std::string& key) const {
  return node_->contains(key) && !(*node_)[key].is_null();
}

double ConfigNode::get_positive(const std::string& key, double fallback) const {
  const double x = get<double>(key, fallback);
  require(x > 0.0 && std::isfinite(x), ErrorKind::kConfig,
          "config key \"" + full(key) + "\" must be a positive number");
  return x;
}

int ConfigNode::get_positive_int(const std::string& key, int fallback) const {
  const int x = get<int>(key, fallback);
  require(x > 0, ErrorKind::kConfig,
          "config key \"" + full(key) + "\" must be a positive integer");
  return x;
}

double ConfigNode::get_exponent(const std::string& key, double fallback) const {
  mark(key);
  if (!has(key)) return fallback;
  const json& v = (*node_)[key];
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    require(s == "inf" || s == "infinity", ErrorKind::kConfig,
            "config key \"" + full(key) + "\" must be a number >= 1 or \"inf\"");
    return std::numeric_limits<double>::infinity();
  }
  require(v.is_number() && v.get<double>() >= 1.0, ErrorKind::kConfig,
          "config key \"" + full(key) + "\" must be a number >= 1 or \"inf\"");
  return v.get<double>();
}

json ConfigNode::raw(const std::string& key) const {
  mark(key);
  return has(key) ? (*node_)[key] : json();
}

ConfigNode ConfigNode::child(const std::string& key) const {
  mark(key);
  state_->descended.insert(full(key));
  if (!has(key)) return ConfigNode(state_, &empty_object(), full(key));
  const json& v = (*node_)[key];
  require(v.is_object(), ErrorKind::kConfig, "config key \"" + full(key) + "\" must be an object");
  return ConfigNode(state_, &v, full(key));
}

void ConfigNode::check_object(const json& obj, const std::string& path) const {
  for (const auto& [k, v] : obj.items()) {
    const std::string p = path.empty() ? k : path + "." + k;
    require(state_->read.count(p) > 0, ErrorKind::kConfig, "unknown config key \"" + p + "\"");
    if (v.is_object() && state_->descended.count(p)) check_object(v, p);
  }
}

void ConfigNode::check_unknown() const { check_object(*node_, path_); }

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0, ErrorKind::kConfig,
          "--set expects KEY=VALUE, got \"" + assignment + "\"");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    require(!part.empty(), ErrorKind::kConfig, "--set: empty key segment in \"" + key + "\"");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace proxeig::cli
