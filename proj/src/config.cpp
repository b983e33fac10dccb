#include "frameind/config.hpp"

#include <charconv>
#include <istream>

#include "frameind/errors.hpp"
#include "frameind/io.hpp"

namespace frameind {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t end = value.find(',', pos);
    if (end == std::string::npos) end = value.size();
    const std::string item = trim(value.substr(pos, end - pos));
    if (!item.empty()) items.push_back(item);
    if (end == value.size()) break;
    pos = end + 1;
  }
  return items;
}

const char* kKnownKeys[] = {
    "subtask", "recipe", "normalize", "metric", "linkage", "k",
    "vectors", "contextual_vectors", "weighting", "lowercase", "seed",
    "learning_rate", "max_epochs", "l2", "tolerance",
};

bool known_key(const std::string& key) {
  for (const char* name : kKnownKeys) {
    if (key == name) return true;
  }
  return key.rfind("block_scale.", 0) == 0;
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else {
      const auto comment = value.find('#');
      if (comment != std::string::npos) value = trim(value.substr(0, comment));
    }
    config.values_[key] = value;
  }
  return config;
}

bool ConfigFile::has(const std::string& key) const { return values_.contains(key); }

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long ConfigFile::get_int(const std::string& key, long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  long value = 0;
  const std::string& text = it->second;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("config key '" + key + "': expected an integer, got '" + text + "'");
  }
  return value;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double value = 0.0;
  const std::string& text = it->second;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return value;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string value = lowercase_ascii(it->second);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("config key '" + key + "': expected true or false, got '" + it->second + "'");
}

void ConfigFile::apply(PipelineConfig& config, std::vector<std::string>* warnings) const {
  if (has("subtask")) config.subtask = parse_subtask(get_string("subtask", ""));
  if (has("recipe")) {
    config.recipe.clear();
    for (const std::string& name : split_list(get_string("recipe", ""))) {
      config.recipe.push_back({parse_block_kind(name), 1.0});
    }
  }
  config.normalize = get_bool("normalize", config.normalize);
  if (has("metric")) config.metric = parse_metric(get_string("metric", ""));
  if (has("linkage")) config.linkage = parse_linkage(get_string("linkage", ""));
  if (has("k")) {
    const long k = get_int("k", 0);
    if (k < 1) throw UsageError("config key 'k': must be at least 1");
    config.k = static_cast<std::size_t>(k);
  }
  config.vectors_path = get_string("vectors", config.vectors_path);
  config.contextual_vectors_path = get_string("contextual_vectors", config.contextual_vectors_path);
  if (has("weighting")) {
    const std::string weighting = get_string("weighting", "");
    if (weighting == "tfidf") {
      config.weighting = ContextWeighting::TfIdf;
    } else if (weighting == "uniform") {
      config.weighting = ContextWeighting::Uniform;
    } else {
      throw UsageError("config key 'weighting': expected tfidf or uniform, got '" + weighting + "'");
    }
  }
  config.lowercase = get_bool("lowercase", config.lowercase);
  config.seed = get_int("seed", config.seed);

  // block_scale.<name> rescales every matching recipe block.
  for (const auto& [key, value] : values_) {
    if (key.rfind("block_scale.", 0) != 0) continue;
    const BlockKind kind = parse_block_kind(key.substr(std::string("block_scale.").size()));
    const double scale = get_double(key, 1.0);
    for (RecipeBlock& block : config.recipe) {
      if (block.kind == kind) block.scale = scale;
    }
  }

  if (warnings != nullptr) {
    for (const auto& [key, value] : values_) {
      if (!known_key(key)) warnings->push_back("config: ignoring unknown key '" + key + "'");
    }
  }
}

void ConfigFile::apply(TrainConfig& config) const {
  config.learning_rate = get_double("learning_rate", config.learning_rate);
  const long epochs = get_int("max_epochs", static_cast<long>(config.max_epochs));
  if (epochs < 1) throw UsageError("config key 'max_epochs': must be at least 1");
  config.max_epochs = static_cast<std::size_t>(epochs);
  config.l2 = get_double("l2", config.l2);
  config.tolerance = get_double("tolerance", config.tolerance);
  config.seed = get_int("seed", config.seed);
  if (!(config.learning_rate > 0.0)) throw UsageError("config key 'learning_rate': must be positive");
  if (config.l2 < 0.0) throw UsageError("config key 'l2': must be non-negative");
  if (config.tolerance < 0.0) throw UsageError("config key 'tolerance': must be non-negative");
}

}  // namespace frameind
