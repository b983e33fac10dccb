#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "frameind/logreg.hpp"
#include "frameind/pipeline.hpp"

namespace frameind {

// Flat key = value file, one entry per line. '#' starts a comment, values may
// be double-quoted. Unknown keys are reported as warnings, not errors.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in);

  bool has(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Fills a PipelineConfig / TrainConfig from the recognized keys, leaving
  // defaults in place for absent ones. Unrecognized keys are appended to
  // warnings.
  void apply(PipelineConfig& config, std::vector<std::string>* warnings = nullptr) const;
  void apply(TrainConfig& config) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace frameind
