#include "frameind/eval.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "frameind/errors.hpp"

namespace frameind {

namespace {

// Harmonic mean; zero when either side is zero. Equal inputs short-circuit to
// the exact common value.
double harmonic(double p, double r) {
  if (p == r) return p;
  if (p <= 0.0 || r <= 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

void check_same_instances(const Labeling& pred, const Labeling& gold) {
  std::vector<std::string> only_pred;
  std::vector<std::string> only_gold;
  for (const auto& [id, label] : pred) {
    if (!gold.contains(id)) only_pred.push_back(id);
  }
  for (const auto& [id, label] : gold) {
    if (!pred.contains(id)) only_gold.push_back(id);
  }
  if (only_pred.empty() && only_gold.empty()) return;

  auto preview = [](const std::vector<std::string>& ids) {
    std::string text;
    for (std::size_t i = 0; i < ids.size() && i < 8; ++i) {
      if (i > 0) text += ", ";
      text += ids[i];
    }
    if (ids.size() > 8) text += ", ... (" + std::to_string(ids.size()) + " total)";
    return text;
  };
  std::string message = "pred and gold cover different instances;";
  if (!only_pred.empty()) message += " only in pred: " + preview(only_pred) + ";";
  if (!only_gold.empty()) message += " only in gold: " + preview(only_gold) + ";";
  throw DataError(message);
}

struct Contingency {
  std::size_t n = 0;
  std::vector<std::size_t> cluster_size;
  std::vector<std::size_t> class_size;
  // Joint counts and the (cluster, class) cell of every instance.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cells;
  std::vector<std::pair<std::size_t, std::size_t>> assignment;
};

Contingency build_contingency(const Labeling& pred, const Labeling& gold) {
  check_same_instances(pred, gold);
  if (pred.empty()) throw DataError("cannot score an empty labeling");

  Contingency table;
  table.n = pred.size();
  std::map<std::string, std::size_t> cluster_index;
  std::map<std::string, std::size_t> class_index;
  for (const auto& [id, cluster_label] : pred) {
    const auto [cit, cnew] = cluster_index.try_emplace(cluster_label, cluster_index.size());
    if (cnew) table.cluster_size.push_back(0);
    const std::string& gold_label = gold.at(id);
    const auto [git, gnew] = class_index.try_emplace(gold_label, class_index.size());
    if (gnew) table.class_size.push_back(0);
    ++table.cluster_size[cit->second];
    ++table.class_size[git->second];
    ++table.cells[{cit->second, git->second}];
    table.assignment.emplace_back(cit->second, git->second);
  }
  return table;
}

}  // namespace

PurityScores purity_f1(const Labeling& pred, const Labeling& gold) {
  const Contingency table = build_contingency(pred, gold);
  std::vector<std::size_t> cluster_max(table.cluster_size.size(), 0);
  std::vector<std::size_t> class_max(table.class_size.size(), 0);
  for (const auto& [cell, count] : table.cells) {
    cluster_max[cell.first] = std::max(cluster_max[cell.first], count);
    class_max[cell.second] = std::max(class_max[cell.second], count);
  }
  std::size_t purity_hits = 0;
  std::size_t inverse_hits = 0;
  for (std::size_t c : cluster_max) purity_hits += c;
  for (std::size_t g : class_max) inverse_hits += g;

  PurityScores scores;
  scores.purity = static_cast<double>(purity_hits) / static_cast<double>(table.n);
  scores.inverse_purity = static_cast<double>(inverse_hits) / static_cast<double>(table.n);
  scores.f1 = harmonic(scores.purity, scores.inverse_purity);
  return scores;
}

BCubedScores bcubed_f1(const Labeling& pred, const Labeling& gold) {
  const Contingency table = build_contingency(pred, gold);
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  for (const auto& [cluster, cls] : table.assignment) {
    const double overlap = static_cast<double>(table.cells.at({cluster, cls}));
    precision_sum += overlap / static_cast<double>(table.cluster_size[cluster]);
    recall_sum += overlap / static_cast<double>(table.class_size[cls]);
  }
  BCubedScores scores;
  scores.precision = precision_sum / static_cast<double>(table.n);
  scores.recall = recall_sum / static_cast<double>(table.n);
  scores.f1 = harmonic(scores.precision, scores.recall);
  return scores;
}

ScoreReport score(const Labeling& pred, const Labeling& gold) {
  const PurityScores purity = purity_f1(pred, gold);
  const BCubedScores bcubed = bcubed_f1(pred, gold);
  ScoreReport report;
  report.purity = purity.purity;
  report.inverse_purity = purity.inverse_purity;
  report.purity_f1 = purity.f1;
  report.bcubed_precision = bcubed.precision;
  report.bcubed_recall = bcubed.recall;
  report.bcubed_f1 = bcubed.f1;
  report.n = pred.size();
  return report;
}

std::string score_json(const ScoreReport& report) {
  nlohmann::ordered_json object;
  object["purity"] = report.purity;
  object["inverse_purity"] = report.inverse_purity;
  object["purity_f1"] = report.purity_f1;
  object["bcubed_precision"] = report.bcubed_precision;
  object["bcubed_recall"] = report.bcubed_recall;
  object["bcubed_f1"] = report.bcubed_f1;
  object["n"] = report.n;
  return object.dump();
}

std::string score_table(const ScoreReport& report) {
  std::ostringstream out;
  char line[64];
  const std::pair<const char*, double> rows[] = {
      {"purity", report.purity},
      {"inverse_purity", report.inverse_purity},
      {"purity_f1", report.purity_f1},
      {"bcubed_precision", report.bcubed_precision},
      {"bcubed_recall", report.bcubed_recall},
      {"bcubed_f1", report.bcubed_f1},
  };
  for (const auto& [name, value] : rows) {
    std::snprintf(line, sizeof(line), "%-18s %10.6f\n", name, value);
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-18s %10zu\n", "n", report.n);
  out << line;
  return out.str();
}

}  // namespace frameind
