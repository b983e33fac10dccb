#pragma once

#include <cstddef>
#include <string>

#include "frameind/io.hpp"

namespace frameind {

struct PurityScores {
  double purity = 0.0;
  double inverse_purity = 0.0;
  double f1 = 0.0;
};

struct BCubedScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ScoreReport {
  double purity = 0.0;
  double inverse_purity = 0.0;
  double purity_f1 = 0.0;
  double bcubed_precision = 0.0;
  double bcubed_recall = 0.0;
  double bcubed_f1 = 0.0;
  std::size_t n = 0;
};

// Both scorers require pred and gold to cover the same instance set and
// throw DataError listing the symmetric difference otherwise. Scores are
// invariant under renaming of cluster or class labels.

// purity = (1/n) sum over clusters of the largest overlap with one gold
// class; inverse purity swaps the roles; f1 is their harmonic mean.
PurityScores purity_f1(const Labeling& pred, const Labeling& gold);

// Item-level precision |C(i) & G(i)| / |C(i)| and recall |C(i) & G(i)| /
// |G(i)|, averaged over instances.
BCubedScores bcubed_f1(const Labeling& pred, const Labeling& gold);

ScoreReport score(const Labeling& pred, const Labeling& gold);

std::string score_json(const ScoreReport& report);
std::string score_table(const ScoreReport& report);

}  // namespace frameind
