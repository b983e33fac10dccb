#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "frameind/cluster.hpp"
#include "frameind/corpus.hpp"
#include "frameind/embeddings.hpp"
#include "frameind/features.hpp"
#include "frameind/io.hpp"

namespace frameind {

enum class Subtask { A, B1, B2 };

Subtask parse_subtask(const std::string& name);
const char* to_string(Subtask subtask);

// Feature blocks a recipe may combine. Word and Verb coincide for verb
// instances (both are the predicate's first word); for slot instances Word is
// the span mean and Verb the predicate's first word. The dependency, boolean
// and ordinal blocks exist only for slot instances.
enum class BlockKind {
  ContextTfidf,   // "c"   weighted mean of the sentence's token vectors
  ContextFile,    // "cf"  precomputed per-instance vector file
  Word,           // "w"
  Verb,           // "v"
  InboundDep,     // "ID"
  OutboundDep,    // "OD"  combined in/out overlay, -1 wins on conflict
  BooleanPos,     // "B"
  SlotIndex,      // "123"
};

BlockKind parse_block_kind(const std::string& name);
const char* to_string(BlockKind kind);

struct RecipeBlock {
  BlockKind kind = BlockKind::ContextTfidf;
  double scale = 1.0;
};

struct PipelineConfig {
  Subtask subtask = Subtask::A;
  std::vector<RecipeBlock> recipe;
  bool normalize = false;
  Metric metric = Metric::Euclidean;
  Linkage linkage = Linkage::Average;
  std::size_t k = 2;
  std::string vectors_path;
  std::string contextual_vectors_path;
  ContextWeighting weighting = ContextWeighting::TfIdf;
  bool lowercase = false;
  long seed = 0;  // reserved for stochastic engines; current ones ignore it

  // Throws UsageError: empty recipe, k < 1, ward without euclidean, slot-only
  // blocks under subtask A.
  void validate() const;
};

struct PipelineInputs {
  const EmbeddingStore* store = nullptr;
  const ContextualVectorFile* contextual = nullptr;
  // Extra corpora contributing to the dependency label vocabulary, so a
  // model trained on one file can be applied to another.
  std::vector<const std::vector<Sentence>*> extra_label_corpora;
};

FeatureMatrix build_feature_matrix(const std::vector<Sentence>& corpus,
                                   const PipelineConfig& config,
                                   const PipelineInputs& inputs,
                                   InstanceKind kind);

struct InduceResult {
  Labeling labeling;
  Dendrogram dendrogram;
};

// Clusters verb instances (subtask A) / slot instances (subtask B.2) with the
// configured recipe, metric, linkage and k. Labels are the dense cluster
// numbers as text.
InduceResult run_subtask_a(const std::vector<Sentence>& corpus, const PipelineConfig& config,
                           const PipelineInputs& inputs);
InduceResult run_subtask_b2(const std::vector<Sentence>& corpus, const PipelineConfig& config,
                            const PipelineInputs& inputs);

// Subtask B.1: every slot instance gets "<frame>.<role>", where frame comes
// from the owning sentence's verb instance and role from the roles labeling.
// Slots missing from roles get the reserved role "UKN". frames must cover
// every sentence; roles may be partial.
Labeling merge_b1(const Labeling& frames, const Labeling& roles,
                  const std::vector<Sentence>& corpus);

// Trivial and strong baselines.
Labeling baseline_cluster_per_verb(const std::vector<Sentence>& corpus);
Labeling baseline_cluster_per_dep_role(const std::vector<Sentence>& corpus);
Labeling baseline_boolean(const std::vector<Sentence>& corpus);
Labeling baseline_123(const std::vector<Sentence>& corpus);

// Gold labelings extracted from corpus annotations. Missing annotations are
// DataErrors naming the sentence or slot.
Labeling gold_frames(const std::vector<Sentence>& corpus);
Labeling gold_roles(const std::vector<Sentence>& corpus);
// Joint (frame, role) label per slot, "<frame>.<role>".
Labeling gold_joint(const std::vector<Sentence>& corpus);

// Labels entering "<frame>.<role>" composites must not contain the separator;
// offending characters become '_'.
std::string sanitize_label(std::string label);

}  // namespace frameind
