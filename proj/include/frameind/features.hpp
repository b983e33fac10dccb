#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "frameind/corpus.hpp"
#include "frameind/embeddings.hpp"

namespace frameind {

// Lexicographically sorted vocabulary of dependency relation labels, built
// over every corpus that will be featurized so no label is unseen later.
class DepLabelIndex {
 public:
  static DepLabelIndex build(const std::vector<Sentence>& corpus);
  static DepLabelIndex build_union(const std::vector<const std::vector<Sentence>*>& corpora);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  // Throws DataError for labels outside the vocabulary.
  std::size_t position(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> position_;
};

// -1 at the position of each slot token's incoming relation, 0 elsewhere.
// Repeated relations stay -1; entries are never counted.
Vector inbound_dependency_vector(const Sentence& sentence, const SlotSpan& slot,
                                 const DepLabelIndex& index);

// +1 at the position of each relation on an arc from a slot token to a
// dependent outside the span, 0 elsewhere.
Vector outbound_dependency_vector(const Sentence& sentence, const SlotSpan& slot,
                                  const DepLabelIndex& index);

// Elementwise overlay of the two: -1 wins where a relation occurs both
// inbound and outbound.
Vector combined_dependency_vector(const Sentence& sentence, const SlotSpan& slot,
                                  const DepLabelIndex& index);

// 0 when the verb strictly precedes the token, 1 otherwise (equality
// included). Positions are 1-based.
int boolean_feature(int verb_position, int token_position);

// The slot's 1-based ordinal within its sentence.
int index_feature(int slot_ordinal);

struct FeatureMatrix {
  std::vector<InstanceId> instance_ids;
  std::vector<Block> layout;  // shared by every row
  std::vector<Vector> rows;

  std::size_t dim() const;
};

// One named block: source(i) yields the block's vector for instance position
// i. Every instance must yield the same length or assemble throws DataError.
struct BlockSpec {
  std::string name;
  std::function<Vector(std::size_t)> source;
};

FeatureMatrix assemble(const std::vector<BlockSpec>& blocks,
                       std::vector<InstanceId> instances, bool normalize);

}  // namespace frameind
