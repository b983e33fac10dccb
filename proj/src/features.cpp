#include "frameind/features.hpp"

#include <algorithm>
#include <set>

#include "frameind/errors.hpp"

namespace frameind {

DepLabelIndex DepLabelIndex::build(const std::vector<Sentence>& corpus) {
  return build_union({&corpus});
}

DepLabelIndex DepLabelIndex::build_union(const std::vector<const std::vector<Sentence>*>& corpora) {
  std::set<std::string> labels;
  for (const auto* corpus : corpora) {
    for (const Sentence& sentence : *corpus) {
      for (const Token& token : sentence.tokens) labels.insert(token.deprel);
    }
  }
  DepLabelIndex index;
  index.labels_.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < index.labels_.size(); ++i) {
    index.position_.emplace(index.labels_[i], i);
  }
  return index;
}

std::size_t DepLabelIndex::position(const std::string& label) const {
  const auto it = position_.find(label);
  if (it == position_.end()) {
    throw DataError("dependency label '" + label + "' missing from the label index; "
                    "build the index over every corpus first");
  }
  return it->second;
}

Vector inbound_dependency_vector(const Sentence& sentence, const SlotSpan& slot,
                                 const DepLabelIndex& index) {
  Vector vector(index.size(), 0.0);
  for (int token_index : slot.token_indices) {
    vector[index.position(sentence.token(token_index).deprel)] = -1.0;
  }
  return vector;
}

Vector outbound_dependency_vector(const Sentence& sentence, const SlotSpan& slot,
                                  const DepLabelIndex& index) {
  Vector vector(index.size(), 0.0);
  const std::set<int> span(slot.token_indices.begin(), slot.token_indices.end());
  for (const Token& token : sentence.tokens) {
    if (span.contains(token.index)) continue;
    if (span.contains(token.head)) {
      vector[index.position(token.deprel)] = 1.0;
    }
  }
  return vector;
}

Vector combined_dependency_vector(const Sentence& sentence, const SlotSpan& slot,
                                  const DepLabelIndex& index) {
  Vector combined = outbound_dependency_vector(sentence, slot, index);
  const Vector inbound = inbound_dependency_vector(sentence, slot, index);
  for (std::size_t i = 0; i < combined.size(); ++i) {
    if (inbound[i] == -1.0) combined[i] = -1.0;
  }
  return combined;
}

int boolean_feature(int verb_position, int token_position) {
  return verb_position < token_position ? 0 : 1;
}

int index_feature(int slot_ordinal) { return slot_ordinal; }

std::size_t FeatureMatrix::dim() const {
  std::size_t total = 0;
  for (const Block& block : layout) total += block.length;
  return total;
}

FeatureMatrix assemble(const std::vector<BlockSpec>& blocks,
                       std::vector<InstanceId> instances, bool normalize) {
  if (blocks.empty()) throw DataError("assemble: no blocks");
  FeatureMatrix matrix;
  matrix.instance_ids = std::move(instances);
  matrix.rows.reserve(matrix.instance_ids.size());

  std::vector<std::size_t> lengths(blocks.size(), 0);
  for (std::size_t i = 0; i < matrix.instance_ids.size(); ++i) {
    std::vector<std::pair<std::string, Vector>> parts;
    parts.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Vector values = blocks[b].source(i);
      if (i == 0) {
        lengths[b] = values.size();
      } else if (values.size() != lengths[b]) {
        throw DataError("block '" + blocks[b].name + "': instance '" +
                        matrix.instance_ids[i].str() + "' yielded length " +
                        std::to_string(values.size()) + ", expected " +
                        std::to_string(lengths[b]));
      }
      parts.emplace_back(blocks[b].name, std::move(values));
    }
    ComposedVector composed = compose(parts, normalize);
    if (i == 0) matrix.layout = composed.blocks;
    matrix.rows.push_back(std::move(composed.values));
  }
  if (matrix.rows.empty()) {
    // No instances: record the block names with unknown extents.
    for (const BlockSpec& block : blocks) matrix.layout.push_back({block.name, 0, 0});
  }
  return matrix;
}

}  // namespace frameind
