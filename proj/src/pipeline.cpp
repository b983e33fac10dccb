#include "frameind/pipeline.hpp"

#include <algorithm>
#include <set>

#include "frameind/errors.hpp"

namespace frameind {

namespace {

bool slot_only(BlockKind kind) {
  switch (kind) {
    case BlockKind::InboundDep:
    case BlockKind::OutboundDep:
    case BlockKind::BooleanPos:
    case BlockKind::SlotIndex:
      return true;
    default:
      return false;
  }
}

bool needs_store(BlockKind kind) {
  switch (kind) {
    case BlockKind::ContextTfidf:
    case BlockKind::Word:
    case BlockKind::Verb:
      return true;
    default:
      return false;
  }
}

std::vector<std::string> span_surfaces(const Sentence& sentence, const std::vector<int>& indices) {
  std::vector<std::string> surfaces;
  surfaces.reserve(indices.size());
  for (int index : indices) surfaces.push_back(sentence.token(index).surface);
  return surfaces;
}

}  // namespace

Subtask parse_subtask(const std::string& name) {
  if (name == "A" || name == "a") return Subtask::A;
  if (name == "B1" || name == "b1") return Subtask::B1;
  if (name == "B2" || name == "b2") return Subtask::B2;
  throw UsageError("unknown subtask '" + name + "' (expected A, B1 or B2)");
}

const char* to_string(Subtask subtask) {
  switch (subtask) {
    case Subtask::A: return "A";
    case Subtask::B1: return "B1";
    case Subtask::B2: return "B2";
  }
  return "?";
}

BlockKind parse_block_kind(const std::string& name) {
  if (name == "c" || name == "context-tfidf") return BlockKind::ContextTfidf;
  if (name == "cf" || name == "context-file") return BlockKind::ContextFile;
  if (name == "w" || name == "word") return BlockKind::Word;
  if (name == "v" || name == "verb") return BlockKind::Verb;
  if (name == "ID" || name == "id") return BlockKind::InboundDep;
  if (name == "OD" || name == "od") return BlockKind::OutboundDep;
  if (name == "B" || name == "b" || name == "boolean") return BlockKind::BooleanPos;
  if (name == "123" || name == "index") return BlockKind::SlotIndex;
  throw UsageError("unknown recipe block '" + name + "'");
}

const char* to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::ContextTfidf: return "c";
    case BlockKind::ContextFile: return "cf";
    case BlockKind::Word: return "w";
    case BlockKind::Verb: return "v";
    case BlockKind::InboundDep: return "ID";
    case BlockKind::OutboundDep: return "OD";
    case BlockKind::BooleanPos: return "B";
    case BlockKind::SlotIndex: return "123";
  }
  return "?";
}

void PipelineConfig::validate() const {
  if (recipe.empty()) throw UsageError("recipe must name at least one block");
  if (k < 1) throw UsageError("k must be at least 1");
  if (linkage == Linkage::Ward && metric != Metric::Euclidean) {
    throw UsageError("ward requires euclidean affinity");
  }
  if (subtask == Subtask::A) {
    for (const RecipeBlock& block : recipe) {
      if (slot_only(block.kind)) {
        throw UsageError(std::string("block '") + to_string(block.kind) +
                         "' requires slot instances and cannot be used for subtask A");
      }
    }
  }
  for (const RecipeBlock& block : recipe) {
    if (!(block.scale > 0.0)) {
      throw UsageError(std::string("block_scale.") + to_string(block.kind) +
                       " must be positive");
    }
  }
}

FeatureMatrix build_feature_matrix(const std::vector<Sentence>& corpus,
                                   const PipelineConfig& config,
                                   const PipelineInputs& inputs,
                                   InstanceKind kind) {
  std::vector<InstanceId> ids = instance_ids(corpus, kind);

  // Per-instance backing pointers, aligned with instance_ids order.
  std::vector<const Sentence*> sentence_of;
  std::vector<const SlotSpan*> slot_of;
  std::vector<int> ordinal_of;
  std::vector<std::size_t> sentence_pos_of;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const Sentence& sentence = corpus[s];
    if (kind == InstanceKind::Verb) {
      sentence_of.push_back(&sentence);
      slot_of.push_back(nullptr);
      ordinal_of.push_back(0);
      sentence_pos_of.push_back(s);
    } else {
      for (std::size_t i = 0; i < sentence.slots.size(); ++i) {
        sentence_of.push_back(&sentence);
        slot_of.push_back(&sentence.slots[i]);
        ordinal_of.push_back(static_cast<int>(i) + 1);
        sentence_pos_of.push_back(s);
      }
    }
  }

  bool store_needed = false;
  bool contextual_needed = false;
  bool dep_index_needed = false;
  bool context_tfidf_needed = false;
  for (const RecipeBlock& block : config.recipe) {
    if (kind == InstanceKind::Verb && slot_only(block.kind)) {
      throw UsageError(std::string("block '") + to_string(block.kind) +
                       "' requires slot instances");
    }
    store_needed |= needs_store(block.kind);
    contextual_needed |= block.kind == BlockKind::ContextFile;
    dep_index_needed |= block.kind == BlockKind::InboundDep || block.kind == BlockKind::OutboundDep;
    context_tfidf_needed |= block.kind == BlockKind::ContextTfidf;
  }
  if (store_needed && inputs.store == nullptr) {
    throw UsageError("the recipe needs word vectors; pass --vectors");
  }
  if (contextual_needed && inputs.contextual == nullptr) {
    throw UsageError("the recipe needs precomputed context vectors; pass --contextual-vectors");
  }

  IdfTable idf;
  std::vector<Vector> context_by_sentence;
  if (context_tfidf_needed) {
    idf = compute_idf(corpus);
    context_by_sentence.reserve(corpus.size());
    for (const Sentence& sentence : corpus) {
      context_by_sentence.push_back(
          context_vector(sentence, *inputs.store, idf, config.weighting));
    }
  }

  DepLabelIndex dep_index;
  if (dep_index_needed) {
    std::vector<const std::vector<Sentence>*> corpora = {&corpus};
    corpora.insert(corpora.end(), inputs.extra_label_corpora.begin(),
                   inputs.extra_label_corpora.end());
    dep_index = DepLabelIndex::build_union(corpora);
  }

  std::vector<BlockSpec> blocks;
  for (const RecipeBlock& block : config.recipe) {
    std::function<Vector(std::size_t)> source;
    switch (block.kind) {
      case BlockKind::ContextTfidf:
        source = [&](std::size_t i) { return context_by_sentence[sentence_pos_of[i]]; };
        break;
      case BlockKind::ContextFile:
        source = [&, ids](std::size_t i) {
          // Per-instance entries win; a per-sentence entry serves all of the
          // sentence's instances.
          const Vector* v = inputs.contextual->find(ids[i].str());
          if (v == nullptr) v = inputs.contextual->find(ids[i].sentence_id);
          if (v == nullptr) {
            throw DataError("no precomputed vector for instance '" + ids[i].str() + "'");
          }
          return *v;
        };
        break;
      case BlockKind::Word:
        source = [&, kind](std::size_t i) {
          const Sentence& sentence = *sentence_of[i];
          if (kind == InstanceKind::Verb) {
            return verb_vector(*inputs.store,
                               span_surfaces(sentence, sentence.predicate.token_indices));
          }
          return span_vector(*inputs.store, span_surfaces(sentence, slot_of[i]->token_indices));
        };
        break;
      case BlockKind::Verb:
        source = [&](std::size_t i) {
          const Sentence& sentence = *sentence_of[i];
          return verb_vector(*inputs.store,
                             span_surfaces(sentence, sentence.predicate.token_indices));
        };
        break;
      case BlockKind::InboundDep:
        source = [&](std::size_t i) {
          return inbound_dependency_vector(*sentence_of[i], *slot_of[i], dep_index);
        };
        break;
      case BlockKind::OutboundDep:
        source = [&](std::size_t i) {
          return combined_dependency_vector(*sentence_of[i], *slot_of[i], dep_index);
        };
        break;
      case BlockKind::BooleanPos:
        source = [&](std::size_t i) {
          const Sentence& sentence = *sentence_of[i];
          if (sentence.predicate.token_indices.empty()) {
            throw DataError("sentence '" + sentence.id + "': missing predicate");
          }
          const int value = boolean_feature(sentence.predicate.token_indices.front(),
                                            slot_of[i]->token_indices.front());
          return Vector{static_cast<double>(value)};
        };
        break;
      case BlockKind::SlotIndex:
        source = [&](std::size_t i) {
          return Vector{static_cast<double>(index_feature(ordinal_of[i]))};
        };
        break;
    }
    if (block.scale != 1.0) {
      source = [inner = std::move(source), scale = block.scale](std::size_t i) {
        Vector values = inner(i);
        for (double& x : values) x *= scale;
        return values;
      };
    }
    blocks.push_back({to_string(block.kind), std::move(source)});
  }

  return assemble(blocks, std::move(ids), config.normalize);
}

namespace {

InduceResult induce(const std::vector<Sentence>& corpus, const PipelineConfig& config,
                    const PipelineInputs& inputs, InstanceKind kind) {
  config.validate();
  const FeatureMatrix features = build_feature_matrix(corpus, config, inputs, kind);
  if (features.rows.empty()) throw DataError("no instances to cluster");
  const DistanceMatrix distances = pairwise_distances(features, config.metric);
  AgglomerationResult clustering = agglomerate(distances, config.linkage, config.k);

  InduceResult result;
  result.dendrogram = std::move(clustering.dendrogram);
  for (std::size_t i = 0; i < features.instance_ids.size(); ++i) {
    result.labeling[features.instance_ids[i].str()] = std::to_string(clustering.labels[i]);
  }
  return result;
}

}  // namespace

InduceResult run_subtask_a(const std::vector<Sentence>& corpus, const PipelineConfig& config,
                           const PipelineInputs& inputs) {
  if (config.subtask != Subtask::A) {
    throw UsageError(std::string("config names subtask ") + to_string(config.subtask) +
                     ", expected A");
  }
  return induce(corpus, config, inputs, InstanceKind::Verb);
}

InduceResult run_subtask_b2(const std::vector<Sentence>& corpus, const PipelineConfig& config,
                            const PipelineInputs& inputs) {
  if (config.subtask != Subtask::B2) {
    throw UsageError(std::string("config names subtask ") + to_string(config.subtask) +
                     ", expected B2");
  }
  return induce(corpus, config, inputs, InstanceKind::Slot);
}

std::string sanitize_label(std::string label) {
  std::replace(label.begin(), label.end(), '.', '_');
  if (label.empty()) label = "_";
  return label;
}

Labeling merge_b1(const Labeling& frames, const Labeling& roles,
                  const std::vector<Sentence>& corpus) {
  Labeling merged;
  for (const Sentence& sentence : corpus) {
    const auto frame_it = frames.find(sentence.id);
    if (frame_it == frames.end()) {
      throw DataError("no frame label for sentence '" + sentence.id + "'");
    }
    const std::string frame = sanitize_label(frame_it->second);
    for (const SlotSpan& slot : sentence.slots) {
      const std::string key = InstanceId{sentence.id, InstanceKind::Slot, slot.slot_id}.str();
      const auto role_it = roles.find(key);
      const std::string role = role_it == roles.end() ? "UKN" : sanitize_label(role_it->second);
      merged[key] = frame + "." + role;
    }
  }
  return merged;
}

Labeling baseline_cluster_per_verb(const std::vector<Sentence>& corpus) {
  Labeling labeling;
  for (const Sentence& sentence : corpus) {
    if (sentence.predicate.token_indices.empty()) {
      throw DataError("sentence '" + sentence.id + "': missing predicate");
    }
    const Token& first = sentence.token(sentence.predicate.token_indices.front());
    labeling[sentence.id] = lowercase_ascii(first.lemma);
  }
  return labeling;
}

Labeling baseline_cluster_per_dep_role(const std::vector<Sentence>& corpus) {
  Labeling labeling;
  for (const Sentence& sentence : corpus) {
    for (const SlotSpan& slot : sentence.slots) {
      const std::set<int> span(slot.token_indices.begin(), slot.token_indices.end());
      // The slot's syntactic head: first token whose head lies outside the
      // span. Cyclic parses without one fall back to the first token.
      const Token* head_token = &sentence.token(slot.token_indices.front());
      for (int index : slot.token_indices) {
        const Token& token = sentence.token(index);
        if (!span.contains(token.head)) {
          head_token = &token;
          break;
        }
      }
      labeling[InstanceId{sentence.id, InstanceKind::Slot, slot.slot_id}.str()] =
          head_token->deprel;
    }
  }
  return labeling;
}

Labeling baseline_boolean(const std::vector<Sentence>& corpus) {
  Labeling labeling;
  for (const Sentence& sentence : corpus) {
    if (sentence.predicate.token_indices.empty()) {
      throw DataError("sentence '" + sentence.id + "': missing predicate");
    }
    const int verb_position = sentence.predicate.token_indices.front();
    for (const SlotSpan& slot : sentence.slots) {
      const int value = boolean_feature(verb_position, slot.token_indices.front());
      labeling[InstanceId{sentence.id, InstanceKind::Slot, slot.slot_id}.str()] =
          std::to_string(value);
    }
  }
  return labeling;
}

Labeling baseline_123(const std::vector<Sentence>& corpus) {
  Labeling labeling;
  for (const Sentence& sentence : corpus) {
    for (std::size_t i = 0; i < sentence.slots.size(); ++i) {
      labeling[InstanceId{sentence.id, InstanceKind::Slot, sentence.slots[i].slot_id}.str()] =
          std::to_string(index_feature(static_cast<int>(i) + 1));
    }
  }
  return labeling;
}

Labeling gold_frames(const std::vector<Sentence>& corpus) {
  Labeling labeling;
  for (const Sentence& sentence : corpus) {
    if (!sentence.predicate.gold_frame) {
      throw DataError("sentence '" + sentence.id + "': no gold frame");
    }
    labeling[sentence.id] = *sentence.predicate.gold_frame;
  }
  return labeling;
}

Labeling gold_roles(const std::vector<Sentence>& corpus) {
  Labeling labeling;
  for (const Sentence& sentence : corpus) {
    for (const SlotSpan& slot : sentence.slots) {
      if (!slot.gold_role) {
        throw DataError("sentence '" + sentence.id + "': slot '" + slot.slot_id +
                        "' has no gold role");
      }
      labeling[InstanceId{sentence.id, InstanceKind::Slot, slot.slot_id}.str()] = *slot.gold_role;
    }
  }
  return labeling;
}

Labeling gold_joint(const std::vector<Sentence>& corpus) {
  Labeling labeling;
  for (const Sentence& sentence : corpus) {
    if (!sentence.predicate.gold_frame) {
      throw DataError("sentence '" + sentence.id + "': no gold frame");
    }
    const std::string frame = sanitize_label(*sentence.predicate.gold_frame);
    for (const SlotSpan& slot : sentence.slots) {
      if (!slot.gold_role) {
        throw DataError("sentence '" + sentence.id + "': slot '" + slot.slot_id +
                        "' has no gold role");
      }
      labeling[InstanceId{sentence.id, InstanceKind::Slot, slot.slot_id}.str()] =
          frame + "." + sanitize_label(*slot.gold_role);
    }
  }
  return labeling;
}

}  // namespace frameind
