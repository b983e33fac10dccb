#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace frameind {

// One token of a dependency-parsed sentence. Indices are 1-based within the
// sentence; head 0 denotes the root.
struct Token {
  int index = 0;
  std::string surface;
  std::string lemma;
  std::string upos;
  int head = 0;
  std::string deprel;
};

// The highlighted predicate of a sentence. More than one index means a
// phrasal verb ("fall back"); indices are strictly increasing.
struct PredicateSpan {
  std::vector<int> token_indices;
  std::optional<std::string> gold_frame;
};

// A highlighted argument span. Indices are strictly increasing but may be
// discontiguous.
struct SlotSpan {
  std::string slot_id;
  std::vector<int> token_indices;
  std::optional<std::string> gold_role;
};

struct Sentence {
  std::string id;
  std::vector<Token> tokens;
  PredicateSpan predicate;  // empty until annotations are attached
  std::vector<SlotSpan> slots;

  const Token& token(int index_1based) const { return tokens[static_cast<std::size_t>(index_1based) - 1]; }
  std::size_t size() const { return tokens.size(); }
};

enum class InstanceKind { Verb, Slot };

// Stable identifier of one clustering instance: a sentence's highlighted verb
// or one of its slots. Serializes as "<sentence>" or "<sentence>#<slot>".
struct InstanceId {
  std::string sentence_id;
  InstanceKind kind = InstanceKind::Verb;
  std::string slot_id;  // set iff kind == Slot

  std::string str() const;
  bool operator==(const InstanceId&) const = default;
};

struct ValidationOptions {
  bool require_predicate = true;
};

// Checks the per-sentence invariants and throws DataError on violation.
// Returns human-readable warnings for tolerated oddities (multiple roots,
// slots overlapping the predicate).
std::vector<std::string> validate_sentence(const Sentence& sentence,
                                           const ValidationOptions& options = {});

struct ParsedCorpus {
  std::vector<Sentence> sentences;
  std::vector<std::string> warnings;
};

// CoNLL-U ingestion: 10 tab-separated columns per token line, blank line
// between sentences, "# sent_id = X" comments supply ids. Multiword-token
// ranges ("1-2") and empty nodes ("1.1") are skipped. The returned sentences
// carry no highlights.
ParsedCorpus parse_conllu(std::istream& in);

// Canonical task format: one JSON object per line with fields id, tokens,
// predicate, slots. Sentences are fully validated; unknown fields are
// ignored with a warning.
ParsedCorpus parse_task_jsonl(std::istream& in);

void write_task_jsonl(std::ostream& out, const std::vector<Sentence>& corpus);

// Highlight annotations keyed by sentence id, carried in a JSONL sidecar with
// the same predicate/slots schema as the task format.
struct SentenceAnnotation {
  std::string id;
  PredicateSpan predicate;
  std::vector<SlotSpan> slots;
};

std::vector<SentenceAnnotation> parse_annotations_jsonl(std::istream& in,
                                                        std::vector<std::string>* warnings = nullptr);

// Attaches annotations to a highlight-free corpus and re-validates every
// sentence (predicates required). Throws DataError for annotations that name
// unknown sentences or leave a sentence without a predicate.
void attach_annotations(std::vector<Sentence>& corpus,
                        const std::vector<SentenceAnnotation>& annotations,
                        std::vector<std::string>* warnings = nullptr);

// Instance ids in deterministic corpus order: one per sentence for Verb, one
// per slot (sentence order, then slot order) for Slot.
std::vector<InstanceId> instance_ids(const std::vector<Sentence>& corpus, InstanceKind kind);

}  // namespace frameind
