#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "frameind/corpus.hpp"

namespace frameind {

using Vector = std::vector<double>;

double l2_norm(const Vector& v);

// Immutable token -> vector table loaded from the textual word-vector format:
// a "V D" header line followed by V lines "token x1 ... xD". Lookups of
// unknown tokens yield the zero vector rather than an error.
class EmbeddingStore {
 public:
  static EmbeddingStore load_text(std::istream& in, bool lowercase = false,
                                  std::vector<std::string>* warnings = nullptr);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }
  bool lowercased() const { return lowercase_; }
  bool contains(std::string_view token) const;
  Vector lookup(std::string_view token) const;

 private:
  std::size_t dim_ = 0;
  bool lowercase_ = false;
  std::unordered_map<std::string, Vector> table_;
};

// Per-sentence document frequencies over surface forms.
// idf(t) = ln(doc_count / df(t)); unseen tokens count as df = 1.
struct IdfTable {
  std::size_t doc_count = 0;
  std::unordered_map<std::string, std::size_t> df;

  double idf(const std::string& token) const;
};

IdfTable compute_idf(const std::vector<Sentence>& corpus);

enum class ContextWeighting { TfIdf, Uniform };

// Weighted mean of the sentence's token vectors. Under TfIdf each token
// occurrence weighs tf(token) * idf(token); when every weight is zero the
// uniform mean is used instead.
Vector context_vector(const Sentence& sentence, const EmbeddingStore& store,
                      const IdfTable& idf, ContextWeighting weighting);

// Vector of the predicate's first word; remaining words of a phrasal verb
// are ignored.
Vector verb_vector(const EmbeddingStore& store, const std::vector<std::string>& predicate_surfaces);

// Mean over the span's token vectors; unknown tokens contribute zero vectors
// to the mean (the denominator stays the token count).
Vector span_vector(const EmbeddingStore& store, const std::vector<std::string>& span_surfaces);

// Named extent of one block inside a composed vector.
struct Block {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const Block&) const = default;
};

struct ComposedVector {
  Vector values;
  std::vector<Block> blocks;
};

// Concatenates named parts in order. With normalize the whole concatenation
// is rescaled to unit L2 norm; the zero vector is left unchanged.
ComposedVector compose(const std::vector<std::pair<std::string, Vector>>& parts, bool normalize);

// Precomputed per-instance vectors, one JSONL object {"id": ..., "vector":
// [...]} per line. All vectors must share one dimensionality and ids must be
// unique.
class ContextualVectorFile {
 public:
  static ContextualVectorFile load(std::istream& in);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  const Vector* find(const std::string& id) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Vector> entries_;
};

}  // namespace frameind
