#include "frameind/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "frameind/errors.hpp"
#include "frameind/io.hpp"

namespace frameind {

namespace {

using json = nlohmann::json;

double parse_double_field(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("line " + std::to_string(line_no) + ": not a number: '" + text + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ": non-finite value");
  }
  return value;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    if (end > pos) fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

}  // namespace

double l2_norm(const Vector& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

EmbeddingStore EmbeddingStore::load_text(std::istream& in, bool lowercase,
                                         std::vector<std::string>* warnings) {
  EmbeddingStore store;
  store.lowercase_ = lowercase;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw DataError("empty word-vector file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_whitespace(line);
  if (header.size() != 2) {
    throw DataError("line 1: expected header 'V D', got '" + line + "'");
  }
  long vocab_size = 0;
  long dim = 0;
  const auto& vtext = header[0];
  const auto& dtext = header[1];
  if (std::from_chars(vtext.data(), vtext.data() + vtext.size(), vocab_size).ec != std::errc() ||
      std::from_chars(dtext.data(), dtext.data() + dtext.size(), dim).ec != std::errc() ||
      vocab_size < 0 || dim < 1) {
    throw DataError("line 1: malformed header '" + line + "'");
  }
  store.dim_ = static_cast<std::size_t>(dim);
  store.table_.reserve(static_cast<std::size_t>(vocab_size));

  long read = 0;
  while (read < vocab_size) {
    if (!std::getline(in, line)) {
      throw DataError("line " + std::to_string(line_no + 1) + ": expected " +
                      std::to_string(vocab_size) + " entries, found " + std::to_string(read));
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_whitespace(line);
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " values, found " + std::to_string(fields.size() - (fields.empty() ? 0 : 1)));
    }
    std::string token = lowercase ? lowercase_ascii(fields[0]) : fields[0];
    Vector values(static_cast<std::size_t>(dim));
    for (long d = 0; d < dim; ++d) {
      values[static_cast<std::size_t>(d)] = parse_double_field(fields[static_cast<std::size_t>(d) + 1], line_no);
    }
    auto [it, inserted] = store.table_.insert_or_assign(std::move(token), std::move(values));
    if (!inserted && warnings != nullptr) {
      warnings->push_back("line " + std::to_string(line_no) + ": duplicate token '" + it->first +
                          "', keeping the last entry");
    }
    ++read;
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!split_whitespace(line).empty()) {
      throw DataError("line " + std::to_string(line_no) + ": trailing content after " +
                      std::to_string(vocab_size) + " entries");
    }
  }
  return store;
}

bool EmbeddingStore::contains(std::string_view token) const {
  std::string key(token);
  if (lowercase_) key = lowercase_ascii(std::move(key));
  return table_.find(key) != table_.end();
}

Vector EmbeddingStore::lookup(std::string_view token) const {
  std::string key(token);
  if (lowercase_) key = lowercase_ascii(std::move(key));
  const auto it = table_.find(key);
  if (it == table_.end()) return Vector(dim_, 0.0);
  return it->second;
}

double IdfTable::idf(const std::string& token) const {
  const auto it = df.find(token);
  // Unseen tokens get the maximal idf, ln(N / 1).
  const std::size_t frequency = it == df.end() ? 1 : it->second;
  return std::log(static_cast<double>(doc_count) / static_cast<double>(frequency));
}

IdfTable compute_idf(const std::vector<Sentence>& corpus) {
  if (corpus.empty()) throw DataError("cannot compute idf over an empty corpus");
  IdfTable table;
  table.doc_count = corpus.size();
  for (const Sentence& sentence : corpus) {
    std::unordered_set<std::string> seen;
    for (const Token& token : sentence.tokens) {
      if (seen.insert(token.surface).second) ++table.df[token.surface];
    }
  }
  return table;
}

Vector context_vector(const Sentence& sentence, const EmbeddingStore& store,
                      const IdfTable& idf, ContextWeighting weighting) {
  if (sentence.tokens.empty()) throw DataError("context_vector: empty sentence");

  std::unordered_map<std::string, std::size_t> tf;
  if (weighting == ContextWeighting::TfIdf) {
    for (const Token& token : sentence.tokens) ++tf[token.surface];
  }

  auto weighted_mean = [&](bool uniform) {
    Vector sum(store.dim(), 0.0);
    double total = 0.0;
    for (const Token& token : sentence.tokens) {
      const double w = uniform
                           ? 1.0
                           : static_cast<double>(tf[token.surface]) * idf.idf(token.surface);
      if (w == 0.0) continue;
      const Vector v = store.lookup(token.surface);
      for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += w * v[d];
      total += w;
    }
    if (total > 0.0) {
      for (double& x : sum) x /= total;
    }
    return std::pair(sum, total);
  };

  if (weighting == ContextWeighting::Uniform) return weighted_mean(true).first;
  auto [vector, total] = weighted_mean(false);
  // All-zero weights (every token in every document): fall back to uniform.
  if (total == 0.0) return weighted_mean(true).first;
  return vector;
}

Vector verb_vector(const EmbeddingStore& store, const std::vector<std::string>& predicate_surfaces) {
  if (predicate_surfaces.empty()) throw DataError("verb_vector: empty predicate");
  return store.lookup(predicate_surfaces.front());
}

Vector span_vector(const EmbeddingStore& store, const std::vector<std::string>& span_surfaces) {
  if (span_surfaces.empty()) throw DataError("span_vector: empty span");
  Vector sum(store.dim(), 0.0);
  for (const std::string& surface : span_surfaces) {
    const Vector v = store.lookup(surface);
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += v[d];
  }
  for (double& x : sum) x /= static_cast<double>(span_surfaces.size());
  return sum;
}

ComposedVector compose(const std::vector<std::pair<std::string, Vector>>& parts, bool normalize) {
  if (parts.empty()) throw DataError("compose: no parts");
  ComposedVector composed;
  for (const auto& [name, values] : parts) {
    for (double x : values) {
      if (!std::isfinite(x)) throw DataError("compose: non-finite value in block '" + name + "'");
    }
    composed.blocks.push_back({name, composed.values.size(), values.size()});
    composed.values.insert(composed.values.end(), values.begin(), values.end());
  }
  if (normalize) {
    const double norm = l2_norm(composed.values);
    if (norm > 0.0) {
      for (double& x : composed.values) x /= norm;
    }
  }
  return composed;
}

ContextualVectorFile ContextualVectorFile::load(std::istream& in) {
  ContextualVectorFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("vectors line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    std::string id;
    Vector vector;
    try {
      id = object.at("id").get<std::string>();
      vector = object.at("vector").get<Vector>();
    } catch (const json::exception& e) {
      throw DataError("vectors line " + std::to_string(line_no) + ": " + e.what());
    }
    for (double x : vector) {
      if (!std::isfinite(x)) {
        throw DataError("vectors line " + std::to_string(line_no) + ": non-finite value");
      }
    }
    if (file.entries_.empty()) {
      file.dim_ = vector.size();
    } else if (vector.size() != file.dim_) {
      throw DataError("vectors line " + std::to_string(line_no) + ": dimension mismatch (" +
                      std::to_string(vector.size()) + " vs " + std::to_string(file.dim_) + ")");
    }
    if (!file.entries_.emplace(std::move(id), std::move(vector)).second) {
      throw DataError("vectors line " + std::to_string(line_no) + ": duplicate id '" +
                      object.at("id").get<std::string>() + "'");
    }
  }
  return file;
}

const Vector* ContextualVectorFile::find(const std::string& id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

}  // namespace frameind
