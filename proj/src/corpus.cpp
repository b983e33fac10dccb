#include "frameind/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "frameind/errors.hpp"

namespace frameind {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_columns(const std::string& line) {
  // Tab-separated is canonical; fall back to whitespace runs for hand-written
  // files that use spaces.
  std::vector<std::string> columns;
  const char sep = line.find('\t') != std::string::npos ? '\t' : ' ';
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(sep, pos);
    if (end == std::string::npos) end = line.size();
    std::string field = line.substr(pos, end - pos);
    if (sep == '\t' || !field.empty()) columns.push_back(std::move(field));
    if (end == line.size()) break;
    pos = end + 1;
  }
  return columns;
}

int parse_int_field(const std::string& text, const char* what, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("line " + std::to_string(line_no) + ": non-integer " + what + " '" + text + "'");
  }
  return value;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

void check_span(const Sentence& sentence, const std::vector<int>& indices,
                const std::string& what) {
  const int n = static_cast<int>(sentence.size());
  int previous = 0;
  for (int index : indices) {
    if (index < 1 || index > n) {
      throw DataError("sentence '" + sentence.id + "': " + what + " index " +
                      std::to_string(index) + " out of range (1.." + std::to_string(n) + ")");
    }
    if (index <= previous) {
      throw DataError("sentence '" + sentence.id + "': " + what +
                      " indices not strictly increasing");
    }
    previous = index;
  }
}

void warn_unknown_fields(const json& object, const std::set<std::string>& known,
                         const std::string& where, std::vector<std::string>* warnings) {
  if (warnings == nullptr) return;
  for (const auto& [key, value] : object.items()) {
    if (!known.contains(key)) {
      warnings->push_back(where + ": ignoring unknown field '" + key + "'");
    }
  }
}

PredicateSpan predicate_from_json(const json& object, const std::string& where,
                                  std::vector<std::string>* warnings) {
  warn_unknown_fields(object, {"token_indices", "gold_frame"}, where, warnings);
  PredicateSpan predicate;
  predicate.token_indices = object.at("token_indices").get<std::vector<int>>();
  if (object.contains("gold_frame")) predicate.gold_frame = object.at("gold_frame").get<std::string>();
  return predicate;
}

std::vector<SlotSpan> slots_from_json(const json& array, const std::string& where,
                                      std::vector<std::string>* warnings) {
  std::vector<SlotSpan> slots;
  for (const auto& object : array) {
    warn_unknown_fields(object, {"slot_id", "token_indices", "gold_role"}, where, warnings);
    SlotSpan slot;
    slot.slot_id = object.at("slot_id").get<std::string>();
    slot.token_indices = object.at("token_indices").get<std::vector<int>>();
    if (object.contains("gold_role")) slot.gold_role = object.at("gold_role").get<std::string>();
    slots.push_back(std::move(slot));
  }
  return slots;
}

}  // namespace

std::string InstanceId::str() const {
  if (kind == InstanceKind::Verb) return sentence_id;
  return sentence_id + "#" + slot_id;
}

std::vector<std::string> validate_sentence(const Sentence& sentence,
                                           const ValidationOptions& options) {
  std::vector<std::string> warnings;
  if (sentence.id.empty()) throw DataError("sentence with empty id");
  if (sentence.id.find('#') != std::string::npos) {
    throw DataError("sentence '" + sentence.id + "': id must not contain '#'");
  }
  const int n = static_cast<int>(sentence.size());
  if (n == 0) throw DataError("sentence '" + sentence.id + "': no tokens");

  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& token = sentence.tokens[static_cast<std::size_t>(i)];
    if (token.index != i + 1) {
      throw DataError("sentence '" + sentence.id + "': token indices not contiguous at position " +
                      std::to_string(i + 1));
    }
    if (token.surface.empty()) {
      throw DataError("sentence '" + sentence.id + "': token " + std::to_string(i + 1) +
                      " has empty surface");
    }
    if (token.deprel.empty()) {
      throw DataError("sentence '" + sentence.id + "': token " + std::to_string(i + 1) +
                      " has empty deprel");
    }
    if (token.head < 0 || token.head > n) {
      throw DataError("sentence '" + sentence.id + "': token " + std::to_string(i + 1) +
                      " head " + std::to_string(token.head) + " out of range");
    }
    if (token.head == token.index) {
      throw DataError("sentence '" + sentence.id + "': token " + std::to_string(i + 1) +
                      " is its own head");
    }
    if (token.head == 0) ++roots;
  }
  if (roots != 1) {
    warnings.push_back("sentence '" + sentence.id + "': expected exactly one root, found " +
                       std::to_string(roots));
  }

  if (sentence.predicate.token_indices.empty()) {
    if (options.require_predicate) {
      throw DataError("sentence '" + sentence.id + "': missing predicate");
    }
  } else {
    check_span(sentence, sentence.predicate.token_indices, "predicate");
  }

  std::set<std::string> slot_ids;
  std::unordered_map<int, const SlotSpan*> index_owner;
  const std::set<int> predicate_indices(sentence.predicate.token_indices.begin(),
                                        sentence.predicate.token_indices.end());
  for (const SlotSpan& slot : sentence.slots) {
    if (slot.slot_id.empty()) {
      throw DataError("sentence '" + sentence.id + "': slot with empty id");
    }
    if (!slot_ids.insert(slot.slot_id).second) {
      throw DataError("sentence '" + sentence.id + "': duplicate slot id '" + slot.slot_id + "'");
    }
    if (slot.token_indices.empty()) {
      throw DataError("sentence '" + sentence.id + "': slot '" + slot.slot_id + "' has no tokens");
    }
    check_span(sentence, slot.token_indices, "slot '" + slot.slot_id + "'");
    bool overlaps_predicate = false;
    for (int index : slot.token_indices) {
      const auto [it, inserted] = index_owner.emplace(index, &slot);
      if (!inserted) {
        throw DataError("sentence '" + sentence.id + "': overlapping slots '" +
                        it->second->slot_id + "' and '" + slot.slot_id + "'");
      }
      if (predicate_indices.contains(index)) overlaps_predicate = true;
    }
    if (overlaps_predicate) {
      warnings.push_back("sentence '" + sentence.id + "': slot '" + slot.slot_id +
                         "' overlaps the predicate");
    }
  }
  return warnings;
}

ParsedCorpus parse_conllu(std::istream& in) {
  ParsedCorpus result;
  std::vector<Token> tokens;
  std::string sent_id;
  std::string line;
  std::size_t line_no = 0;
  std::size_t ordinal = 0;

  auto flush = [&]() {
    if (tokens.empty()) {
      sent_id.clear();
      return;
    }
    ++ordinal;
    Sentence sentence;
    if (sent_id.empty()) {
      sentence.id = "s" + std::to_string(ordinal);
      result.warnings.push_back("sentence " + std::to_string(ordinal) +
                                ": missing sent_id, synthesized '" + sentence.id + "'");
    } else {
      sentence.id = sent_id;
    }
    sentence.tokens = std::move(tokens);
    auto warnings = validate_sentence(sentence, {.require_predicate = false});
    result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
    result.sentences.push_back(std::move(sentence));
    tokens.clear();
    sent_id.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      const std::string comment = trim(line.substr(1));
      const auto eq = comment.find('=');
      if (eq != std::string::npos && trim(comment.substr(0, eq)) == "sent_id") {
        sent_id = trim(comment.substr(eq + 1));
      }
      continue;
    }
    auto columns = split_columns(line);
    if (columns.size() != 10) {
      throw DataError("line " + std::to_string(line_no) + ": expected 10 columns, found " +
                      std::to_string(columns.size()));
    }
    // Multiword-token ranges ("1-2") and empty nodes ("1.1") carry no
    // dependency structure of their own.
    if (columns[0].find('-') != std::string::npos || columns[0].find('.') != std::string::npos) {
      continue;
    }
    Token token;
    token.index = parse_int_field(columns[0], "token id", line_no);
    token.surface = columns[1];
    token.lemma = columns[2];
    token.upos = columns[3];
    token.head = parse_int_field(columns[6], "HEAD", line_no);
    token.deprel = columns[7];
    if (token.index != static_cast<int>(tokens.size()) + 1) {
      throw DataError("line " + std::to_string(line_no) + ": token id " + columns[0] +
                      " out of sequence");
    }
    tokens.push_back(std::move(token));
  }
  flush();
  return result;
}

ParsedCorpus parse_task_jsonl(std::istream& in) {
  ParsedCorpus result;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    Sentence sentence;
    try {
      warn_unknown_fields(object, {"id", "tokens", "predicate", "slots"},
                          "line " + std::to_string(line_no), &result.warnings);
      sentence.id = object.at("id").get<std::string>();
      const std::string where = "sentence '" + sentence.id + "'";
      int index = 0;
      for (const auto& token_json : object.at("tokens")) {
        warn_unknown_fields(token_json, {"surface", "lemma", "upos", "head", "deprel"}, where,
                            &result.warnings);
        Token token;
        token.index = ++index;
        token.surface = token_json.at("surface").get<std::string>();
        token.lemma = token_json.value("lemma", token.surface);
        token.upos = token_json.value("upos", std::string("_"));
        token.head = token_json.at("head").get<int>();
        token.deprel = token_json.at("deprel").get<std::string>();
        sentence.tokens.push_back(std::move(token));
      }
      sentence.predicate = predicate_from_json(object.at("predicate"), where, &result.warnings);
      if (object.contains("slots")) {
        sentence.slots = slots_from_json(object.at("slots"), where, &result.warnings);
      }
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen_ids.insert(sentence.id).second) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate sentence id '" +
                      sentence.id + "'");
    }
    auto warnings = validate_sentence(sentence);
    result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
    result.sentences.push_back(std::move(sentence));
  }
  return result;
}

void write_task_jsonl(std::ostream& out, const std::vector<Sentence>& corpus) {
  for (const Sentence& sentence : corpus) {
    ordered_json object;
    object["id"] = sentence.id;
    ordered_json tokens = ordered_json::array();
    for (const Token& token : sentence.tokens) {
      ordered_json t;
      t["surface"] = token.surface;
      t["lemma"] = token.lemma;
      t["upos"] = token.upos;
      t["head"] = token.head;
      t["deprel"] = token.deprel;
      tokens.push_back(std::move(t));
    }
    object["tokens"] = std::move(tokens);
    ordered_json predicate;
    predicate["token_indices"] = sentence.predicate.token_indices;
    if (sentence.predicate.gold_frame) predicate["gold_frame"] = *sentence.predicate.gold_frame;
    object["predicate"] = std::move(predicate);
    ordered_json slots = ordered_json::array();
    for (const SlotSpan& slot : sentence.slots) {
      ordered_json s;
      s["slot_id"] = slot.slot_id;
      s["token_indices"] = slot.token_indices;
      if (slot.gold_role) s["gold_role"] = *slot.gold_role;
      slots.push_back(std::move(s));
    }
    object["slots"] = std::move(slots);
    out << object.dump() << '\n';
  }
}

std::vector<SentenceAnnotation> parse_annotations_jsonl(std::istream& in,
                                                        std::vector<std::string>* warnings) {
  std::vector<SentenceAnnotation> annotations;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("annotations line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    SentenceAnnotation annotation;
    try {
      warn_unknown_fields(object, {"id", "predicate", "slots"},
                          "annotations line " + std::to_string(line_no), warnings);
      annotation.id = object.at("id").get<std::string>();
      const std::string where = "annotation '" + annotation.id + "'";
      annotation.predicate = predicate_from_json(object.at("predicate"), where, warnings);
      if (object.contains("slots")) {
        annotation.slots = slots_from_json(object.at("slots"), where, warnings);
      }
    } catch (const json::exception& e) {
      throw DataError("annotations line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen_ids.insert(annotation.id).second) {
      throw DataError("annotations line " + std::to_string(line_no) +
                      ": duplicate annotation for sentence '" + annotation.id + "'");
    }
    annotations.push_back(std::move(annotation));
  }
  return annotations;
}

void attach_annotations(std::vector<Sentence>& corpus,
                        const std::vector<SentenceAnnotation>& annotations,
                        std::vector<std::string>* warnings) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_id.emplace(corpus[i].id, i);
  for (const SentenceAnnotation& annotation : annotations) {
    const auto it = by_id.find(annotation.id);
    if (it == by_id.end()) {
      throw DataError("annotation for unknown sentence '" + annotation.id + "'");
    }
    Sentence& sentence = corpus[it->second];
    sentence.predicate = annotation.predicate;
    sentence.slots = annotation.slots;
  }
  for (const Sentence& sentence : corpus) {
    auto sentence_warnings = validate_sentence(sentence);
    if (warnings != nullptr) {
      warnings->insert(warnings->end(), sentence_warnings.begin(), sentence_warnings.end());
    }
  }
}

std::vector<InstanceId> instance_ids(const std::vector<Sentence>& corpus, InstanceKind kind) {
  std::vector<InstanceId> ids;
  for (const Sentence& sentence : corpus) {
    if (kind == InstanceKind::Verb) {
      ids.push_back({sentence.id, InstanceKind::Verb, {}});
    } else {
      for (const SlotSpan& slot : sentence.slots) {
        ids.push_back({sentence.id, InstanceKind::Slot, slot.slot_id});
      }
    }
  }
  return ids;
}

}  // namespace frameind
