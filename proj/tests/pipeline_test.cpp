#include "frameind/pipeline.hpp"

#include <sstream>

#include <doctest.h>

#include "frameind/config.hpp"
#include "frameind/errors.hpp"
#include "frameind/eval.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace frameind;
using testutil::store_from_text;
using testutil::svo_sentence;

namespace {

// Two vocabulary groups with orthogonal vectors. Group membership should be
// exactly recoverable at k = 2 under any linkage and metric.
struct TwoGroupFixture {
  std::vector<Sentence> corpus;
  EmbeddingStore store;

  TwoGroupFixture() {
    corpus = {
        svo_sentence("s01", "trader", "buys", "goods", "trade", "agent", "theme"),
        svo_sentence("s02", "merchant", "sells", "wares", "trade", "agent", "theme"),
        svo_sentence("s03", "vendor", "buys", "wares", "trade", "agent", "theme"),
        svo_sentence("s04", "dealer", "sells", "goods", "trade", "agent", "theme"),
        svo_sentence("s05", "hiker", "walks", "trail", "travel", "agent", "theme"),
        svo_sentence("s06", "runner", "runs", "ridge", "travel", "agent", "theme"),
        svo_sentence("s07", "walker", "walks", "ridge", "travel", "agent", "theme"),
        svo_sentence("s08", "jogger", "runs", "trail", "travel", "agent", "theme"),
    };
    store = store_from_text(
        "16 2\n"
        "trader 1 0\nmerchant 1 0\nvendor 1 0\ndealer 1 0\n"
        "buys 1 0\nsells 1 0\ngoods 1 0\nwares 1 0\n"
        "hiker 0 1\nrunner 0 1\nwalker 0 1\njogger 0 1\n"
        "walks 0 1\nruns 0 1\ntrail 0 1\nridge 0 1\n");
  }

  PipelineInputs inputs() const {
    PipelineInputs in;
    in.store = &store;
    return in;
  }
};

PipelineConfig frames_config() {
  PipelineConfig config;
  config.subtask = Subtask::A;
  config.recipe = {{BlockKind::ContextTfidf, 1.0}, {BlockKind::Word, 1.0}};
  config.normalize = true;
  config.metric = Metric::Manhattan;
  config.linkage = Linkage::Average;
  config.k = 2;
  return config;
}

}  // namespace

TEST_CASE("config files parse into a PipelineConfig") {
  std::istringstream in(
      "# frame induction\n"
      "subtask = A\n"
      "recipe = c,w\n"
      "normalize = true\n"
      "metric = manhattan   # tuned\n"
      "linkage = average\n"
      "k = 150\n"
      "vectors = \"vectors.txt\"\n"
      "weighting = tfidf\n"
      "block_scale.w = 2.5\n"
      "mystery = 1\n");
  const ConfigFile file = ConfigFile::parse(in);
  PipelineConfig config;
  std::vector<std::string> warnings;
  file.apply(config, &warnings);
  CHECK(config.subtask == Subtask::A);
  REQUIRE(config.recipe.size() == 2);
  CHECK(config.recipe[0].kind == BlockKind::ContextTfidf);
  CHECK(config.recipe[1].kind == BlockKind::Word);
  CHECK(config.recipe[1].scale == 2.5);
  CHECK(config.normalize);
  CHECK(config.metric == Metric::Manhattan);
  CHECK(config.linkage == Linkage::Average);
  CHECK(config.k == 150);
  CHECK(config.vectors_path == "vectors.txt");
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("mystery") != std::string::npos);
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("config validation catches contradictions") {
  PipelineConfig config = frames_config();
  SUBCASE("ward without euclidean") {
    config.linkage = Linkage::Ward;
    CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("ward requires euclidean"),
                         UsageError);
  }
  SUBCASE("empty recipe") {
    config.recipe.clear();
    CHECK_THROWS_AS(config.validate(), UsageError);
  }
  SUBCASE("slot-only blocks under subtask A") {
    config.recipe.push_back({BlockKind::InboundDep, 1.0});
    CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("slot instances"), UsageError);
  }
  SUBCASE("bad values in the file") {
    std::istringstream bad("k = soon\n");
    PipelineConfig fresh;
    CHECK_THROWS_AS(ConfigFile::parse(bad).apply(fresh), UsageError);
  }
}

TEST_CASE("verb clustering recovers constructed frame groups") {
  const TwoGroupFixture fixture;
  const PipelineConfig config = frames_config();
  const InduceResult result = run_subtask_a(fixture.corpus, config, fixture.inputs());

  REQUIRE(result.labeling.size() == 8);
  const Labeling gold = gold_frames(fixture.corpus);
  const ScoreReport report = score(result.labeling, gold);
  CHECK(report.purity_f1 == 1.0);
  CHECK(report.bcubed_f1 == 1.0);

  // The same cut must fall out of the naive reference agglomerator.
  const FeatureMatrix features =
      build_feature_matrix(fixture.corpus, config, fixture.inputs(), InstanceKind::Verb);
  const auto expected = oracle::naive_agglomerate(pairwise_distances(features, config.metric),
                                                  config.linkage, config.k);
  std::size_t row = 0;
  for (const auto& [id, label] : result.labeling) {
    CHECK(label == std::to_string(expected[row]));
    ++row;
  }
}

TEST_CASE("verb clustering boundary cuts") {
  const TwoGroupFixture fixture;
  PipelineConfig config = frames_config();
  SUBCASE("k = number of sentences gives singletons") {
    config.k = fixture.corpus.size();
    const InduceResult result = run_subtask_a(fixture.corpus, config, fixture.inputs());
    std::set<std::string> labels;
    for (const auto& [id, label] : result.labeling) labels.insert(label);
    CHECK(labels.size() == fixture.corpus.size());
  }
  SUBCASE("k = 1 gives one frame") {
    config.k = 1;
    const InduceResult result = run_subtask_a(fixture.corpus, config, fixture.inputs());
    for (const auto& [id, label] : result.labeling) CHECK(label == "0");
  }
  SUBCASE("missing embeddings fail before clustering") {
    PipelineInputs empty;
    CHECK_THROWS_WITH_AS(run_subtask_a(fixture.corpus, config, empty),
                         doctest::Contains("--vectors"), UsageError);
  }
  SUBCASE("subtask mismatch is rejected") {
    config.subtask = Subtask::B2;
    CHECK_THROWS_AS(run_subtask_a(fixture.corpus, config, fixture.inputs()), UsageError);
  }
}

TEST_CASE("role clustering recovers context groups when ID vectors are identical") {
  // Single-slot sentences; every slot is an nsubj, so the ID block carries no
  // signal and the context block decides.
  std::vector<Sentence> corpus;
  const char* subjects[] = {"trader", "merchant", "vendor", "hiker", "runner", "walker"};
  for (int i = 0; i < 6; ++i) {
    Sentence s;
    s.id = "s" + std::to_string(i + 1);
    s.tokens = {testutil::tok(1, subjects[i], 2, "nsubj"), testutil::tok(2, "acts", 0, "root")};
    s.predicate.token_indices = {2};
    s.slots = {{"a0", {1}, std::string(i < 3 ? "trade" : "travel")}};
    corpus.push_back(std::move(s));
  }
  const EmbeddingStore store = store_from_text(
      "6 2\ntrader 1 0\nmerchant 1 0\nvendor 1 0\nhiker 0 1\nrunner 0 1\nwalker 0 1\n");
  PipelineInputs inputs;
  inputs.store = &store;

  PipelineConfig config;
  config.subtask = Subtask::B2;
  config.recipe = {{BlockKind::ContextTfidf, 1.0}, {BlockKind::InboundDep, 1.0}};
  config.metric = Metric::Euclidean;
  config.linkage = Linkage::Ward;
  config.k = 2;

  const InduceResult result = run_subtask_b2(corpus, config, inputs);
  REQUIRE(result.labeling.size() == 6);
  const ScoreReport report = score(result.labeling, gold_roles(corpus));
  CHECK(report.purity_f1 == 1.0);
  CHECK(report.bcubed_f1 == 1.0);

  SUBCASE("k = 1 shares one role") {
    config.k = 1;
    const InduceResult one = run_subtask_b2(corpus, config, inputs);
    for (const auto& [id, label] : one.labeling) CHECK(label == "0");
  }
  SUBCASE("a single slot clusters alone") {
    const std::vector<Sentence> tiny = {corpus[0]};
    config.k = 1;
    const InduceResult one = run_subtask_b2(tiny, config, inputs);
    REQUIRE(one.labeling.size() == 1);
    CHECK(one.labeling.at("s1#a0") == "0");
  }
}

TEST_CASE("feature matrices can draw context vectors from a file") {
  const TwoGroupFixture fixture;
  std::ostringstream entries;
  for (std::size_t i = 0; i < fixture.corpus.size(); ++i) {
    entries << R"({"id":")" << fixture.corpus[i].id << R"(","vector":[)" << (i < 4 ? 1 : 0) << ","
            << (i < 4 ? 0 : 1) << "]}\n";
  }
  std::istringstream in(entries.str());
  const ContextualVectorFile file = ContextualVectorFile::load(in);

  PipelineConfig config = frames_config();
  config.recipe = {{BlockKind::ContextFile, 1.0}};
  config.normalize = false;
  PipelineInputs inputs;
  inputs.contextual = &file;

  const FeatureMatrix features =
      build_feature_matrix(fixture.corpus, config, inputs, InstanceKind::Verb);
  CHECK(features.rows[0] == Vector{1, 0});
  CHECK(features.rows[7] == Vector{0, 1});

  SUBCASE("missing instances are reported") {
    const std::vector<Sentence> more = {fixture.corpus[0], svo_sentence("zz", "cat", "sat", "mat")};
    CHECK_THROWS_WITH_AS(build_feature_matrix(more, config, inputs, InstanceKind::Verb),
                         doctest::Contains("zz"), DataError);
  }
}

TEST_CASE("extra corpora widen the dependency label vocabulary") {
  // A model trained on one file must see the same ID block layout on
  // another, so both corpora contribute labels.
  const std::vector<Sentence> train_corpus = {svo_sentence("t1", "trader", "buys", "goods")};
  std::vector<Sentence> test_corpus = {svo_sentence("u1", "hiker", "walks", "trail")};
  test_corpus[0].tokens[4].deprel = "obl";  // label unseen in train_corpus

  PipelineConfig config;
  config.subtask = Subtask::B2;
  config.recipe = {{BlockKind::InboundDep, 1.0}};

  PipelineInputs alone;
  const FeatureMatrix narrow =
      build_feature_matrix(train_corpus, config, alone, InstanceKind::Slot);

  PipelineInputs joined;
  joined.extra_label_corpora = {&test_corpus};
  const FeatureMatrix wide = build_feature_matrix(train_corpus, config, joined, InstanceKind::Slot);
  CHECK(wide.dim() == narrow.dim() + 1);

  PipelineInputs reversed;
  reversed.extra_label_corpora = {&train_corpus};
  const FeatureMatrix other =
      build_feature_matrix(test_corpus, config, reversed, InstanceKind::Slot);
  CHECK(other.dim() == wide.dim());
}

TEST_CASE("merge_b1 composes frame.role labels with UKN fallbacks") {
  std::vector<Sentence> corpus = {svo_sentence("s1", "trader", "buys", "goods"),
                                  svo_sentence("s2", "hiker", "walks", "trail")};
  Labeling frames = {{"s1", "f3"}, {"s2", "f1"}};

  SUBCASE("role present") {
    const Labeling roles = {{"s1#a0", "r2"}, {"s1#a1", "r1"}, {"s2#a0", "r2"}, {"s2#a1", "r1"}};
    const Labeling merged = merge_b1(frames, roles, corpus);
    CHECK(merged.at("s1#a0") == "f3.r2");
    CHECK(merged.at("s2#a1") == "f1.r1");
  }
  SUBCASE("role missing becomes UKN") {
    const Labeling roles = {{"s1#a0", "r2"}};
    const Labeling merged = merge_b1(frames, roles, corpus);
    CHECK(merged.at("s1#a0") == "f3.r2");
    CHECK(merged.at("s1#a1") == "f3.UKN");
    CHECK(merged.at("s2#a0") == "f1.UKN");
  }
  SUBCASE("empty roles labels everything UKN") {
    const Labeling merged = merge_b1(frames, {}, corpus);
    REQUIRE(merged.size() == 4);
    for (const auto& [id, label] : merged) {
      CHECK(label.substr(label.size() - 4) == ".UKN");
    }
  }
  SUBCASE("frames must be total") {
    frames.erase("s2");
    CHECK_THROWS_WITH_AS(merge_b1(frames, {}, corpus), doctest::Contains("s2"), DataError);
  }
  SUBCASE("separator characters are sanitized") {
    const Labeling dotted = {{"s1", "v1.2"}, {"s2", "f"}};
    const Labeling roles = {{"s1#a0", "agent.x"}};
    const Labeling merged = merge_b1(dotted, roles, corpus);
    CHECK(merged.at("s1#a0") == "v1_2.agent_x");
  }
  SUBCASE("restriction to labeled slots is the plain composition") {
    const Labeling roles = {{"s1#a1", "r9"}, {"s2#a0", "r7"}};
    const Labeling merged = merge_b1(frames, roles, corpus);
    for (const auto& [id, role] : roles) {
      const std::string sentence_id = id.substr(0, id.find('#'));
      CHECK(merged.at(id) == sanitize_label(frames.at(sentence_id)) + "." + sanitize_label(role));
    }
  }
}

TEST_CASE("cluster-per-verb baseline labels by first predicate lemma") {
  std::vector<Sentence> corpus = {
      svo_sentence("s1", "trader", "buys", "goods"),
      svo_sentence("s2", "dealer", "sells", "wares"),
      svo_sentence("s3", "vendor", "buys", "stock"),
  };
  corpus[2].tokens[2].lemma = "Buy";  // lowercased on output
  const Labeling labels = baseline_cluster_per_verb(corpus);
  CHECK(labels.at("s1") == "buys");
  CHECK(labels.at("s2") == "sells");
  CHECK(labels.at("s3") == "buy");

  SUBCASE("phrasal predicates use the first word") {
    Sentence s;
    s.id = "p1";
    s.tokens = {testutil::tok(1, "prices", 2, "nsubj", "price"),
                testutil::tok(2, "fell", 0, "root", "fall"),
                testutil::tok(3, "back", 2, "compound:prt", "back")};
    s.predicate.token_indices = {2, 3};
    const Labeling phrasal = baseline_cluster_per_verb({s});
    CHECK(phrasal.at("p1") == "fall");
  }
  SUBCASE("single-sentence corpus has one label") {
    const Labeling one = baseline_cluster_per_verb({corpus[0]});
    CHECK(one.size() == 1);
  }
}

TEST_CASE("cluster-per-dep-role baseline labels by the slot's inbound relation") {
  const Sentence s = svo_sentence("s1", "trader", "buys", "goods");
  const Labeling labels = baseline_cluster_per_dep_role({s});
  CHECK(labels.at("s1#a0") == "nsubj");
  CHECK(labels.at("s1#a1") == "dobj");

  SUBCASE("multi-token slots use the token attached outside the span") {
    // Slot {2,3}: token 2 attaches inside (det -> 3), token 3 outside (dobj -> 1).
    Sentence m;
    m.id = "m1";
    m.tokens = {testutil::tok(1, "saw", 0, "root"), testutil::tok(2, "the", 3, "det"),
                testutil::tok(3, "dog", 1, "dobj"), testutil::tok(4, "today", 1, "advmod")};
    m.predicate.token_indices = {1};
    m.slots = {{"a0", {2, 3}, {}}};
    const Labeling multi = baseline_cluster_per_dep_role({m});
    CHECK(multi.at("m1#a0") == "dobj");
  }
}

TEST_CASE("boolean baseline labels by verb/slot order") {
  // Verb at 3: slot a0 at 2 precedes it, slot a1 at 5 follows it.
  const Sentence s = svo_sentence("s1", "trader", "buys", "goods");
  const Labeling labels = baseline_boolean({s});
  CHECK(labels.at("s1#a0") == "1");
  CHECK(labels.at("s1#a1") == "0");

  SUBCASE("all slots after the verb collapse to one cluster") {
    Sentence t;
    t.id = "t1";
    t.tokens = {testutil::tok(1, "give", 0, "root"), testutil::tok(2, "him", 1, "iobj"),
                testutil::tok(3, "time", 1, "dobj")};
    t.predicate.token_indices = {1};
    t.slots = {{"a0", {2}, {}}, {"a1", {3}, {}}};
    const Labeling after = baseline_boolean({t});
    CHECK(after.at("t1#a0") == "0");
    CHECK(after.at("t1#a1") == "0");
  }
}

TEST_CASE("123 baseline labels by slot ordinal") {
  Sentence s;
  s.id = "s1";
  s.tokens = {testutil::tok(1, "a", 2, "nsubj"), testutil::tok(2, "b", 0, "root"),
              testutil::tok(3, "c", 2, "dobj"), testutil::tok(4, "d", 2, "obl"),
              testutil::tok(5, "e", 2, "iobj"), testutil::tok(6, "f", 2, "advmod")};
  s.predicate.token_indices = {2};
  s.slots = {{"a0", {1}, {}}, {"a1", {3}, {}}, {"a2", {4}, {}}, {"a3", {5}, {}}, {"a4", {6}, {}}};
  const Labeling labels = baseline_123({s});
  CHECK(labels.at("s1#a0") == "1");
  CHECK(labels.at("s1#a4") == "5");

  SUBCASE("a lone slot is 1") {
    const Labeling lone = baseline_123({svo_sentence("x", "cat", "sat", "mat")});
    CHECK(lone.at("x#a0") == "1");
  }
}

TEST_CASE("pipeline outputs are total over their instance sets") {
  const TwoGroupFixture fixture;
  const auto slot_ids = instance_ids(fixture.corpus, InstanceKind::Slot);
  for (const Labeling& labeling :
       {baseline_cluster_per_dep_role(fixture.corpus), baseline_boolean(fixture.corpus),
        baseline_123(fixture.corpus),
        merge_b1(baseline_cluster_per_verb(fixture.corpus), {}, fixture.corpus)}) {
    REQUIRE(labeling.size() == slot_ids.size());
    for (const auto& id : slot_ids) {
      CHECK(labeling.contains(id.str()));
      CHECK(!labeling.at(id.str()).empty());
    }
  }
}

TEST_CASE("induction is deterministic end to end") {
  const TwoGroupFixture fixture;
  const PipelineConfig config = frames_config();
  const InduceResult first = run_subtask_a(fixture.corpus, config, fixture.inputs());
  const InduceResult second = run_subtask_a(fixture.corpus, config, fixture.inputs());
  std::ostringstream a;
  std::ostringstream b;
  write_labeling_tsv(a, first.labeling);
  write_labeling_tsv(b, second.labeling);
  CHECK(a.str() == b.str());
}

TEST_CASE("perfect verb separation scores purity 1 against the per-verb labeling") {
  // Four verbs with orthogonal vectors and shared context vocabulary; at
  // k = 4 the clustering reproduces the per-verb partition.
  std::vector<Sentence> corpus;
  const char* verbs[] = {"buys", "sells", "walks", "runs"};
  for (int i = 0; i < 8; ++i) {
    corpus.push_back(svo_sentence("s" + std::to_string(i + 1), "one", verbs[i % 4], "two"));
  }
  const EmbeddingStore store = store_from_text(
      "6 4\nbuys 1 0 0 0\nsells 0 1 0 0\nwalks 0 0 1 0\nruns 0 0 0 1\n"
      "one 0.5 0.5 0.5 0.5\ntwo 0.5 0.5 0.5 0.5\n");
  PipelineInputs inputs;
  inputs.store = &store;
  PipelineConfig config = frames_config();
  config.k = 4;

  const InduceResult result = run_subtask_a(corpus, config, inputs);
  const ScoreReport report = score(result.labeling, baseline_cluster_per_verb(corpus));
  CHECK(report.purity == 1.0);
  CHECK(report.purity_f1 == 1.0);
}
