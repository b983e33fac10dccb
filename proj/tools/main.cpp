// Command-line front end: corpus conversion, vector-based frame and role
// induction, merging, baselines, the supervised upper bound, and scoring.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frameind/config.hpp"
#include "frameind/corpus.hpp"
#include "frameind/errors.hpp"
#include "frameind/eval.hpp"
#include "frameind/io.hpp"
#include "frameind/logreg.hpp"
#include "frameind/pipeline.hpp"

namespace {

using namespace frameind;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& warning : warnings) std::cerr << "warning: " << warning << "\n";
}

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(std::string("cannot open ") + what + " '" + path + "'");
  return in;
}

std::vector<Sentence> load_corpus(const std::string& path) {
  auto in = open_input(path, "corpus");
  ParsedCorpus parsed = parse_task_jsonl(in);
  print_warnings(parsed.warnings);
  return parsed.sentences;
}

void write_labeling_atomic(const std::string& path, const Labeling& labeling) {
  AtomicFile file{std::filesystem::path(path)};
  write_labeling_tsv(file.stream(), labeling);
  file.commit();
}

struct InduceOptions {
  std::string corpus_path;
  std::string config_path;
  std::string vectors_path;
  std::string contextual_path;
  std::string out_path;
  std::string dendrogram_path;
  std::vector<std::string> union_corpora;
  bool lowercase = false;
};

// Shared by induce-frames, induce-roles, train-logreg and predict-logreg.
// Precedence: flags > config file > defaults.
PipelineConfig make_pipeline_config(const InduceOptions& options, Subtask subtask) {
  PipelineConfig config;
  config.subtask = subtask;
  auto in = open_input(options.config_path, "config");
  const ConfigFile file = ConfigFile::parse(in);
  std::vector<std::string> warnings;
  file.apply(config, &warnings);
  print_warnings(warnings);
  if (!options.vectors_path.empty()) config.vectors_path = options.vectors_path;
  if (!options.contextual_path.empty()) config.contextual_vectors_path = options.contextual_path;
  if (options.lowercase) config.lowercase = true;
  if (config.subtask != subtask) {
    throw UsageError(std::string("config names subtask ") + to_string(config.subtask) +
                     ", but this command runs subtask " + to_string(subtask));
  }
  config.validate();
  return config;
}

struct LoadedInputs {
  std::optional<EmbeddingStore> store;
  std::optional<ContextualVectorFile> contextual;
  std::vector<std::vector<Sentence>> extra_corpora;
  PipelineInputs inputs;
};

LoadedInputs load_inputs(const PipelineConfig& config, const InduceOptions& options) {
  LoadedInputs loaded;
  if (!config.vectors_path.empty()) {
    auto in = open_input(config.vectors_path, "word vectors");
    std::vector<std::string> warnings;
    loaded.store = EmbeddingStore::load_text(in, config.lowercase, &warnings);
    print_warnings(warnings);
    loaded.inputs.store = &*loaded.store;
  }
  if (!config.contextual_vectors_path.empty()) {
    auto in = open_input(config.contextual_vectors_path, "contextual vectors");
    loaded.contextual = ContextualVectorFile::load(in);
    loaded.inputs.contextual = &*loaded.contextual;
  }
  for (const std::string& path : options.union_corpora) {
    loaded.extra_corpora.push_back(load_corpus(path));
  }
  for (const auto& corpus : loaded.extra_corpora) {
    loaded.inputs.extra_label_corpora.push_back(&corpus);
  }
  return loaded;
}

void write_induce_outputs(const InduceOptions& options, const InduceResult& result,
                          const char* command) {
  write_labeling_atomic(options.out_path, result.labeling);
  if (!options.dendrogram_path.empty()) {
    AtomicFile file{std::filesystem::path(options.dendrogram_path)};
    write_dendrogram_tsv(file.stream(), result.dendrogram);
    file.commit();
  }
  const std::size_t inversions = result.dendrogram.inversion_count();
  if (inversions > 0) {
    std::cerr << "warning: dendrogram has " << inversions << " height inversion(s)\n";
  }
  std::cerr << command << ": " << result.labeling.size() << " instances -> " << options.out_path
            << "\n";
}

int run_convert(const std::string& conllu_path, const std::string& corpus_path,
                const std::string& annotations_path, const std::string& out_path,
                const std::string& gold_frames_path, const std::string& gold_roles_path,
                const std::string& gold_joint_path) {
  if (conllu_path.empty() == corpus_path.empty()) {
    throw UsageError("convert needs exactly one of --conllu or --corpus");
  }
  if (out_path.empty() && gold_frames_path.empty() && gold_roles_path.empty() &&
      gold_joint_path.empty()) {
    throw UsageError("convert: no outputs requested");
  }

  std::vector<Sentence> corpus;
  if (!conllu_path.empty()) {
    if (annotations_path.empty()) {
      throw UsageError("convert: --annotations is required with --conllu");
    }
    auto in = open_input(conllu_path, "corpus");
    ParsedCorpus parsed = parse_conllu(in);
    print_warnings(parsed.warnings);
    corpus = std::move(parsed.sentences);
    auto ann_in = open_input(annotations_path, "annotations");
    std::vector<std::string> warnings;
    const auto annotations = parse_annotations_jsonl(ann_in, &warnings);
    attach_annotations(corpus, annotations, &warnings);
    print_warnings(warnings);
  } else {
    corpus = load_corpus(corpus_path);
  }

  if (!out_path.empty()) {
    AtomicFile file{std::filesystem::path(out_path)};
    write_task_jsonl(file.stream(), corpus);
    file.commit();
  }
  if (!gold_frames_path.empty()) write_labeling_atomic(gold_frames_path, gold_frames(corpus));
  if (!gold_roles_path.empty()) write_labeling_atomic(gold_roles_path, gold_roles(corpus));
  if (!gold_joint_path.empty()) write_labeling_atomic(gold_joint_path, gold_joint(corpus));
  std::cerr << "convert: " << corpus.size() << " sentences\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    CLI::App app{"unsupervised semantic frame and role induction toolkit"};
    app.require_subcommand(1);

    // convert
    std::string conllu_path, corpus_path, annotations_path, out_path;
    std::string gold_frames_path, gold_roles_path, gold_joint_path;
    auto* convert = app.add_subcommand(
        "convert", "Convert CoNLL-U plus highlight annotations to the task JSONL "
                   "format, or re-validate a task corpus and emit gold labelings");
    convert->add_option("--conllu", conllu_path, "CoNLL-U input file");
    convert->add_option("--corpus", corpus_path, "task JSONL input file");
    convert->add_option("--annotations", annotations_path,
                        "JSONL sidecar with predicate/slots per sentence id");
    convert->add_option("--out", out_path, "task JSONL output file");
    convert->add_option("--gold-frames", gold_frames_path, "write the gold frame labeling (TSV)");
    convert->add_option("--gold-roles", gold_roles_path, "write the gold role labeling (TSV)");
    convert->add_option("--gold-joint", gold_joint_path,
                        "write the gold frame.role labeling (TSV)");
    convert->callback([&]() {
      run_convert(conllu_path, corpus_path, annotations_path, out_path, gold_frames_path,
                  gold_roles_path, gold_joint_path);
    });

    // induce-frames / induce-roles
    InduceOptions frames_options;
    auto* induce_frames =
        app.add_subcommand("induce-frames", "Cluster verb instances into frame types");
    induce_frames->add_option("--corpus", frames_options.corpus_path, "task JSONL corpus")
        ->required();
    induce_frames->add_option("--config", frames_options.config_path, "pipeline config file")
        ->required();
    induce_frames->add_option("--vectors", frames_options.vectors_path, "word-vector text file");
    induce_frames->add_option("--contextual-vectors", frames_options.contextual_path,
                              "precomputed per-instance vector JSONL");
    induce_frames->add_option("--out", frames_options.out_path, "output labeling TSV")->required();
    induce_frames->add_option("--dendrogram", frames_options.dendrogram_path,
                              "optional dendrogram dump TSV");
    induce_frames->add_flag("--lowercase", frames_options.lowercase,
                            "lowercase tokens when loading word vectors");
    induce_frames->callback([&]() {
      const PipelineConfig config = make_pipeline_config(frames_options, Subtask::A);
      const auto corpus = load_corpus(frames_options.corpus_path);
      const LoadedInputs loaded = load_inputs(config, frames_options);
      const InduceResult result = run_subtask_a(corpus, config, loaded.inputs);
      write_induce_outputs(frames_options, result, "induce-frames");
    });

    InduceOptions roles_options;
    auto* induce_roles =
        app.add_subcommand("induce-roles", "Cluster slot instances into generic roles");
    induce_roles->add_option("--corpus", roles_options.corpus_path, "task JSONL corpus")
        ->required();
    induce_roles->add_option("--config", roles_options.config_path, "pipeline config file")
        ->required();
    induce_roles->add_option("--vectors", roles_options.vectors_path, "word-vector text file");
    induce_roles->add_option("--contextual-vectors", roles_options.contextual_path,
                             "precomputed per-instance vector JSONL");
    induce_roles->add_option("--out", roles_options.out_path, "output labeling TSV")->required();
    induce_roles->add_option("--dendrogram", roles_options.dendrogram_path,
                             "optional dendrogram dump TSV");
    induce_roles->add_option("--union-corpus", roles_options.union_corpora,
                             "extra corpora for the dependency label vocabulary");
    induce_roles->add_flag("--lowercase", roles_options.lowercase,
                           "lowercase tokens when loading word vectors");
    induce_roles->callback([&]() {
      const PipelineConfig config = make_pipeline_config(roles_options, Subtask::B2);
      const auto corpus = load_corpus(roles_options.corpus_path);
      const LoadedInputs loaded = load_inputs(config, roles_options);
      const InduceResult result = run_subtask_b2(corpus, config, loaded.inputs);
      write_induce_outputs(roles_options, result, "induce-roles");
    });

    // merge
    std::string merge_frames_path, merge_roles_path, merge_corpus_path, merge_out_path;
    auto* merge = app.add_subcommand(
        "merge", "Combine frame and role labelings into frame-specific slots "
                 "(frame.role; missing roles become frame.UKN)");
    merge->add_option("--frames", merge_frames_path, "frame labeling TSV over verb instances")
        ->required();
    merge->add_option("--roles", merge_roles_path, "role labeling TSV over slot instances")
        ->required();
    merge->add_option("--corpus", merge_corpus_path, "task JSONL corpus")->required();
    merge->add_option("--out", merge_out_path, "output labeling TSV")->required();
    merge->callback([&]() {
      const auto corpus = load_corpus(merge_corpus_path);
      const Labeling frames = read_labeling_file(merge_frames_path);
      const Labeling roles = read_labeling_file(merge_roles_path);
      const Labeling merged = merge_b1(frames, roles, corpus);
      write_labeling_atomic(merge_out_path, merged);
      std::cerr << "merge: " << merged.size() << " slot instances -> " << merge_out_path << "\n";
    });

    // baseline
    std::string baseline_kind, baseline_corpus_path, baseline_out_path;
    auto* baseline = app.add_subcommand("baseline", "Run one of the reference baselines");
    baseline
        ->add_option("--kind", baseline_kind,
                     "one of per-verb, per-dep-role, boolean, 123")
        ->required()
        ->check(CLI::IsMember({"per-verb", "per-dep-role", "boolean", "123"}));
    baseline->add_option("--corpus", baseline_corpus_path, "task JSONL corpus")->required();
    baseline->add_option("--out", baseline_out_path, "output labeling TSV")->required();
    baseline->callback([&]() {
      const auto corpus = load_corpus(baseline_corpus_path);
      Labeling labeling;
      if (baseline_kind == "per-verb") {
        labeling = baseline_cluster_per_verb(corpus);
      } else if (baseline_kind == "per-dep-role") {
        labeling = baseline_cluster_per_dep_role(corpus);
      } else if (baseline_kind == "boolean") {
        labeling = baseline_boolean(corpus);
      } else {
        labeling = baseline_123(corpus);
      }
      write_labeling_atomic(baseline_out_path, labeling);
      std::cerr << "baseline " << baseline_kind << ": " << labeling.size() << " instances -> "
                << baseline_out_path << "\n";
    });

    // train-logreg
    InduceOptions train_options;
    auto* train_cmd = app.add_subcommand(
        "train-logreg", "Train the supervised role-labeling upper bound on gold roles");
    train_cmd->add_option("--corpus", train_options.corpus_path, "task JSONL corpus with gold roles")
        ->required();
    train_cmd->add_option("--config", train_options.config_path, "pipeline config file")
        ->required();
    train_cmd->add_option("--vectors", train_options.vectors_path, "word-vector text file");
    train_cmd->add_option("--contextual-vectors", train_options.contextual_path,
                          "precomputed per-instance vector JSONL");
    train_cmd->add_option("--out", train_options.out_path, "output model JSON")->required();
    train_cmd->add_option("--union-corpus", train_options.union_corpora,
                          "extra corpora for the dependency label vocabulary");
    train_cmd->add_flag("--lowercase", train_options.lowercase,
                        "lowercase tokens when loading word vectors");
    train_cmd->callback([&]() {
      const PipelineConfig config = make_pipeline_config(train_options, Subtask::B2);
      TrainConfig train_config;
      {
        auto in = open_input(train_options.config_path, "config");
        ConfigFile::parse(in).apply(train_config);
      }
      const auto corpus = load_corpus(train_options.corpus_path);
      const LoadedInputs loaded = load_inputs(config, train_options);
      const FeatureMatrix features =
          build_feature_matrix(corpus, config, loaded.inputs, InstanceKind::Slot);
      const Labeling labels = gold_roles(corpus);
      std::vector<double> losses;
      const LogRegModel model = train(features, labels, train_config, &losses);
      AtomicFile file{std::filesystem::path(train_options.out_path)};
      model.save_json(file.stream());
      file.commit();
      std::cerr << "train-logreg: " << features.rows.size() << " instances, "
                << model.classes.size() << " classes, " << losses.size() << " epochs -> "
                << train_options.out_path << "\n";
    });

    // predict-logreg
    InduceOptions predict_options;
    std::string model_path;
    auto* predict_cmd =
        app.add_subcommand("predict-logreg", "Label slot instances with a trained model");
    predict_cmd->add_option("--corpus", predict_options.corpus_path, "task JSONL corpus")
        ->required();
    predict_cmd->add_option("--config", predict_options.config_path, "pipeline config file")
        ->required();
    predict_cmd->add_option("--vectors", predict_options.vectors_path, "word-vector text file");
    predict_cmd->add_option("--contextual-vectors", predict_options.contextual_path,
                            "precomputed per-instance vector JSONL");
    predict_cmd->add_option("--model", model_path, "model JSON from train-logreg")->required();
    predict_cmd->add_option("--out", predict_options.out_path, "output labeling TSV")->required();
    predict_cmd->add_option("--union-corpus", predict_options.union_corpora,
                            "extra corpora for the dependency label vocabulary");
    predict_cmd->add_flag("--lowercase", predict_options.lowercase,
                          "lowercase tokens when loading word vectors");
    predict_cmd->callback([&]() {
      const PipelineConfig config = make_pipeline_config(predict_options, Subtask::B2);
      const auto corpus = load_corpus(predict_options.corpus_path);
      const LoadedInputs loaded = load_inputs(config, predict_options);
      const FeatureMatrix features =
          build_feature_matrix(corpus, config, loaded.inputs, InstanceKind::Slot);
      auto model_in = open_input(model_path, "model");
      const LogRegModel model = LogRegModel::load_json(model_in);
      const Labeling labeling = predict(model, features);
      write_labeling_atomic(predict_options.out_path, labeling);
      std::cerr << "predict-logreg: " << labeling.size() << " instances -> "
                << predict_options.out_path << "\n";
    });

    // evaluate
    std::string pred_path, gold_path, scores_out_path;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Score a predicted labeling against a gold labeling "
                    "(Purity F1 and B-Cubed F1; JSON on stdout)");
    evaluate->add_option("--pred", pred_path, "predicted labeling TSV")->required();
    evaluate->add_option("--gold", gold_path, "gold labeling TSV")->required();
    evaluate->add_option("--out", scores_out_path, "also write the JSON report to a file");
    evaluate->callback([&]() {
      const Labeling pred = read_labeling_file(pred_path);
      const Labeling gold = read_labeling_file(gold_path);
      const ScoreReport report = score(pred, gold);
      const std::string json = score_json(report);
      if (!scores_out_path.empty()) {
        AtomicFile file{std::filesystem::path(scores_out_path)};
        file.stream() << json << '\n';
        file.commit();
      }
      std::cout << json << "\n";
      std::cerr << score_table(report);
    });

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 1;
    }
    return 0;
  } catch (const frameind::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const frameind::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
