#include "frameind/logreg.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <doctest.h>

#include "frameind/errors.hpp"

using namespace frameind;

namespace {

FeatureMatrix matrix_of(const std::vector<Vector>& rows) {
  FeatureMatrix matrix;
  matrix.rows = rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    matrix.instance_ids.push_back({"s" + std::to_string(i), InstanceKind::Verb, {}});
  }
  matrix.layout = {{"x", 0, rows.empty() ? 0 : rows[0].size()}};
  return matrix;
}

Labeling labels_of(const FeatureMatrix& matrix, const std::vector<std::string>& labels) {
  Labeling labeling;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labeling[matrix.instance_ids[i].str()] = labels[i];
  }
  return labeling;
}

FeatureMatrix random_matrix(std::mt19937& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> coord(0.0, 1.0);
  std::vector<Vector> rows(n, Vector(dim));
  for (Vector& row : rows) {
    for (double& x : row) x = coord(rng);
  }
  return matrix_of(rows);
}

}  // namespace

TEST_CASE("a separable 2-point problem trains to accuracy 1") {
  const FeatureMatrix features = matrix_of({{-1.0}, {1.0}});
  const Labeling labels = labels_of(features, {"a", "b"});
  TrainConfig config;
  config.l2 = 0.0;
  const LogRegModel model = train(features, labels, config);
  CHECK(predict(model, features) == labels);
}

TEST_CASE("a zero model predicts uniformly and picks the first class") {
  const LogRegModel model({"a", "b", "c"}, 2, 0.0);
  const FeatureMatrix features = matrix_of({{0.5, -2.0}, {3.0, 1.0}});

  const auto proba = predict_proba(model, features);
  for (const Vector& row : proba) {
    for (double p : row) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  const Labeling predictions = predict(model, features);
  for (const auto& [id, label] : predictions) CHECK(label == "a");
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937 rng(41);
  const FeatureMatrix features = random_matrix(rng, 5, 4);
  std::vector<std::string> names = {"u", "v", "w"};
  std::vector<std::string> row_labels;
  for (std::size_t i = 0; i < 5; ++i) row_labels.push_back(names[rng() % 3]);
  const Labeling labels = labels_of(features, row_labels);

  std::vector<std::string> classes;
  const std::vector<std::size_t> y = class_indices(features, labels, &classes);
  LogRegModel model(classes, 4, 0.7);
  std::normal_distribution<double> coord(0.0, 0.5);
  for (Vector& row : model.weights) {
    for (double& w : row) w = coord(rng);
  }

  std::vector<Vector> grad;
  logreg_loss(model, features, y, &grad);

  const double eps = 1e-5;
  double max_relative_error = 0.0;
  for (std::size_t c = 0; c < model.weights.size(); ++c) {
    for (std::size_t d = 0; d < model.weights[c].size(); ++d) {
      const double saved = model.weights[c][d];
      model.weights[c][d] = saved + eps;
      const double up = logreg_loss(model, features, y);
      model.weights[c][d] = saved - eps;
      const double down = logreg_loss(model, features, y);
      model.weights[c][d] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double denom = std::max({std::abs(grad[c][d]), std::abs(numeric), 1e-6});
      max_relative_error = std::max(max_relative_error, std::abs(grad[c][d] - numeric) / denom);
    }
  }
  CHECK(max_relative_error <= 1e-5);
}

TEST_CASE("loss is non-increasing at a small learning rate") {
  std::mt19937 rng(59);
  const FeatureMatrix features = random_matrix(rng, 12, 3);
  std::vector<std::string> row_labels;
  for (std::size_t i = 0; i < 12; ++i) row_labels.push_back(i % 2 == 0 ? "p" : "q");
  const Labeling labels = labels_of(features, row_labels);

  TrainConfig config;
  config.learning_rate = 1e-2;
  config.max_epochs = 200;
  config.tolerance = 0.0;
  // On a monotonicity violation, halve the rate and retry before failing.
  bool monotone = false;
  for (int attempt = 0; attempt < 4 && !monotone; ++attempt) {
    std::vector<double> losses;
    train(features, labels, config, &losses);
    monotone = true;
    for (std::size_t e = 1; e < losses.size(); ++e) {
      if (losses[e] > losses[e - 1]) {
        monotone = false;
        break;
      }
    }
    if (!monotone) config.learning_rate /= 2.0;
  }
  CHECK(monotone);
}

TEST_CASE("training is bit-deterministic") {
  std::mt19937 rng(67);
  const FeatureMatrix features = random_matrix(rng, 9, 4);
  std::vector<std::string> row_labels;
  for (std::size_t i = 0; i < 9; ++i) row_labels.push_back("c" + std::to_string(i % 3));
  const Labeling labels = labels_of(features, row_labels);

  const LogRegModel first = train(features, labels, {});
  const LogRegModel second = train(features, labels, {});
  REQUIRE(first.weights.size() == second.weights.size());
  for (std::size_t c = 0; c < first.weights.size(); ++c) {
    REQUIRE(first.weights[c].size() == second.weights[c].size());
    CHECK(std::memcmp(first.weights[c].data(), second.weights[c].data(),
                      first.weights[c].size() * sizeof(double)) == 0);
  }
}

TEST_CASE("L2 regularization shrinks the solution on separable data") {
  const FeatureMatrix features = matrix_of({{-1.0}, {-0.8}, {0.9}, {1.0}});
  const Labeling labels = labels_of(features, {"a", "a", "b", "b"});
  TrainConfig unregularized;
  unregularized.l2 = 0.0;
  TrainConfig regularized;
  regularized.l2 = 1.0;
  auto norm_of = [](const LogRegModel& model) {
    double sum = 0.0;
    for (const Vector& row : model.weights) {
      for (std::size_t d = 0; d + 1 < row.size(); ++d) sum += row[d] * row[d];
    }
    return std::sqrt(sum);
  };
  const double free_norm = norm_of(train(features, labels, unregularized));
  const double shrunk_norm = norm_of(train(features, labels, regularized));
  CHECK(shrunk_norm < free_norm);
}

TEST_CASE("predictions are invariant to a constant shift of all logits") {
  std::mt19937 rng(73);
  const FeatureMatrix features = random_matrix(rng, 6, 3);
  LogRegModel model({"a", "b", "c"}, 3, 0.0);
  std::normal_distribution<double> coord(0.0, 1.0);
  for (Vector& row : model.weights) {
    for (double& w : row) w = coord(rng);
  }
  LogRegModel shifted = model;
  for (Vector& row : shifted.weights) row.back() += 7.5;  // same constant on every bias
  CHECK(predict(model, features) == predict(shifted, features));
}

TEST_CASE("raising one class's weights raises its probability") {
  std::mt19937 rng(79);
  const FeatureMatrix features = matrix_of({{0.4, -0.2, 1.1}});
  LogRegModel model({"a", "b"}, 3, 0.0);
  std::normal_distribution<double> coord(0.0, 1.0);
  for (Vector& row : model.weights) {
    for (double& w : row) w = coord(rng);
  }
  const double before = predict_proba(model, features)[0][1];
  // Push class b's logit up on this input.
  LogRegModel boosted = model;
  for (std::size_t d = 0; d < 3; ++d) boosted.weights[1][d] += features.rows[0][d];
  const double after = predict_proba(boosted, features)[0][1];
  CHECK(after > before);
}

TEST_CASE("probability rows sum to one") {
  std::mt19937 rng(83);
  const FeatureMatrix features = random_matrix(rng, 8, 5);
  LogRegModel model({"a", "b", "c", "d"}, 5, 0.0);
  std::normal_distribution<double> coord(0.0, 2.0);
  for (Vector& row : model.weights) {
    for (double& w : row) w = coord(rng);
  }
  for (const Vector& row : predict_proba(model, features)) {
    double total = 0.0;
    for (double p : row) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("training rejects degenerate inputs") {
  const FeatureMatrix features = matrix_of({{-1.0}, {1.0}});
  SUBCASE("single class") {
    const Labeling labels = labels_of(features, {"a", "a"});
    CHECK_THROWS_WITH_AS(train(features, labels, {}), doctest::Contains("at least 2 classes"),
                         DataError);
  }
  SUBCASE("unlabeled instance") {
    Labeling labels = labels_of(features, {"a", "b"});
    labels.erase("s1");
    CHECK_THROWS_WITH_AS(train(features, labels, {}), doctest::Contains("unlabeled"), DataError);
  }
  SUBCASE("dimension mismatch at predict time") {
    const Labeling labels = labels_of(features, {"a", "b"});
    const LogRegModel model = train(features, labels, {});
    const FeatureMatrix wide = matrix_of({{1.0, 2.0}});
    CHECK_THROWS_WITH_AS(predict(model, wide), doctest::Contains("dimensionality"), DataError);
  }
}

TEST_CASE("a diverging run reports the epoch of the non-finite loss") {
  // Identical huge inputs with an oversized learning rate blow the margin up
  // until a mislabeled point underflows to probability zero.
  const FeatureMatrix features = matrix_of({{1e4}, {1e4}, {1e4}});
  const Labeling labels = labels_of(features, {"b", "b", "a"});
  TrainConfig config;
  config.learning_rate = 100.0;
  config.l2 = 0.0;
  config.tolerance = 0.0;
  CHECK_THROWS_WITH_AS(train(features, labels, config), doctest::Contains("non-finite loss at epoch"),
                       DataError);
}

TEST_CASE("models round-trip through JSON") {
  const FeatureMatrix features = matrix_of({{-1.0, 0.5}, {1.0, -0.5}, {0.2, 2.0}});
  const Labeling labels = labels_of(features, {"a", "b", "a"});
  TrainConfig config;
  config.max_epochs = 50;
  const LogRegModel model = train(features, labels, config);

  std::stringstream buffer;
  model.save_json(buffer);
  const LogRegModel loaded = LogRegModel::load_json(buffer);
  CHECK(loaded.classes == model.classes);
  CHECK(loaded.l2 == model.l2);
  REQUIRE(loaded.weights.size() == model.weights.size());
  for (std::size_t c = 0; c < model.weights.size(); ++c) {
    CHECK(loaded.weights[c] == model.weights[c]);
  }
  CHECK(predict(loaded, features) == predict(model, features));

  SUBCASE("shape violations are rejected") {
    std::istringstream bad(R"({"classes":["a","b"],"dim":2,"l2":0.0,"weights":[[1,2,3]]})");
    CHECK_THROWS_AS(LogRegModel::load_json(bad), DataError);
  }
}
