#include "frameind/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "frameind/errors.hpp"

namespace frameind {

namespace {

using json = nlohmann::json;

// Logits for one row: w[c] . [x, 1].
void row_logits(const LogRegModel& model, const Vector& x, Vector& logits) {
  const std::size_t dim = model.dim();
  logits.resize(model.classes.size());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const Vector& w = model.weights[c];
    double z = w[dim];
    for (std::size_t d = 0; d < dim; ++d) z += w[d] * x[d];
    logits[c] = z;
  }
}

void softmax_inplace(Vector& logits) {
  const double shift = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - shift);
    total += z;
  }
  for (double& z : logits) z /= total;
}

void check_dim(const LogRegModel& model, const FeatureMatrix& features) {
  if (features.dim() != model.dim()) {
    throw DataError("feature dimensionality " + std::to_string(features.dim()) +
                    " does not match model dimensionality " + std::to_string(model.dim()));
  }
}

}  // namespace

LogRegModel::LogRegModel(std::vector<std::string> model_classes, std::size_t dim, double l2_strength)
    : classes(std::move(model_classes)), l2(l2_strength) {
  weights.assign(classes.size(), Vector(dim + 1, 0.0));
}

std::size_t LogRegModel::dim() const {
  return weights.empty() ? 0 : weights.front().size() - 1;
}

std::vector<std::size_t> class_indices(const FeatureMatrix& features, const Labeling& labels,
                                       std::vector<std::string>* classes_out) {
  std::set<std::string> distinct;
  for (const InstanceId& id : features.instance_ids) {
    const auto it = labels.find(id.str());
    if (it == labels.end()) throw DataError("unlabeled instance '" + id.str() + "'");
    distinct.insert(it->second);
  }
  std::vector<std::string> classes(distinct.begin(), distinct.end());
  std::map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < classes.size(); ++c) position.emplace(classes[c], c);

  std::vector<std::size_t> y;
  y.reserve(features.instance_ids.size());
  for (const InstanceId& id : features.instance_ids) {
    y.push_back(position.at(labels.at(id.str())));
  }
  if (classes_out != nullptr) *classes_out = std::move(classes);
  return y;
}

double logreg_loss(const LogRegModel& model, const FeatureMatrix& features,
                   const std::vector<std::size_t>& class_of_row, std::vector<Vector>* grad) {
  check_dim(model, features);
  const std::size_t n = features.rows.size();
  const std::size_t dim = model.dim();
  const std::size_t num_classes = model.classes.size();
  if (class_of_row.size() != n) throw DataError("logreg_loss: label/row count mismatch");

  if (grad != nullptr) grad->assign(num_classes, Vector(dim + 1, 0.0));

  double loss = 0.0;
  Vector probabilities;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector& x = features.rows[i];
    row_logits(model, x, probabilities);
    softmax_inplace(probabilities);
    loss -= std::log(probabilities[class_of_row[i]]);
    if (grad != nullptr) {
      for (std::size_t c = 0; c < num_classes; ++c) {
        const double coefficient = probabilities[c] - (c == class_of_row[i] ? 1.0 : 0.0);
        Vector& g = (*grad)[c];
        for (std::size_t d = 0; d < dim; ++d) g[d] += coefficient * x[d];
        g[dim] += coefficient;
      }
    }
  }
  loss /= static_cast<double>(n);
  if (grad != nullptr) {
    for (Vector& g : *grad) {
      for (double& v : g) v /= static_cast<double>(n);
    }
  }

  // L2 penalty, bias excluded.
  if (model.l2 > 0.0) {
    double squared = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      for (std::size_t d = 0; d < dim; ++d) {
        squared += model.weights[c][d] * model.weights[c][d];
        if (grad != nullptr) (*grad)[c][d] += model.l2 * model.weights[c][d];
      }
    }
    loss += 0.5 * model.l2 * squared;
  }
  return loss;
}

LogRegModel train(const FeatureMatrix& features, const Labeling& labels,
                  const TrainConfig& config, std::vector<double>* loss_history) {
  std::vector<std::string> classes;
  const std::vector<std::size_t> y = class_indices(features, labels, &classes);
  if (classes.size() < 2) {
    throw DataError("training needs at least 2 classes, found " + std::to_string(classes.size()));
  }

  LogRegModel model(std::move(classes), features.dim(), config.l2);
  if (loss_history != nullptr) loss_history->clear();

  std::vector<Vector> grad;
  double previous_loss = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const double loss = logreg_loss(model, features, y, &grad);
    if (!std::isfinite(loss)) {
      throw DataError("non-finite loss at epoch " + std::to_string(epoch));
    }
    if (loss_history != nullptr) loss_history->push_back(loss);
    for (std::size_t c = 0; c < model.weights.size(); ++c) {
      for (std::size_t d = 0; d < model.weights[c].size(); ++d) {
        model.weights[c][d] -= config.learning_rate * grad[c][d];
      }
    }
    if (previous_loss - loss < config.tolerance) break;
    previous_loss = loss;
  }
  return model;
}

Labeling predict(const LogRegModel& model, const FeatureMatrix& features) {
  check_dim(model, features);
  Labeling labeling;
  Vector logits;
  for (std::size_t i = 0; i < features.rows.size(); ++i) {
    row_logits(model, features.rows[i], logits);
    std::size_t arg = 0;
    for (std::size_t c = 1; c < logits.size(); ++c) {
      if (logits[c] > logits[arg]) arg = c;  // ties keep the earliest class
    }
    labeling[features.instance_ids[i].str()] = model.classes[arg];
  }
  return labeling;
}

std::vector<Vector> predict_proba(const LogRegModel& model, const FeatureMatrix& features) {
  check_dim(model, features);
  std::vector<Vector> probabilities;
  probabilities.reserve(features.rows.size());
  for (const Vector& x : features.rows) {
    Vector row;
    row_logits(model, x, row);
    softmax_inplace(row);
    probabilities.push_back(std::move(row));
  }
  return probabilities;
}

LogRegModel LogRegModel::load_json(std::istream& in) {
  json object;
  try {
    in >> object;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid model file: ") + e.what());
  }
  LogRegModel model;
  try {
    model.classes = object.at("classes").get<std::vector<std::string>>();
    model.l2 = object.at("l2").get<double>();
    const auto dim = object.at("dim").get<std::size_t>();
    model.weights = object.at("weights").get<std::vector<Vector>>();
    if (model.classes.size() < 2 || model.weights.size() != model.classes.size()) {
      throw DataError("model file: class/weight shape mismatch");
    }
    for (const Vector& row : model.weights) {
      if (row.size() != dim + 1) throw DataError("model file: weight row length mismatch");
      for (double v : row) {
        if (!std::isfinite(v)) throw DataError("model file: non-finite weight");
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid model file: ") + e.what());
  }
  return model;
}

void LogRegModel::save_json(std::ostream& out) const {
  nlohmann::ordered_json object;
  object["classes"] = classes;
  object["dim"] = dim();
  object["l2"] = l2;
  object["weights"] = weights;
  out << object.dump() << '\n';
}

}  // namespace frameind
