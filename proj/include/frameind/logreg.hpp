#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "frameind/features.hpp"
#include "frameind/io.hpp"

namespace frameind {

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t max_epochs = 500;
  double l2 = 1.0;
  double tolerance = 1e-7;
  long seed = 0;  // reserved; training is deterministic and ignores it
};

// Multinomial logistic regression. weights is C x (D+1) with the bias in the
// last column; the bias is excluded from L2 regularization.
struct LogRegModel {
  std::vector<std::string> classes;
  std::vector<Vector> weights;
  double l2 = 0.0;

  LogRegModel() = default;
  LogRegModel(std::vector<std::string> classes, std::size_t dim, double l2);

  std::size_t dim() const;

  static LogRegModel load_json(std::istream& in);
  void save_json(std::ostream& out) const;
};

// Mean softmax cross-entropy plus (l2/2) * ||weights without bias||^2.
// grad, when non-null, receives the analytic gradient in the model's shape.
double logreg_loss(const LogRegModel& model, const FeatureMatrix& features,
                   const std::vector<std::size_t>& class_of_row,
                   std::vector<Vector>* grad = nullptr);

// Full-batch gradient descent from zero weights; stops at max_epochs or when
// the loss improves by less than tolerance. loss_history, when non-null,
// receives the loss at the start of each epoch.
LogRegModel train(const FeatureMatrix& features, const Labeling& labels,
                  const TrainConfig& config, std::vector<double>* loss_history = nullptr);

// Argmax class per instance; ties resolve to the earliest class.
Labeling predict(const LogRegModel& model, const FeatureMatrix& features);

// Softmax rows, each summing to 1.
std::vector<Vector> predict_proba(const LogRegModel& model, const FeatureMatrix& features);

// Maps each row's label to its index in the sorted class list. Exposed for
// loss evaluation against an existing model.
std::vector<std::size_t> class_indices(const FeatureMatrix& features, const Labeling& labels,
                                       std::vector<std::string>* classes_out = nullptr);

}  // namespace frameind
