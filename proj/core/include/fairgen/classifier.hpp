#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairgen/groups.hpp"

namespace fairgen {

/// Which vector space a linear model reads.
enum class Space { feature, latent };

std::string_view to_string(Space space);
/// Throws ConfigError on anything but "feature" / "latent".
Space space_from_string(std::string_view text);

struct TrainingMeta {
  std::size_t epochs_run = 0;
  /// 1-based epoch whose parameters were kept (lowest validation loss).
  std::size_t best_epoch = 0;
  bool stopped_early = false;
  double initial_loss = 0.0;
  double final_train_loss = 0.0;
  double final_validation_loss = 0.0;
  std::vector<double> validation_losses;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

/// Logistic-regression parameters over feature or latent space.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  Space space = Space::feature;
  std::size_t positive_class = 0;
  TrainingMeta meta;

  /// <weights, x> + bias.
  double logit(std::span<const double> x) const;
  double probability(std::span<const double> x) const;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t max_epochs = 50;
  std::size_t batch_size = 1;
  /// Epochs without validation-loss improvement before stopping.
  std::size_t early_stop_patience = 3;
  double validation_fraction = 0.1;
  double l2_penalty = 1e-4;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Row-wise training data. For binary training labels are 0/1; for
/// one-vs-rest they are group indices.
struct LabeledData {
  std::vector<std::vector<double>> inputs;
  std::vector<std::size_t> labels;

  void add(std::span<const double> x, std::size_t label) {
    inputs.emplace_back(x.begin(), x.end());
    labels.push_back(label);
  }
  std::size_t size() const noexcept { return inputs.size(); }
  bool empty() const noexcept { return inputs.empty(); }
};

/// 1 / (1 + e^-t), evaluated without overflow for any finite t.
double sigmoid(double t);

struct Gradient {
  std::vector<double> weights;
  double bias = 0.0;
};

/// Mean binary cross-entropy plus (l2/2)*||w||^2 (bias unpenalised).
double logistic_loss(std::span<const double> weights, double bias, const LabeledData& data, double l2_penalty);
/// Analytic gradient of logistic_loss.
Gradient logistic_gradient(std::span<const double> weights, double bias, const LabeledData& data,
                           double l2_penalty);

/// Mini-batch gradient descent with early stopping on a held-out tail of a
/// seeded shuffle. Inputs are z-scored on the training split for
/// conditioning; the returned model is expressed in the original coordinates.
///
/// Throws DegenerateTrainingError when only one class is present and
/// DimensionMismatchError on ragged input.
LinearModel train_binary(const LabeledData& data, Space space, const TrainConfig& config,
                         std::size_t positive_class = 1);

/// One model per group: positives are group k, negatives everything else.
/// Model k is trained with seed `config.seed + k`. Throws MissingGroupError
/// naming the first group without samples.
std::vector<LinearModel> train_ovr(const LabeledData& data, const GroupSet& groups, Space space,
                                   const TrainConfig& config);

struct GroupPrediction {
  std::size_t group = 0;
  /// Winning model's sigmoid score.
  double confidence = 0.0;
};

/// argmax over the models' scores, lowest index on ties.
GroupPrediction predict_group(std::span<const LinearModel> models, std::span<const double> x);

/// Fraction of rows whose predict_group matches the label.
double accuracy(std::span<const LinearModel> models, const LabeledData& data);

/// Area under the ROC curve of one binary model on 0/1 labels (ties count half).
double roc_auc(const LinearModel& model, const LabeledData& data);

}  // namespace fairgen
