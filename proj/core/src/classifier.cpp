#include "fairgen/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "fairgen/errors.hpp"
#include "fairgen/latent.hpp"

namespace fairgen {

std::string_view to_string(Space space) {
  return space == Space::feature ? "feature" : "latent";
}

Space space_from_string(std::string_view text) {
  if (text == "feature") return Space::feature;
  if (text == "latent") return Space::latent;
  throw ConfigError("unknown space tag: " + std::string(text));
}

double LinearModel::logit(std::span<const double> x) const {
  if (x.size() != weights.size()) throw DimensionMismatchError(weights.size(), x.size(), "linear model");
  return dot(weights, x) + bias;
}

double LinearModel::probability(std::span<const double> x) const {
  return sigmoid(logit(x));
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be > 0");
  if (max_epochs == 0) throw ConfigError("max_epochs must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 0.5))
    throw ConfigError("validation_fraction must lie in (0, 0.5)");
  if (!(l2_penalty >= 0.0) || !std::isfinite(l2_penalty)) throw ConfigError("l2_penalty must be >= 0");
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace {

// log(1 + e^t) without overflow.
double softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

std::size_t check_rectangular(const LabeledData& data) {
  if (data.empty()) throw DegenerateTrainingError("training data is empty");
  if (data.labels.size() != data.inputs.size())
    throw DimensionMismatchError(data.inputs.size(), data.labels.size(), "labels");
  const std::size_t dim = data.inputs.front().size();
  if (dim == 0) throw InvalidDimensionError("training inputs must have dimension >= 1");
  for (const auto& row : data.inputs)
    if (row.size() != dim) throw DimensionMismatchError(dim, row.size(), "training input");
  return dim;
}

double example_loss(std::span<const double> w, double b, std::span<const double> x, std::size_t y) {
  const double t = dot(w, x) + b;
  return softplus(t) - (y ? t : 0.0);
}

// Deterministic Fisher-Yates (std::shuffle's distribution is implementation-defined).
void shuffle(std::vector<std::size_t>& v, RngHandle& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

struct Params {
  std::vector<double> w;
  double b = 0.0;
};

// Trains on a view of the caller's rows; standardisation is applied on the
// fly so one-vs-rest runs can share the inputs without copying them.
class BinaryTrainer {
 public:
  BinaryTrainer(const std::vector<std::vector<double>>& inputs, const std::vector<std::size_t>& labels,
                const TrainConfig& cfg)
      : inputs_(inputs), labels_(labels), cfg_(cfg), dim_(inputs.front().size()) {
    RngHandle rng(cfg.seed);
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);

    const std::size_t n = order.size();
    std::size_t n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(n)));
    n_val = n >= 2 ? std::clamp<std::size_t>(n_val, 1, n - 1) : 0;
    train_.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
    validation_.assign(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());

    mean_.assign(dim_, 0.0);
    scale_.assign(dim_, 1.0);
    const auto n_train = static_cast<double>(train_.size());
    for (auto i : train_)
      for (std::size_t c = 0; c < dim_; ++c) mean_[c] += inputs_[i][c] / n_train;
    std::vector<double> var(dim_, 0.0);
    for (auto i : train_)
      for (std::size_t c = 0; c < dim_; ++c) {
        const double dlt = inputs_[i][c] - mean_[c];
        var[c] += dlt * dlt / n_train;
      }
    for (std::size_t c = 0; c < dim_; ++c)
      if (var[c] > 1e-24) scale_[c] = std::sqrt(var[c]);
    scratch_.resize(dim_);
  }

  LinearModel run(Space space, std::size_t positive_class) {
    RngHandle rng(cfg_.seed ^ 0x5bd1e995ULL);
    Params p{std::vector<double>(dim_, 0.0), 0.0};
    LinearModel model;
    model.space = space;
    model.positive_class = positive_class;
    auto& meta = model.meta;
    meta.seed = cfg_.seed;
    meta.initial_loss = loss(p, train_);

    Params best = p;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    std::vector<std::size_t> order = train_;
    std::vector<double> grad(dim_);

    for (std::size_t epoch = 1; epoch <= cfg_.max_epochs; ++epoch) {
      shuffle(order, rng);
      for (std::size_t start = 0; start < order.size(); start += cfg_.batch_size) {
        const std::size_t stop = std::min(order.size(), start + cfg_.batch_size);
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = start; i < stop; ++i) {
          const auto& x = standardized(order[i]);
          const double err = sigmoid(dot(p.w, x) + p.b) - static_cast<double>(labels_[order[i]]);
          for (std::size_t c = 0; c < dim_; ++c) grad[c] += err * x[c];
          grad_b += err;
        }
        const double inv = 1.0 / static_cast<double>(stop - start);
        for (std::size_t c = 0; c < dim_; ++c)
          p.w[c] -= cfg_.learning_rate * (grad[c] * inv + cfg_.l2_penalty * p.w[c]);
        p.b -= cfg_.learning_rate * grad_b * inv;
      }
      meta.epochs_run = epoch;

      const double val = loss(p, validation_.empty() ? train_ : validation_);
      meta.validation_losses.push_back(val);
      if (val < best_val) {
        best_val = val;
        best = p;
        meta.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= cfg_.early_stop_patience) {
        meta.stopped_early = epoch < cfg_.max_epochs;
        break;
      }
    }

    meta.final_train_loss = loss(best, train_);
    meta.final_validation_loss = best_val;

    // Undo the z-scoring: w_raw = w / scale, b_raw = b - sum(w_raw * mean).
    model.weights.resize(dim_);
    model.bias = best.b;
    for (std::size_t c = 0; c < dim_; ++c) {
      model.weights[c] = best.w[c] / scale_[c];
      model.bias -= model.weights[c] * mean_[c];
    }
    return model;
  }

 private:
  const std::vector<double>& standardized(std::size_t row) {
    const auto& x = inputs_[row];
    for (std::size_t c = 0; c < dim_; ++c) scratch_[c] = (x[c] - mean_[c]) / scale_[c];
    return scratch_;
  }

  // Penalised mean cross-entropy in standardised coordinates.
  double loss(const Params& p, const std::vector<std::size_t>& rows) {
    double total = 0.0;
    for (auto i : rows) total += example_loss(p.w, p.b, standardized(i), labels_[i]);
    return total / static_cast<double>(rows.size()) + 0.5 * cfg_.l2_penalty * dot(p.w, p.w);
  }

  const std::vector<std::vector<double>>& inputs_;
  const std::vector<std::size_t>& labels_;
  TrainConfig cfg_;
  std::size_t dim_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<std::size_t> train_;
  std::vector<std::size_t> validation_;
  std::vector<double> scratch_;
};

}  // namespace

double logistic_loss(std::span<const double> weights, double bias, const LabeledData& data, double l2_penalty) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) total += example_loss(weights, bias, data.inputs[i], data.labels[i]);
  return total / static_cast<double>(data.size()) + 0.5 * l2_penalty * dot(weights, weights);
}

Gradient logistic_gradient(std::span<const double> weights, double bias, const LabeledData& data,
                           double l2_penalty) {
  Gradient g{std::vector<double>(weights.size(), 0.0), 0.0};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.inputs[i];
    const double err = sigmoid(dot(weights, x) + bias) - static_cast<double>(data.labels[i]);
    for (std::size_t c = 0; c < weights.size(); ++c) g.weights[c] += err * x[c];
    g.bias += err;
  }
  const double inv = data.empty() ? 0.0 : 1.0 / static_cast<double>(data.size());
  for (std::size_t c = 0; c < weights.size(); ++c) g.weights[c] = g.weights[c] * inv + l2_penalty * weights[c];
  g.bias *= inv;
  return g;
}

LinearModel train_binary(const LabeledData& data, Space space, const TrainConfig& config,
                         std::size_t positive_class) {
  config.validate();
  check_rectangular(data);
  bool has_pos = false, has_neg = false;
  for (auto y : data.labels) {
    if (y > 1) throw DegenerateTrainingError("binary labels must be 0 or 1");
    (y ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw DegenerateTrainingError("training data contains a single class");
  return BinaryTrainer(data.inputs, data.labels, config).run(space, positive_class);
}

std::vector<LinearModel> train_ovr(const LabeledData& data, const GroupSet& groups, Space space,
                                   const TrainConfig& config) {
  config.validate();
  check_rectangular(data);
  std::vector<std::size_t> counts(groups.size(), 0);
  for (auto y : data.labels) {
    if (y >= groups.size()) throw NotFoundError("label " + std::to_string(y) + " outside the group set");
    ++counts[y];
  }
  for (std::size_t k = 0; k < groups.size(); ++k)
    if (counts[k] == 0) throw MissingGroupError(k, groups.name(k));

  std::vector<std::future<LinearModel>> jobs;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    jobs.push_back(std::async(std::launch::async, [&data, &config, space, k] {
      std::vector<std::size_t> binary;
      binary.reserve(data.size());
      for (auto y : data.labels) binary.push_back(y == k ? 1 : 0);
      TrainConfig cfg = config;
      cfg.seed = config.seed + k;
      return BinaryTrainer(data.inputs, binary, cfg).run(space, k);
    }));
  }
  std::vector<LinearModel> models;
  for (auto& job : jobs) models.push_back(job.get());
  return models;
}

GroupPrediction predict_group(std::span<const LinearModel> models, std::span<const double> x) {
  if (models.empty()) throw InvalidDimensionError("predict_group needs at least one model");
  const auto& first = models.front();
  GroupPrediction best{first.positive_class, 0.0};
  double best_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& m = models[k];
    if (m.space != first.space) throw WrongSpaceError("models mix feature and latent spaces");
    if (m.weights.size() != first.weights.size())
      throw DimensionMismatchError(first.weights.size(), m.weights.size(), "model " + std::to_string(k));
    const double t = m.logit(x);
    if (t > best_logit) {
      best_logit = t;
      best.group = m.positive_class;
    }
  }
  best.confidence = sigmoid(best_logit);
  return best;
}

double accuracy(std::span<const LinearModel> models, const LabeledData& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (predict_group(models, data.inputs[i]).group == data.labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double roc_auc(const LinearModel& model, const LabeledData& data) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) scored.emplace_back(model.logit(data.inputs[i]), data.labels[i]);
  std::sort(scored.begin(), scored.end());
  // Mann-Whitney U with average ranks for ties.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scored.size();) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t)
      if (scored[t].second) {
        rank_sum += avg_rank;
        ++positives;
      }
    i = j;
  }
  const std::size_t negatives = scored.size() - positives;
  if (positives == 0 || negatives == 0) throw DegenerateTrainingError("AUC needs both classes");
  const double p = static_cast<double>(positives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

}  // namespace fairgen
