#include "macroflow/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "macroflow/error.hpp"
#include "macroflow/random.hpp"

namespace macroflow {

Standardizer Standardizer::fit(const FeatureMatrix& rows) {
  Standardizer s;
  if (rows.empty()) return s;
  const std::size_t dims = rows.front().size();
  s.means_.assign(dims, 0.0);
  s.scales_.assign(dims, 1.0);
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows)
    for (std::size_t j = 0; j < dims; ++j) s.means_[j] += r[j] / n;
  for (std::size_t j = 0; j < dims; ++j) {
    double var = 0.0;
    for (const auto& r : rows) var += (r[j] - s.means_[j]) * (r[j] - s.means_[j]);
    double sd = std::sqrt(var / n);
    s.scales_[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::transform(std::span<const double> row) const {
  std::vector<double> out(row.begin(), row.end());
  for (std::size_t j = 0; j < out.size() && j < means_.size(); ++j) out[j] = (out[j] - means_[j]) / scales_[j];
  return out;
}

FeatureMatrix Standardizer::transform(const FeatureMatrix& rows) const {
  FeatureMatrix out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(transform(r));
  return out;
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

struct Objective {
  const FeatureMatrix& rows;
  std::span<const int> labels;
  double l2;

  double loss(const std::vector<double>& w, double b) const {
    const double n = static_cast<double>(rows.size());
    double total = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double z = b;
      for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * rows[i][j];
      total += softplus(z) - labels[i] * z;
    }
    double penalty = 0.0;
    for (double x : w) penalty += x * x;
    return total / n + 0.5 * l2 * penalty / n;
  }

  void gradient(const std::vector<double>& w, double b, std::vector<double>& gw, double& gb) const {
    const double n = static_cast<double>(rows.size());
    gw.assign(w.size(), 0.0);
    gb = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double z = b;
      for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * rows[i][j];
      const double r = sigmoid(z) - labels[i];
      for (std::size_t j = 0; j < w.size(); ++j) gw[j] += r * rows[i][j];
      gb += r;
    }
    for (std::size_t j = 0; j < w.size(); ++j) gw[j] = gw[j] / n + l2 * w[j] / n;
    gb /= n;
  }
};

}  // namespace

LogisticModel LogisticModel::fit(const FeatureMatrix& rows, std::span<const int> labels,
                                 const LogisticOptions& options) {
  if (rows.empty() || rows.size() != labels.size())
    throw std::invalid_argument("logistic regression needs one label per non-empty row");
  const std::size_t dims = rows.front().size();
  Objective objective{rows, labels, options.l2};

  LogisticModel model;
  model.weights_.assign(dims, 0.0);
  double loss = objective.loss(model.weights_, model.intercept_);
  double step = 1.0;
  std::vector<double> gw, trial(dims);
  double gb = 0.0;

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    model.iterations_ = it + 1;
    objective.gradient(model.weights_, model.intercept_, gw, gb);
    double gnorm2 = gb * gb;
    for (double g : gw) gnorm2 += g * g;
    if (gnorm2 == 0.0) break;

    // Armijo backtracking.
    double next_loss = loss;
    double next_b = model.intercept_;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t j = 0; j < dims; ++j) trial[j] = model.weights_[j] - step * gw[j];
      next_b = model.intercept_ - step * gb;
      next_loss = objective.loss(trial, next_b);
      if (next_loss <= loss - 0.5 * step * gnorm2) break;
      step *= 0.5;
    }
    if (next_loss >= loss) break;
    const double improvement = loss - next_loss;
    model.weights_ = trial;
    model.intercept_ = next_b;
    loss = next_loss;
    step *= 2.0;
    if (improvement < options.tolerance) break;
  }
  return model;
}

double LogisticModel::probability(std::span<const double> row) const {
  double z = intercept_;
  for (std::size_t j = 0; j < weights_.size(); ++j) z += weights_[j] * row[j];
  return sigmoid(z);
}

double LogisticModel::accuracy(const FeatureMatrix& rows, std::span<const int> labels) const {
  if (rows.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (predict(rows[i]) == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

TrainTestSplit stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed) {
  Rng rng(seed);
  TrainTestSplit split;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    rng.shuffle(members);
    auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(members.size())));
    split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

namespace {

// NaN cells take the mean of the column's observed training values (0 when
// the column has none).
void impute_missing(FeatureMatrix& train, FeatureMatrix& test) {
  if (train.empty()) return;
  const std::size_t cols = train.front().size();
  for (std::size_t j = 0; j < cols; ++j) {
    double sum = 0.0;
    std::size_t seen = 0;
    for (const auto& row : train)
      if (!std::isnan(row[j])) {
        sum += row[j];
        ++seen;
      }
    const double fill = seen ? sum / static_cast<double>(seen) : 0.0;
    for (FeatureMatrix* m : {&train, &test})
      for (auto& row : *m)
        if (std::isnan(row[j])) row[j] = fill;
  }
}

}  // namespace

Evaluation train_and_evaluate(const FeatureMatrix& rows, std::span<const int> labels, std::uint64_t seed,
                              const LogisticOptions& options) {
  TrainTestSplit split = stratified_split(labels, 0.8, seed);
  auto gather = [&](const std::vector<std::size_t>& idx, FeatureMatrix& x, std::vector<int>& y) {
    for (std::size_t i : idx) {
      x.push_back(rows[i]);
      y.push_back(labels[i]);
    }
  };
  FeatureMatrix train_x, test_x;
  std::vector<int> train_y, test_y;
  gather(split.train, train_x, train_y);
  gather(split.test, test_x, test_y);
  auto both_classes = [](const std::vector<int>& y) {
    return std::find(y.begin(), y.end(), 0) != y.end() && std::find(y.begin(), y.end(), 1) != y.end();
  };
  if (!both_classes(train_y) || !both_classes(test_y))
    throw EmptyInputError("train/test split contains a single class");

  impute_missing(train_x, test_x);
  Standardizer scaler = Standardizer::fit(train_x);
  LogisticModel model = LogisticModel::fit(scaler.transform(train_x), train_y, options);
  return {model.accuracy(scaler.transform(test_x), test_y), train_x.size(), test_x.size()};
}

}  // namespace macroflow
