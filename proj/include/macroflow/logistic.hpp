#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace macroflow {

using FeatureMatrix = std::vector<std::vector<double>>;

struct LogisticOptions {
  double l2 = 1.0;  // penalty on the weights, not the intercept
  std::size_t max_iterations = 1000;
  double tolerance = 1e-8;  // stop when the loss improves by less than this
};

// Zero-mean, unit-variance scaling fitted on one sample and applied to others.
// Constant columns are centered but not scaled.
class Standardizer {
 public:
  static Standardizer fit(const FeatureMatrix& rows);
  std::vector<double> transform(std::span<const double> row) const;
  FeatureMatrix transform(const FeatureMatrix& rows) const;

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& scales() const { return scales_; }

 private:
  std::vector<double> means_;
  std::vector<double> scales_;
};

// Binary logistic regression fitted by full-batch gradient descent with a
// backtracking line search on the L2-penalized mean log-loss.
class LogisticModel {
 public:
  static LogisticModel fit(const FeatureMatrix& rows, std::span<const int> labels, const LogisticOptions& options = {});

  double probability(std::span<const double> row) const;
  int predict(std::span<const double> row) const { return probability(row) >= 0.5 ? 1 : 0; }
  double accuracy(const FeatureMatrix& rows, std::span<const int> labels) const;

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  std::size_t iterations() const { return iterations_; }

 private:
  std::vector<double> weights_;
  double intercept_ = 0.0;
  std::size_t iterations_ = 0;
};

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-class shuffle, then round(train_fraction * class size) rows of each
// class go to training. Deterministic in `seed`.
TrainTestSplit stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed);

struct Evaluation {
  double accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

// Stratified 80-20 split, NaN cells filled with training column means,
// standardization on the training rows only, fit, and test accuracy. Throws EmptyInputError when either split lacks a class.
Evaluation train_and_evaluate(const FeatureMatrix& rows, std::span<const int> labels, std::uint64_t seed,
                              const LogisticOptions& options = {});

}  // namespace macroflow
