#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixsaem {

/// Mann-Whitney AUC, ties counted 1/2. Throws DataError if only one class
/// is present.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Mean squared difference between probability and label.
double brier(std::span<const double> scores, std::span<const int> labels);

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Class 1 is the positive class. Ratios with a zero denominator are
/// reported as std::nullopt.
struct ConfusionMetrics {
  ConfusionCounts counts;
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> f1;
};

ConfusionCounts confusion_counts(std::span<const int> preds, std::span<const int> labels);
ConfusionMetrics confusion_metrics(std::span<const int> preds, std::span<const int> labels);

struct ClassificationMetrics {
  double auc = 0.0;
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> f1;
  double brier = 0.0;
};

ClassificationMetrics classification_metrics(std::span<const double> probabilities,
                                             std::span<const int> labels,
                                             double threshold = 0.5);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

/// Points at every distinct score, from the strictest threshold down.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1); 0 for n < 2
  std::size_t count = 0;
};

/// Two-pass mean and sample standard deviation.
Summary summarize(std::span<const double> values);

/// Per-coefficient bias and RMSE of a set of estimates against the truth.
struct EstimationMetrics {
  std::vector<double> bias;
  std::vector<double> rmse;
  std::vector<double> norms;        // |beta_hat| per run
  std::vector<double> error_norms;  // |beta_hat - beta| per run
};

EstimationMetrics estimation_metrics(const std::vector<std::vector<double>>& estimates,
                                     std::span<const double> truth);

}  // namespace mixsaem
