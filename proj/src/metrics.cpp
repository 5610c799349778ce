#include "mixsaem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixsaem/common.hpp"

namespace mixsaem {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DataError(std::string(what) + ": scores and labels differ in length");
  if (a == 0) throw DataError(std::string(what) + ": empty input");
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size(), "auc");
  const auto n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks over tied groups.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end + 1 < n && scores[order[end + 1]] == scores[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + end) + 1.0;
    for (std::size_t k = start; k <= end; ++k)
      if (labels[order[k]] == 1) {
        positive_rank_sum += rank;
        ++positives;
      }
    start = end + 1;
  }
  const auto negatives = n - positives;
  if (positives == 0 || negatives == 0) throw DataError("auc: both classes must be present");
  const double np = static_cast<double>(positives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

double brier(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size(), "brier");
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double d = scores[i] - labels[i];
    acc += d * d;
  }
  return acc / static_cast<double>(scores.size());
}

ConfusionCounts confusion_counts(std::span<const int> preds, std::span<const int> labels) {
  check_lengths(preds.size(), labels.size(), "confusion");
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == 1 && labels[i] == 1) ++c.tp;
    else if (preds[i] == 1) ++c.fp;
    else if (labels[i] == 1) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ConfusionMetrics confusion_metrics(std::span<const int> preds, std::span<const int> labels) {
  ConfusionMetrics m;
  m.counts = confusion_counts(preds, labels);
  const auto& c = m.counts;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(preds.size());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.sensitivity = ratio(c.tp, c.tp + c.fn);
  m.specificity = ratio(c.tn, c.tn + c.fp);
  if (m.precision && m.sensitivity && (*m.precision + *m.sensitivity) > 0.0)
    m.f1 = 2.0 * *m.precision * *m.sensitivity / (*m.precision + *m.sensitivity);
  return m;
}

ClassificationMetrics classification_metrics(std::span<const double> probabilities,
                                             std::span<const int> labels, double threshold) {
  std::vector<int> preds(probabilities.size());
  for (std::size_t i = 0; i < preds.size(); ++i) preds[i] = probabilities[i] >= threshold ? 1 : 0;
  const auto cm = confusion_metrics(preds, labels);
  ClassificationMetrics out;
  out.auc = auc(probabilities, labels);
  out.accuracy = cm.accuracy;
  out.precision = cm.precision;
  out.sensitivity = cm.sensitivity;
  out.specificity = cm.specificity;
  out.f1 = cm.f1;
  out.brier = brier(probabilities, labels);
  return out;
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size(), "roc_curve");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const auto negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0 || negatives == 0) throw DataError("roc_curve: both classes must be present");
  std::vector<RocPoint> out{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  double tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]] == 1) tp += 1; else fp += 1;
    if (k + 1 == order.size() || scores[order[k + 1]] != scores[order[k]])
      out.push_back({scores[order[k]], fp / negatives, tp / positives});
  }
  return out;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (const double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

EstimationMetrics estimation_metrics(const std::vector<std::vector<double>>& estimates,
                                     std::span<const double> truth) {
  EstimationMetrics m;
  const auto p = truth.size();
  m.bias.assign(p, 0.0);
  m.rmse.assign(p, 0.0);
  if (estimates.empty()) return m;
  for (const auto& est : estimates) {
    if (est.size() != p) throw DataError("estimation_metrics: estimate has wrong length");
    double norm = 0.0, err = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double d = est[j] - truth[j];
      m.bias[j] += d;
      m.rmse[j] += d * d;
      norm += est[j] * est[j];
      err += d * d;
    }
    m.norms.push_back(std::sqrt(norm));
    m.error_norms.push_back(std::sqrt(err));
  }
  const auto r = static_cast<double>(estimates.size());
  for (std::size_t j = 0; j < p; ++j) {
    m.bias[j] /= r;
    m.rmse[j] = std::sqrt(m.rmse[j] / r);
  }
  return m;
}

}  // namespace mixsaem
