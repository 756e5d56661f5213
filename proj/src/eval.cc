/*
 * Copyright 2026 The FogLab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "foglab/eval.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "foglab/error.h"
#include "foglab/text_io.h"

namespace foglab::eval {

namespace {

void CheckBinary(std::span<const int> v, const char* what) {
  for (int x : v) {
    if (x != 0 && x != 1) {
      Fail(ErrorKind::kArgument, std::string(what) + " must be 0 or 1");
    }
  }
}

double Ratio(std::size_t num, std::size_t den, bool* zero_division) {
  if (den == 0) {
    if (zero_division) *zero_division = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

double Harmonic(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace

ConfusionMatrix Confusion(std::span<const int> pred,
                          std::span<const int> truth) {
  if (pred.size() != truth.size()) {
    Fail(ErrorKind::kArgument, "prediction and truth lengths differ");
  }
  if (pred.empty()) Fail(ErrorKind::kArgument, "confusion of zero samples");
  CheckBinary(pred, "predictions");
  CheckBinary(truth, "labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == 1) {
      (pred[i] == 1 ? cm.tp : cm.fn)++;
    } else {
      (pred[i] == 1 ? cm.fp : cm.tn)++;
    }
  }
  return cm;
}

std::vector<int> HardLabels(std::span<const double> probs) {
  std::vector<int> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] > 0.5;
  return out;
}

double Accuracy(const ConfusionMatrix& cm) {
  return Ratio(cm.tp + cm.tn, cm.Total(), nullptr);
}

double ErrorRate(const ConfusionMatrix& cm) {
  return Ratio(cm.fp + cm.fn, cm.Total(), nullptr);
}

double Precision(const ConfusionMatrix& cm, bool* zero_division) {
  return Ratio(cm.tp, cm.tp + cm.fp, zero_division);
}

double Recall(const ConfusionMatrix& cm, bool* zero_division) {
  return Ratio(cm.tp, cm.tp + cm.fn, zero_division);
}

double F1(const ConfusionMatrix& cm, bool* zero_division) {
  bool flagged = false;
  const double p = Precision(cm, &flagged);
  const double r = Recall(cm, &flagged);
  if (p + r == 0.0) flagged = true;
  if (flagged && zero_division) *zero_division = true;
  return Harmonic(p, r);
}

double RocAuc(std::span<const double> scores, std::span<const int> truth) {
  if (scores.size() != truth.size()) {
    Fail(ErrorKind::kArgument, "score and truth lengths differ");
  }
  CheckBinary(truth, "labels");
  for (double s : scores) {
    if (!std::isfinite(s)) Fail(ErrorKind::kArgument, "non-finite score");
  }
  const std::size_t n = scores.size();
  const auto n_pos =
      static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    Fail(ErrorKind::kValidation, "AUC needs both classes");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Sum of 1-based average ranks of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (truth[order[k]] == 1) rank_sum += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(n_neg));
}

MetricsReport ClassificationReport(
    std::span<const int> pred, std::span<const int> truth,
    std::optional<std::span<const double>> scores) {
  MetricsReport report;
  report.cm = Confusion(pred, truth);
  const ConfusionMatrix& cm = report.cm;
  // Class 0 as the positive class swaps the roles of the cells.
  const ConfusionMatrix flipped{cm.tn, cm.fn, cm.fp, cm.tp};
  const std::array<const ConfusionMatrix*, 2> views = {&flipped, &cm};
  for (int c = 0; c < 2; ++c) {
    bool p_zero = false, r_zero = false;
    ClassMetrics& m = report.per_class[c];
    m.precision = Precision(*views[c], &p_zero);
    m.recall = Recall(*views[c], &r_zero);
    m.f1 = Harmonic(m.precision, m.recall);
    m.support = views[c]->tp + views[c]->fn;
    const std::string label = "class " + std::to_string(c);
    if (p_zero) report.warnings.push_back(label + " precision: no predictions");
    if (r_zero) report.warnings.push_back(label + " recall: no samples");
  }
  report.accuracy = Accuracy(cm);
  const double n = static_cast<double>(cm.Total());
  for (const ClassMetrics& m : report.per_class) {
    report.macro.precision += m.precision / 2.0;
    report.macro.recall += m.recall / 2.0;
    report.macro.f1 += m.f1 / 2.0;
    const double w = static_cast<double>(m.support) / n;
    report.weighted.precision += w * m.precision;
    report.weighted.f1 += w * m.f1;
  }
  // support * recall is the per-class hit count, so this is the accuracy.
  report.weighted.recall = report.accuracy;
  report.macro.support = cm.Total();
  report.weighted.support = cm.Total();
  if (scores) report.auc = RocAuc(*scores, truth);
  return report;
}

std::string MetricsReport::ToText() const {
  std::ostringstream out;
  auto row = [&](const std::string& name, const ClassMetrics& m) {
    out << std::setw(12) << name << std::setw(11)
        << FormatFixed(m.precision, 2) << std::setw(10)
        << FormatFixed(m.recall, 2) << std::setw(10) << FormatFixed(m.f1, 2)
        << std::setw(10) << m.support << "\n";
  };
  out << std::setw(12) << "" << std::setw(11) << "precision" << std::setw(10)
      << "recall" << std::setw(10) << "f1-score" << std::setw(10)
      << "support"
      << "\n\n";
  row("0", per_class[0]);
  row("1", per_class[1]);
  out << "\n"
      << std::setw(12) << "accuracy" << std::setw(31) << FormatFixed(accuracy, 2)
      << std::setw(10) << cm.Total() << "\n";
  row("macro avg", macro);
  row("weighted avg", weighted);
  if (auc) out << std::setw(12) << "auc" << std::setw(31) << FormatFixed(*auc, 2) << "\n";
  return out.str();
}

std::string MetricsReport::ToKeyValue() const {
  std::ostringstream out;
  out << "format = foglab-metrics/1\n";
  out << "samples = " << cm.Total() << "\n";
  out << "tp = " << cm.tp << "\nfp = " << cm.fp << "\nfn = " << cm.fn
      << "\ntn = " << cm.tn << "\n";
  out << "accuracy = " << FormatDouble(accuracy) << "\n";
  auto block = [&](const std::string& prefix, const ClassMetrics& m) {
    out << prefix << ".precision = " << FormatDouble(m.precision) << "\n";
    out << prefix << ".recall = " << FormatDouble(m.recall) << "\n";
    out << prefix << ".f1 = " << FormatDouble(m.f1) << "\n";
    out << prefix << ".support = " << m.support << "\n";
  };
  block("class.0", per_class[0]);
  block("class.1", per_class[1]);
  block("macro", macro);
  block("weighted", weighted);
  if (auc) out << "auc = " << FormatDouble(*auc) << "\n";
  for (std::size_t i = 0; i < warnings.size(); ++i) {
    out << "warning." << i << " = " << warnings[i] << "\n";
  }
  return out.str();
}

std::string FormatConfusion(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "truth\\pred,0,1\n";
  out << "0," << cm.tn << "," << cm.fp << "\n";
  out << "1," << cm.fn << "," << cm.tp << "\n";
  return out.str();
}

FoldAggregate AggregateFolds(std::span<const double> values) {
  if (values.empty()) Fail(ErrorKind::kArgument, "no fold values to aggregate");
  FoldAggregate agg;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  agg.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
  agg.std = std::sqrt(ss / n);
  return agg;
}

}  // namespace foglab::eval
