/**
 * Copyright 2026 The Vigil Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vigil/dataset.hpp"
#include "vigil/model.hpp"
#include "vigil/train.hpp"

namespace vigil {

/// Positive class is abandoned.
struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts &operator+=(const ConfusionCounts &o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts &b) { return a += b; }
  friend bool operator==(const ConfusionCounts &, const ConfusionCounts &) = default;
};

/// Throws ShapeError on length mismatch, InvalidArgumentError when empty.
ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths);

/// num/den kept as integers so identities can be checked without rounding.
/// A zero denominator means "not applicable".
struct Rate {
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  std::optional<double> value() const {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

struct Metrics {
  Rate accuracy;  // (tp+tn)/total
  Rate fpr;       // fp/(fp+tn)
  Rate fnr;       // fn/(fn+tp)
};

/// Throws InvalidArgumentError when counts are all zero.
Metrics metrics_from_confusion(const ConfusionCounts &counts);

struct MetricsReport {
  std::string dataset_name;
  Split split = Split::test;
  ConfusionCounts counts;
  double accuracy = 0;
  std::optional<double> fpr;
  std::optional<double> fnr;
  double mean_loss = 0;
};

struct FramePrediction {
  std::size_t record = 0;  // index into Manifest::records
  Label truth = Label::background;
  Prediction prediction;
  double loss = 0;
};

/// Predicts every frame of a split, train included, in chunks of `batch_size`.
/// Throws EmptySplitError for an empty split.
std::vector<FramePrediction> predict_split(const BackboneParams &backbone, const HeadParams &head,
                                           const Manifest &manifest, Split split,
                                           const ImageSource &source, std::size_t batch_size = 100);

MetricsReport report_from_predictions(const std::string &dataset_name, Split split,
                                      const std::vector<FramePrediction> &preds);

MetricsReport evaluate(const BackboneParams &backbone, const HeadParams &head,
                       const Manifest &manifest, Split split, const std::string &dataset_name,
                       const ImageSource &source);

/// Line-oriented key=value form for scripting.
std::string metrics_summary(const MetricsReport &r);
std::string report_csv(const MetricsReport &r);
MetricsReport parse_report_csv(const std::string &text);

// --- comparison tables -----------------------------------------------------

/// Train/val columns come from the final curve point of a run.
struct CurveSummary {
  double train_loss = 0, val_loss = 0, train_accuracy = 0, val_accuracy = 0;
};
CurveSummary summarize_curves(const std::vector<CurvePoint> &curves);

struct TableRow {
  std::string dataset;
  double train_loss = 0, val_loss = 0, train_accuracy = 0, val_accuracy = 0, test_accuracy = 0;
  friend bool operator==(const TableRow &, const TableRow &) = default;
};

TableRow make_table_row(const MetricsReport &test_report, const CurveSummary &curves);

inline constexpr const char *kTableColumns[] = {"Dataset",        "Train Loss",
                                                "Validation Loss", "Train Accuracy",
                                                "Validation Accuracy", "Test Accuracy"};

std::string comparison_table_text(const std::vector<TableRow> &rows, int digits = 2);
std::string comparison_table_csv(const std::vector<TableRow> &rows);
std::vector<TableRow> parse_comparison_csv(const std::string &text);

/// Published single-site and combined results (i-LIDS, CAVIAR, Combined),
/// shown next to local runs for orientation. Not reproduced here.
std::vector<TableRow> published_reference_rows();
inline constexpr double kReferenceLotsAccuracy = 0.912;
inline constexpr double kReferenceUntunedAccuracy = 0.96;
inline constexpr double kReferenceFpr = 0.0065;
inline constexpr double kReferenceFnr = 0.017;

// --- cross-scene ----------------------------------------------------------

struct CrossSceneReport {
  MetricsReport home;
  MetricsReport foreign;
  double accuracy_delta = 0;  // home - foreign
};

/// Scenes are identified by video_id prefix (scene_of_video). Throws
/// ContaminationError when the foreign manifest shares a scene with the home
/// manifest, unless allow_shared_scenes is set.
CrossSceneReport cross_scene_report(const BackboneParams &backbone, const HeadParams &head,
                                    const Manifest &home, const ImageSource &home_source,
                                    const Manifest &foreign, const ImageSource &foreign_source,
                                    bool allow_shared_scenes = false);

std::string cross_scene_summary(const CrossSceneReport &r);

}  // namespace vigil
