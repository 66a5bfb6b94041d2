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

#include "vigil/eval.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "vigil/error.hpp"
#include "vigil/parallel.hpp"
#include "vigil/scenegen.hpp"
#include "vigil/textio.hpp"

namespace vigil {

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size())
    throw ShapeError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                     std::to_string(truths.size()) + " truths");
  if (predictions.empty()) throw InvalidArgumentError("confusion: no predictions");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = predictions[i] == Label::abandoned;
    const bool true_pos = truths[i] == Label::abandoned;
    if (pred_pos && true_pos) ++c.tp;
    else if (pred_pos) ++c.fp;
    else if (true_pos) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics metrics_from_confusion(const ConfusionCounts &c) {
  if (c.total() == 0) throw InvalidArgumentError("metrics: empty confusion counts");
  return {{c.tp + c.tn, c.total()}, {c.fp, c.fp + c.tn}, {c.fn, c.fn + c.tp}};
}

std::vector<FramePrediction> predict_split(const BackboneParams &backbone, const HeadParams &head,
                                           const Manifest &manifest, Split split,
                                           const ImageSource &source, std::size_t batch_size) {
  if (batch_size == 0) throw InvalidArgumentError("predict_split: batch_size must be > 0");
  // Every frame counts here, train included, so no drop-last.
  const auto idx = manifest.indices(split);
  if (idx.empty())
    throw EmptySplitError("split '" + std::string(to_string(split)) + "' has no frames");
  std::vector<FramePrediction> out;
  out.reserve(idx.size());
  for (std::size_t start = 0; start < idx.size(); start += batch_size) {
    const std::size_t end = std::min(idx.size(), start + batch_size);
    std::vector<Image> images(end - start);
    parallel_for(images.size(), [&](std::size_t i) {
      images[i] = load_record_image(source, manifest.records[idx[start + i]]);
    });
    const auto emb = embed_batch(backbone, images);
    for (std::size_t i = 0; i < emb.size(); ++i) {
      const auto t = head_forward(head, emb[i]);
      FramePrediction fp;
      fp.record = idx[start + i];
      fp.truth = manifest.records[fp.record].label;
      fp.prediction = prediction_from_probabilities(t.probabilities);
      fp.loss = cross_entropy(t.probabilities, fp.truth);
      out.push_back(fp);
    }
  }
  return out;
}

MetricsReport report_from_predictions(const std::string &dataset_name, Split split,
                                      const std::vector<FramePrediction> &preds) {
  if (preds.empty()) throw EmptySplitError("split '" + std::string(to_string(split)) + "' has no frames");
  std::vector<Label> p, t;
  double loss = 0;
  for (const auto &fp : preds) {
    p.push_back(fp.prediction.label);
    t.push_back(fp.truth);
    loss += fp.loss;
  }
  MetricsReport r;
  r.dataset_name = dataset_name;
  r.split = split;
  r.counts = confusion(p, t);
  const Metrics m = metrics_from_confusion(r.counts);
  r.accuracy = *m.accuracy.value();
  r.fpr = m.fpr.value();
  r.fnr = m.fnr.value();
  r.mean_loss = loss / static_cast<double>(preds.size());
  return r;
}

MetricsReport evaluate(const BackboneParams &backbone, const HeadParams &head,
                       const Manifest &manifest, Split split, const std::string &dataset_name,
                       const ImageSource &source) {
  return report_from_predictions(dataset_name, split,
                                 predict_split(backbone, head, manifest, split, source));
}

std::string metrics_summary(const MetricsReport &r) {
  std::ostringstream os;
  os << "dataset=" << r.dataset_name << '\n'
     << "split=" << to_string(r.split) << '\n'
     << "frames=" << r.counts.total() << '\n'
     << "tp=" << r.counts.tp << '\n'
     << "fp=" << r.counts.fp << '\n'
     << "tn=" << r.counts.tn << '\n'
     << "fn=" << r.counts.fn << '\n'
     << "accuracy=" << format_double(r.accuracy) << '\n'
     << "fpr=" << format_rate(r.fpr) << '\n'
     << "fnr=" << format_rate(r.fnr) << '\n'
     << "mean_loss=" << format_double(r.mean_loss) << '\n';
  return os.str();
}

static constexpr const char *kReportHeader = "dataset,split,tp,fp,tn,fn,accuracy,fpr,fnr,mean_loss";

std::string report_csv(const MetricsReport &r) {
  std::ostringstream os;
  os << kReportHeader << '\n'
     << r.dataset_name << ',' << to_string(r.split) << ',' << r.counts.tp << ',' << r.counts.fp << ','
     << r.counts.tn << ',' << r.counts.fn << ',' << format_double(r.accuracy) << ','
     << format_rate(r.fpr) << ',' << format_rate(r.fnr) << ',' << format_double(r.mean_loss) << '\n';
  return os.str();
}

MetricsReport parse_report_csv(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kReportHeader) throw ParseError("missing report header", 1);
  if (!std::getline(is, line)) throw ParseError("missing report row", 2);
  const auto f = split_fields(line, ',');
  if (f.size() != 10) throw ParseError("expected 10 columns", 2);
  MetricsReport r;
  r.dataset_name = std::string(f[0]);
  try {
    r.split = parse_split(f[1]);
  } catch (const InvalidArgumentError &e) {
    throw ParseError(e.what(), 2);
  }
  auto count = [&](std::string_view s) {
    const auto v = parse_int(s);
    if (!v || *v < 0) throw ParseError("bad count '" + std::string(s) + "'", 2);
    return static_cast<std::uint64_t>(*v);
  };
  auto real = [&](std::string_view s) {
    const auto v = parse_double(s);
    if (!v) throw ParseError("bad number '" + std::string(s) + "'", 2);
    return *v;
  };
  auto rate = [&](std::string_view s) -> std::optional<double> {
    if (s == "n/a") return std::nullopt;
    return real(s);
  };
  r.counts = {count(f[2]), count(f[3]), count(f[4]), count(f[5])};
  r.accuracy = real(f[6]);
  r.fpr = rate(f[7]);
  r.fnr = rate(f[8]);
  r.mean_loss = real(f[9]);
  return r;
}

// --- comparison tables -------------------------------------------------------

CurveSummary summarize_curves(const std::vector<CurvePoint> &curves) {
  if (curves.empty()) throw InvalidArgumentError("no curve points to summarize");
  const auto &p = curves.back();
  return {p.train_loss, p.val_loss, p.train_accuracy, p.val_accuracy};
}

TableRow make_table_row(const MetricsReport &test_report, const CurveSummary &c) {
  return {test_report.dataset_name, c.train_loss, c.val_loss, c.train_accuracy, c.val_accuracy,
          test_report.accuracy};
}

std::string comparison_table_text(const std::vector<TableRow> &rows, int digits) {
  std::vector<std::vector<std::string>> cells;
  cells.emplace_back(std::begin(kTableColumns), std::end(kTableColumns));
  for (const auto &r : rows)
    cells.push_back({r.dataset, format_fixed(r.train_loss, digits), format_fixed(r.val_loss, digits),
                     format_fixed(r.train_accuracy, digits), format_fixed(r.val_accuracy, digits),
                     format_fixed(r.test_accuracy, digits)});
  std::vector<std::size_t> width(6, 0);
  for (const auto &row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());

  std::ostringstream os;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < 6; ++i) {
      const auto &s = cells[r][i];
      // Dataset left-aligned, numbers right-aligned.
      if (i == 0) os << s << std::string(width[i] - s.size(), ' ');
      else os << "  " << std::string(width[i] - s.size(), ' ') << s;
    }
    os << '\n';
    if (r == 0) {
      std::size_t total = width[0];
      for (std::size_t i = 1; i < 6; ++i) total += 2 + width[i];
      os << std::string(total, '-') << '\n';
    }
  }
  return os.str();
}

std::string comparison_table_csv(const std::vector<TableRow> &rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < 6; ++i) os << (i ? "," : "") << kTableColumns[i];
  os << '\n';
  for (const auto &r : rows) {
    if (r.dataset.find(',') != std::string::npos)
      throw InvalidArgumentError("dataset name contains a comma: '" + r.dataset + "'");
    os << r.dataset << ',' << format_double(r.train_loss) << ',' << format_double(r.val_loss) << ','
       << format_double(r.train_accuracy) << ',' << format_double(r.val_accuracy) << ','
       << format_double(r.test_accuracy) << '\n';
  }
  return os.str();
}

std::vector<TableRow> parse_comparison_csv(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  std::string header;
  for (std::size_t i = 0; i < 6; ++i) header += std::string(i ? "," : "") + kTableColumns[i];
  if (!std::getline(is, line) || line != header) throw ParseError("missing table header", 1);
  std::vector<TableRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_fields(line, ',');
    if (f.size() != 6) throw ParseError("expected 6 columns", lineno);
    TableRow r;
    r.dataset = std::string(f[0]);
    double *dst[] = {&r.train_loss, &r.val_loss, &r.train_accuracy, &r.val_accuracy, &r.test_accuracy};
    for (std::size_t i = 0; i < 5; ++i) {
      const auto v = parse_double(f[i + 1]);
      if (!v) throw ParseError("bad number '" + std::string(f[i + 1]) + "'", lineno);
      *dst[i] = *v;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TableRow> published_reference_rows() {
  return {
      {"i-LIDS", 0.14, 0.15, 0.96, 0.95, 0.98},
      {"CAVIAR", 0.15, 0.17, 0.96, 0.95, 0.97},
      {"Combined", 0.22, 0.22, 0.93, 0.93, 0.95},
  };
}

// --- cross-scene ------------------------------------------------------------

CrossSceneReport cross_scene_report(const BackboneParams &backbone, const HeadParams &head,
                                    const Manifest &home, const ImageSource &home_source,
                                    const Manifest &foreign, const ImageSource &foreign_source,
                                    bool allow_shared_scenes) {
  if (!allow_shared_scenes) {
    std::set<std::string> home_scenes;
    for (const auto &[video, split] : home.assignment) home_scenes.insert(scene_of_video(video));
    for (const auto &[video, split] : foreign.assignment) {
      if (home.assignment.count(video))
        throw ContaminationError("video '" + video + "' appears in both home and foreign manifests");
      if (home_scenes.count(scene_of_video(video)))
        throw ContaminationError("foreign video '" + video + "' belongs to home scene '" +
                                 scene_of_video(video) + "'");
    }
  }
  CrossSceneReport r;
  r.home = evaluate(backbone, head, home, Split::test, "home", home_source);
  r.foreign = evaluate(backbone, head, foreign, Split::test, "foreign", foreign_source);
  r.accuracy_delta = r.home.accuracy - r.foreign.accuracy;
  return r;
}

std::string cross_scene_summary(const CrossSceneReport &r) {
  std::ostringstream os;
  os << "home_accuracy=" << format_double(r.home.accuracy) << '\n'
     << "home_fpr=" << format_rate(r.home.fpr) << '\n'
     << "home_fnr=" << format_rate(r.home.fnr) << '\n'
     << "home_frames=" << r.home.counts.total() << '\n'
     << "foreign_accuracy=" << format_double(r.foreign.accuracy) << '\n'
     << "foreign_fpr=" << format_rate(r.foreign.fpr) << '\n'
     << "foreign_fnr=" << format_rate(r.foreign.fnr) << '\n'
     << "foreign_frames=" << r.foreign.counts.total() << '\n'
     << "accuracy_delta=" << format_double(r.accuracy_delta) << '\n';
  return os.str();
}

}  // namespace vigil
