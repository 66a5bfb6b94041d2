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

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "vigil/analysis.hpp"
#include "vigil/dataset.hpp"
#include "vigil/error.hpp"
#include "vigil/eval.hpp"
#include "vigil/image.hpp"
#include "vigil/model.hpp"
#include "vigil/scenegen.hpp"
#include "vigil/textio.hpp"
#include "vigil/train.hpp"

namespace vigil::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char *kManifestFile = "manifest.tsv";
constexpr const char *kEventsFile = "events.tsv";
constexpr const char *kWeightsFile = "weights.bin";
constexpr const char *kCurvesFile = "curves.csv";
constexpr const char *kCheckpointFile = "checkpoint.bin";

std::optional<fs::path> run_root(const std::string &flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char *env = std::getenv("VIGIL_RUN_DIR"); env && *env) return fs::path(env);
  return std::nullopt;
}

fs::path require_root(const std::string &flag) {
  auto root = run_root(flag);
  if (!root) throw InvalidArgumentError("no output directory: pass --out or set VIGIL_RUN_DIR");
  return *root;
}

// Input path: explicit flag, else a file inside the run directory.
fs::path input_path(const std::string &flag, const std::string &root_flag, const char *file,
                    const char *what) {
  if (!flag.empty()) return flag;
  if (auto root = run_root(root_flag)) return *root / file;
  throw InvalidArgumentError(std::string("no ") + what + ": pass it explicitly or set VIGIL_RUN_DIR");
}

void refuse_overwrite(const std::vector<fs::path> &targets, bool force) {
  if (force) return;
  for (const auto &t : targets) {
    std::error_code ec;
    if (fs::exists(t, ec))
      throw InvalidArgumentError("'" + t.string() + "' already exists; pass --force to overwrite");
  }
}

bool non_empty_dir(const fs::path &d) {
  std::error_code ec;
  return fs::is_directory(d, ec) && !fs::is_empty(d, ec);
}

void make_dirs(const fs::path &d) {
  if (d.empty()) return;
  std::error_code ec;
  fs::create_directories(d, ec);
  if (!fs::is_directory(d)) throw IoError("cannot create directory '" + d.string() + "'");
}

std::array<double, 3> parse_ratios(const std::string &text) {
  const auto f = split_fields(text, ',');
  if (f.size() != 3) throw InvalidArgumentError("--ratios needs three comma-separated values");
  std::array<double, 3> r{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto v = parse_double(f[i]);
    if (!v) throw InvalidArgumentError("bad ratio '" + std::string(f[i]) + "'");
    r[i] = *v;
  }
  return r;
}

SplitSpec split_spec(const std::string &ratios, std::uint64_t seed) {
  SplitSpec s{parse_ratios(ratios), seed};
  validate(s);
  return s;
}

std::string scene_name(int i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return "S" + std::to_string(i);
}

bool is_file_ref(const std::string &ref) { return ref.rfind("mem://", 0) != 0; }

// Relative image refs resolve against the manifest's directory; keep them
// valid when a manifest is written somewhere else.
void rebase_refs(std::vector<FrameRecord> &records, const fs::path &from_dir, const fs::path &to_dir) {
  const fs::path from = fs::absolute(from_dir).lexically_normal();
  const fs::path to = fs::absolute(to_dir).lexically_normal();
  if (from == to) return;
  for (auto &r : records) {
    if (!is_file_ref(r.image_ref) || fs::path(r.image_ref).is_absolute()) continue;
    r.image_ref = (from / r.image_ref).lexically_normal().lexically_relative(to).generic_string();
  }
}

DiskImageSource source_for(const fs::path &manifest_path) {
  return DiskImageSource(manifest_path.parent_path());
}

void print_split_summary(std::ostream &out, const Manifest &m) {
  const auto s = summarize(m);
  for (Split sp : {Split::train, Split::val, Split::test}) {
    const auto &x = s[static_cast<int>(sp)];
    out << to_string(sp) << ": videos=" << x.videos << " frames=" << x.frames
        << " abandoned_fraction=" << format_fixed(x.abandoned_fraction(), 3) << '\n';
  }
}

// --- subcommands -------------------------------------------------------------

struct GenArgs {
  int scenes = 2;
  std::vector<std::string> scene_ids;
  int events = 10;
  int frames = 30;
  int size = 64;
  int furniture = 3;
  std::string ratios = "0.7,0.15,0.15";
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

int run_gen(const GenArgs &a, std::ostream &out) {
  const fs::path root = require_root(a.out);
  std::vector<std::string> ids = a.scene_ids;
  if (ids.empty()) {
    if (a.scenes < 1) throw InvalidArgumentError("--scenes must be >= 1");
    for (int i = 0; i < a.scenes; ++i) ids.push_back(scene_name(i));
  }
  std::vector<SceneSpec> scenes;
  for (const auto &id : ids) {
    if (id.empty() || id.find_first_of("\t\n/") != std::string::npos)
      throw InvalidArgumentError("bad scene id '" + id + "'");
    SceneSpec s = default_scene(id, a.seed);
    s.width = s.height = a.size;
    s.furniture_count = a.furniture;
    validate(s);
    scenes.push_back(s);
  }
  const SplitSpec spec = split_spec(a.ratios, a.seed);
  const fs::path frames_dir = root / "frames";
  refuse_overwrite({root / kManifestFile, root / kEventsFile}, a.force);
  if (!a.force && non_empty_dir(frames_dir))
    throw InvalidArgumentError("'" + frames_dir.string() + "' is not empty; pass --force to overwrite");

  const auto events = corpus_events(scenes, a.events, a.seed, a.frames);
  std::vector<GeneratedFrame> frames;
  for (const auto &ev : events) {
    auto f = generate_event(ev);
    std::move(f.begin(), f.end(), std::back_inserter(frames));
  }
  const auto records = records_from_frames(frames, nullptr, "frames");
  const Manifest manifest = split_by_video(records, spec);

  make_dirs(frames_dir);
  for (const auto &f : frames)
    write_png((frames_dir / frame_filename(f.video_id, f.frame_index)).string(), f.image);
  write_text_file((root / kEventsFile).string(), serialize_events(index_events(events)));
  save_manifest(manifest, (root / kManifestFile).string());

  out << "frames=" << frames.size() << '\n' << "videos=" << events.size() << '\n';
  print_split_summary(out, manifest);
  return kOk;
}

struct IngestArgs {
  std::string in;
  std::string label_rule = "abandoned=abandoned,background=background";
  std::string ratios = "0.7,0.15,0.15";
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

int run_ingest(const IngestArgs &a, std::ostream &out, std::ostream &err) {
  const fs::path root = require_root(a.out);
  std::map<std::string, Label> rule;
  for (auto item : split_fields(a.label_rule, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw InvalidArgumentError("bad --label-rule entry '" + std::string(item) + "'");
    rule[std::string(item.substr(0, eq))] = parse_label(item.substr(eq + 1));
  }
  const SplitSpec spec = split_spec(a.ratios, a.seed);
  refuse_overwrite({root / kManifestFile}, a.force);

  auto result = ingest_frames_dir(a.in, rule);
  for (const auto &s : result.skipped) err << "warning: skipped " << s.path << ": " << s.reason << '\n';
  for (auto &r : result.records)
    r.image_ref = fs::absolute(r.image_ref).lexically_normal().lexically_relative(fs::absolute(root)).generic_string();
  const Manifest manifest = split_by_video(result.records, spec);
  make_dirs(root);
  save_manifest(manifest, (root / kManifestFile).string());
  out << "records=" << result.records.size() << '\n' << "skipped=" << result.skipped.size() << '\n';
  print_split_summary(out, manifest);
  return kOk;
}

struct SplitArgs {
  std::string manifest;
  std::string ratios = "0.7,0.15,0.15";
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

int run_split(const SplitArgs &a, std::ostream &out) {
  const SplitSpec spec = split_spec(a.ratios, a.seed);
  const fs::path dst = a.out;
  refuse_overwrite({dst}, a.force);
  const fs::path src = a.manifest;
  Manifest in = load_manifest(src.string());
  rebase_refs(in.records, src.parent_path(), dst.parent_path());
  const Manifest m = split_by_video(in.records, spec);
  make_dirs(dst.parent_path());
  save_manifest(m, dst.string());
  print_split_summary(out, m);
  return kOk;
}

struct AugmentArgs {
  std::string manifest;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

int run_augment(const AugmentArgs &a, std::ostream &out) {
  const fs::path dst = a.out;
  refuse_overwrite({dst}, a.force);
  const fs::path src = a.manifest;
  Manifest m = augment(load_manifest(src.string()));
  rebase_refs(m.records, src.parent_path(), dst.parent_path());
  make_dirs(dst.parent_path());
  save_manifest(m, dst.string());
  out << "records=" << m.records.size() << '\n';
  print_split_summary(out, m);
  return kOk;
}

struct TrainArgs {
  std::string manifest;
  std::string out;
  std::int64_t steps = TrainConfig{}.total_steps;
  double lr = TrainConfig{}.initial_lr;
  double decay = TrainConfig{}.lr_decay;
  std::int64_t decay_interval = TrainConfig{}.decay_interval_steps;
  std::int64_t batch = TrainConfig{}.batch_size;
  std::int64_t eval_interval = TrainConfig{}.eval_interval_steps;
  std::int64_t checkpoint_every = 0;
  std::uint64_t seed = 0;
  bool unfreeze = false;
  std::string backbone = kTinyV1;
  int embedding_dim = 64;
  std::string init_weights;
  std::string resume_from;
  bool force = false;
};

int run_train(const TrainArgs &a, std::ostream &out) {
  const fs::path root = require_root(a.out);
  const fs::path manifest_path = input_path(a.manifest, a.out, kManifestFile, "--manifest");
  TrainConfig cfg;
  cfg.total_steps = a.steps;
  cfg.initial_lr = a.lr;
  cfg.lr_decay = a.decay;
  cfg.decay_interval_steps = a.decay_interval;
  cfg.batch_size = a.batch;
  cfg.eval_interval_steps = a.eval_interval;
  cfg.seed = a.seed;
  cfg.freeze_backbone = !a.unfreeze;
  validate(cfg);
  if (a.checkpoint_every < 0) throw InvalidArgumentError("--checkpoint-every must be >= 0");
  if (a.embedding_dim < 1) throw InvalidArgumentError("--embedding-dim must be >= 1");
  if (!a.init_weights.empty() && !a.resume_from.empty())
    throw InvalidArgumentError("--init-weights and --resume are mutually exclusive");
  const fs::path weights = root / kWeightsFile, curves = root / kCurvesFile,
                 checkpoint = root / kCheckpointFile;
  refuse_overwrite({weights, curves, checkpoint}, a.force);

  const Manifest manifest = load_manifest(manifest_path.string());
  const DiskImageSource source = source_for(manifest_path);
  TrainState state;
  if (!a.resume_from.empty()) {
    state = resume(a.resume_from, cfg, manifest);
  } else if (!a.init_weights.empty()) {
    auto [bb, head] = load_weights(a.init_weights);
    state = init_state(cfg, std::move(bb), std::move(head));
  } else {
    BackboneParams bb = make_backbone(a.backbone, a.seed, a.embedding_dim);
    const int dim = bb.embedding_dim;
    state = init_state(cfg, std::move(bb), HeadParams::zeros(dim));
  }

  make_dirs(root);
  TrainOutputs outputs{curves.string(), checkpoint.string(), a.checkpoint_every};
  const TrainResult res = run_training(cfg, manifest, source, std::move(state), outputs);
  save_weights(res.state.backbone, res.state.head, weights.string());

  out << "steps=" << res.state.step << '\n' << "curve_points=" << res.curves.size() << '\n';
  if (!res.curves.empty()) {
    const auto &p = res.curves.back();
    out << "train_loss=" << format_double(p.train_loss) << '\n'
        << "train_acc=" << format_double(p.train_accuracy) << '\n'
        << "val_loss=" << format_double(p.val_loss) << '\n'
        << "val_acc=" << format_double(p.val_accuracy) << '\n';
  }
  return kOk;
}

struct EvalArgs {
  std::string manifest;
  std::string weights;
  std::string split = "test";
  std::string name = "dataset";
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

int run_eval(const EvalArgs &a, std::ostream &out) {
  const fs::path manifest_path = input_path(a.manifest, a.out, kManifestFile, "--manifest");
  const fs::path weights_path = input_path(a.weights, a.out, kWeightsFile, "--weights");
  const Split split = parse_split(a.split);
  if (a.name.find(',') != std::string::npos) throw InvalidArgumentError("--name may not contain commas");
  const auto root = run_root(a.out);
  const std::optional<fs::path> report_path =
      root ? std::optional(*root / ("report_" + std::string(to_string(split)) + ".csv")) : std::nullopt;
  if (report_path) refuse_overwrite({*report_path}, a.force);

  const Manifest manifest = load_manifest(manifest_path.string());
  const auto [backbone, head] = load_weights(weights_path.string());
  const MetricsReport r = evaluate(backbone, head, manifest, split, a.name, source_for(manifest_path));
  if (report_path) {
    make_dirs(*root);
    write_text_file(report_path->string(), report_csv(r));
  }
  out << metrics_summary(r);
  return kOk;
}

struct CompareArgs {
  std::vector<std::string> runs;
  bool published = false;
  int digits = 2;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

int run_compare(const CompareArgs &a, std::ostream &out) {
  if (a.digits < 0 || a.digits > 12) throw InvalidArgumentError("--digits must be in [0, 12]");
  std::vector<std::pair<std::string, fs::path>> runs;
  for (const auto &spec : a.runs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw InvalidArgumentError("--run expects NAME=DIR, got '" + spec + "'");
    const std::string name = spec.substr(0, eq);
    if (name.find(',') != std::string::npos) throw InvalidArgumentError("run name may not contain commas");
    runs.emplace_back(name, spec.substr(eq + 1));
  }
  if (!a.out.empty()) refuse_overwrite({a.out}, a.force);

  std::vector<TableRow> rows;
  for (const auto &[name, dir] : runs) {
    const auto curves = parse_curves(read_text_file((dir / kCurvesFile).string()));
    MetricsReport test = parse_report_csv(read_text_file((dir / "report_test.csv").string()));
    test.dataset_name = name;
    rows.push_back(make_table_row(test, summarize_curves(curves)));
  }
  if (a.published)
    for (auto r : published_reference_rows()) {
      r.dataset = "published " + r.dataset;
      rows.push_back(std::move(r));
    }
  if (rows.empty()) throw InvalidArgumentError("nothing to compare: pass --run or --published");
  if (!a.out.empty()) {
    make_dirs(fs::path(a.out).parent_path());
    write_text_file(a.out, comparison_table_csv(rows));
  }
  out << comparison_table_text(rows, a.digits);
  return kOk;
}

struct CrossSceneArgs {
  std::string weights;
  std::string home;
  std::string foreign;
  bool allow_shared = false;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

int run_cross_scene(const CrossSceneArgs &a, std::ostream &out) {
  const fs::path weights_path = input_path(a.weights, a.out, kWeightsFile, "--weights");
  const fs::path home_path = input_path(a.home, a.out, kManifestFile, "--home");
  const auto root = run_root(a.out);
  const std::optional<fs::path> report = root ? std::optional(*root / "cross_scene.txt") : std::nullopt;
  if (report) refuse_overwrite({*report}, a.force);

  const Manifest home = load_manifest(home_path.string());
  const Manifest foreign = load_manifest(a.foreign);
  const auto [backbone, head] = load_weights(weights_path.string());
  const auto r = cross_scene_report(backbone, head, home, source_for(home_path), foreign,
                                    source_for(a.foreign), a.allow_shared);
  const std::string text = cross_scene_summary(r);
  if (report) {
    make_dirs(*root);
    write_text_file(report->string(), text);
  }
  out << text;
  return kOk;
}

struct SaliencyArgs {
  std::string weights;
  std::string image;
  std::string manifest;
  int record = -1;
  std::uint64_t seed = 0;
  std::string out;
  std::string run_dir;
  bool force = false;
};

int run_saliency(const SaliencyArgs &a, std::ostream &out) {
  const fs::path weights_path = input_path(a.weights, a.run_dir, kWeightsFile, "--weights");
  if (a.image.empty() == a.manifest.empty())
    throw InvalidArgumentError("pass exactly one of --image or --manifest/--record");
  if (!a.manifest.empty() && a.record < 0) throw InvalidArgumentError("--manifest needs --record >= 0");
  refuse_overwrite({a.out}, a.force);

  Image img;
  if (!a.image.empty()) {
    img = read_png(a.image);
  } else {
    const Manifest m = load_manifest(a.manifest);
    if (static_cast<std::size_t>(a.record) >= m.records.size())
      throw RangeError("--record " + std::to_string(a.record) + " out of range (manifest has " +
                       std::to_string(m.records.size()) + " records)");
    img = load_record_image(source_for(a.manifest), m.records[static_cast<std::size_t>(a.record)]);
  }
  const auto [backbone, head] = load_weights(weights_path.string());
  const Prediction pred = predict(backbone, head, img);
  const SaliencyMap map = saliency(backbone, head, img);
  make_dirs(fs::path(a.out).parent_path());
  write_png(a.out, saliency_image(map));
  out << "predicted=" << to_string(pred.label) << '\n'
      << "confidence=" << format_double(pred.confidence) << '\n';
  return kOk;
}

struct GalleryArgs {
  std::string manifest;
  std::string weights;
  std::string split = "test";
  std::string events;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

int run_gallery(const GalleryArgs &a, std::ostream &out) {
  const fs::path root = require_root(a.out);
  const fs::path manifest_path = input_path(a.manifest, a.out, kManifestFile, "--manifest");
  const fs::path weights_path = input_path(a.weights, a.out, kWeightsFile, "--weights");
  const Split split = parse_split(a.split);
  const fs::path dir = root / "gallery";
  if (!a.force && non_empty_dir(dir))
    throw InvalidArgumentError("'" + dir.string() + "' is not empty; pass --force to overwrite");
  fs::path events_path = a.events;
  if (events_path.empty() && fs::exists(manifest_path.parent_path() / kEventsFile))
    events_path = manifest_path.parent_path() / kEventsFile;

  const Manifest manifest = load_manifest(manifest_path.string());
  const auto [backbone, head] = load_weights(weights_path.string());
  std::optional<EventIndex> events;
  if (!events_path.empty()) events = parse_events(read_text_file(events_path.string()));

  if (a.force) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  const ErrorGallery g = build_error_gallery(backbone, head, manifest, split, source_for(manifest_path), dir);
  out << "false_positives=" << g.false_positives.size() << '\n'
      << "false_negatives=" << g.false_negatives.size() << '\n';
  if (events) {
    const std::string text = occlusion_summary_text(occlusion_slice(g, manifest, *events));
    write_text_file((dir / "occlusion.txt").string(), text);
    out << text;
  }
  return kOk;
}

int exit_code_for(ErrorClass c) {
  switch (c) {
    case ErrorClass::usage: return kUsage;
    case ErrorClass::divergence: return kDivergence;
    case ErrorClass::data: break;
  }
  return kData;
}

void add_common(CLI::App *cmd, std::uint64_t &seed, bool &force) {
  cmd->add_option("--seed", seed, "Seed for every random choice");
  cmd->add_flag("--force", force, "Overwrite existing outputs");
}

}  // namespace

int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Abandoned-luggage frame classifier: data, training, evaluation, analysis", "vigil"};
  app.require_subcommand(1);

  GenArgs gen;
  auto *c_gen = app.add_subcommand("gen", "Render a synthetic corpus with manifest and event table");
  c_gen->add_option("--scenes", gen.scenes, "Number of scenes (named A, B, ...)");
  c_gen->add_option("--scene-ids", gen.scene_ids, "Explicit scene ids (overrides --scenes)")->delimiter(',');
  c_gen->add_option("--events", gen.events, "Events per scene (>= 2)");
  c_gen->add_option("--frames", gen.frames, "Frames per event");
  c_gen->add_option("--size", gen.size, "Image width and height");
  c_gen->add_option("--furniture", gen.furniture, "Furniture props per scene");
  c_gen->add_option("--ratios", gen.ratios, "train,val,test video ratios");
  c_gen->add_option("--out", gen.out, "Run directory (default $VIGIL_RUN_DIR)");
  add_common(c_gen, gen.seed, gen.force);

  IngestArgs ing;
  auto *c_ing = app.add_subcommand("ingest", "Build a manifest from a directory of labelled frames");
  c_ing->add_option("--in", ing.in, "Directory with one subdirectory per label")->required();
  c_ing->add_option("--label-rule", ing.label_rule, "subdir=label pairs, comma-separated");
  c_ing->add_option("--ratios", ing.ratios, "train,val,test video ratios");
  c_ing->add_option("--out", ing.out, "Run directory (default $VIGIL_RUN_DIR)");
  add_common(c_ing, ing.seed, ing.force);

  SplitArgs spl;
  auto *c_spl = app.add_subcommand("split", "Re-split a manifest by video");
  c_spl->add_option("--manifest", spl.manifest, "Input manifest")->required();
  c_spl->add_option("--ratios", spl.ratios, "train,val,test video ratios");
  c_spl->add_option("--out", spl.out, "Output manifest")->required();
  add_common(c_spl, spl.seed, spl.force);

  AugmentArgs aug;
  auto *c_aug = app.add_subcommand("augment", "Expand every frame into color/gray x plain/flipped");
  c_aug->add_option("--manifest", aug.manifest, "Input manifest")->required();
  c_aug->add_option("--out", aug.out, "Output manifest")->required();
  add_common(c_aug, aug.seed, aug.force);

  TrainArgs tr;
  auto *c_tr = app.add_subcommand("train", "Train the classification head");
  c_tr->add_option("--manifest", tr.manifest, "Manifest (default <run>/manifest.tsv)");
  c_tr->add_option("--out", tr.out, "Run directory (default $VIGIL_RUN_DIR)");
  c_tr->add_option("--steps", tr.steps, "Total gradient steps");
  c_tr->add_option("--lr", tr.lr, "Initial learning rate");
  c_tr->add_option("--decay", tr.decay, "Learning-rate decay factor");
  c_tr->add_option("--decay-interval", tr.decay_interval, "Steps between decays");
  c_tr->add_option("--batch", tr.batch, "Batch size");
  c_tr->add_option("--eval-interval", tr.eval_interval, "Steps between curve points");
  c_tr->add_option("--checkpoint-every", tr.checkpoint_every, "Checkpoint cadence (0: end only)");
  c_tr->add_flag("--unfreeze", tr.unfreeze, "Also train the backbone");
  c_tr->add_option("--backbone", tr.backbone, "Backbone preset");
  c_tr->add_option("--embedding-dim", tr.embedding_dim, "Backbone embedding size");
  c_tr->add_option("--init-weights", tr.init_weights, "Start from a weights file");
  c_tr->add_option("--resume", tr.resume_from, "Continue from a checkpoint");
  add_common(c_tr, tr.seed, tr.force);

  EvalArgs ev;
  auto *c_ev = app.add_subcommand("eval", "Accuracy, FPR and FNR on one split");
  c_ev->add_option("--manifest", ev.manifest, "Manifest (default <run>/manifest.tsv)");
  c_ev->add_option("--weights", ev.weights, "Weights (default <run>/weights.bin)");
  c_ev->add_option("--split", ev.split, "train, val or test");
  c_ev->add_option("--name", ev.name, "Dataset name in the report");
  c_ev->add_option("--out", ev.out, "Run directory for report_<split>.csv");
  add_common(c_ev, ev.seed, ev.force);

  CompareArgs cmp;
  auto *c_cmp = app.add_subcommand("compare", "Side-by-side table of finished runs");
  c_cmp->add_option("--run", cmp.runs, "NAME=DIR of a run with curves.csv and report_test.csv");
  c_cmp->add_flag("--published", cmp.published, "Append the published reference rows");
  c_cmp->add_option("--digits", cmp.digits, "Decimals in the text table");
  c_cmp->add_option("--out", cmp.out, "Also write the table as CSV");
  add_common(c_cmp, cmp.seed, cmp.force);

  CrossSceneArgs cs;
  auto *c_cs = app.add_subcommand("cross-scene", "Evaluate one model on its own and a foreign scene");
  c_cs->add_option("--weights", cs.weights, "Weights (default <run>/weights.bin)");
  c_cs->add_option("--home", cs.home, "Home manifest (default <run>/manifest.tsv)");
  c_cs->add_option("--foreign", cs.foreign, "Foreign manifest")->required();
  c_cs->add_flag("--allow-shared", cs.allow_shared, "Skip the scene-overlap check");
  c_cs->add_option("--out", cs.out, "Run directory for cross_scene.txt");
  add_common(c_cs, cs.seed, cs.force);

  SaliencyArgs sal;
  auto *c_sal = app.add_subcommand("saliency", "Gradient saliency map of one frame");
  c_sal->add_option("--weights", sal.weights, "Weights (default <run>/weights.bin)");
  c_sal->add_option("--image", sal.image, "PNG frame");
  c_sal->add_option("--manifest", sal.manifest, "Manifest to take the frame from");
  c_sal->add_option("--record", sal.record, "Record index within --manifest");
  c_sal->add_option("--run", sal.run_dir, "Run directory (default $VIGIL_RUN_DIR)");
  c_sal->add_option("--out", sal.out, "Output PNG")->required();
  add_common(c_sal, sal.seed, sal.force);

  GalleryArgs gal;
  auto *c_gal = app.add_subcommand("gallery", "Misclassified frames with saliency maps");
  c_gal->add_option("--manifest", gal.manifest, "Manifest (default <run>/manifest.tsv)");
  c_gal->add_option("--weights", gal.weights, "Weights (default <run>/weights.bin)");
  c_gal->add_option("--split", gal.split, "train, val or test");
  c_gal->add_option("--events", gal.events, "Event table for the occlusion slice");
  c_gal->add_option("--out", gal.out, "Run directory; the gallery goes to <run>/gallery");
  add_common(c_gal, gal.seed, gal.force);

  std::vector<const char *> argv{"vigil"};
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*c_gen) return run_gen(gen, out);
    if (*c_ing) return run_ingest(ing, out, err);
    if (*c_spl) return run_split(spl, out);
    if (*c_aug) return run_augment(aug, out);
    if (*c_tr) return run_train(tr, out);
    if (*c_ev) return run_eval(ev, out);
    if (*c_cmp) return run_compare(cmp, out);
    if (*c_cs) return run_cross_scene(cs, out);
    if (*c_sal) return run_saliency(sal, out);
    if (*c_gal) return run_gallery(gal, out);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.error_class());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  err << app.help();
  return kUsage;
}

}  // namespace vigil::cli
