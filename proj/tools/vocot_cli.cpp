// vocot: command-line front-end for the VoCoT data toolkit.
//
// Exit codes: 0 success, 1 fatal input error, 2 configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vocot/vocot.hpp"

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid;
  std::optional<int> precision;
  std::optional<double> threshold;
  std::string manifest_path;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::unique_ptr<std::ifstream> open_in(const std::string& path) {
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in) throw InputError("cannot read " + path);
  return in;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw InputError("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish(const std::string& path) {
    stream().flush();
    if (!stream()) throw InputError("write failed for " + (path.empty() ? std::string("stdout") : path));
  }

 private:
  std::ofstream file_;
};

vocot::Config resolve_config(const Common& c) {
  std::string path = c.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("VOCOT_CONFIG"); env != nullptr) path = env;
  }
  vocot::Config cfg = path.empty() ? vocot::Config{} : vocot::load_config(path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.grid) cfg.set("grid", *c.grid);
  if (c.precision) cfg.set("precision", std::to_string(*c.precision));
  if (c.threshold) cfg.set("iou_threshold", vocot::format_fixed(*c.threshold, 6));
  return cfg;
}

void write_manifest(const vocot::RunManifest& m, const Common& c, const std::string& out_path) {
  std::string path = c.manifest_path;
  if (path.empty() && !out_path.empty() && out_path != "-") path = out_path + ".manifest.json";
  const std::string body = m.to_json().dump(2) + "\n";
  if (path.empty()) {
    std::cerr << body;
  } else {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!(f << body)) throw InputError("cannot write " + path);
  }
  std::cerr << m.command << ": in " << m.inputs << " out " << m.outputs << " dropped "
            << m.dropped_total();
  for (const auto& [reason, n] : m.dropped) std::cerr << " " << reason << "=" << n;
  std::cerr << (m.reconciles() ? "" : " (counts do not reconcile)") << "\n";
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key = value config file (falls back to $VOCOT_CONFIG)");
  app->add_option("--seed", c.seed, "random seed (default 17)");
  app->add_option("--grid", c.grid, "patch grid as RxC (default 24x24)");
  app->add_option("--precision", c.precision, "coordinate decimals (default 3)");
  app->add_option("--threshold", c.threshold, "IoU threshold for REC scoring (default 0.5)");
  app->add_option("--manifest", c.manifest_path, "manifest path (default <out>.manifest.json)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VoCoT data toolkit: grounded chain-of-thought data building and scoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(vocot::kToolkitVersion));
  Common common;
  std::string out_path;

  auto* verbalize = app.add_subcommand("verbalize-gqa", "Type 1 thoughts from GQA programs and scene graphs");
  std::string questions_path, scenes_path;
  verbalize->add_option("--questions", questions_path, "GQA questions, JSON Lines")->required();
  verbalize->add_option("--scenes", scenes_path, "GQA scene graphs, JSON Lines")->required();
  verbalize->add_option("--out", out_path, "output records ('-' for stdout)")->required();
  add_common(verbalize, common);

  auto* synthesize = app.add_subcommand(
      "synthesize", "Generator payloads from object lists, or ingest generator responses");
  int mode = 2;
  std::string objects_path, responses_path;
  synthesize->add_option("--mode", mode, "2 (VQA source) or 3 (image only)")->check(CLI::IsMember({2, 3}));
  synthesize->add_option("--objects", objects_path, "object lists, JSON Lines")->required();
  synthesize->add_option("--responses", responses_path, "generator responses; switches to ingest");
  synthesize->add_option("--out", out_path, "payloads or accepted records")->required();
  add_common(synthesize, common);

  auto* assemble = app.add_subcommand("assemble", "Interleaved training sequences with visual references");
  std::string records_path;
  vocot::InstructionLayout layout;
  bool no_grounding = false, no_image = false, no_cot = false;
  assemble->add_option("--records", records_path, "VoCoT-Instruct records")->required();
  assemble->add_option("--out", out_path, "training lines ('-' for stdout)")->required();
  assemble->add_flag("--no-grounding", no_grounding, "omit the grounding token");
  assemble->add_flag("--no-image", no_image, "omit the image placeholder");
  assemble->add_flag("--no-cot-trigger", no_cot, "omit the reasoning trigger sentence");
  add_common(assemble, common);

  auto* filter = app.add_subcommand("filter", "Pre-training corpus filters over metadata");
  std::string kind, meta_path, histogram_path;
  filter->add_option("--kind", kind, "mmc4, grit or vg-region")->required();
  filter->add_option("--meta", meta_path, "metadata, JSON Lines")->required();
  filter->add_option("--out", out_path, "kept ids ('-' for stdout)")->required();
  filter->add_option("--histogram", histogram_path, "drop-reason histogram as JSON");
  add_common(filter, common);

  auto* eval = app.add_subcommand("eval", "Score predictions against gold labels");
  std::string task, predictions_path, gold_path, csv_path;
  eval->add_option("--task", task, "rec, mc, yesno or chair")->required();
  eval->add_option("--predictions", predictions_path, "predictions, JSON Lines")->required();
  eval->add_option("--gold", gold_path, "gold labels, JSON Lines, line-aligned")->required();
  eval->add_option("--out", out_path, "JSON report ('-' for stdout)")->required();
  eval->add_option("--csv", csv_path, "per-record rows");
  add_common(eval, common);

  auto* stats = app.add_subcommand("stats", "Histograms over VoCoT-Instruct records");
  stats->add_option("--records", records_path, "VoCoT-Instruct records")->required();
  stats->add_option("--out", out_path, "JSON report ('-' for stdout)")->required();
  add_common(stats, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const vocot::Config cfg = resolve_config(common);
    vocot::RunManifest manifest;
    Output out(out_path);

    if (verbalize->parsed()) {
      auto questions = open_in(questions_path);
      auto scenes = open_in(scenes_path);
      manifest = vocot::verbalize_gqa(*questions, *scenes, out.stream(), cfg);
    } else if (synthesize->parsed()) {
      const auto type = static_cast<vocot::SourceType>(mode);
      auto objects = open_in(objects_path);
      if (responses_path.empty()) {
        manifest = vocot::synthesize_payloads(*objects, out.stream(), type, cfg);
      } else {
        auto responses = open_in(responses_path);
        manifest = vocot::synthesize_ingest(*objects, *responses, out.stream(), type, cfg);
      }
    } else if (assemble->parsed()) {
      layout.grounding = !no_grounding;
      layout.image_slot = !no_image;
      layout.cot_trigger = !no_cot;
      auto records = open_in(records_path);
      manifest = vocot::assemble_records(*records, out.stream(), cfg, layout);
    } else if (filter->parsed()) {
      const auto k = vocot::parse_filter_kind(kind);
      auto meta = open_in(meta_path);
      manifest = vocot::filter_corpus(k, *meta, out.stream(), cfg);
      if (!histogram_path.empty()) {
        std::ofstream h(histogram_path, std::ios::binary | std::ios::trunc);
        if (!(h << nlohmann::json{{"kept", manifest.outputs}, {"dropped", manifest.dropped}}.dump(2)
                << "\n")) {
          throw InputError("cannot write " + histogram_path);
        }
      }
    } else if (eval->parsed()) {
      const auto t = vocot::parse_eval_task(task);
      auto predictions = open_in(predictions_path);
      auto gold = open_in(gold_path);
      std::unique_ptr<Output> csv;
      if (!csv_path.empty()) csv = std::make_unique<Output>(csv_path);
      vocot::EvalReport report;
      manifest = vocot::eval_predictions(t, *predictions, *gold, report, cfg,
                                         csv ? &csv->stream() : nullptr);
      if (csv) csv->finish(csv_path);
      out.stream() << report.report.dump(2) << "\n";
      std::cout.flush();
      std::cerr << report.summary << "\n";
    } else if (stats->parsed()) {
      auto records = open_in(records_path);
      nlohmann::json result;
      manifest = vocot::corpus_stats(*records, result, cfg);
      out.stream() << result.dump(2) << "\n";
    }
    out.finish(out_path);
    write_manifest(manifest, common, out_path);
  } catch (const vocot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
