// Command line front end for the traffic profiling pipeline.

#include <cstdio>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "netprof/pipeline.hpp"
#include "netprof/synth.hpp"
#include "netprof/util.hpp"

namespace {

// distinct exit code per failing stage
const std::map<std::string, int> kStageExitCodes = {
    {"ingest", 10}, {"sessionize", 11}, {"features", 12}, {"enrich", 13},
    {"aggregate", 14}, {"train", 15},   {"report", 16},   {"synth", 17},
};

void add_common(CLI::App* cmd, netprof::PipelineConfig& cfg) {
  cmd->add_option("--out", cfg.output_dir, "output/intermediate directory")->required();
  cmd->add_option("--seed", cfg.seed, "master random seed (default 1)");
  cmd->add_option("--threads", cfg.threads, "worker threads (default 1)");
  cmd->add_flag("--strict", cfg.strict_mode, "escalate enrichment degradations to errors");
}

void add_grid(CLI::App* cmd, netprof::PipelineConfig& cfg, std::vector<int>& ks,
              std::vector<std::string>& algos) {
  cmd->add_option("--grid-k", ks, "K-best grid values (default 30 50 80 100 120)");
  cmd->add_option("--algos", algos, "grid algorithms (RF ET)");
  cmd->add_option("--trees", cfg.grid.base.n_trees, "trees per ensemble (default 100)");
  cmd->add_option("--max-depth", cfg.grid.base.max_depth, "tree depth cap (-1 unlimited)");
  cmd->add_option("--train-labels", cfg.train_labels, "labels to train (default: all ten)");
  cmd->add_flag("--write-models", cfg.write_models, "dump model JSON per label");
}

void apply_grid(netprof::PipelineConfig& cfg, const std::vector<int>& ks,
                const std::vector<std::string>& algos) {
  if (!ks.empty()) cfg.grid.k_values = ks;
  if (!algos.empty()) {
    cfg.grid.algorithms.clear();
    for (const auto& a : algos) cfg.grid.algorithms.push_back(netprof::ml::algo_from_name(a));
  }
}

netprof::PlantedEffect parse_effect(const std::string& text) {
  auto parts = netprof::split(text, ':');
  if (parts.size() != 4)
    throw CLI::ValidationError("--effect", "expected label:class:family:size");
  netprof::PlantedEffect e;
  e.label = parts[0];
  e.klass = parts[1];
  e.family = parts[2];
  e.effect_size = std::stod(parts[3]);
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"traffic capture profiling pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file");

  netprof::PipelineConfig cfg;
  std::vector<int> grid_ks;
  std::vector<std::string> grid_algos;

  // synth options
  netprof::SynthSpec synth_spec;
  std::vector<std::string> effect_texts;
  std::string synth_out;

  auto* c_run = app.add_subcommand("run", "full pipeline: ingest through report");
  c_run->add_option("--captures", cfg.capture_paths, "pcap files")->required();
  c_run->add_option("--subject-map", cfg.subject_map_path, "client_ip<TAB>subject_id file")->required();
  c_run->add_option("--labels", cfg.labels_path, "questionnaire CSV")->required();
  c_run->add_option("--fixtures", cfg.fixture_store_path, "domain fixture store JSON")->required();
  c_run->add_option("--taxonomy", cfg.taxonomy_path, "category taxonomy TSV (default: built-in)");
  add_common(c_run, cfg);
  add_grid(c_run, cfg, grid_ks, grid_algos);

  auto* c_ingest = app.add_subcommand("ingest", "captures -> packets.jsonl");
  c_ingest->add_option("--captures", cfg.capture_paths, "pcap files")->required();
  c_ingest->add_option("--subject-map", cfg.subject_map_path, "subject map")->required();
  add_common(c_ingest, cfg);

  auto* c_sess = app.add_subcommand("sessionize", "packets.jsonl -> sessions.jsonl");
  add_common(c_sess, cfg);

  auto* c_feat = app.add_subcommand("features", "sessions.jsonl -> session_features.csv");
  add_common(c_feat, cfg);

  auto* c_enrich = app.add_subcommand("enrich", "add domain columns from the fixture store");
  c_enrich->add_option("--fixtures", cfg.fixture_store_path, "fixture store JSON")->required();
  c_enrich->add_option("--taxonomy", cfg.taxonomy_path, "taxonomy TSV (default: built-in)");
  add_common(c_enrich, cfg);

  auto* c_agg = app.add_subcommand("aggregate", "per-subject dataset.csv");
  c_agg->add_option("--labels", cfg.labels_path, "questionnaire CSV")->required();
  c_agg->add_option("--taxonomy", cfg.taxonomy_path, "taxonomy TSV (default: built-in)");
  add_common(c_agg, cfg);

  auto* c_train = app.add_subcommand("train", "grid search + LOOCV per label");
  add_common(c_train, cfg);
  add_grid(c_train, cfg, grid_ks, grid_algos);

  auto* c_report = app.add_subcommand("report", "summary table + importance tally");
  add_common(c_report, cfg);

  auto* c_synth = app.add_subcommand("synth", "generate a synthetic experiment");
  c_synth->add_option("--out", synth_out, "output directory")->required();
  c_synth->add_option("--subjects", synth_spec.n_subjects, "number of subjects")->required();
  c_synth->add_option("--sessions-min", synth_spec.sessions_min, "sessions per subject, low");
  c_synth->add_option("--sessions-max", synth_spec.sessions_max, "sessions per subject, high");
  c_synth->add_option("--seed", synth_spec.seed, "generator seed");
  c_synth->add_option("--effect", effect_texts,
                      "planted effect label:class:family:size (family: domain|statistical|dpi|application)");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_grid(cfg, grid_ks, grid_algos);
    cfg.grid.base.seed = cfg.seed;

    if (c_synth->parsed()) {
      for (const auto& t : effect_texts) synth_spec.effects.push_back(parse_effect(t));
      try {
        auto out = netprof::synth_generate(synth_spec, synth_out);
        std::printf("synth: %zu captures, labels at %s\n", out.capture_paths.size(),
                    out.labels_path.c_str());
      } catch (const std::exception& e) {
        std::fprintf(stderr, "synth: %s\n", e.what());
        return kStageExitCodes.at("synth");
      }
      return 0;
    }

    if (c_run->parsed()) netprof::pipeline::run(cfg);
    else if (c_ingest->parsed()) netprof::pipeline::ingest(cfg);
    else if (c_sess->parsed()) netprof::pipeline::sessionize_stage(cfg);
    else if (c_feat->parsed()) netprof::pipeline::features(cfg);
    else if (c_enrich->parsed()) netprof::pipeline::enrich(cfg);
    else if (c_agg->parsed()) netprof::pipeline::aggregate(cfg);
    else if (c_train->parsed()) netprof::pipeline::train(cfg);
    else if (c_report->parsed()) netprof::pipeline::report(cfg);
  } catch (const netprof::StageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    auto it = kStageExitCodes.find(e.stage);
    return it != kStageExitCodes.end() ? it->second : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
