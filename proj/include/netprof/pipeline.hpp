#pragma once

#include <map>
#include <string>
#include <vector>

#include "netprof/ml/loocv.hpp"
#include "netprof/subject_dataset.hpp"

namespace netprof {

struct StageError : std::runtime_error {
  StageError(std::string stage_name, const std::string& what)
      : std::runtime_error(stage_name + ": " + what), stage(std::move(stage_name)) {}
  std::string stage;
};

struct PipelineConfig {
  std::vector<std::string> capture_paths;
  std::string subject_map_path;
  std::string labels_path;
  std::string fixture_store_path;
  std::string taxonomy_path;  // empty -> built-in table
  std::string output_dir;
  std::vector<std::string> train_labels;  // empty -> all ten
  ml::GridSpec grid;
  uint64_t seed = 1;
  int threads = 1;
  bool strict_mode = false;
  bool write_models = false;
};

// Stage functions share the output directory as their interchange
// area, so subcommand-by-subcommand runs equal the single shot.
namespace pipeline {

extern const char* kPacketsFile;          // packets.jsonl
extern const char* kSessionsFile;         // sessions.jsonl
extern const char* kSessionLogFile;       // session_log.tsv
extern const char* kFeaturesFile;         // session_features.csv
extern const char* kEnrichedFile;         // enriched_features.csv
extern const char* kDatasetFile;          // dataset.csv
extern const char* kSchemaFile;           // feature_schema.json
extern const char* kImportanceFile;       // importance_summary.json
extern const char* kSummaryFile;          // report_summary.txt

void ingest(const PipelineConfig& cfg);
void sessionize_stage(const PipelineConfig& cfg);
void features(const PipelineConfig& cfg);
void enrich(const PipelineConfig& cfg);
void aggregate(const PipelineConfig& cfg);
void train(const PipelineConfig& cfg);
void report(const PipelineConfig& cfg);

// all stages in order
void run(const PipelineConfig& cfg);

}  // namespace pipeline

// Table-3-style tally: top-5 features of each label's best-WAUC model
// bucketed into the four feature categories.
struct ImportanceSummary {
  std::map<std::string, int> counts;       // category -> count
  std::map<std::string, double> percents;
  int total = 0;
};
ImportanceSummary importance_summary(
    const std::map<std::string, std::vector<std::pair<std::string, double>>>& top_per_label);

}  // namespace netprof
