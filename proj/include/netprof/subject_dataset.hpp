#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netprof/domain_enrichment.hpp"
#include "netprof/session_features.hpp"

namespace netprof {

struct EmptyInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateLabelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LabelsMissingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// the ten questionnaire labels and their admissible classes
struct LabelDef {
  std::string name;
  std::vector<std::string> classes;
};
const std::vector<LabelDef>& label_schema();
const LabelDef& label_def(const std::string& name);

// one subject's answers; every label must hold a declared class
using LabelSet = std::map<std::string, std::string>;

void validate_labels(const LabelSet& labels);
// CSV with header subject_id,<label names>; one row per subject
std::map<std::string, LabelSet> load_labels_csv(const std::string& path);
std::string labels_csv_header();

// ---------------------------------------------------------------------------
// feature schema

// Aggregated feature names are frozen into a schema so CSV outputs are
// stable: numeric aggregates (avg/median/min/max), boolean means,
// nominal incidences, then port volume features.
class FeatureSchema {
 public:
  static FeatureSchema build(const std::vector<std::string>& categories,
                             const std::vector<std::string>& os_versions,
                             const std::vector<std::string>& content_types);
  static FeatureSchema from_json(const std::string& text);
  std::string to_json() const;

  const std::vector<std::string>& names() const { return names_; }
  int size() const { return static_cast<int>(names_.size()); }
  int index_of(const std::string& name) const;

  // tally bucket: statistical / application_layer / dpi / domain
  static std::string category_of(const std::string& feature_name);

  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<std::string>& os_versions() const { return os_versions_; }
  const std::vector<std::string>& content_types() const { return content_types_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<std::string> categories_, os_versions_, content_types_;
};

// ---------------------------------------------------------------------------
// aggregation

struct EnrichedSession {
  SessionFeatures features;
  std::optional<DomainInfo> domain;  // present iff features.domain_name
};

struct SubjectRecord {
  std::string subject_id;
  std::vector<std::optional<double>> values;  // aligned with FeatureSchema
  LabelSet labels;
  int session_count = 0;
};

// avg/median/min/max over sessions where each numeric feature is
// defined, boolean means, per-class incidences, plus port ratios
SubjectRecord aggregate_subject(const std::vector<EnrichedSession>& sessions,
                                const std::string& subject_id, const LabelSet& labels,
                                const FeatureSchema& schema);

struct PortVolumeFeatures {
  double frac_80 = 0, frac_443 = 0, frac_5228 = 0;
  double r_80_443 = 0, r_80_5228 = 0, r_443_5228 = 0;
};
// byte fractions per well-known TCP server port and smoothed pairwise ratios
PortVolumeFeatures port_ratio_features(const std::vector<EnrichedSession>& sessions);

// ---------------------------------------------------------------------------
// dataset

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::string> subject_ids;
  std::vector<double> x;  // row-major n x d
  std::vector<int> y;     // indices into class_list
  std::vector<std::string> class_list;
  std::string label_name;

  int n() const { return static_cast<int>(subject_ids.size()); }
  int d() const { return static_cast<int>(feature_names.size()); }
  double at(int row, int col) const { return x[static_cast<size_t>(row) * d() + col]; }
};

// Missing aggregates take the column median over subjects where
// defined (0 when nowhere defined); rows sort by subject_id.
std::vector<SubjectRecord> impute_records(const std::vector<SubjectRecord>& records);

// imputation + matrix assembly for one target label
Dataset impute_and_assemble(const std::vector<SubjectRecord>& records,
                            const std::string& label_name, const FeatureSchema& schema);

// builds the matrix from already-imputed records
Dataset make_dataset(const std::vector<SubjectRecord>& imputed, const std::string& label_name,
                     const FeatureSchema& schema);

// dataset CSV: subject_id, canonical features, the ten label columns
std::string dataset_csv(const std::vector<SubjectRecord>& imputed, const FeatureSchema& schema);

struct LoadedDatasetCsv {
  std::vector<std::string> feature_names;
  std::vector<SubjectRecord> records;  // values all defined
};
LoadedDatasetCsv load_dataset_csv(const std::string& path);
Dataset dataset_from_loaded(const LoadedDatasetCsv& loaded, const std::string& label_name);

}  // namespace netprof
