#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace netprof {

struct InvalidSpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A planted association between a label class and one feature family;
// effect_size 0 means no association, 1 a strong one.
struct PlantedEffect {
  std::string label;
  std::string klass;
  std::string family;  // domain | statistical | dpi | application
  double effect_size = 0.0;
};

struct SynthSpec {
  int n_subjects = 20;
  int sessions_min = 20;
  int sessions_max = 40;
  std::vector<PlantedEffect> effects;
  uint64_t seed = 1;
};

struct SynthOutput {
  std::vector<std::string> capture_paths;
  std::string subject_map_path;
  std::string labels_path;
  std::string fixtures_path;
  std::string taxonomy_path;
  std::string sidecar_path;  // ground-truth per-session values
};

// Emits per-subject pcap files with HTTP/TLS/UDP sessions whose
// distributions shift by the planted effects, plus the labels CSV,
// subject map, fixture store, taxonomy file and a per-session truth
// sidecar. Deterministic under spec.seed.
SynthOutput synth_generate(const SynthSpec& spec, const std::string& out_dir);

// the shipped source-label -> canonical-category table
std::string default_taxonomy_tsv();

}  // namespace netprof
