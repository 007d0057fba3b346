#include "netprof/subject_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "netprof/util.hpp"

#include "json.hpp"

namespace netprof {

using nlohmann::json;

// ---------------------------------------------------------------------------
// labels

const std::vector<LabelDef>& label_schema() {
  static const std::vector<std::string> kSkill = {"Never", "Basic Experience",
                                                  "Hands-On Experience"};
  static const std::vector<LabelDef> defs = {
      {"age_group", {"18-24", "25-30", "31+"}},
      {"gender", {"Male", "Female"}},
      {"education", {"Higher Education", "High-School"}},
      {"faculty", {"Natural Sciences", "Humanities", "Engineering"}},
      {"smokes", {"Yes", "No"}},
      {"setup_new_os", kSkill},
      {"setup_wifi", kSkill},
      {"wrote_program", kSkill},
      {"formatted_computer", kSkill},
      {"built_website", kSkill},
  };
  return defs;
}

const LabelDef& label_def(const std::string& name) {
  for (const auto& d : label_schema())
    if (d.name == name) return d;
  throw std::invalid_argument("unknown label: " + name);
}

void validate_labels(const LabelSet& labels) {
  for (const auto& d : label_schema()) {
    auto it = labels.find(d.name);
    if (it == labels.end())
      throw LabelsMissingError("missing label '" + d.name + "'");
    if (std::find(d.classes.begin(), d.classes.end(), it->second) == d.classes.end())
      throw LabelsMissingError("label '" + d.name + "' has undeclared class '" + it->second + "'");
  }
}

std::string labels_csv_header() {
  std::string h = "subject_id";
  for (const auto& d : label_schema()) h += "," + d.name;
  return h;
}

std::map<std::string, LabelSet> load_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LabelsMissingError("cannot open labels file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw LabelsMissingError("labels file empty: " + path);
  auto header = csv_parse_line(line);
  std::map<std::string, int> col;
  for (size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = static_cast<int>(i);
  if (!col.count("subject_id")) throw LabelsMissingError("labels file lacks subject_id column");
  for (const auto& d : label_schema())
    if (!col.count(d.name)) throw LabelsMissingError("labels file lacks column '" + d.name + "'");

  std::map<std::string, LabelSet> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = csv_parse_line(line);
    if (cells.size() < header.size())
      throw LabelsMissingError("short labels row: " + line);
    std::string sid = cells[col["subject_id"]];
    LabelSet ls;
    for (const auto& d : label_schema()) ls[d.name] = cells[col[d.name]];
    validate_labels(ls);
    if (!out.emplace(sid, std::move(ls)).second)
      throw LabelsMissingError("duplicate subject in labels file: " + sid);
  }
  return out;
}

// ---------------------------------------------------------------------------
// feature schema

namespace {

struct NumericDef {
  const char* name;
  // pulls the per-session value; nullopt when undefined for the session
  std::optional<double> (*get)(const EnrichedSession&);
};

std::optional<double> num_or_none(bool defined, double v) {
  if (!defined) return std::nullopt;
  return v;
}

const std::vector<NumericDef>& numeric_defs() {
  static const std::vector<NumericDef> defs = {
      {"stat.tx_pkt_max", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.tx_pkt_max); }},
      {"stat.tx_pkt_min", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.tx_pkt_min); }},
      {"stat.tx_pkt_mean", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.tx_pkt_mean); }},
      {"stat.tx_pkt_median", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.tx_pkt_median); }},
      {"stat.tx_pkt_var", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.tx_pkt_var); }},
      {"stat.rx_pkt_max", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.rx_pkt_max); }},
      {"stat.rx_pkt_min", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.rx_pkt_min); }},
      {"stat.rx_pkt_mean", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.rx_pkt_mean); }},
      {"stat.rx_pkt_median", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.rx_pkt_median); }},
      {"stat.rx_pkt_var", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.rx_pkt_var); }},
      {"stat.bytes_total", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.bytes_total); }},
      {"stat.bytes_tx", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.bytes_tx); }},
      {"stat.bytes_rx", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.bytes_rx); }},
      {"stat.tx_rx_ratio", [](const EnrichedSession& s) { return num_or_none(true, s.features.stat.tx_rx_ratio); }},
      {"app.cookie_count",
       [](const EnrichedSession& s) -> std::optional<double> {
         if (s.features.app && s.features.app->cookie_count)
           return static_cast<double>(*s.features.app->cookie_count);
         return std::nullopt;
       }},
      {"dpi.form_count",
       [](const EnrichedSession& s) -> std::optional<double> {
         if (s.features.dpi) return static_cast<double>(s.features.dpi->form_count);
         return std::nullopt;
       }},
      {"dpi.download_count",
       [](const EnrichedSession& s) -> std::optional<double> {
         if (s.features.dpi) return static_cast<double>(s.features.dpi->downloaded_file_count);
         return std::nullopt;
       }},
      {"domain.pop_log10",
       [](const EnrichedSession& s) -> std::optional<double> {
         if (s.domain && s.domain->popularity_rank)
           return std::log10(static_cast<double>(std::max<int64_t>(*s.domain->popularity_rank, 1)));
         return std::nullopt;
       }},
      {"domain.score_good_site",
       [](const EnrichedSession& s) -> std::optional<double> {
         if (s.domain && s.domain->score_good_site) return *s.domain->score_good_site;
         return std::nullopt;
       }},
      {"domain.score_trustworthiness",
       [](const EnrichedSession& s) -> std::optional<double> {
         if (s.domain && s.domain->score_trustworthiness) return *s.domain->score_trustworthiness;
         return std::nullopt;
       }},
      {"domain.score_child_safety",
       [](const EnrichedSession& s) -> std::optional<double> {
         if (s.domain && s.domain->score_child_safety) return *s.domain->score_child_safety;
         return std::nullopt;
       }},
  };
  return defs;
}

std::optional<bool> tri_to_bool(TriState t) {
  if (t == TriState::UNKNOWN) return std::nullopt;
  return t == TriState::TRUE_;
}

struct BoolDef {
  const char* name;
  std::optional<bool> (*get)(const EnrichedSession&);
};

const std::vector<BoolDef>& bool_defs() {
  static const std::vector<BoolDef> defs = {
      {"app.cert_expired",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.features.app && s.features.app->protocol == AppProtocol::HTTPS)
           return tri_to_bool(s.features.app->cert_expired);
         return std::nullopt;
       }},
      {"app.cert_self_signed",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.features.app && s.features.app->protocol == AppProtocol::HTTPS)
           return tri_to_bool(s.features.app->cert_self_signed);
         return std::nullopt;
       }},
      {"dpi.has_email_field",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.features.dpi) return s.features.dpi->has_email_field;
         return std::nullopt;
       }},
      {"dpi.has_username_field",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.features.dpi) return s.features.dpi->has_username_field;
         return std::nullopt;
       }},
      {"dpi.has_password_field",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.features.dpi) return s.features.dpi->has_password_field;
         return std::nullopt;
       }},
      {"domain.flag_scam",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.domain) return s.domain->flag_scam;
         return std::nullopt;
       }},
      {"domain.flag_spam",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.domain) return s.domain->flag_spam;
         return std::nullopt;
       }},
      {"domain.flag_malware_or_viruses",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.domain) return s.domain->flag_malware_or_viruses;
         return std::nullopt;
       }},
      {"domain.flag_privacy_risks",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.domain) return s.domain->flag_privacy_risks;
         return std::nullopt;
       }},
      {"domain.flag_phishing",
       [](const EnrichedSession& s) -> std::optional<bool> {
         if (s.domain) return s.domain->flag_phishing;
         return std::nullopt;
       }},
  };
  return defs;
}

struct NominalDef {
  std::string attr;                  // e.g. "app.protocol"
  std::vector<std::string> classes;  // fixed order
};

std::optional<std::string> nominal_value(const EnrichedSession& s, const std::string& attr) {
  if (attr == "app.protocol") {
    if (s.features.app) return std::string(app_protocol_name(s.features.app->protocol));
    return std::nullopt;
  }
  if (attr == "app.tls_version") {
    if (s.features.app && s.features.app->tls_version)
      return std::string(tls_version_name(*s.features.app->tls_version));
    return std::nullopt;
  }
  if (attr == "app.os_version") {
    if (s.features.app && s.features.app->os_version) return *s.features.app->os_version;
    return std::nullopt;
  }
  if (attr == "app.content_type") {
    if (s.features.app && s.features.app->content_type) return *s.features.app->content_type;
    return std::nullopt;
  }
  if (attr == "domain.category") {
    if (s.domain) return s.domain->general_category;
    return std::nullopt;
  }
  return std::nullopt;
}

std::vector<NominalDef> nominal_defs(const FeatureSchema& schema) {
  std::vector<NominalDef> defs;
  defs.push_back({"app.protocol", {"HTTP", "HTTPS", "OTHER"}});
  defs.push_back({"app.tls_version", {"SSL3", "TLS1_0", "TLS1_1", "TLS1_2", "UNKNOWN"}});
  defs.push_back({"app.os_version", schema.os_versions()});
  defs.push_back({"app.content_type", schema.content_types()});
  std::vector<std::string> cats = schema.categories();
  if (std::find(cats.begin(), cats.end(), "UNKNOWN") == cats.end()) cats.push_back("UNKNOWN");
  defs.push_back({"domain.category", cats});
  return defs;
}

const char* kAggSuffix[4] = {".avg", ".median", ".min", ".max"};
const char* kPortNames[6] = {"port.frac_80",  "port.frac_443",  "port.frac_5228",
                             "port.r_80_443", "port.r_80_5228", "port.r_443_5228"};

}  // namespace

FeatureSchema FeatureSchema::build(const std::vector<std::string>& categories,
                                   const std::vector<std::string>& os_versions,
                                   const std::vector<std::string>& content_types) {
  FeatureSchema s;
  s.categories_ = categories;
  std::sort(s.categories_.begin(), s.categories_.end());
  s.os_versions_ = os_versions;
  std::sort(s.os_versions_.begin(), s.os_versions_.end());
  s.content_types_ = content_types;
  std::sort(s.content_types_.begin(), s.content_types_.end());

  for (const auto& d : numeric_defs())
    for (const char* suffix : kAggSuffix) s.names_.push_back(std::string(d.name) + suffix);
  for (const auto& d : bool_defs()) s.names_.push_back(std::string(d.name) + ".mean");
  for (const auto& nd : nominal_defs(s))
    for (const auto& cls : nd.classes) s.names_.push_back(nd.attr + "." + cls);
  for (const char* p : kPortNames) s.names_.push_back(p);

  for (size_t i = 0; i < s.names_.size(); ++i) s.index_[s.names_[i]] = static_cast<int>(i);
  return s;
}

int FeatureSchema::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("unknown feature: " + name);
  return it->second;
}

std::string FeatureSchema::category_of(const std::string& feature_name) {
  if (feature_name.rfind("domain.", 0) == 0) return "domain";
  if (feature_name.rfind("dpi.", 0) == 0) return "deep_packet_inspection";
  if (feature_name.rfind("app.", 0) == 0) return "application_layer";
  return "statistical";  // stat.* and port.* volume features
}

std::string FeatureSchema::to_json() const {
  json j{{"schema_version", 1},
         {"names", names_},
         {"categories", categories_},
         {"os_versions", os_versions_},
         {"content_types", content_types_}};
  return j.dump(2) + "\n";
}

FeatureSchema FeatureSchema::from_json(const std::string& text) {
  json j = json::parse(text);
  return build(j.at("categories").get<std::vector<std::string>>(),
               j.at("os_versions").get<std::vector<std::string>>(),
               j.at("content_types").get<std::vector<std::string>>());
}

// ---------------------------------------------------------------------------
// aggregation

namespace {

double median_of_sorted(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

PortVolumeFeatures port_ratio_features(const std::vector<EnrichedSession>& sessions) {
  double total = 0, b80 = 0, b443 = 0, b5228 = 0;
  for (const auto& s : sessions) {
    total += s.features.bytes_total;
    if (s.features.transport == Transport::TCP) {
      if (s.features.server_port == 80) b80 += s.features.bytes_total;
      else if (s.features.server_port == 443) b443 += s.features.bytes_total;
      else if (s.features.server_port == 5228) b5228 += s.features.bytes_total;
    }
  }
  PortVolumeFeatures f;
  if (total > 0) {
    f.frac_80 = b80 / total;
    f.frac_443 = b443 / total;
    f.frac_5228 = b5228 / total;
  }
  f.r_80_443 = b80 / std::max(b443, 1.0);
  f.r_80_5228 = b80 / std::max(b5228, 1.0);
  f.r_443_5228 = b443 / std::max(b5228, 1.0);
  return f;
}

SubjectRecord aggregate_subject(const std::vector<EnrichedSession>& sessions,
                                const std::string& subject_id, const LabelSet& labels,
                                const FeatureSchema& schema) {
  if (sessions.empty()) throw EmptyInputError("no sessions for subject " + subject_id);

  SubjectRecord rec;
  rec.subject_id = subject_id;
  rec.labels = labels;
  rec.session_count = static_cast<int>(sessions.size());
  rec.values.assign(schema.names().size(), std::nullopt);

  size_t idx = 0;
  for (const auto& def : numeric_defs()) {
    std::vector<double> vals;
    for (const auto& s : sessions)
      if (auto v = def.get(s)) vals.push_back(*v);
    if (!vals.empty()) {
      double sum = 0, mn = vals[0], mx = vals[0];
      for (double v : vals) {
        sum += v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      rec.values[idx + 0] = sum / static_cast<double>(vals.size());
      rec.values[idx + 1] = median_of_sorted(vals);
      rec.values[idx + 2] = mn;
      rec.values[idx + 3] = mx;
    }
    idx += 4;
  }

  for (const auto& def : bool_defs()) {
    int defined = 0, truthy = 0;
    for (const auto& s : sessions) {
      if (auto v = def.get(s)) {
        ++defined;
        if (*v) ++truthy;
      }
    }
    if (defined > 0)
      rec.values[idx] = static_cast<double>(truthy) / static_cast<double>(defined);
    ++idx;
  }

  for (const auto& nd : nominal_defs(schema)) {
    int defined = 0;
    std::map<std::string, int> counts;
    for (const auto& s : sessions) {
      if (auto v = nominal_value(s, nd.attr)) {
        ++defined;
        counts[*v]++;
      }
    }
    for (const auto& cls : nd.classes) {
      // incidence over sessions where the attribute is defined; an
      // attribute absent from every session contributes zeros
      double inc = 0;
      if (defined > 0) {
        auto it = counts.find(cls);
        inc = it == counts.end() ? 0.0
                                 : static_cast<double>(it->second) / static_cast<double>(defined);
      }
      rec.values[idx++] = inc;
    }
  }

  PortVolumeFeatures pf = port_ratio_features(sessions);
  const double pv[6] = {pf.frac_80, pf.frac_443, pf.frac_5228,
                        pf.r_80_443, pf.r_80_5228, pf.r_443_5228};
  for (double v : pv) rec.values[idx++] = v;

  return rec;
}

// ---------------------------------------------------------------------------
// imputation + dataset

std::vector<SubjectRecord> impute_records(const std::vector<SubjectRecord>& records) {
  if (records.empty()) return {};
  std::vector<SubjectRecord> out = records;
  std::sort(out.begin(), out.end(),
            [](const SubjectRecord& a, const SubjectRecord& b) { return a.subject_id < b.subject_id; });
  size_t d = out[0].values.size();
  for (const auto& r : out)
    if (r.values.size() != d) throw std::invalid_argument("ragged subject records");

  for (size_t c = 0; c < d; ++c) {
    std::vector<double> defined;
    for (const auto& r : out)
      if (r.values[c]) defined.push_back(*r.values[c]);
    double fill = 0.0;
    if (!defined.empty()) fill = median_of_sorted(defined);
    for (auto& r : out)
      if (!r.values[c]) r.values[c] = fill;
  }
  return out;
}

Dataset make_dataset(const std::vector<SubjectRecord>& imputed, const std::string& label_name,
                     const FeatureSchema& schema) {
  if (imputed.size() < 2) throw EmptyInputError("need at least 2 subjects");
  const LabelDef& def = label_def(label_name);

  Dataset ds;
  ds.feature_names = schema.names();
  ds.label_name = label_name;

  std::set<std::string> seen;
  for (const auto& r : imputed) {
    auto it = r.labels.find(label_name);
    if (it == r.labels.end()) throw LabelsMissingError("subject lacks label " + label_name);
    seen.insert(it->second);
  }
  for (const auto& cls : def.classes)
    if (seen.count(cls)) ds.class_list.push_back(cls);
  if (ds.class_list.size() < 2)
    throw DegenerateLabelError("label '" + label_name + "' has a single class");

  for (const auto& r : imputed) {
    ds.subject_ids.push_back(r.subject_id);
    for (const auto& v : r.values) {
      if (!v || !std::isfinite(*v)) throw std::invalid_argument("non-finite feature value");
      ds.x.push_back(*v);
    }
    const std::string& cls = r.labels.at(label_name);
    ds.y.push_back(static_cast<int>(
        std::find(ds.class_list.begin(), ds.class_list.end(), cls) - ds.class_list.begin()));
  }
  return ds;
}

Dataset impute_and_assemble(const std::vector<SubjectRecord>& records,
                            const std::string& label_name, const FeatureSchema& schema) {
  return make_dataset(impute_records(records), label_name, schema);
}

std::string dataset_csv(const std::vector<SubjectRecord>& imputed, const FeatureSchema& schema) {
  std::string out = "subject_id";
  for (const auto& name : schema.names()) out += "," + csv_escape(name);
  for (const auto& d : label_schema()) out += "," + d.name;
  out += '\n';
  for (const auto& r : imputed) {
    out += csv_escape(r.subject_id);
    for (const auto& v : r.values) {
      out += ',';
      out += fmt_double(v ? *v : 0.0);
    }
    for (const auto& d : label_schema()) out += "," + csv_escape(r.labels.at(d.name));
    out += '\n';
  }
  return out;
}

LoadedDatasetCsv load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset: " + path);
  auto header = csv_parse_line(line);
  size_t n_labels = label_schema().size();
  if (header.size() < 2 + n_labels || header[0] != "subject_id")
    throw std::runtime_error("bad dataset header");
  size_t d = header.size() - 1 - n_labels;

  LoadedDatasetCsv out;
  out.feature_names.assign(header.begin() + 1, header.begin() + 1 + d);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = csv_parse_line(line);
    if (cells.size() != header.size()) throw std::runtime_error("ragged dataset row");
    SubjectRecord r;
    r.subject_id = cells[0];
    for (size_t i = 0; i < d; ++i) r.values.push_back(std::stod(cells[1 + i]));
    size_t li = 1 + d;
    for (const auto& ld : label_schema()) r.labels[ld.name] = cells[li++];
    validate_labels(r.labels);
    out.records.push_back(std::move(r));
  }
  return out;
}

Dataset dataset_from_loaded(const LoadedDatasetCsv& loaded, const std::string& label_name) {
  if (loaded.records.size() < 2) throw EmptyInputError("need at least 2 subjects");
  const LabelDef& def = label_def(label_name);
  Dataset ds;
  ds.feature_names = loaded.feature_names;
  ds.label_name = label_name;
  std::set<std::string> seen;
  for (const auto& r : loaded.records) seen.insert(r.labels.at(label_name));
  for (const auto& cls : def.classes)
    if (seen.count(cls)) ds.class_list.push_back(cls);
  if (ds.class_list.size() < 2)
    throw DegenerateLabelError("label '" + label_name + "' has a single class");
  for (const auto& r : loaded.records) {
    ds.subject_ids.push_back(r.subject_id);
    for (const auto& v : r.values) ds.x.push_back(v ? *v : 0.0);
    const std::string& cls = r.labels.at(label_name);
    ds.y.push_back(static_cast<int>(
        std::find(ds.class_list.begin(), ds.class_list.end(), cls) - ds.class_list.begin()));
  }
  return ds;
}

}  // namespace netprof
