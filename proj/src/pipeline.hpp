#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "trend.hpp"

namespace edumine {

// exit-code contract: 0 ok, 1 usage/config, 2 input data, 3 internal
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::string input;
  std::string covid_lexicon;  // empty -> built-in six keywords
  std::string edu_lexicon;
  std::string gazetteer;
  std::string stoplist;
  std::string embeddings;  // mutually exclusive with test_embedder_d
  std::optional<std::size_t> test_embedder_d;
  std::uint64_t test_embedder_seed = 0;
  std::string model;
  std::string cases;
  std::string out_dir = "out";
  WindowConfig window;
  std::set<std::string> allowlist;            // empty -> 32-country default
  std::vector<std::string> report_countries;  // empty at load -> built-in ten
  bool report_countries_set = false;
  bool strict = false;
  bool dedup = true;
  int threads = 1;
  std::size_t min_name_len = 3;
  std::int64_t min_country_records = 0;

  const std::set<std::string>& effective_allowlist() const;
  std::vector<std::string> effective_report_countries() const;
};

// Flat "key = value" file, '#' comments. Unknown keys are a ConfigError.
PipelineConfig load_config(const std::string& path);
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);

struct StageArtifact {
  std::string stage;
  std::int64_t record_count = 0;
  std::map<std::string, std::int64_t> warnings;
  std::string digest;  // fnv1a64 hex of the stage output

  std::string summary() const;
};

// Stage outputs land in out_dir as filtered.ndjson / geotagged.ndjson /
// labeled.ndjson, then the report files.
StageArtifact stage_filter(const PipelineConfig& cfg);
StageArtifact stage_geotag(const PipelineConfig& cfg);
StageArtifact stage_classify(const PipelineConfig& cfg);
StageArtifact stage_aggregate(const PipelineConfig& cfg);
std::vector<StageArtifact> stage_run(const PipelineConfig& cfg);
StageArtifact stage_check(const PipelineConfig& cfg);

std::uint64_t fnv1a64_bytes(const std::string& bytes);
std::string digest_file(const std::string& path);

}  // namespace edumine
