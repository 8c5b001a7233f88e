#include "pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "gazetteer.hpp"
#include "matcher.hpp"
#include "sentiment.hpp"

namespace edumine {

namespace fs = std::filesystem;

const std::set<std::string>& PipelineConfig::effective_allowlist() const {
  return allowlist.empty() ? default_country_allowlist() : allowlist;
}

std::vector<std::string> PipelineConfig::effective_report_countries() const {
  if (report_countries_set) return report_countries;
  return {"US", "IN", "GB", "CN", "PK", "IT", "AU", "SE", "JP", "BR"};
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("not a boolean: '" + v + "'");
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const std::int64_t n = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  }
}

Date parse_date_or_throw(const std::string& key, const std::string& v) {
  auto d = parse_date(v);
  if (!d) throw ConfigError("config key '" + key + "': not a date (YYYY-MM-DD): '" + v + "'");
  return *d;
}

}  // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "input")
    cfg.input = value;
  else if (key == "covid_lexicon")
    cfg.covid_lexicon = value;
  else if (key == "edu_lexicon")
    cfg.edu_lexicon = value;
  else if (key == "gazetteer")
    cfg.gazetteer = value;
  else if (key == "stoplist")
    cfg.stoplist = value;
  else if (key == "embeddings")
    cfg.embeddings = value;
  else if (key == "test_embedder_d")
    cfg.test_embedder_d = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "test_embedder_seed")
    cfg.test_embedder_seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "model")
    cfg.model = value;
  else if (key == "cases")
    cfg.cases = value;
  else if (key == "out_dir")
    cfg.out_dir = value;
  else if (key == "start")
    cfg.window.start = parse_date_or_throw(key, value);
  else if (key == "end")
    cfg.window.end = parse_date_or_throw(key, value);
  else if (key == "countries") {
    cfg.allowlist.clear();
    for (auto& c : split_csv(value)) cfg.allowlist.insert(c);
  } else if (key == "report_countries") {
    cfg.report_countries = split_csv(value);
    cfg.report_countries_set = true;
  } else if (key == "threads")
    cfg.threads = static_cast<int>(parse_int(key, value));
  else if (key == "strict")
    cfg.strict = parse_bool(value);
  else if (key == "dedup")
    cfg.dedup = parse_bool(value);
  else if (key == "min_name_len")
    cfg.min_name_len = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "min_country_records")
    cfg.min_country_records = parse_int(key, value);
  else
    throw ConfigError("unknown config key '" + key + "'");
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  PipelineConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_config_entry(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

std::uint64_t fnv1a64_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open for digest: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(fnv1a64_bytes(buf.str())));
  return out;
}

std::string StageArtifact::summary() const {
  std::ostringstream s;
  s << "stage=" << stage << " records=" << record_count;
  for (const auto& [k, v] : warnings) s << ' ' << k << '=' << v;
  s << " digest=" << digest;
  return s.str();
}

namespace {

// Deterministic fan-out: contiguous index blocks, results written in place.
template <typename F>
void parallel_for(std::size_t n, int threads, F f) {
  const int t = std::clamp(threads, 1, 64);
  if (t == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + t - 1) / t;
  for (int w = 0; w < t; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([=] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct CorpusLoad {
  std::vector<TweetRecord> records;
  std::int64_t malformed = 0;
  std::int64_t duplicates = 0;
  std::int64_t comments = 0;
};

CorpusLoad read_record_file(const std::string& path, bool dedup, bool strict) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path);
  CorpusLoad load;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      ++load.comments;
      continue;
    }
    ParseResult res = parse_record(line);
    if (!res.ok()) {
      if (strict)
        throw InputError(path + ":" + std::to_string(lineno) + ": " + res.error);
      ++load.malformed;
      continue;
    }
    if (dedup && !seen.insert(res.record->id).second) {
      ++load.duplicates;
      continue;
    }
    load.records.push_back(std::move(*res.record));
  }
  return load;
}

void sort_records(std::vector<TweetRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const TweetRecord& a, const TweetRecord& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
  });
}

std::string write_record_file(const std::vector<TweetRecord>& records, const std::string& path) {
  fs::create_directories(fs::path(path).parent_path());
  std::string bytes;
  for (const auto& r : records) {
    bytes += record_to_json(r);
    bytes += '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << bytes;
  out.close();
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64_bytes(bytes)));
  return hex;
}

std::string stage_path(const PipelineConfig& cfg, const char* name) {
  return (fs::path(cfg.out_dir) / name).string();
}

GazetteerIndex build_gazetteer(const PipelineConfig& cfg, GazetteerLoadStats* stats) {
  if (cfg.gazetteer.empty()) throw ConfigError("gazetteer path not configured");
  std::set<std::string> stop;
  if (!cfg.stoplist.empty()) stop = load_stoplist(cfg.stoplist);
  auto entries = load_geonames(cfg.gazetteer, cfg.effective_allowlist(), stop, cfg.min_name_len,
                               cfg.strict, stats);
  if (entries.empty()) throw InputError("empty gazetteer after filtering: " + cfg.gazetteer);
  return GazetteerIndex(std::move(entries));
}

}  // namespace

StageArtifact stage_filter(const PipelineConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("input path not configured");
  if (cfg.edu_lexicon.empty()) throw ConfigError("edu_lexicon path not configured");

  Lexicon covid;
  try {
    covid = cfg.covid_lexicon.empty() ? default_covid_lexicon()
                                      : load_lexicon(cfg.covid_lexicon, "covid");
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  Lexicon edu;
  try {
    edu = load_lexicon(cfg.edu_lexicon, "education");
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  const MatcherIndex covid_index(covid);
  const MatcherIndex edu_index(edu);

  CorpusLoad load = read_record_file(cfg.input, cfg.dedup, cfg.strict);
  std::vector<TopicalResult> topical(load.records.size());
  parallel_for(load.records.size(), cfg.threads, [&](std::size_t i) {
    const auto tokens = token_surfaces(tokenize(normalize_text(load.records[i].text)));
    topical[i] = is_topical(tokens, covid_index, edu_index);
  });

  std::vector<TweetRecord> kept;
  for (std::size_t i = 0; i < load.records.size(); ++i) {
    if (!topical[i].topical) continue;
    TweetRecord r = std::move(load.records[i]);
    for (const auto& m : topical[i].covid_matches) r.covid_matches.push_back(m.term);
    for (const auto& m : topical[i].edu_matches) r.edu_matches.push_back(m.term);
    kept.push_back(std::move(r));
  }
  sort_records(kept);

  StageArtifact art;
  art.stage = "filter";
  art.record_count = static_cast<std::int64_t>(kept.size());
  art.warnings["skipped_nontopical"] =
      static_cast<std::int64_t>(load.records.size() - kept.size());
  art.warnings["malformed"] = load.malformed;
  art.warnings["duplicates"] = load.duplicates;
  art.digest = write_record_file(kept, stage_path(cfg, "filtered.ndjson"));
  return art;
}

StageArtifact stage_geotag(const PipelineConfig& cfg) {
  GazetteerLoadStats gstats;
  const GazetteerIndex index = build_gazetteer(cfg, &gstats);

  CorpusLoad load = read_record_file(stage_path(cfg, "filtered.ndjson"), false, true);
  std::vector<GeoTag> tags(load.records.size());
  parallel_for(load.records.size(), cfg.threads, [&](std::size_t i) {
    const auto tokens = token_surfaces(tokenize(normalize_text(load.records[i].text)));
    tags[i] = resolve_location(tokens, index);
  });

  StageArtifact art;
  art.stage = "geotag";
  for (std::size_t i = 0; i < load.records.size(); ++i) {
    load.records[i].country = tags[i].country;
    load.records[i].ambiguous = tags[i].ambiguous;
    ++art.warnings[tags[i].country ? "located" : "unlocated"];
    if (tags[i].ambiguous) ++art.warnings["ambiguous"];
  }
  art.record_count = static_cast<std::int64_t>(load.records.size());
  art.warnings["gazetteer_bad_rows"] = static_cast<std::int64_t>(gstats.bad_rows);
  art.warnings.try_emplace("located", 0);
  art.warnings.try_emplace("unlocated", 0);
  art.digest = write_record_file(load.records, stage_path(cfg, "geotagged.ndjson"));
  return art;
}

StageArtifact stage_classify(const PipelineConfig& cfg) {
  if (cfg.model.empty()) throw ConfigError("model path not configured");
  if (cfg.embeddings.empty() && !cfg.test_embedder_d)
    throw ConfigError("either embeddings or test_embedder_d must be configured");
  if (!cfg.embeddings.empty() && cfg.test_embedder_d)
    throw ConfigError("embeddings and test_embedder_d are mutually exclusive");

  SentimentModel model;
  try {
    model = load_model(cfg.model);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }

  std::map<std::string, EmbeddingSequence> file_embeddings;
  if (!cfg.embeddings.empty()) {
    try {
      file_embeddings = load_embeddings(cfg.embeddings);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
    if (!file_embeddings.empty()) {
      const std::size_t d = file_embeddings.begin()->second.dim;
      if (d != model.dim)
        throw InputError("embedding dimension " + std::to_string(d) +
                         " does not match model dimension " + std::to_string(model.dim));
    }
  } else if (*cfg.test_embedder_d != model.dim) {
    throw InputError("test embedder dimension " + std::to_string(*cfg.test_embedder_d) +
                     " does not match model dimension " + std::to_string(model.dim));
  }

  CorpusLoad load = read_record_file(stage_path(cfg, "geotagged.ndjson"), false, true);
  std::vector<std::optional<int>> labels(load.records.size());
  std::vector<std::string> errors(load.records.size());
  parallel_for(load.records.size(), cfg.threads, [&](std::size_t i) {
    const TweetRecord& r = load.records[i];
    try {
      if (!cfg.embeddings.empty()) {
        auto it = file_embeddings.find(r.id);
        if (it == file_embeddings.end()) return;  // counted as missing below
        labels[i] = classify(it->second, model).label;
      } else {
        const auto tokens = token_surfaces(tokenize(normalize_text(r.text)));
        if (tokens.empty()) return;
        const auto seq = embed_for_tests(tokens, *cfg.test_embedder_d, cfg.test_embedder_seed);
        labels[i] = classify(seq, model).label;
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  StageArtifact art;
  art.stage = "classify";
  std::vector<TweetRecord> labeled;
  for (std::size_t i = 0; i < load.records.size(); ++i) {
    if (!errors[i].empty()) throw InputError("record '" + load.records[i].id + "': " + errors[i]);
    if (!labels[i]) {
      if (cfg.strict) throw InputError("no embedding for record '" + load.records[i].id + "'");
      ++art.warnings["missing_embedding"];
      continue;
    }
    TweetRecord r = std::move(load.records[i]);
    r.label = labels[i];
    ++art.warnings[*labels[i] == 1 ? "positive" : "negative"];
    labeled.push_back(std::move(r));
  }
  art.record_count = static_cast<std::int64_t>(labeled.size());
  art.warnings.try_emplace("positive", 0);
  art.warnings.try_emplace("negative", 0);
  art.digest = write_record_file(labeled, stage_path(cfg, "labeled.ndjson"));
  return art;
}

StageArtifact stage_aggregate(const PipelineConfig& cfg) {
  if (cfg.cases.empty()) throw ConfigError("cases path not configured");
  CorpusLoad load = read_record_file(stage_path(cfg, "labeled.ndjson"), false, true);

  ReportInputs inputs;
  inputs.window = cfg.window;
  inputs.report_countries = cfg.effective_report_countries();
  inputs.min_country_records = cfg.min_country_records;
  inputs.series = aggregate(load.records, cfg.window, &inputs.agg_stats);
  try {
    inputs.cases = load_case_series(cfg.cases, cfg.effective_allowlist(), cfg.window, cfg.strict,
                                    &inputs.case_stats);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  emit_report(inputs, cfg.out_dir);

  StageArtifact art;
  art.stage = "aggregate";
  art.record_count = inputs.agg_stats.topical_in_window;
  art.warnings["unlocated"] = inputs.agg_stats.unlocated;
  art.warnings["out_of_window"] = inputs.agg_stats.out_of_window;
  art.warnings["case_rows_rejected"] = static_cast<std::int64_t>(inputs.case_stats.rejected_rows);
  art.warnings["case_gap_days"] = static_cast<std::int64_t>(inputs.case_stats.gap_days);

  // Digest over every report file, in name order.
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cfg.out_dir)) {
    const std::string name = e.path().filename().string();
    if (name == "correlations.csv" || name == "summary.txt" || name.rfind("country_", 0) == 0)
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& p : files) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    all += p.filename().string();
    all += '\0';
    all += buf.str();
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a64_bytes(all)));
  art.digest = hex;
  return art;
}

std::vector<StageArtifact> stage_run(const PipelineConfig& cfg) {
  std::vector<StageArtifact> arts;
  arts.push_back(stage_filter(cfg));
  arts.push_back(stage_geotag(cfg));
  arts.push_back(stage_classify(cfg));
  arts.push_back(stage_aggregate(cfg));
  return arts;
}

StageArtifact stage_check(const PipelineConfig& cfg) {
  StageArtifact art;
  art.stage = "check";

  auto require_readable = [](const std::string& what, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw InputError(what + " not readable: " + path);
  };
  require_readable("input", cfg.input);
  require_readable("covid_lexicon", cfg.covid_lexicon);
  require_readable("edu_lexicon", cfg.edu_lexicon);
  require_readable("gazetteer", cfg.gazetteer);
  require_readable("stoplist", cfg.stoplist);
  require_readable("embeddings", cfg.embeddings);
  require_readable("model", cfg.model);
  require_readable("cases", cfg.cases);

  if (!cfg.input.empty()) {
    std::ifstream in(cfg.input);
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      ParseResult res = parse_record(line);
      if (!res.ok()) throw InputError("first corpus record invalid: " + res.error);
      ++art.record_count;
      break;
    }
  }
  if (!cfg.gazetteer.empty()) {
    std::ifstream in(cfg.gazetteer);
    std::string line;
    if (std::getline(in, line)) {
      const std::size_t tabs = static_cast<std::size_t>(std::count(line.begin(), line.end(), '\t'));
      if (tabs != 18)
        throw InputError("gazetteer first row has " + std::to_string(tabs + 1) +
                         " columns, expected 19");
    }
  }
  if (!cfg.cases.empty()) {
    std::ifstream in(cfg.cases);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "date,country,confirmed")
      throw InputError("case file header must be 'date,country,confirmed'");
  }
  if (cfg.window.start_day() > cfg.window.end_day())
    throw ConfigError("window start is after window end");
  if (!cfg.embeddings.empty() && cfg.test_embedder_d)
    throw ConfigError("embeddings and test_embedder_d are mutually exclusive");
  art.digest = "-";
  return art;
}

}  // namespace edumine
