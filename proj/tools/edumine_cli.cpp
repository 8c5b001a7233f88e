// Command-line front end; talks to the pipeline exclusively through the
// shared-library C API.
#include <CLI11.hpp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "edumine.h"

namespace {

struct Options {
  std::string config;
  std::vector<std::pair<std::string, std::string>> overrides;  // applied in flag order
};

void add_common(CLI::App* cmd, Options& opts) {
  cmd->add_option("--config", opts.config, "flat key = value config file");

  auto keyed = [&opts, cmd](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&opts, key](const std::string& v) { opts.overrides.emplace_back(key, v); }, help);
  };
  keyed("--input", "input", "NDJSON corpus (or upstream stage output directory input)");
  keyed("--covid-lexicon", "covid_lexicon", "COVID keyword file; defaults to the built-in six");
  keyed("--edu-lexicon", "edu_lexicon", "education dictionary file");
  keyed("--gazetteer", "gazetteer", "GeoNames dump (19-column TSV)");
  keyed("--stoplist", "stoplist", "place-name stoplist file");
  keyed("--embeddings", "embeddings", "precomputed embedding file");
  keyed("--model", "model", "sentiment model file");
  keyed("--cases", "cases", "daily case CSV (date,country,confirmed)");
  keyed("--out-dir", "out_dir", "output directory");
  keyed("--start", "start", "window start date (YYYY-MM-DD)");
  keyed("--end", "end", "window end date (YYYY-MM-DD)");
  keyed("--countries", "countries", "comma-separated ISO alpha-2 allowlist");
  keyed("--report-countries", "report_countries", "countries to report");
  keyed("--threads", "threads", "worker count (output is thread-count invariant)");
  keyed("--min-name-len", "min_name_len", "minimum gazetteer token length");
  keyed("--min-country-records", "min_country_records", "report threshold per country");

  cmd->add_option_function<std::string>(
      "--test-embedder",
      [&opts](const std::string& v) {
        // d=<int>,seed=<int>
        std::string d, seed;
        const auto comma = v.find(',');
        const std::string a = v.substr(0, comma);
        if (a.rfind("d=", 0) == 0) d = a.substr(2);
        if (comma != std::string::npos) {
          const std::string b = v.substr(comma + 1);
          if (b.rfind("seed=", 0) == 0) seed = b.substr(5);
        }
        if (d.empty()) throw CLI::ValidationError("--test-embedder expects d=<int>[,seed=<int>]");
        opts.overrides.emplace_back("test_embedder_d", d);
        opts.overrides.emplace_back("test_embedder_seed", seed.empty() ? "0" : seed);
      },
      "deterministic test embedder, d=<int>[,seed=<int>]");

  cmd->add_flag_function(
      "--strict", [&opts](std::int64_t) { opts.overrides.emplace_back("strict", "1"); },
      "abort on the first malformed record or row");
  cmd->add_flag_function(
      "--no-dedup", [&opts](std::int64_t) { opts.overrides.emplace_back("dedup", "0"); },
      "keep duplicate record ids");
}

int run_stage(const Options& opts, const std::string& stage) {
  std::unique_ptr<em_pipeline, decltype(&em_pipeline_free)> p(em_pipeline_new(),
                                                              &em_pipeline_free);
  if (!p) return EM_ERR_INTERNAL;
  if (!opts.config.empty()) {
    if (em_status st = em_pipeline_load_config(p.get(), opts.config.c_str()); st != EM_OK) {
      std::fprintf(stderr, "error: %s\n", em_pipeline_error(p.get()));
      return st;
    }
  }
  for (const auto& [key, value] : opts.overrides) {
    if (em_status st = em_pipeline_set(p.get(), key.c_str(), value.c_str()); st != EM_OK) {
      std::fprintf(stderr, "error: %s\n", em_pipeline_error(p.get()));
      return st;
    }
  }
  const em_status st = em_pipeline_run_stage(p.get(), stage.c_str());
  if (st != EM_OK) {
    std::fprintf(stderr, "error: %s\n", em_pipeline_error(p.get()));
    return st;
  }
  std::fputs(em_pipeline_summary(p.get()), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"COVID/education tweet mining pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", em_version());

  Options opts;
  std::string chosen;
  for (const char* name : {"filter", "geotag", "classify", "aggregate", "run", "check"}) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common(cmd, opts);
    cmd->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : EM_ERR_CONFIG;
  }
  return run_stage(opts, chosen);
}
