#include "edumine.h"

#include <sstream>
#include <string>

#include "pipeline.hpp"

struct em_pipeline {
  edumine::PipelineConfig config;
  std::string error;
  std::string summary;
};

namespace {

em_status guarded(em_pipeline* p, auto fn) {
  if (!p) return EM_ERR_CONFIG;
  p->error.clear();
  try {
    fn();
    return EM_OK;
  } catch (const edumine::ConfigError& e) {
    p->error = e.what();
    return EM_ERR_CONFIG;
  } catch (const edumine::InputError& e) {
    p->error = e.what();
    return EM_ERR_INPUT;
  } catch (const std::exception& e) {
    p->error = e.what();
    return EM_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* em_version(void) { return "0.1.0"; }

em_pipeline* em_pipeline_new(void) { return new (std::nothrow) em_pipeline(); }

void em_pipeline_free(em_pipeline* p) { delete p; }

em_status em_pipeline_load_config(em_pipeline* p, const char* path) {
  return guarded(p, [&] {
    if (!path) throw edumine::ConfigError("null config path");
    p->config = edumine::load_config(path);
  });
}

em_status em_pipeline_set(em_pipeline* p, const char* key, const char* value) {
  return guarded(p, [&] {
    if (!key || !value) throw edumine::ConfigError("null key or value");
    edumine::apply_config_entry(p->config, key, value);
  });
}

em_status em_pipeline_run_stage(em_pipeline* p, const char* stage) {
  return guarded(p, [&] {
    if (!stage) throw edumine::ConfigError("null stage name");
    const std::string s = stage;
    std::ostringstream out;
    if (s == "filter")
      out << edumine::stage_filter(p->config).summary() << '\n';
    else if (s == "geotag")
      out << edumine::stage_geotag(p->config).summary() << '\n';
    else if (s == "classify")
      out << edumine::stage_classify(p->config).summary() << '\n';
    else if (s == "aggregate")
      out << edumine::stage_aggregate(p->config).summary() << '\n';
    else if (s == "check")
      out << edumine::stage_check(p->config).summary() << '\n';
    else if (s == "run")
      for (const auto& art : edumine::stage_run(p->config)) out << art.summary() << '\n';
    else
      throw edumine::ConfigError("unknown stage '" + s + "'");
    p->summary = out.str();
  });
}

const char* em_pipeline_error(const em_pipeline* p) { return p ? p->error.c_str() : ""; }

const char* em_pipeline_summary(const em_pipeline* p) { return p ? p->summary.c_str() : ""; }

}  // extern "C"
