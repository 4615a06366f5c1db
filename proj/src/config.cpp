#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "dispex/errors.hpp"
#include "dispex/pipeline.hpp"

namespace dispex {

using nlohmann::json;

namespace {

std::string_view linkage_name(Linkage l) {
  switch (l) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
  }
  return "average";
}

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InputError(std::string("config field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "dataset",     "dag",          "attributes",
      "outcome",     "g1",           "g2",
      "mode",        "sigma",        "tau",
      "k",           "num_clusters", "alpha",
      "max_rows",    "beam_width",   "max_treatment_predicates",
      "min_arm",     "max_subpop_predicates", "bins",
      "workers",     "seed",         "selector",
      "linkage",     "exhaustive_treatments", "force_brute_force"};
  return keys;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw InputError("sigma must be in (0, 1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("tau must be in [0, 1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must be in (0, 1)");
  if (k == 0) throw InputError("k must be positive");
  if (num_clusters == 0) throw InputError("num_clusters must be positive");
  if (max_rows < 2) throw InputError("max_rows must be at least 2");
  if (beam_width == 0) throw InputError("beam_width must be positive");
  if (max_treatment_predicates == 0) throw InputError("max_treatment_predicates must be positive");
  if (min_arm == 0) throw InputError("min_arm must be positive");
  if (bins < 1) throw InputError("bins must be positive");
  if (workers < 0) throw InputError("workers must be non-negative");
  if (outcome.empty()) throw InputError("outcome is not set");
  if (g1.empty() || g2.empty()) throw InputError("both g1 and g2 must be set");
  Pattern::parse(g1);
  Pattern::parse(g2);
}

PipelineConfig config_from_json(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().count(key)) throw InputError("unknown config field '" + key + "'");
  }

  PipelineConfig c;
  if (j.contains("dataset")) c.dataset = resolve(get_field<std::string>(j, "dataset"), base_dir);
  if (j.contains("dag")) c.dag = resolve(get_field<std::string>(j, "dag"), base_dir);
  if (j.contains("attributes")) {
    const auto& a = j.at("attributes");
    if (!a.is_object()) throw InputError("config field 'attributes' must be an object");
    for (const auto& [name, kind] : a.items()) {
      if (!kind.is_string()) throw InputError("attribute kind for '" + name + "' must be a string");
      c.attributes[name] = parse_attribute_kind(kind.get<std::string>());
    }
  }
  if (j.contains("outcome")) c.outcome = get_field<std::string>(j, "outcome");
  if (j.contains("g1")) c.g1 = get_field<std::string>(j, "g1");
  if (j.contains("g2")) c.g2 = get_field<std::string>(j, "g2");
  if (j.contains("mode")) c.mode = parse_direction_mode(get_field<std::string>(j, "mode"));
  if (j.contains("sigma")) c.sigma = get_field<double>(j, "sigma");
  if (j.contains("tau")) c.tau = get_field<double>(j, "tau");
  if (j.contains("alpha")) c.alpha = get_field<double>(j, "alpha");
  if (j.contains("k")) c.k = get_count(j, "k");
  if (j.contains("num_clusters")) c.num_clusters = get_count(j, "num_clusters");
  if (j.contains("max_rows")) c.max_rows = get_count(j, "max_rows");
  if (j.contains("beam_width")) c.beam_width = get_count(j, "beam_width");
  if (j.contains("max_treatment_predicates"))
    c.max_treatment_predicates = get_count(j, "max_treatment_predicates");
  if (j.contains("min_arm")) c.min_arm = get_count(j, "min_arm");
  if (j.contains("max_subpop_predicates"))
    c.max_subpop_predicates = get_count(j, "max_subpop_predicates");
  if (j.contains("bins")) c.bins = static_cast<int>(get_count(j, "bins"));
  if (j.contains("workers")) c.workers = static_cast<int>(get_count(j, "workers"));
  if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("selector")) c.selector = parse_selector(get_field<std::string>(j, "selector"));
  if (j.contains("linkage")) c.linkage = parse_linkage(get_field<std::string>(j, "linkage"));
  if (j.contains("exhaustive_treatments"))
    c.exhaustive_treatments = get_field<bool>(j, "exhaustive_treatments");
  if (j.contains("force_brute_force"))
    c.force_brute_force = get_field<bool>(j, "force_brute_force");
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  return config_from_json(ss.str(), dir.empty() ? "." : dir);
}

// The worker count is deliberately absent: it must not change the report.
std::string config_to_json(const PipelineConfig& c) {
  json attrs = json::object();
  for (const auto& [name, kind] : c.attributes) attrs[name] = std::string(to_string(kind));
  json j{{"dataset", c.dataset},
         {"dag", c.dag},
         {"attributes", attrs},
         {"outcome", c.outcome},
         {"g1", c.g1},
         {"g2", c.g2},
         {"mode", std::string(to_string(c.mode))},
         {"sigma", c.sigma},
         {"tau", c.tau},
         {"k", c.k},
         {"num_clusters", c.num_clusters},
         {"alpha", c.alpha},
         {"max_rows", c.max_rows},
         {"beam_width", c.beam_width},
         {"max_treatment_predicates", c.max_treatment_predicates},
         {"min_arm", c.min_arm},
         {"max_subpop_predicates", c.max_subpop_predicates},
         {"bins", c.bins},
         {"seed", c.seed},
         {"selector", std::string(to_string(c.selector))},
         {"linkage", std::string(linkage_name(c.linkage))},
         {"exhaustive_treatments", c.exhaustive_treatments},
         {"force_brute_force", c.force_brute_force}};
  return j.dump();
}

}  // namespace dispex
