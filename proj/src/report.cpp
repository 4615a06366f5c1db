#include "dispex/report.hpp"

#include <json.hpp>
#include <sstream>

#include "dispex/errors.hpp"
#include "dispex/util.hpp"

namespace dispex {

using nlohmann::json;

namespace {

json cate_json(const CateEstimate& c) {
  return json{{"value", c.value},         {"std_error", c.std_error},
              {"p_value", c.p_value},     {"n_treated", c.n_treated},
              {"n_control", c.n_control}, {"significant", c.significant}};
}

CateEstimate cate_from(const json& j) {
  CateEstimate c;
  c.value = j.at("value").get<double>();
  c.std_error = j.at("std_error").get<double>();
  c.p_value = j.at("p_value").get<double>();
  c.n_treated = j.at("n_treated").get<std::size_t>();
  c.n_control = j.at("n_control").get<std::size_t>();
  c.significant = j.at("significant").get<bool>();
  return c;
}

json optional_cate_json(const std::optional<CateEstimate>& c) {
  return c ? cate_json(*c) : json(nullptr);
}

std::optional<CateEstimate> optional_cate_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return cate_from(j);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

std::string cate_cell(const CateEstimate& c) {
  return fmt(c.value) + (c.significant ? "" : " (not significant)");
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

bool ExplanationReport::operator==(const ExplanationReport& o) const {
  return rows == o.rows && selector == o.selector && objective == o.objective &&
         note == o.note && config_echo == o.config_echo && seed == o.seed &&
         n_tuples == o.n_tuples && n_g1 == o.n_g1 && n_g2 == o.n_g2 &&
         global_avg_g1 == o.global_avg_g1 && global_avg_g2 == o.global_avg_g2 &&
         n_subpopulations == o.n_subpopulations && n_filtered == o.n_filtered &&
         n_candidates == o.n_candidates;
}

ReportFormat parse_report_format(const std::string& text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  throw InputError("unknown report format '" + text + "'");
}

std::string render_json(const ExplanationReport& r, bool include_timings) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(json{{"subpopulation", row.subpopulation},
                        {"treatment", row.treatment},
                        {"support", row.support},
                        {"avg_g1", row.avg_g1},
                        {"avg_g2", row.avg_g2},
                        {"cate_g1", cate_json(row.cate_g1)},
                        {"cate_g2", cate_json(row.cate_g2)},
                        {"global_cate_g1", optional_cate_json(row.global_cate_g1)},
                        {"global_cate_g2", optional_cate_json(row.global_cate_g2)},
                        {"delta", row.delta}});
  }
  json j{{"explanations", rows},
         {"selector", r.selector},
         {"objective", r.objective},
         {"note", r.note},
         {"config", r.config_echo.empty() ? json::object() : json::parse(r.config_echo)},
         {"seed", r.seed},
         {"n_tuples", r.n_tuples},
         {"n_g1", r.n_g1},
         {"n_g2", r.n_g2},
         {"global_avg_g1", r.global_avg_g1},
         {"global_avg_g2", r.global_avg_g2},
         {"n_subpopulations", r.n_subpopulations},
         {"n_filtered", r.n_filtered},
         {"n_candidates", r.n_candidates}};
  if (include_timings) {
    json t = json::array();
    for (const auto& s : r.timings) t.push_back(json{{"stage", s.stage}, {"seconds", s.seconds}});
    j["timings"] = t;
  }
  return j.dump(2) + "\n";
}

ExplanationReport parse_report_json(const std::string& text) {
  const auto j = json::parse(text);
  ExplanationReport r;
  for (const auto& row : j.at("explanations")) {
    ReportRow x;
    x.subpopulation = row.at("subpopulation").get<std::string>();
    x.treatment = row.at("treatment").get<std::string>();
    x.support = row.at("support").get<double>();
    x.avg_g1 = row.at("avg_g1").get<double>();
    x.avg_g2 = row.at("avg_g2").get<double>();
    x.cate_g1 = cate_from(row.at("cate_g1"));
    x.cate_g2 = cate_from(row.at("cate_g2"));
    x.global_cate_g1 = optional_cate_from(row.at("global_cate_g1"));
    x.global_cate_g2 = optional_cate_from(row.at("global_cate_g2"));
    x.delta = row.at("delta").get<double>();
    r.rows.push_back(std::move(x));
  }
  r.selector = j.at("selector").get<std::string>();
  r.objective = j.at("objective").get<double>();
  r.note = j.at("note").get<std::string>();
  const auto& echo = j.at("config");
  r.config_echo = echo.empty() ? std::string() : echo.dump();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.n_tuples = j.at("n_tuples").get<std::size_t>();
  r.n_g1 = j.at("n_g1").get<std::size_t>();
  r.n_g2 = j.at("n_g2").get<std::size_t>();
  r.global_avg_g1 = j.at("global_avg_g1").get<double>();
  r.global_avg_g2 = j.at("global_avg_g2").get<double>();
  r.n_subpopulations = j.at("n_subpopulations").get<std::size_t>();
  r.n_filtered = j.at("n_filtered").get<std::size_t>();
  r.n_candidates = j.at("n_candidates").get<std::size_t>();
  if (j.contains("timings")) {
    for (const auto& t : j.at("timings")) {
      r.timings.push_back({t.at("stage").get<std::string>(), t.at("seconds").get<double>()});
    }
  }
  return r;
}

std::string render_markdown(const ExplanationReport& r) {
  std::ostringstream os;
  os << "# Disparity explanations\n\n";
  os << "Groups: g1 avg " << fmt(r.global_avg_g1) << " (n=" << r.n_g1 << "), g2 avg "
     << fmt(r.global_avg_g2) << " (n=" << r.n_g2 << "); selector " << r.selector
     << ", objective " << fmt(r.objective, 6) << "\n\n";
  os << "| # | Subpopulation | Support | Avg g1 | Avg g2 | Treatment | CATE g1 | CATE g2 "
        "| Global CATE g1 | Global CATE g2 | Delta |\n";
  os << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  auto global_cell = [](const std::optional<CateEstimate>& c) {
    return c ? cate_cell(*c) : std::string("n/a");
  };
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& x = r.rows[i];
    os << "| " << i + 1 << " | " << md_escape(x.subpopulation) << " | " << fmt(x.support * 100, 1)
       << "% | " << fmt(x.avg_g1) << " | " << fmt(x.avg_g2) << " | " << md_escape(x.treatment)
       << " | " << cate_cell(x.cate_g1) << " | " << cate_cell(x.cate_g2) << " | "
       << global_cell(x.global_cate_g1) << " | " << global_cell(x.global_cate_g2) << " | "
       << fmt(x.delta, 6) << " |\n";
  }
  if (!r.note.empty()) os << "\nNote: " << r.note << "\n";
  return os.str();
}

std::string report_render(const ExplanationReport& r, ReportFormat format) {
  return format == ReportFormat::Json ? render_json(r) : render_markdown(r);
}

}  // namespace dispex
