#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dispex/cate.hpp"

namespace dispex {

struct ReportRow {
  std::string subpopulation;
  std::string treatment;
  double support = 0.0;
  double avg_g1 = 0.0;
  double avg_g2 = 0.0;
  CateEstimate cate_g1;
  CateEstimate cate_g2;
  // Treatment effect over the full g1 / g2 slices; empty when not estimable.
  std::optional<CateEstimate> global_cate_g1;
  std::optional<CateEstimate> global_cate_g2;
  double delta = 0.0;

  bool operator==(const ReportRow&) const = default;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct ExplanationReport {
  std::vector<ReportRow> rows;  // delta descending
  std::string selector;
  double objective = 0.0;
  std::string note;
  std::string config_echo;  // canonical JSON of the run-relevant config
  std::uint64_t seed = 0;
  std::size_t n_tuples = 0;
  std::size_t n_g1 = 0;
  std::size_t n_g2 = 0;
  double global_avg_g1 = 0.0;
  double global_avg_g2 = 0.0;
  std::size_t n_subpopulations = 0;
  std::size_t n_filtered = 0;
  std::size_t n_candidates = 0;
  std::vector<StageTiming> timings;  // not part of the canonical JSON

  // Equality over everything except timings.
  bool operator==(const ExplanationReport& o) const;
};

enum class ReportFormat { Json, Markdown };

ReportFormat parse_report_format(const std::string& text);

// JSON keys are emitted in sorted order; timings only when requested.
std::string render_json(const ExplanationReport& r, bool include_timings = false);
std::string render_markdown(const ExplanationReport& r);
std::string report_render(const ExplanationReport& r, ReportFormat format);

ExplanationReport parse_report_json(const std::string& text);

}  // namespace dispex
