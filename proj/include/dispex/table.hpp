#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dispex/pattern.hpp"
#include "dispex/tuple_set.hpp"

namespace dispex {

// Auxiliary attributes are loaded (usable in group patterns and as DAG
// confounders) but never mined as subpopulation or treatment predicates.
enum class AttributeKind { Immutable, Mutable, Outcome, Auxiliary };

AttributeKind parse_attribute_kind(std::string_view text);
std::string_view to_string(AttributeKind kind);

struct AttributeSchema {
  std::string name;
  std::vector<std::string> domain;
  AttributeKind kind = AttributeKind::Immutable;
};

// Raw, not-yet-encoded column. An empty optional is a missing cell.
struct RawColumn {
  std::string name;
  AttributeKind kind = AttributeKind::Immutable;
  std::vector<std::optional<std::string>> cells;
};

struct SchemaConfig {
  std::map<std::string, AttributeKind> kinds;
  int bins = 10;
};

// Columnar, dictionary-encoded table. Immutable after construction.
class Dataset {
 public:
  static constexpr std::int32_t kMissing = -1;

  Dataset(std::vector<AttributeSchema> schema, std::vector<std::vector<std::int32_t>> columns,
          std::string outcome_name, std::vector<double> outcome);

  // Encodes raw columns: numeric columns with more distinct values than
  // `bins` are equal-width binned, everything else is dictionary-encoded with
  // a sorted domain (numerically when every value parses as a number). Rows
  // with a missing outcome are dropped and counted.
  static Dataset build(std::vector<RawColumn> columns, std::string outcome_name,
                       std::vector<std::optional<double>> outcome, int bins);

  std::size_t size() const { return outcome_.size(); }
  const std::vector<AttributeSchema>& schema() const { return schema_; }
  const AttributeSchema& attribute(std::size_t i) const { return schema_[i]; }
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;
  std::int32_t code_of(std::size_t attr, std::string_view value) const;
  const std::vector<std::int32_t>& column(std::size_t attr) const { return columns_[attr]; }
  const std::string& outcome_name() const { return outcome_name_; }
  std::span<const double> outcome() const { return outcome_; }
  double max_abs_outcome() const { return max_abs_outcome_; }
  std::size_t dropped_rows() const { return dropped_rows_; }

  // Rows whose attribute `attr` equals domain value `code`.
  const TupleSet& item(std::size_t attr, std::int32_t code) const { return items_[attr][code]; }
  // Rows with a non-missing value for `attr`.
  const TupleSet& present(std::size_t attr) const { return present_[attr]; }
  TupleSet all() const { return TupleSet(size(), true); }

  std::vector<std::size_t> attributes_of_kind(AttributeKind kind) const;

 private:
  std::vector<AttributeSchema> schema_;
  std::vector<std::vector<std::int32_t>> columns_;
  std::string outcome_name_;
  std::vector<double> outcome_;
  double max_abs_outcome_ = 0.0;
  std::size_t dropped_rows_ = 0;
  std::map<std::string, std::size_t, std::less<>> by_name_;
  std::vector<std::vector<TupleSet>> items_;
  std::vector<TupleSet> present_;
};

struct BinnedColumn {
  std::vector<std::int32_t> codes;
  std::vector<std::string> labels;
};

// Equal-width binning: bin = floor((v - min) / width) clamped to
// [0, bins-1], width = (max - min) / bins. Labels are half-open intervals,
// the last one closed.
BinnedColumn bin_numeric(std::span<const double> values, int bins);

Dataset load_csv(const std::string& path, const SchemaConfig& config);
Dataset parse_csv(std::string_view text, const SchemaConfig& config);

// RFC-4180 record splitting (quoted fields, doubled quotes, CRLF).
std::vector<std::vector<std::string>> parse_csv_records(std::string_view text);

TupleSet evaluate_pattern(const Dataset& ds, const Pattern& p);
double group_average(const Dataset& ds, const TupleSet& ts);
double support_fraction(const Dataset& ds, const TupleSet& numerator);
double support_fraction(std::size_t numerator, std::size_t total);

}  // namespace dispex
