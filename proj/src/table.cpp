#include "dispex/table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dispex/errors.hpp"
#include "dispex/util.hpp"

namespace dispex {

AttributeKind parse_attribute_kind(std::string_view text) {
  if (text == "immutable") return AttributeKind::Immutable;
  if (text == "mutable") return AttributeKind::Mutable;
  if (text == "outcome") return AttributeKind::Outcome;
  if (text == "auxiliary") return AttributeKind::Auxiliary;
  throw InputError("unknown attribute kind '" + std::string(text) + "'");
}

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Immutable: return "immutable";
    case AttributeKind::Mutable: return "mutable";
    case AttributeKind::Outcome: return "outcome";
    case AttributeKind::Auxiliary: return "auxiliary";
  }
  return "?";
}

Dataset::Dataset(std::vector<AttributeSchema> schema,
                 std::vector<std::vector<std::int32_t>> columns, std::string outcome_name,
                 std::vector<double> outcome)
    : schema_(std::move(schema)),
      columns_(std::move(columns)),
      outcome_name_(std::move(outcome_name)),
      outcome_(std::move(outcome)) {
  const std::size_t n = outcome_.size();
  if (n == 0) throw InputError("dataset is empty");
  if (columns_.size() != schema_.size()) throw InputError("schema/column count mismatch");
  for (std::size_t a = 0; a < schema_.size(); ++a) {
    const auto& s = schema_[a];
    if (s.kind == AttributeKind::Outcome) {
      throw InputError("outcome '" + s.name + "' must not appear among the attributes");
    }
    if (s.name == outcome_name_) throw InputError("attribute shadows outcome '" + s.name + "'");
    if (!by_name_.emplace(s.name, a).second) {
      throw InputError("duplicate attribute '" + s.name + "'");
    }
    std::set<std::string> seen;
    for (const auto& v : s.domain) {
      if (v.empty()) throw InputError("empty domain value in '" + s.name + "'");
      if (!seen.insert(v).second) throw InputError("duplicate domain value in '" + s.name + "'");
    }
    if (columns_[a].size() != n) throw InputError("column '" + s.name + "' has wrong length");
  }

  items_.resize(schema_.size());
  present_.resize(schema_.size());
  for (std::size_t a = 0; a < schema_.size(); ++a) {
    const auto dom = static_cast<std::int32_t>(schema_[a].domain.size());
    items_[a].assign(schema_[a].domain.size(), TupleSet(n));
    present_[a] = TupleSet(n);
    const auto& col = columns_[a];
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = col[i];
      if (c == kMissing) continue;
      if (c < 0 || c >= dom) throw InputError("code out of domain in '" + schema_[a].name + "'");
      items_[a][static_cast<std::size_t>(c)].insert(i);
      present_[a].insert(i);
    }
  }
  for (double v : outcome_) max_abs_outcome_ = std::max(max_abs_outcome_, std::fabs(v));
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::index_of(std::string_view name) const {
  auto idx = find(name);
  if (!idx) throw InputError("unknown attribute '" + std::string(name) + "'");
  return *idx;
}

std::int32_t Dataset::code_of(std::size_t attr, std::string_view value) const {
  const auto& dom = schema_[attr].domain;
  auto it = std::find(dom.begin(), dom.end(), value);
  if (it == dom.end()) {
    throw InputError("value '" + std::string(value) + "' not in domain of '" + schema_[attr].name +
                     "'");
  }
  return static_cast<std::int32_t>(it - dom.begin());
}

std::vector<std::size_t> Dataset::attributes_of_kind(AttributeKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < schema_.size(); ++a) {
    if (schema_[a].kind == kind) out.push_back(a);
  }
  std::sort(out.begin(), out.end(),
            [&](auto x, auto y) { return schema_[x].name < schema_[y].name; });
  return out;
}

BinnedColumn bin_numeric(std::span<const double> values, int bins) {
  if (bins < 1) throw InputError("bins must be >= 1");
  if (values.empty()) throw InputError("cannot bin an empty column");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  BinnedColumn out;
  out.codes.resize(values.size());
  if (!(hi > lo)) {
    std::fill(out.codes.begin(), out.codes.end(), 0);
    out.labels.push_back("[" + format_double(lo) + ", " + format_double(hi) + "]");
    return out;
  }
  const double width = (hi - lo) / bins;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto b = static_cast<std::int64_t>(std::floor((values[i] - lo) / width));
    out.codes[i] = static_cast<std::int32_t>(std::clamp<std::int64_t>(b, 0, bins - 1));
  }
  for (int b = 0; b < bins; ++b) {
    const double left = lo + width * b;
    const double right = b == bins - 1 ? hi : lo + width * (b + 1);
    out.labels.push_back("[" + format_double(left) + ", " + format_double(right) +
                         (b == bins - 1 ? "]" : ")"));
  }
  return out;
}

namespace {

struct Encoded {
  std::vector<std::string> domain;
  std::vector<std::int32_t> codes;
};

Encoded encode_column(const std::vector<std::optional<std::string>>& cells, int bins) {
  std::vector<double> numeric;
  bool all_numeric = true;
  std::set<std::string> distinct;
  for (const auto& c : cells) {
    if (!c) continue;
    distinct.insert(*c);
    if (all_numeric) {
      if (auto v = parse_double(*c)) {
        numeric.push_back(*v);
      } else {
        all_numeric = false;
      }
    }
  }
  Encoded out;
  out.codes.assign(cells.size(), Dataset::kMissing);
  if (distinct.empty()) return out;

  std::set<double> distinct_numbers(numeric.begin(), numeric.end());
  if (all_numeric && distinct_numbers.size() > static_cast<std::size_t>(bins)) {
    auto binned = bin_numeric(numeric, bins);
    // Keep only bins that occur, in bin order.
    std::vector<std::int32_t> remap(binned.labels.size(), -1);
    std::vector<bool> used(binned.labels.size(), false);
    for (auto c : binned.codes) used[static_cast<std::size_t>(c)] = true;
    for (std::size_t b = 0; b < used.size(); ++b) {
      if (used[b]) {
        remap[b] = static_cast<std::int32_t>(out.domain.size());
        out.domain.push_back(binned.labels[b]);
      }
    }
    std::size_t j = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i]) out.codes[i] = remap[static_cast<std::size_t>(binned.codes[j++])];
    }
    return out;
  }

  out.domain.assign(distinct.begin(), distinct.end());
  if (all_numeric) {
    std::stable_sort(out.domain.begin(), out.domain.end(), [](const auto& a, const auto& b) {
      return *parse_double(a) < *parse_double(b);
    });
  }
  std::map<std::string, std::int32_t, std::less<>> index;
  for (std::size_t i = 0; i < out.domain.size(); ++i) {
    index.emplace(out.domain[i], static_cast<std::int32_t>(i));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i]) out.codes[i] = index.at(*cells[i]);
  }
  return out;
}

}  // namespace

Dataset Dataset::build(std::vector<RawColumn> columns, std::string outcome_name,
                       std::vector<std::optional<double>> outcome, int bins) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (outcome[i]) keep.push_back(i);
  }
  if (keep.empty()) throw InputError("dataset has no rows with an outcome value");
  std::vector<double> y;
  y.reserve(keep.size());
  for (auto i : keep) y.push_back(*outcome[i]);

  // Columns are stored in name order so encoding does not depend on the file layout.
  std::sort(columns.begin(), columns.end(),
            [](const RawColumn& a, const RawColumn& b) { return a.name < b.name; });
  std::vector<AttributeSchema> schema;
  std::vector<std::vector<std::int32_t>> codes;
  for (auto& col : columns) {
    if (col.cells.size() != outcome.size()) {
      throw InputError("column '" + col.name + "' has wrong length");
    }
    std::vector<std::optional<std::string>> kept;
    kept.reserve(keep.size());
    for (auto i : keep) kept.push_back(std::move(col.cells[i]));
    auto enc = encode_column(kept, bins);
    schema.push_back({col.name, std::move(enc.domain), col.kind});
    codes.push_back(std::move(enc.codes));
  }
  Dataset ds(std::move(schema), std::move(codes), std::move(outcome_name), std::move(y));
  ds.dropped_rows_ = outcome.size() - keep.size();
  return ds;
}

std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) records.push_back(std::move(row));
    row.clear();
  };
  // Skip a UTF-8 byte-order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw InputError("unterminated quoted field in CSV");
  if (field_started || !row.empty()) end_row();
  return records;
}

Dataset parse_csv(std::string_view text, const SchemaConfig& config) {
  auto records = parse_csv_records(text);
  if (records.empty()) throw InputError("empty file: no header row");
  if (records.size() == 1) throw InputError("empty file: header but no data rows");
  const auto& header = records.front();

  std::string outcome_name;
  for (const auto& [name, kind] : config.kinds) {
    if (kind == AttributeKind::Outcome) {
      if (!outcome_name.empty()) throw InputError("more than one outcome attribute configured");
      outcome_name = name;
    }
  }
  if (outcome_name.empty()) throw InputError("no outcome attribute configured");

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);
  for (const auto& [name, kind] : config.kinds) {
    if (!position.count(name)) throw InputError("missing column '" + name + "' in CSV header");
  }

  const std::size_t rows = records.size() - 1;
  std::vector<std::optional<double>> outcome(rows);
  std::vector<RawColumn> columns;
  for (const auto& [name, kind] : config.kinds) {
    if (kind != AttributeKind::Outcome) columns.push_back({name, kind, {}});
  }
  for (auto& col : columns) col.cells.resize(rows);

  const auto outcome_pos = position.at(outcome_name);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& rec = records[r + 1];
    if (rec.size() != header.size()) {
      throw InputError("CSV row " + std::to_string(r + 2) + " has " + std::to_string(rec.size()) +
                       " fields, expected " + std::to_string(header.size()));
    }
    const auto& raw = rec[outcome_pos];
    if (!raw.empty()) {
      auto v = parse_double(raw);
      if (!v) {
        throw InputError("unparseable outcome value '" + raw + "' on CSV row " +
                         std::to_string(r + 2));
      }
      outcome[r] = *v;
    }
    for (auto& col : columns) {
      const auto& cell = rec[position.at(col.name)];
      if (!cell.empty()) col.cells[r] = cell;
    }
  }
  return Dataset::build(std::move(columns), outcome_name, std::move(outcome), config.bins);
}

Dataset load_csv(const std::string& path, const SchemaConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), config);
}

TupleSet evaluate_pattern(const Dataset& ds, const Pattern& p) {
  TupleSet out = ds.all();
  for (const auto& pred : p.predicates()) {
    const auto attr = ds.index_of(pred.attribute);
    const auto code = ds.code_of(attr, pred.value);
    if (pred.op == Op::Equals) {
      out &= ds.item(attr, code);
    } else {
      out &= ds.present(attr);
      out.subtract(ds.item(attr, code));
    }
  }
  return out;
}

double group_average(const Dataset& ds, const TupleSet& ts) {
  const auto n = ts.count();
  if (n == 0) throw std::domain_error("average of an empty tuple set is undefined");
  const auto y = ds.outcome();
  double sum = 0.0;
  ts.for_each([&](std::size_t i) { sum += y[i]; });
  return sum / static_cast<double>(n);
}

double support_fraction(std::size_t numerator, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(numerator) / static_cast<double>(total);
}

double support_fraction(const Dataset& ds, const TupleSet& numerator) {
  return support_fraction(numerator.count(), ds.size());
}

}  // namespace dispex
