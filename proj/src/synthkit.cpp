#include "dispex/synthkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "dispex/errors.hpp"
#include "dispex/util.hpp"

namespace dispex::synth {

std::string level_label(std::size_t level, std::size_t size) {
  const auto width = std::to_string(size > 0 ? size - 1 : 0).size();
  auto digits = std::to_string(level);
  return "L" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

namespace {

struct Column {
  std::string name;
  AttributeKind kind;
  std::size_t domain_size;
  std::vector<std::size_t> levels;
};

std::size_t draw_categorical(std::mt19937_64& rng, const std::vector<double>& probs) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

double draw_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> normalized_probs(const CategoricalAttr& a) {
  if (a.probs.empty()) return std::vector<double>(a.domain_size, 1.0 / a.domain_size);
  if (a.probs.size() != a.domain_size) {
    throw InputError("attribute '" + a.name + "' has " + std::to_string(a.probs.size()) +
                     " probabilities for " + std::to_string(a.domain_size) + " levels");
  }
  double s = 0.0;
  for (double p : a.probs) {
    if (p < 0) throw InputError("negative probability in '" + a.name + "'");
    s += p;
  }
  if (!(s > 0)) throw InputError("probabilities of '" + a.name + "' sum to zero");
  auto out = a.probs;
  for (auto& p : out) p /= s;
  return out;
}

// Level index named by `label` within a domain of `size`, or throws.
std::size_t level_of(const std::string& attr, const std::string& label, std::size_t size) {
  for (std::size_t l = 0; l < size; ++l) {
    if (level_label(l, size) == label) return l;
  }
  throw InputError("value '" + label + "' is not a level of '" + attr + "'");
}

}  // namespace

SyntheticData generate(const ScmSpec& spec) {
  if (spec.n == 0) throw InputError("synthetic dataset needs n >= 1");
  if (spec.noise_sd < 0) throw InputError("noise_sd must be >= 0");

  std::map<std::string, std::size_t> col_index;
  std::vector<Column> cols;
  std::map<std::string, std::vector<double>> probs;
  auto add = [&](const std::string& name, AttributeKind kind, std::size_t size) {
    if (size < 1) throw InputError("attribute '" + name + "' needs at least one level");
    if (!col_index.emplace(name, cols.size()).second) {
      throw InputError("duplicate synthetic attribute '" + name + "'");
    }
    cols.push_back({name, kind, size, std::vector<std::size_t>(spec.n)});
  };
  for (const auto& a : spec.immutable_attrs) {
    add(a.name, AttributeKind::Immutable, a.domain_size);
    probs[a.name] = normalized_probs(a);
  }
  for (const auto& a : spec.group_attrs) {
    add(a.name, AttributeKind::Auxiliary, a.domain_size);
    probs[a.name] = normalized_probs(a);
  }
  for (const auto& m : spec.mutable_attrs) {
    add(m.name, AttributeKind::Mutable, m.domain_size);
    for (const auto& p : m.parents) {
      auto it = col_index.find(p.attribute);
      if (it == col_index.end() || cols[it->second].kind != AttributeKind::Immutable) {
        throw InputError("mutable '" + m.name + "' has non-immutable parent '" + p.attribute +
                         "'");
      }
      if (p.per_level.size() != cols[it->second].domain_size) {
        throw InputError("weight vector size mismatch for parent '" + p.attribute + "'");
      }
    }
  }
  if (col_index.count(spec.outcome_name)) throw InputError("outcome name clashes with attribute");
  for (const auto& w : spec.outcome_weights) {
    auto it = col_index.find(w.attribute);
    if (it == col_index.end()) throw InputError("unknown outcome weight '" + w.attribute + "'");
    if (w.per_level.size() != cols[it->second].domain_size) {
      throw InputError("outcome weight size mismatch for '" + w.attribute + "'");
    }
  }

  auto check_pattern = [&](const Pattern& p, AttributeKind kind, const char* what) {
    for (const auto& pred : p.predicates()) {
      auto it = col_index.find(pred.attribute);
      if (it == col_index.end() || cols[it->second].kind != kind) {
        throw InputError(std::string(what) + " uses attribute '" + pred.attribute +
                         "' of the wrong kind");
      }
      level_of(pred.attribute, pred.value, cols[it->second].domain_size);
    }
  };
  for (const auto& pe : spec.planted_effects) {
    check_pattern(pe.subpopulation, AttributeKind::Immutable, "planted subpopulation");
    check_pattern(pe.treatment, AttributeKind::Mutable, "planted treatment");
    if (pe.treatment.empty()) throw InputError("planted treatment must not be empty");
    if (pe.effect_g1 == pe.effect_g2) {
      throw InputError("planted effect on '" + pe.subpopulation.to_string() +
                       "' has equal group effects");
    }
    double mass = static_cast<double>(spec.n);
    for (const auto& pred : pe.subpopulation.predicates()) {
      const auto& pr = probs.at(pred.attribute);
      const auto l = level_of(pred.attribute, pred.value, pr.size());
      mass *= pred.op == Op::Equals ? pr[l] : 1.0 - pr[l];
    }
    if (mass < 10.0 * static_cast<double>(spec.min_arm)) {
      throw InputError("planted subpopulation '" + pe.subpopulation.to_string() +
                       "' is infeasible: expected mass " + format_double(mass));
    }
  }
  for (const auto* g : {&spec.g1, &spec.g2}) {
    for (const auto& pred : g->predicates()) {
      auto it = col_index.find(pred.attribute);
      if (it == col_index.end()) throw InputError("group uses unknown '" + pred.attribute + "'");
      level_of(pred.attribute, pred.value, cols[it->second].domain_size);
    }
  }

  auto matches = [&](const Pattern& p, std::size_t row) {
    for (const auto& pred : p.predicates()) {
      const auto& c = cols[col_index.at(pred.attribute)];
      const bool eq = c.levels[row] == level_of(pred.attribute, pred.value, c.domain_size);
      if (eq != (pred.op == Op::Equals)) return false;
    }
    return true;
  };

  std::mt19937_64 rng(spec.seed);
  std::vector<double> outcome(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (const auto* list : {&spec.immutable_attrs, &spec.group_attrs}) {
      for (const auto& a : *list) {
        cols[col_index.at(a.name)].levels[i] = draw_categorical(rng, probs.at(a.name));
      }
    }
    for (const auto& m : spec.mutable_attrs) {
      double score = m.bias;
      for (const auto& p : m.parents) score += p.per_level[cols[col_index.at(p.attribute)].levels[i]];
      std::vector<double> w(m.domain_size);
      double mx = 0.0;
      for (std::size_t l = 0; l < m.domain_size; ++l) mx = std::max(mx, score * l);
      double total = 0.0;
      for (std::size_t l = 0; l < m.domain_size; ++l) {
        w[l] = std::exp(score * static_cast<double>(l) - mx);
        total += w[l];
      }
      for (auto& x : w) x /= total;
      cols[col_index.at(m.name)].levels[i] = draw_categorical(rng, w);
    }
    double y = spec.intercept;
    for (const auto& ow : spec.outcome_weights) {
      y += ow.per_level[cols[col_index.at(ow.attribute)].levels[i]];
    }
    const bool in_g1 = matches(spec.g1, i);
    const bool in_g2 = matches(spec.g2, i);
    for (const auto& pe : spec.planted_effects) {
      if (!matches(pe.subpopulation, i) || !matches(pe.treatment, i)) continue;
      if (in_g1) {
        y += pe.effect_g1;
      } else if (in_g2) {
        y += pe.effect_g2;
      }
    }
    outcome[i] = y + spec.noise_sd * draw_normal(rng);
  }

  std::vector<RawColumn> raw;
  for (const auto& c : cols) {
    RawColumn rc{c.name, c.kind, {}};
    rc.cells.reserve(spec.n);
    for (auto l : c.levels) rc.cells.emplace_back(level_label(l, c.domain_size));
    raw.push_back(std::move(rc));
  }
  std::vector<std::optional<double>> y(outcome.begin(), outcome.end());
  auto ds = Dataset::build(std::move(raw), spec.outcome_name, std::move(y), 10);

  std::set<std::string> nodes;
  std::set<CausalDag::Edge> edges;
  for (const auto& c : cols) nodes.insert(c.name);
  nodes.insert(spec.outcome_name);
  for (const auto& m : spec.mutable_attrs) {
    for (const auto& p : m.parents) edges.emplace(p.attribute, m.name);
  }
  for (const auto& w : spec.outcome_weights) edges.emplace(w.attribute, spec.outcome_name);
  for (const auto& pe : spec.planted_effects) {
    for (const auto& a : pe.subpopulation.attributes()) edges.emplace(a, spec.outcome_name);
    for (const auto& a : pe.treatment.attributes()) edges.emplace(a, spec.outcome_name);
    for (const auto* g : {&spec.g1, &spec.g2}) {
      for (const auto& a : g->attributes()) edges.emplace(a, spec.outcome_name);
    }
  }

  SyntheticData out{std::move(ds), CausalDag(std::move(nodes), std::move(edges)), {}, spec};
  for (const auto& pe : spec.planted_effects) {
    out.truth.push_back({pe.subpopulation, pe.treatment, pe.effect_g1, pe.effect_g2,
                         std::fabs(pe.effect_g1 - pe.effect_g2) / out.dataset.max_abs_outcome()});
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Dataset& ds) {
  std::string out;
  for (const auto& a : ds.schema()) out += csv_field(a.name) + ",";
  out += csv_field(ds.outcome_name()) + "\n";
  const auto y = ds.outcome();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t a = 0; a < ds.schema().size(); ++a) {
      const auto c = ds.column(a)[i];
      if (c != Dataset::kMissing) out += csv_field(ds.attribute(a).domain[static_cast<std::size_t>(c)]);
      out += ",";
    }
    out += format_double(y[i]) + "\n";
  }
  return out;
}

SchemaConfig schema_config(const ScmSpec& spec) {
  SchemaConfig cfg;
  for (const auto& a : spec.immutable_attrs) cfg.kinds[a.name] = AttributeKind::Immutable;
  for (const auto& a : spec.group_attrs) cfg.kinds[a.name] = AttributeKind::Auxiliary;
  for (const auto& m : spec.mutable_attrs) cfg.kinds[m.name] = AttributeKind::Mutable;
  cfg.kinds[spec.outcome_name] = AttributeKind::Outcome;
  return cfg;
}

ScmSpec planted_benchmark(std::size_t n, std::uint64_t seed) {
  ScmSpec s;
  s.n = n;
  s.seed = seed;
  s.immutable_attrs = {{"Region", 4, {}}, {"Age", 3, {}}, {"Education", 3, {}}};
  s.group_attrs = {{"Group", 2, {}}};
  s.mutable_attrs = {
      {"Training", 2, -1.0, {{"Education", {0.0, 1.0, 2.0}}}},
      {"Remote", 2, -0.5, {{"Age", {0.0, 0.5, 1.0}}}},
      {"Hours", 3, -0.5, {{"Region", {0.0, 0.4, 0.8, 1.2}}}},
  };
  s.intercept = 10.0;
  s.outcome_weights = {{"Education", {0.0, 2.0, 4.0}},
                       {"Age", {0.0, 1.0, 2.0}},
                       {"Region", {0.0, 0.5, 1.0, 1.5}},
                       {"Group", {0.5, 0.0}}};
  s.planted_effects = {
      {Pattern::parse("Region=L0"), Pattern::parse("Training=L1"), 6.0, 1.5},
      {Pattern::parse("Region=L1"), Pattern::parse("Remote=L1"), 5.0, 1.0},
      {Pattern::parse("Region=L2"), Pattern::parse("Hours=L2"), 4.0, 1.0},
  };
  s.g1 = Pattern::parse("Group=L0");
  s.g2 = Pattern::parse("Group=L1");
  s.noise_sd = 1.0;
  return s;
}

ScmSpec null_model(std::size_t n, std::uint64_t seed) {
  ScmSpec s;
  s.n = n;
  s.seed = seed;
  s.immutable_attrs = {{"A", 3, {}}, {"B", 3, {}}, {"C", 3, {}}};
  s.group_attrs = {{"Group", 2, {}}};
  s.mutable_attrs = {{"M1", 3, 0.0, {}}, {"M2", 3, 0.0, {}}, {"M3", 3, 0.0, {}}};
  s.intercept = 10.0;
  s.g1 = Pattern::parse("Group=L0");
  s.g2 = Pattern::parse("Group=L1");
  s.noise_sd = 1.0;
  return s;
}

ScmSpec confounded_single(std::size_t n, std::uint64_t seed, double effect_g1, double effect_g2) {
  ScmSpec s;
  s.n = n;
  s.seed = seed;
  s.immutable_attrs = {{"Z", 2, {}}};
  s.group_attrs = {{"Group", 2, {}}};
  s.mutable_attrs = {{"T", 2, -2.0, {{"Z", {0.0, 4.0}}}}};
  s.intercept = 10.0;
  s.outcome_weights = {{"Z", {0.0, 3.0}}};
  s.planted_effects = {{Pattern{}, Pattern::parse("T=L1"), effect_g1, effect_g2}};
  s.g1 = Pattern::parse("Group=L0");
  s.g2 = Pattern::parse("Group=L1");
  s.noise_sd = 1.0;
  return s;
}

}  // namespace dispex::synth
