#include "dispex/pattern.hpp"

#include <algorithm>

#include "dispex/errors.hpp"

namespace dispex {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string Predicate::to_string() const {
  return attribute + (op == Op::Equals ? "=" : "!=") + value;
}

Pattern::Pattern(std::vector<Predicate> predicates) : predicates_(std::move(predicates)) {
  std::sort(predicates_.begin(), predicates_.end());
  predicates_.erase(std::unique(predicates_.begin(), predicates_.end()), predicates_.end());
  for (std::size_t i = 1; i < predicates_.size(); ++i) {
    const auto& a = predicates_[i - 1];
    const auto& b = predicates_[i];
    if (a.attribute == b.attribute && a.op == Op::Equals && b.op == Op::Equals) {
      throw InputError("pattern has two equality predicates on '" + a.attribute + "'");
    }
  }
}

Pattern Pattern::parse(std::string_view text) {
  std::vector<Predicate> preds;
  text = trim(text);
  if (text.empty()) return Pattern{};
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('&', start);
    if (end == std::string_view::npos) end = text.size();
    const auto term = trim(text.substr(start, end - start));
    Predicate p;
    auto pos = term.find("!=");
    std::size_t op_len = 2;
    if (pos == std::string_view::npos) {
      pos = term.find('=');
      op_len = 1;
      p.op = Op::Equals;
    } else {
      p.op = Op::NotEquals;
    }
    if (pos == std::string_view::npos) {
      throw InputError("malformed predicate '" + std::string(term) + "'");
    }
    p.attribute = std::string(trim(term.substr(0, pos)));
    p.value = std::string(trim(term.substr(pos + op_len)));
    if (p.attribute.empty() || p.value.empty()) {
      throw InputError("malformed predicate '" + std::string(term) + "'");
    }
    preds.push_back(std::move(p));
    start = end + 1;
  }
  return Pattern(std::move(preds));
}

bool Pattern::mentions(std::string_view attribute) const {
  return std::any_of(predicates_.begin(), predicates_.end(),
                     [&](const Predicate& p) { return p.attribute == attribute; });
}

std::vector<std::string> Pattern::attributes() const {
  std::vector<std::string> out;
  for (const auto& p : predicates_) {
    if (out.empty() || out.back() != p.attribute) out.push_back(p.attribute);
  }
  return out;
}

Pattern Pattern::conjoin(const Pattern& other) const {
  auto preds = predicates_;
  preds.insert(preds.end(), other.predicates_.begin(), other.predicates_.end());
  return Pattern(std::move(preds));
}

std::string Pattern::to_string() const {
  std::string out;
  for (const auto& p : predicates_) {
    if (!out.empty()) out += " & ";
    out += p.to_string();
  }
  return out;
}

}  // namespace dispex
