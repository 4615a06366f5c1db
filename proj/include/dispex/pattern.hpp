#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace dispex {

enum class Op { Equals, NotEquals };

struct Predicate {
  std::string attribute;
  Op op = Op::Equals;
  std::string value;

  auto operator<=>(const Predicate&) const = default;
  std::string to_string() const;
};

// Conjunction of predicates in canonical (attribute, op, value) order.
// Structurally equal patterns serialize to identical strings.
class Pattern {
 public:
  Pattern() = default;
  // Sorts and deduplicates; throws InputError on two different equality
  // predicates over the same attribute.
  explicit Pattern(std::vector<Predicate> predicates);

  // Grammar: `Attr=Value`, `Attr!=Value`, joined by `&`. Empty text is the
  // empty pattern.
  static Pattern parse(std::string_view text);

  const std::vector<Predicate>& predicates() const { return predicates_; }
  std::size_t size() const { return predicates_.size(); }
  bool empty() const { return predicates_.empty(); }
  bool mentions(std::string_view attribute) const;
  std::vector<std::string> attributes() const;

  Pattern conjoin(const Pattern& other) const;
  std::string to_string() const;

  auto operator<=>(const Pattern&) const = default;

 private:
  std::vector<Predicate> predicates_;
};

}  // namespace dispex
