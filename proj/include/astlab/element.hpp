#pragma once

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace astlab {

/// The universal value type: an atom (opaque, model-scoped identifier) or a
/// finite ordered tuple of elements. Immutable after construction; equality
/// and ordering are structural, so elements can be kept in sorted containers
/// with deterministic iteration order.
class Element {
 public:
  static Element atom(std::string name) {
    assert(!name.empty());
    Element e;
    e.name_ = std::move(name);
    return e;
  }

  static Element tuple(std::vector<Element> parts) {
    assert(parts.size() >= 2 && "tuples have at least two components");
    Element e;
    e.parts_ = std::move(parts);
    return e;
  }

  static Element pair(Element a, Element b) {
    return tuple({std::move(a), std::move(b)});
  }

  bool is_atom() const { return parts_.empty(); }
  bool is_tuple() const { return !parts_.empty(); }

  const std::string& name() const {
    assert(is_atom());
    return name_;
  }

  std::span<const Element> parts() const { return parts_; }

  std::size_t depth() const {
    if (is_atom()) return 1;
    std::size_t d = 0;
    for (const auto& p : parts_) d = std::max(d, p.depth());
    return d + 1;
  }

  // Atoms sort before tuples; atoms by name, tuples lexicographically.
  std::strong_ordering operator<=>(const Element& rhs) const {
    if (is_atom() != rhs.is_atom())
      return is_atom() ? std::strong_ordering::less
                       : std::strong_ordering::greater;
    if (is_atom()) return name_ <=> rhs.name_;
    const std::size_t n = std::min(parts_.size(), rhs.parts_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (auto c = parts_[i] <=> rhs.parts_[i]; c != 0) return c;
    return parts_.size() <=> rhs.parts_.size();
  }
  bool operator==(const Element& rhs) const {
    return (*this <=> rhs) == std::strong_ordering::equal;
  }

  /// Canonical text form: atoms print their identifier, tuples print as
  /// "(a, b, ...)" with a single space after each comma.
  std::string text() const {
    if (is_atom()) return name_;
    std::string out = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i > 0) out += ", ";
      out += parts_[i].text();
    }
    out += ")";
    return out;
  }

 private:
  Element() = default;
  std::string name_;            // non-empty iff atom
  std::vector<Element> parts_;  // size >= 2 iff tuple
};

/// Sorted, duplicate-free collection of elements. Backing store is a flat
/// vector so iteration order is the canonical element order.
class ElementSet {
 public:
  ElementSet() = default;
  explicit ElementSet(std::vector<Element> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  }
  ElementSet(std::initializer_list<Element> items)
      : ElementSet(std::vector<Element>(items)) {}

  bool insert(Element e) {
    auto it = std::lower_bound(items_.begin(), items_.end(), e);
    if (it != items_.end() && *it == e) return false;
    items_.insert(it, std::move(e));
    return true;
  }

  bool contains(const Element& e) const {
    return std::binary_search(items_.begin(), items_.end(), e);
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Element& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<Element>& items() const { return items_; }

  bool operator==(const ElementSet& rhs) const = default;

 private:
  std::vector<Element> items_;
};

}  // namespace astlab
