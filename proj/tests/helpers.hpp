#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "astlab/generator.hpp"
#include "astlab/system.hpp"

namespace th {

inline astlab::Element a(const std::string& name) {
  return astlab::Element::atom(name);
}

inline astlab::Element t(std::initializer_list<astlab::Element> parts) {
  return astlab::Element::tuple(std::vector<astlab::Element>(parts));
}

inline astlab::ComponentSet cs(const std::string& name,
                               std::initializer_list<std::string> atoms) {
  astlab::ElementSet members;
  for (const std::string& s : atoms) members.insert(a(s));
  return astlab::ComponentSet(name, std::move(members));
}

inline astlab::ComponentSet cse(
    const std::string& name, std::initializer_list<astlab::Element> members) {
  return astlab::ComponentSet(
      name, astlab::ElementSet(std::vector<astlab::Element>(members)));
}

inline astlab::Relation rel(
    std::initializer_list<std::vector<astlab::Element>> rows) {
  return astlab::Relation(
      std::vector<astlab::Row>(rows.begin(), rows.end()));
}

}  // namespace th
