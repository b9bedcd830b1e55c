#include "fairgen/groups.hpp"

#include <set>

#include "fairgen/errors.hpp"

namespace fairgen {

GroupSet::GroupSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ConfigError("group list must not be empty");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ConfigError("group names must be non-empty");
    if (!seen.insert(n).second) throw ConfigError("duplicate group name: " + n);
  }
}

GroupSet GroupSet::defaults(std::size_t k) {
  static const std::vector<std::string> base{"Asian", "Black", "Indian", "White", "Others"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i)
    names.push_back(i < base.size() ? base[i] : "Group" + std::to_string(i));
  return GroupSet(std::move(names));
}

GroupLabel GroupSet::at(std::size_t index) const {
  return GroupLabel{index, name(index)};
}

const std::string& GroupSet::name(std::size_t index) const {
  if (index >= names_.size())
    throw NotFoundError("group index " + std::to_string(index) + " out of range");
  return names_[index];
}

std::size_t GroupSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw NotFoundError("unknown group: " + name);
}

}  // namespace fairgen
