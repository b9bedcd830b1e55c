#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fairgen {

struct GroupLabel {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const GroupLabel&, const GroupLabel&) = default;
};

/// Ordered, uniquely named group list; position is the group index.
class GroupSet {
 public:
  /// Throws ConfigError when fewer than one name is given or names repeat.
  explicit GroupSet(std::vector<std::string> names);

  /// "Asian", "Black", "Indian", "White", "Others" truncated or padded ("Group5", ...) to k.
  static GroupSet defaults(std::size_t k = 5);

  std::size_t size() const noexcept { return names_.size(); }
  GroupLabel at(std::size_t index) const;
  const std::string& name(std::size_t index) const;
  const std::vector<std::string>& names() const noexcept { return names_; }
  /// Index of `name`; throws NotFoundError.
  std::size_t index_of(const std::string& name) const;

  friend bool operator==(const GroupSet&, const GroupSet&) = default;

 private:
  std::vector<std::string> names_;
};

}  // namespace fairgen
