#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "efcg/serialization.hpp"
#include "efcg/types.hpp"

namespace efcg {

// The attribute pool that expansion draws from: attributes in file order,
// indexed by id.
class AttributePool {
 public:
  // Throws InvalidAttribute on a duplicate id or an invalid attribute.
  void add(Attribute a);

  const Attribute* find(std::string_view id) const;
  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t size() const { return attributes_.size(); }

 private:
  std::vector<Attribute> attributes_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One attribute record per line.
AttributePool read_pool_jsonl(std::istream& in, ParseMode mode = ParseMode::Strict,
                              std::string_view source = "pool");

}  // namespace efcg
