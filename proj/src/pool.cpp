#include "efcg/pool.hpp"

#include <fmt/format.h>

#include "efcg/error.hpp"
#include "efcg/jsonl.hpp"

namespace efcg {

void AttributePool::add(Attribute a) {
  validate_attribute(a);
  if (index_.count(a.id) > 0) {
    throw Error(ErrorCode::InvalidAttribute, fmt::format("duplicate attribute id '{}'", a.id));
  }
  index_.emplace(a.id, attributes_.size());
  attributes_.push_back(std::move(a));
}

const Attribute* AttributePool::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &attributes_[it->second];
}

AttributePool read_pool_jsonl(std::istream& in, ParseMode mode, std::string_view source) {
  AttributePool pool;
  read_jsonl(in, source, [&](const json& j, std::size_t) { pool.add(attribute_from_json(j, mode)); });
  return pool;
}

}  // namespace efcg
