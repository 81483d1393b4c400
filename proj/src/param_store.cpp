#include "rtn/param_store.hpp"

#include <stdexcept>

namespace rtn {

int ParamStore::add(const std::string& name, Tensor2 init) {
  if (index_.count(name)) throw std::invalid_argument("ParamStore: duplicate parameter '" + name + "'");
  const int idx = static_cast<int>(entries_.size());
  Entry e;
  e.name = name;
  e.m = Tensor2(init.rows, init.cols, 0.0);
  e.v = e.m;
  e.vhat = e.m;
  e.value = std::move(init);
  entries_.push_back(std::move(e));
  index_[name] = idx;
  return idx;
}

int ParamStore::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("ParamStore: unknown parameter '" + name + "'");
  return it->second;
}

size_t ParamStore::scalar_count() const {
  size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

}  // namespace rtn
