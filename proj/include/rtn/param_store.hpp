#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "rtn/tensor.hpp"

namespace rtn {

// Named trainable tensors plus their AMSGrad slots (first moment m, second
// moment v, running max of v). Registration order is stable and defines the
// serialization order, which keeps checkpoints byte-reproducible.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor2 value;
    Tensor2 m, v, vhat;  // optimizer slots, same shape as value
  };

  int add(const std::string& name, Tensor2 init);

  bool has(const std::string& name) const { return index_.count(name) != 0; }
  int index_of(const std::string& name) const;

  Entry& entry(int i) { return entries_[i]; }
  const Entry& entry(int i) const { return entries_[i]; }
  Entry& entry(const std::string& name) { return entries_[index_of(name)]; }
  const Entry& entry(const std::string& name) const { return entries_[index_of(name)]; }

  Tensor2& value(const std::string& name) { return entry(name).value; }
  const Tensor2& value(const std::string& name) const { return entry(name).value; }

  int count() const { return static_cast<int>(entries_.size()); }
  size_t scalar_count() const;

  std::vector<std::string> names() const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
};

// Gradients keyed by parameter name, produced by Graph::backward.
using GradMap = std::map<std::string, Tensor2>;

}  // namespace rtn
