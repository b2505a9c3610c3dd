// Copyright 2026 The SpeechFix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "speechfix/nn/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace speechfix::nn {

std::size_t shape_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

TensorPtr make_tensor(std::vector<int> shape, bool requires_grad) {
  auto t = std::make_shared<Tensor>();
  t->v.assign(shape_size(shape), 0.0);
  t->shape = std::move(shape);
  t->requires_grad = requires_grad;
  return t;
}

TensorPtr make_tensor(std::vector<int> shape, std::vector<double> values, bool requires_grad) {
  if (shape_size(shape) != values.size())
    throw std::invalid_argument("tensor shape does not match value count");
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->v = std::move(values);
  t->requires_grad = requires_grad;
  return t;
}

namespace {

void topo_visit(Tensor* node, std::unordered_set<Tensor*>& seen, std::vector<Tensor*>& order) {
  if (seen.count(node)) return;
  seen.insert(node);
  for (const auto& p : node->parents) topo_visit(p.get(), seen, order);
  order.push_back(node);
}

}  // namespace

void backward(const TensorPtr& loss) {
  if (!loss) throw std::invalid_argument("backward: null tensor");
  if (loss->size() != 1) throw std::invalid_argument("backward: loss must be a scalar");
  if (loss->is_leaf()) throw std::runtime_error("backward before forward: no recorded graph");

  std::unordered_set<Tensor*> seen;
  std::vector<Tensor*> order;
  topo_visit(loss.get(), seen, order);
  for (Tensor* node : order) node->ensure_grad();

  loss->g[0] = 1.0;
  for (std::size_t i = order.size(); i-- > 0;)
    if (order[i]->backprop) order[i]->backprop();
}

void check_finite(const Tensor& t, const char* what) {
  for (double x : t.v)
    if (!std::isfinite(x))
      throw std::runtime_error(std::string("non-finite values in ") + what);
}

}  // namespace speechfix::nn
