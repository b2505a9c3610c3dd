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

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace speechfix::nn {

struct Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

// A node in the reverse-mode tape. Ops allocate the output node, fill v, and
// install a backprop closure that scatters the output's grad into the
// parents' grads. shape is free-form; conv ops use (N, C, H, W) where H is
// the mel axis and W the time axis.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;
  std::vector<double> g;
  bool requires_grad = false;

  std::vector<TensorPtr> parents;
  std::function<void()> backprop;

  std::size_t size() const { return v.size(); }
  bool is_leaf() const { return parents.empty() && !backprop; }

  // Sizes and zero-fills the gradient buffer if absent.
  void ensure_grad() {
    if (g.size() != v.size()) g.assign(v.size(), 0.0);
  }
  void zero_grad() { g.assign(v.size(), 0.0); }
};

std::size_t shape_size(const std::vector<int>& shape);

TensorPtr make_tensor(std::vector<int> shape, bool requires_grad = false);
TensorPtr make_tensor(std::vector<int> shape, std::vector<double> values,
                      bool requires_grad = false);

// Reverse-mode sweep from a scalar loss: topologically sorts the recorded
// graph, seeds d(loss)/d(loss) = 1 and runs every node's backprop closure.
// Throws if loss is not a scalar or if no forward graph was recorded.
void backward(const TensorPtr& loss);

// Throws when the tensor holds NaN/Inf; the message names the offender.
void check_finite(const Tensor& t, const char* what);

}  // namespace speechfix::nn
