// Copyright 2026 The hdrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HDRC_AUTOGRAD_H_
#define HDRC_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <vector>

#include "hdrc/tensor.h"

namespace hdrc::ag {

struct Node;
using NodePtr = std::shared_ptr<Node>;

// A value in the computation graph. Op outputs keep their inputs alive through
// `inputs`; `backward` reads this node's grad and accumulates into the inputs.
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<NodePtr> inputs;
  std::function<void(Node&)> backward;

  // Allocates a zero grad of the value's shape on first use.
  Tensor& ensure_grad();
};

// Handle to a graph node. Copies share the node.
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false);
  explicit Var(NodePtr node) : node_(std::move(node)) {}

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_->requires_grad; }
  Tensor& grad() const { return node_->ensure_grad(); }
  bool has_grad() const { return !node_->grad.empty(); }
  const NodePtr& node() const { return node_; }

  // Value of a single-element tensor.
  double item() const;

  // Reverse-mode sweep from this scalar; seeds d(this)/d(this) = 1.
  void backward() const;

 private:
  NodePtr node_;
};

// Graph recording is on by default; a NoGradGuard disables it on this
// thread.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Builds an op output. The backward function is kept only when recording is
// enabled and at least one input requires a gradient.
Var make_result(Tensor value, const std::vector<Var>& inputs,
                std::function<void(Node&)> backward);

}  // namespace hdrc::ag

#endif  // HDRC_AUTOGRAD_H_
