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

#include "hdrc/autograd.h"

#include <unordered_set>
#include <utility>

#include "hdrc/errors.h"

namespace hdrc::ag {
namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

Tensor& Node::ensure_grad() {
  if (grad.empty() || !(grad.shape() == value.shape())) {
    grad = Tensor(value.shape(), 0.0);
  }
  return grad;
}

Var::Var(Tensor value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

double Var::item() const {
  if (value().size() != 1) {
    throw ShapeError("item() on tensor of shape " + shape().str());
  }
  return value()[0];
}

void Var::backward() const {
  if (value().size() != 1) {
    throw ShapeError("backward() needs a scalar, got " + shape().str());
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  node_->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}

NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Var make_result(Tensor value, const std::vector<Var>& inputs,
                std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    bool any = false;
    for (const Var& in : inputs) any = any || in.requires_grad();
    if (any) {
      node->requires_grad = true;
      node->inputs.reserve(inputs.size());
      for (const Var& in : inputs) node->inputs.push_back(in.node());
      node->backward = std::move(backward);
    }
  }
  return Var(std::move(node));
}

}  // namespace hdrc::ag
