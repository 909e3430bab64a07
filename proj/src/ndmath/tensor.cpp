#include "samarl/ndmath/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace samarl::nd {

namespace {
thread_local bool g_grad_enabled = true;
}

std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

namespace detail {

void set_grad_enabled(bool enabled) { g_grad_enabled = enabled; }

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> values, std::string_view op,
                      std::vector<Tensor<T>> inputs, std::function<void(Node<T>&)> rule) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->op = op;
  const bool track =
      g_grad_enabled && std::any_of(inputs.begin(), inputs.end(),
                                    [](const Tensor<T>& t) { return t.requires_grad(); });
  if (track) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (auto& in : inputs) node->inputs.push_back(in.node());
    node->backward = std::move(rule);
  }
  return Tensor<T>(std::move(node));
}

template Tensor<float> make_result(Shape, std::vector<float>, std::string_view,
                                   std::vector<Tensor<float>>, std::function<void(Node<float>&)>);
template Tensor<double> make_result(Shape, std::vector<double>, std::string_view,
                                    std::vector<Tensor<double>>, std::function<void(Node<double>&)>);

}  // namespace detail

template <typename T>
Tensor<T>::Tensor() : node_(std::make_shared<detail::Node<T>>()) {
  node_->shape = Shape{0};
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values, bool requires_grad)
    : node_(std::make_shared<detail::Node<T>>()) {
  if (numel(shape) != values.size()) {
    throw DimensionError("tensor shape " + shape_string(shape) + " does not hold " +
                         std::to_string(values.size()) + " values");
  }
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T fill, bool requires_grad) {
  const auto n = numel(shape);
  return Tensor(std::move(shape), std::vector<T>(n, fill), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return Tensor(Shape{}, std::vector<T>{value}, requires_grad);
}

template <typename T>
std::size_t Tensor<T>::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         shape_string(shape()));
  }
  return node_->shape[axis];
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) throw ContractError("item() on tensor of shape " + shape_string(shape()));
  return node_->value[0];
}

template <typename T>
T Tensor<T>::at(std::initializer_list<std::size_t> index) const {
  if (index.size() != rank()) throw DimensionError("index rank mismatch for " + shape_string(shape()));
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= node_->shape[axis]) throw DimensionError("index out of range for " + shape_string(shape()));
    flat = flat * node_->shape[axis] + i;
    ++axis;
  }
  return node_->value[flat];
}

template <typename T>
void Tensor<T>::zero_grad() {
  node_->grad.assign(node_->value.size(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return Tensor(shape(), node_->value, false);
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  return Tensor(shape(), node_->value, requires_grad());
}

template <typename T>
Tape<T> Tape<T>::record(const Tensor<T>& root) {
  Tape tape;
  std::unordered_set<const detail::Node<T>*> visited;
  // Iterative post-order DFS; a node is emitted after all of its inputs.
  std::vector<std::pair<detail::Node<T>*, std::size_t>> stack;
  stack.emplace_back(root.node().get(), 0);
  visited.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      auto* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      tape.order_.push_back(node);
      stack.pop_back();
    }
  }
  return tape;
}

template <typename T>
std::vector<std::string_view> Tape<T>::op_names() const {
  std::vector<std::string_view> names;
  names.reserve(order_.size());
  for (auto* n : order_) names.push_back(n->op);
  return names;
}

template <typename T>
void Tape<T>::run_backward(const Tensor<T>& root) const {
  for (auto* n : order_) {
    if (!n->is_leaf()) n->grad.assign(n->value.size(), T(0));
  }
  auto seed = root.node()->grad_buffer();
  seed[0] += T(1);
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    if (!(*it)->is_leaf()) (*it)->backward(**it);
  }
}

template <typename T>
void backward(const Tensor<T>& loss) {
  if (loss.size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " + shape_string(loss.shape()));
  }
  if (!loss.requires_grad()) {
    throw ContractError("backward() on a loss that does not depend on any parameter");
  }
  Tape<T>::record(loss).run_backward(loss);
}

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;
template void backward(const Tensor<float>&);
template void backward(const Tensor<double>&);

}  // namespace samarl::nd
