#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace samarl::nd {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Raised when operand shapes are incompatible. The message names every shape involved.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a caller violates a documented precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised for NaN/Inf encountered where finite values are required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::string_view op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  bool is_leaf() const { return !backward; }
  std::span<T> grad_buffer() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
    return grad;
  }
};

}  // namespace detail

/// Shape-tagged dense array with optional participation in reverse-mode
/// differentiation. Copies share storage; use clone() for a deep copy.
template <typename T>
class Tensor {
 public:
  using value_type = T;
  using NodePtr = std::shared_ptr<detail::Node<T>>;

  Tensor();
  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false);
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T fill, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return node_->value.size(); }

  std::span<const T> data() const { return node_->value; }
  /// Direct write access. Only meaningful on leaves (parameters, inputs).
  std::span<T> mutable_data() { return node_->value; }
  T item() const;
  T at(std::initializer_list<std::size_t> index) const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool flag) { node_->requires_grad = flag; }
  bool has_grad() const { return node_->grad.size() == node_->value.size() && !node_->value.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->grad_buffer(); }
  void zero_grad();

  /// Same values, cut from the graph.
  Tensor detach() const;
  /// Deep copy of values (and requires_grad flag); no graph history.
  Tensor clone() const;

  /// False for a default-constructed (empty) tensor.
  bool defined() const { return node_ && !node_->value.empty(); }
  const NodePtr& node() const { return node_; }
  std::string_view op_name() const { return node_->op; }

 private:
  NodePtr node_;
};

/// Ordered record of the primitive operations reachable from a root.
/// Inputs always precede the operations that consume them.
template <typename T>
class Tape {
 public:
  static Tape record(const Tensor<T>& root);

  std::size_t size() const { return order_.size(); }
  std::vector<std::string_view> op_names() const;
  const std::vector<detail::Node<T>*>& nodes() const { return order_; }

  /// Seeds d root / d root = 1 and runs every recorded backward rule in reverse.
  void run_backward(const Tensor<T>& root) const;

 private:
  std::vector<detail::Node<T>*> order_;
};

/// Populates grad on every leaf reachable from a scalar loss.
/// Leaf gradients accumulate; call zero_grad on parameters first.
template <typename T>
void backward(const Tensor<T>& loss);

/// Whether new operations record themselves for differentiation (thread-local).
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

namespace detail {
void set_grad_enabled(bool enabled);

/// Builds an op result. Records `rule` only when grad mode is on and some input needs gradients.
template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> values, std::string_view op,
                      std::vector<Tensor<T>> inputs, std::function<void(Node<T>&)> rule);
}  // namespace detail

extern template class Tensor<float>;
extern template class Tensor<double>;
extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace samarl::nd
