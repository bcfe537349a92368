#pragma once

#include <cstdint>
#include <vector>

#include "pungan/matrix.hpp"

namespace pungan {

// Handle to a value recorded on a Tape.
struct Node {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode differentiation over matrix-valued primitives. Forward values
// are computed eagerly as operations are recorded; backward() replays the
// records in reverse creation order, which is a reverse topological order
// because an operation can only reference nodes recorded before it.
class Tape {
 public:
  enum class Op : std::uint8_t {
    kLeaf,        // input / parameter
    kMatMul,      // a x b
    kAdd,         // a + b (same shape)
    kMul,         // a (elementwise) b
    kSigmoid,
    kTanh,
    kSoftmax,     // column vector
    kScale,       // scalar_arg * a
    kPick,        // row `index` of a column vector -> 1x1
    kLog,         // elementwise natural log
    kDotMask,     // sum_i a_i * mask_i -> 1x1 (mask is a constant)
    kConcatRows,  // [a; b] for column vectors
    kEmbedRow,    // row `index` of a table, as a column vector
    kSumList,     // elementwise sum of n same-shaped nodes
  };

  struct Entry {
    Op op = Op::kLeaf;
    int a = -1;
    int b = -1;
    std::size_t index = 0;
    double scalar_arg = 0.0;
    std::vector<double> mask;
    std::vector<int> inputs;  // kSumList only
    Matrix value;
    Matrix grad;
  };

  Node leaf(Matrix value);
  Node leaf(const Matrix* external);  // copies; convenience for parameter structs

  Node matmul(Node a, Node b);
  Node add(Node a, Node b);
  Node mul(Node a, Node b);
  Node sigmoid(Node a);
  Node tanh(Node a);
  Node softmax(Node a);
  Node scale(Node a, double s);
  Node neg(Node a) { return scale(a, -1.0); }
  Node pick(Node a, std::size_t index);
  Node log(Node a);
  Node dot_mask(Node a, std::vector<double> mask);
  Node concat_rows(Node a, Node b);
  Node embed_row(Node table, std::size_t row);
  Node sum(const std::vector<Node>& nodes);

  // -log probs[target]; `probs` must be a probability column vector.
  Node cross_entropy(Node probs, std::size_t target);

  // Zeroes every gradient accumulator, then propagates from `loss` (which
  // must be scalar) back to all reachable nodes.
  void backward(Node loss);

  const Matrix& value(Node n) const { return entries_[check(n)].value; }
  const Matrix& grad(Node n) const { return entries_[check(n)].grad; }

  std::size_t size() const { return entries_.size(); }

 private:
  int check(Node n) const;
  Node push(Entry e);
  const Matrix& val(int id) const { return entries_[id].value; }
  Matrix& grd(int id) { return entries_[id].grad; }
  void backward_one(Entry& e);

  std::vector<Entry> entries_;
};

}  // namespace pungan
