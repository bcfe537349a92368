#include "pungan/tape.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace pungan {

int Tape::check(Node n) const {
  if (n.id < 0 || static_cast<std::size_t>(n.id) >= entries_.size()) {
    throw std::invalid_argument("tape: node " + std::to_string(n.id) + " is not on this tape");
  }
  return n.id;
}

Node Tape::push(Entry e) {
  e.grad = Matrix::zeros(e.value.rows, e.value.cols);
  entries_.push_back(std::move(e));
  return Node{static_cast<int>(entries_.size()) - 1};
}

Node Tape::leaf(Matrix value) {
  Entry e;
  e.op = Op::kLeaf;
  e.value = std::move(value);
  return push(std::move(e));
}

Node Tape::leaf(const Matrix* external) { return leaf(*external); }

Node Tape::matmul(Node a, Node b) {
  const Matrix& ma = val(check(a));
  const Matrix& mb = val(check(b));
  Entry e;
  e.op = Op::kMatMul;
  e.a = a.id;
  e.b = b.id;
  e.value = pungan::matmul(ma, mb);
  return push(std::move(e));
}

Node Tape::add(Node a, Node b) {
  const Matrix& ma = val(check(a));
  const Matrix& mb = val(check(b));
  if (!ma.same_shape(mb)) throw ShapeError("tape add: shape mismatch");
  Entry e;
  e.op = Op::kAdd;
  e.a = a.id;
  e.b = b.id;
  e.value = ma;
  for (std::size_t i = 0; i < mb.data.size(); ++i) e.value.data[i] += mb.data[i];
  return push(std::move(e));
}

Node Tape::mul(Node a, Node b) {
  const Matrix& ma = val(check(a));
  const Matrix& mb = val(check(b));
  if (!ma.same_shape(mb)) throw ShapeError("tape mul: shape mismatch");
  Entry e;
  e.op = Op::kMul;
  e.a = a.id;
  e.b = b.id;
  e.value = ma;
  for (std::size_t i = 0; i < mb.data.size(); ++i) e.value.data[i] *= mb.data[i];
  return push(std::move(e));
}

Node Tape::sigmoid(Node a) {
  const Matrix& ma = val(check(a));
  Entry e;
  e.op = Op::kSigmoid;
  e.a = a.id;
  e.value = ma;
  for (double& v : e.value.data) v = 1.0 / (1.0 + std::exp(-v));
  return push(std::move(e));
}

Node Tape::tanh(Node a) {
  const Matrix& ma = val(check(a));
  Entry e;
  e.op = Op::kTanh;
  e.a = a.id;
  e.value = ma;
  for (double& v : e.value.data) v = std::tanh(v);
  return push(std::move(e));
}

Node Tape::softmax(Node a) {
  const Matrix& ma = val(check(a));
  Entry e;
  e.op = Op::kSoftmax;
  e.a = a.id;
  e.value = pungan::softmax(ma);
  return push(std::move(e));
}

Node Tape::scale(Node a, double s) {
  const Matrix& ma = val(check(a));
  Entry e;
  e.op = Op::kScale;
  e.a = a.id;
  e.scalar_arg = s;
  e.value = ma;
  for (double& v : e.value.data) v *= s;
  return push(std::move(e));
}

Node Tape::pick(Node a, std::size_t index) {
  const Matrix& ma = val(check(a));
  if (!ma.is_vector()) throw ShapeError("tape pick: expected a column vector");
  if (index >= ma.rows) {
    throw std::invalid_argument("tape pick: index " + std::to_string(index) +
                                " out of range for length " + std::to_string(ma.rows));
  }
  Entry e;
  e.op = Op::kPick;
  e.a = a.id;
  e.index = index;
  e.value = Matrix(1, 1, {ma.data[index]});
  return push(std::move(e));
}

Node Tape::log(Node a) {
  const Matrix& ma = val(check(a));
  Entry e;
  e.op = Op::kLog;
  e.a = a.id;
  e.value = ma;
  for (double& v : e.value.data) v = std::log(v);
  return push(std::move(e));
}

Node Tape::dot_mask(Node a, std::vector<double> mask) {
  const Matrix& ma = val(check(a));
  if (ma.data.size() != mask.size()) throw ShapeError("tape dot_mask: length mismatch");
  Entry e;
  e.op = Op::kDotMask;
  e.a = a.id;
  double s = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) s += ma.data[i] * mask[i];
  e.mask = std::move(mask);
  e.value = Matrix(1, 1, {s});
  return push(std::move(e));
}

Node Tape::concat_rows(Node a, Node b) {
  const Matrix& ma = val(check(a));
  const Matrix& mb = val(check(b));
  if (!ma.is_vector() || !mb.is_vector()) throw ShapeError("tape concat_rows: expected vectors");
  Entry e;
  e.op = Op::kConcatRows;
  e.a = a.id;
  e.b = b.id;
  e.value = Matrix(ma.rows + mb.rows, 1);
  std::copy(ma.data.begin(), ma.data.end(), e.value.data.begin());
  std::copy(mb.data.begin(), mb.data.end(), e.value.data.begin() + static_cast<long>(ma.rows));
  return push(std::move(e));
}

Node Tape::embed_row(Node table, std::size_t row) {
  const Matrix& mt = val(check(table));
  if (row >= mt.rows) {
    throw std::invalid_argument("tape embed_row: row " + std::to_string(row) +
                                " out of range for " + std::to_string(mt.rows) + " rows");
  }
  Entry e;
  e.op = Op::kEmbedRow;
  e.a = table.id;
  e.index = row;
  e.value = Matrix(mt.cols, 1);
  for (std::size_t j = 0; j < mt.cols; ++j) e.value.data[j] = mt.at(row, j);
  return push(std::move(e));
}

Node Tape::sum(const std::vector<Node>& nodes) {
  if (nodes.empty()) throw std::invalid_argument("tape sum: empty node list");
  Entry e;
  e.op = Op::kSumList;
  const Matrix& first = val(check(nodes[0]));
  e.value = first;
  e.inputs.reserve(nodes.size());
  e.inputs.push_back(nodes[0].id);
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const Matrix& mk = val(check(nodes[k]));
    if (!mk.same_shape(first)) throw ShapeError("tape sum: shape mismatch");
    for (std::size_t i = 0; i < mk.data.size(); ++i) e.value.data[i] += mk.data[i];
    e.inputs.push_back(nodes[k].id);
  }
  return push(std::move(e));
}

Node Tape::cross_entropy(Node probs, std::size_t target) {
  const Matrix& mp = val(check(probs));
  if (!mp.is_vector()) throw ShapeError("cross_entropy: expected a column vector");
  if (target >= mp.rows) {
    throw std::invalid_argument("cross_entropy: target " + std::to_string(target) +
                                " out of range for length " + std::to_string(mp.rows));
  }
  return neg(log(pick(probs, target)));
}

void Tape::backward(Node loss) {
  Entry& top = entries_[check(loss)];
  if (!top.value.is_scalar()) {
    throw std::invalid_argument("tape backward: loss must be scalar (1x1)");
  }
  for (Entry& e : entries_) e.grad.fill(0.0);
  top.grad.data[0] = 1.0;
  for (std::size_t k = entries_.size(); k-- > 0;) {
    if (static_cast<int>(k) > loss.id) continue;  // recorded after the loss; unreachable
    backward_one(entries_[k]);
  }
}

void Tape::backward_one(Entry& e) {
  switch (e.op) {
    case Op::kLeaf:
      break;
    case Op::kMatMul: {
      const Matrix& ma = val(e.a);
      const Matrix& mb = val(e.b);
      Matrix& ga = grd(e.a);
      Matrix& gb = grd(e.b);
      // dA += dC * B^T ; dB += A^T * dC
      for (std::size_t i = 0; i < ma.rows; ++i) {
        for (std::size_t k = 0; k < ma.cols; ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < mb.cols; ++j) {
            s += e.grad.at(i, j) * mb.at(k, j);
          }
          ga.at(i, k) += s;
        }
      }
      for (std::size_t k = 0; k < mb.rows; ++k) {
        for (std::size_t j = 0; j < mb.cols; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < ma.rows; ++i) {
            s += ma.at(i, k) * e.grad.at(i, j);
          }
          gb.at(k, j) += s;
        }
      }
      break;
    }
    case Op::kAdd: {
      Matrix& ga = grd(e.a);
      Matrix& gb = grd(e.b);
      for (std::size_t i = 0; i < e.grad.data.size(); ++i) {
        ga.data[i] += e.grad.data[i];
        gb.data[i] += e.grad.data[i];
      }
      break;
    }
    case Op::kMul: {
      const Matrix& ma = val(e.a);
      const Matrix& mb = val(e.b);
      Matrix& ga = grd(e.a);
      Matrix& gb = grd(e.b);
      for (std::size_t i = 0; i < e.grad.data.size(); ++i) {
        ga.data[i] += e.grad.data[i] * mb.data[i];
        gb.data[i] += e.grad.data[i] * ma.data[i];
      }
      break;
    }
    case Op::kSigmoid: {
      Matrix& ga = grd(e.a);
      for (std::size_t i = 0; i < e.grad.data.size(); ++i) {
        const double y = e.value.data[i];
        ga.data[i] += e.grad.data[i] * y * (1.0 - y);
      }
      break;
    }
    case Op::kTanh: {
      Matrix& ga = grd(e.a);
      for (std::size_t i = 0; i < e.grad.data.size(); ++i) {
        const double y = e.value.data[i];
        ga.data[i] += e.grad.data[i] * (1.0 - y * y);
      }
      break;
    }
    case Op::kSoftmax: {
      Matrix& ga = grd(e.a);
      double dot = 0.0;
      for (std::size_t i = 0; i < e.grad.data.size(); ++i) {
        dot += e.grad.data[i] * e.value.data[i];
      }
      for (std::size_t i = 0; i < e.grad.data.size(); ++i) {
        ga.data[i] += e.value.data[i] * (e.grad.data[i] - dot);
      }
      break;
    }
    case Op::kScale: {
      Matrix& ga = grd(e.a);
      for (std::size_t i = 0; i < e.grad.data.size(); ++i) {
        ga.data[i] += e.scalar_arg * e.grad.data[i];
      }
      break;
    }
    case Op::kPick: {
      grd(e.a).data[e.index] += e.grad.data[0];
      break;
    }
    case Op::kLog: {
      const Matrix& ma = val(e.a);
      Matrix& ga = grd(e.a);
      for (std::size_t i = 0; i < e.grad.data.size(); ++i) {
        ga.data[i] += e.grad.data[i] / ma.data[i];
      }
      break;
    }
    case Op::kDotMask: {
      Matrix& ga = grd(e.a);
      for (std::size_t i = 0; i < e.mask.size(); ++i) {
        ga.data[i] += e.grad.data[0] * e.mask[i];
      }
      break;
    }
    case Op::kConcatRows: {
      Matrix& ga = grd(e.a);
      Matrix& gb = grd(e.b);
      for (std::size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += e.grad.data[i];
      for (std::size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += e.grad.data[ga.data.size() + i];
      break;
    }
    case Op::kEmbedRow: {
      Matrix& gt = grd(e.a);
      const std::size_t cols = gt.cols;
      for (std::size_t j = 0; j < cols; ++j) {
        gt.at(e.index, j) += e.grad.data[j];
      }
      break;
    }
    case Op::kSumList: {
      for (int in : e.inputs) {
        Matrix& gi = grd(in);
        for (std::size_t i = 0; i < e.grad.data.size(); ++i) gi.data[i] += e.grad.data[i];
      }
      break;
    }
  }
}

}  // namespace pungan
