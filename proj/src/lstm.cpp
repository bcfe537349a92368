#include "pungan/lstm.hpp"

namespace pungan {

LstmCellParams LstmCellParams::init(std::size_t input_dim, std::size_t hidden, Rng& rng,
                                    double range) {
  LstmCellParams p;
  p.input_dim = input_dim;
  p.hidden = hidden;
  auto w_ih = [&] { return uniform_init(hidden, input_dim, rng, range); };
  auto w_hh = [&] { return uniform_init(hidden, hidden, rng, range); };
  auto bias = [&] { return uniform_init(hidden, 1, rng, range); };
  p.w_xi = w_ih(); p.w_hi = w_hh(); p.b_i = bias();
  p.w_xf = w_ih(); p.w_hf = w_hh(); p.b_f = bias();
  p.w_xg = w_ih(); p.w_hg = w_hh(); p.b_g = bias();
  p.w_xo = w_ih(); p.w_ho = w_hh(); p.b_o = bias();
  return p;
}

std::vector<Matrix*> LstmCellParams::parameters() {
  return {&w_xi, &w_hi, &b_i, &w_xf, &w_hf, &b_f, &w_xg, &w_hg, &b_g, &w_xo, &w_ho, &b_o};
}

std::vector<const Matrix*> LstmCellParams::parameters() const {
  return {&w_xi, &w_hi, &b_i, &w_xf, &w_hf, &b_f, &w_xg, &w_hg, &b_g, &w_xo, &w_ho, &b_o};
}

LstmCellNodes load_lstm(Tape& tape, const LstmCellParams& p) {
  LstmCellNodes n;
  n.w_xi = tape.leaf(p.w_xi); n.w_hi = tape.leaf(p.w_hi); n.b_i = tape.leaf(p.b_i);
  n.w_xf = tape.leaf(p.w_xf); n.w_hf = tape.leaf(p.w_hf); n.b_f = tape.leaf(p.b_f);
  n.w_xg = tape.leaf(p.w_xg); n.w_hg = tape.leaf(p.w_hg); n.b_g = tape.leaf(p.b_g);
  n.w_xo = tape.leaf(p.w_xo); n.w_ho = tape.leaf(p.w_ho); n.b_o = tape.leaf(p.b_o);
  return n;
}

LstmState lstm_initial_state(Tape& tape, std::size_t hidden) {
  return {tape.leaf(Matrix::zeros(hidden, 1)), tape.leaf(Matrix::zeros(hidden, 1))};
}

namespace {

Node gate_preact(Tape& t, Node wx, Node x, Node wh, Node h, Node b) {
  return t.add(t.add(t.matmul(wx, x), t.matmul(wh, h)), b);
}

}  // namespace

LstmState lstm_step(Tape& tape, const LstmCellNodes& cell, Node input, const LstmState& state) {
  const Matrix& x = tape.value(input);
  const Matrix& wxi = tape.value(cell.w_xi);
  if (!x.is_vector() || x.rows != wxi.cols) {
    throw ShapeError("lstm_step: input length does not match cell input dimension");
  }
  Node i = tape.sigmoid(gate_preact(tape, cell.w_xi, input, cell.w_hi, state.h, cell.b_i));
  Node f = tape.sigmoid(gate_preact(tape, cell.w_xf, input, cell.w_hf, state.h, cell.b_f));
  Node g = tape.tanh(gate_preact(tape, cell.w_xg, input, cell.w_hg, state.h, cell.b_g));
  Node o = tape.sigmoid(gate_preact(tape, cell.w_xo, input, cell.w_ho, state.h, cell.b_o));
  Node cell_next = tape.add(tape.mul(f, state.cell), tape.mul(i, g));
  Node h_next = tape.mul(o, tape.tanh(cell_next));
  return {h_next, cell_next};
}

}  // namespace pungan
