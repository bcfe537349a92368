#pragma once

#include <vector>

#include "pungan/matrix.hpp"
#include "pungan/rng.hpp"
#include "pungan/tape.hpp"

namespace pungan {

// Per-gate weights of a standard LSTM cell (input, forget, candidate, output).
struct LstmCellParams {
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  // input-to-hidden (hidden x input), hidden-to-hidden (hidden x hidden), bias (hidden x 1)
  Matrix w_xi, w_hi, b_i;
  Matrix w_xf, w_hf, b_f;
  Matrix w_xg, w_hg, b_g;
  Matrix w_xo, w_ho, b_o;

  static LstmCellParams init(std::size_t input_dim, std::size_t hidden, Rng& rng, double range);

  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
};

// Tape handles for one cell's parameters.
struct LstmCellNodes {
  Node w_xi, w_hi, b_i;
  Node w_xf, w_hf, b_f;
  Node w_xg, w_hg, b_g;
  Node w_xo, w_ho, b_o;
};

struct LstmState {
  Node h;
  Node cell;
};

LstmCellNodes load_lstm(Tape& tape, const LstmCellParams& params);

// Zero initial state of the right size.
LstmState lstm_initial_state(Tape& tape, std::size_t hidden);

// One step of the gate equations:
//   i = sigmoid(Wxi x + Whi h + bi)    f = sigmoid(Wxf x + Whf h + bf)
//   g = tanh(Wxg x + Whg h + bg)       o = sigmoid(Wxo x + Who h + bo)
//   cell' = f * cell + i * g           h' = o * tanh(cell')
// Throws ShapeError if `input` does not match the cell's input dimension.
LstmState lstm_step(Tape& tape, const LstmCellNodes& cell, Node input, const LstmState& state);

}  // namespace pungan
