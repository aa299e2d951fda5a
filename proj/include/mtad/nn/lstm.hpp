#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mtad/nn/param.hpp"
#include "mtad/numeric/array.hpp"
#include "mtad/numeric/rng.hpp"

namespace mtad::nn {

template <typename T>
struct LstmState {
  std::vector<T> h;
  std::vector<T> c;

  static LstmState zeros(std::size_t hidden) { return {std::vector<T>(hidden), std::vector<T>(hidden)}; }
};

/// One LSTM cell without peepholes. Gate rows of W are ordered input, forget,
/// candidate, output; columns are [x ; h_prev].
///
///   i = sig(a_i)  f = sig(a_f)  g = tanh(a_g)  o = sig(a_o)
///   c = f * c_prev + i * g,  h = o * tanh(c)
template <typename T>
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(ParamStore<T>& store, const std::string& name, std::size_t input, std::size_t hidden,
           SeededRng& rng);

  std::size_t input_size() const { return input_; }
  std::size_t hidden_size() const { return hidden_; }

  /// Activations of one step, kept for the backward pass.
  struct StepTape {
    std::vector<T> z;      // [x ; h_prev]
    std::vector<T> gates;  // activated i, f, g, o
    std::vector<T> c_prev;
    std::vector<T> tanh_c;
  };

  /// Writes h and c; x may be null when input_size() == 0.
  void step(const T* x, const T* h_prev, const T* c_prev, T* h, T* c, StepTape* tape) const;

  /// Given dL/dh and dL/dc of this step, accumulates parameter gradients and
  /// adds dL/dx, dL/dh_prev into the double accumulators (dx may be null) and
  /// writes dL/dc_prev.
  void backward(const StepTape& tape, const T* dh, const T* dc, double* dx, double* dh_prev,
                T* dc_prev);

  Param<T>* weight = nullptr;  // [4h x (in + h)]
  Param<T>* bias = nullptr;    // [4h]

 private:
  std::size_t input_ = 0, hidden_ = 0;
};

/// Convenience wrapper matching the single-step contract: returns (h, c).
template <typename T>
LstmState<T> lstm_cell_step(const LstmCell<T>& cell, std::span<const T> x, const LstmState<T>& prev);

/// An LSTM run over a whole sequence in one direction.
template <typename T>
class Lstm {
 public:
  Lstm() = default;
  Lstm(ParamStore<T>& store, const std::string& name, std::size_t input, std::size_t hidden,
       bool reverse, SeededRng& rng);

  std::size_t input_size() const { return cell_.input_size(); }
  std::size_t hidden_size() const { return cell_.hidden_size(); }
  bool reverse() const { return reverse_; }
  LstmCell<T>& cell() { return cell_; }
  const LstmCell<T>& cell() const { return cell_; }

  struct Tape {
    std::vector<typename LstmCell<T>::StepTape> steps;  // processing order
  };

  /// Outputs are indexed by time regardless of direction. x is [steps x in],
  /// or null for an input-free run (input_size() must be 0).
  BasicArray<T> forward(const BasicArray<T>* x, std::size_t steps, const LstmState<T>& init,
                        LstmState<T>& final_state, Tape* tape) const;

  /// d_out may be null (no gradient reaching the outputs), as may d_final. dx
  /// is resized and filled when non-null and input_size() > 0.
  void backward(const Tape& tape, const BasicArray<T>* d_out, const LstmState<T>* d_final,
                BasicArray<T>* dx, LstmState<T>& d_init);

 private:
  LstmCell<T> cell_;
  bool reverse_ = false;
};

/// Forward and reverse LSTMs over the same sequence; outputs concatenate the
/// two directions per step as [forward_t ; backward_t].
template <typename T>
class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(ParamStore<T>& store, const std::string& name, std::size_t input, std::size_t hidden,
         SeededRng& rng);

  std::size_t hidden_size() const { return fwd_.hidden_size(); }
  std::size_t input_size() const { return fwd_.input_size(); }
  Lstm<T>& forward_lstm() { return fwd_; }
  Lstm<T>& backward_lstm() { return bwd_; }

  struct Tape {
    typename Lstm<T>::Tape fwd, bwd;
  };

  struct Result {
    BasicArray<T> outputs;  // [steps x 2h]
    LstmState<T> forward_final;
    LstmState<T> backward_final;
  };

  Result forward(const BasicArray<T>* x, std::size_t steps, const LstmState<T>& init_fwd,
                 const LstmState<T>& init_bwd, Tape* tape) const;

  void backward(const Tape& tape, const BasicArray<T>* d_out, const LstmState<T>* d_final_fwd,
                const LstmState<T>* d_final_bwd, BasicArray<T>* dx, LstmState<T>& d_init_fwd,
                LstmState<T>& d_init_bwd);

 private:
  Lstm<T> fwd_, bwd_;
};

}  // namespace mtad::nn
