#include "mtad/nn/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "mtad/error.hpp"
#include "mtad/numeric/kernels.hpp"
#include "mtad/numeric/linalg.hpp"

namespace mtad::nn {

template <typename T>
LstmCell<T>::LstmCell(ParamStore<T>& store, const std::string& name, std::size_t input,
                      std::size_t hidden, SeededRng& rng)
    : input_(input), hidden_(hidden) {
  if (hidden == 0) throw ShapeError("lstm: hidden size must be positive");
  weight = &store.add(name + ".W", {4 * hidden, input + hidden}, true);
  bias = &store.add(name + ".b", {4 * hidden}, false);
  init_glorot(*weight, input + hidden, hidden, rng);
  // Forget-gate bias starts at +1 so early training keeps the cell state.
  for (std::size_t j = hidden; j < 2 * hidden; ++j) bias->value[j] = T(1);
}

template <typename T>
void LstmCell<T>::step(const T* x, const T* h_prev, const T* c_prev, T* h, T* c,
                       StepTape* tape) const {
  const std::size_t n = hidden_;
  const std::size_t k = input_ + hidden_;
  StepTape local;
  StepTape& t = tape ? *tape : local;
  t.z.resize(k);
  t.gates.resize(4 * n);
  t.c_prev.assign(c_prev, c_prev + n);
  t.tanh_c.resize(n);
  if (input_ > 0) std::copy(x, x + input_, t.z.begin());
  std::copy(h_prev, h_prev + n, t.z.begin() + static_cast<std::ptrdiff_t>(input_));

  T* a = t.gates.data();
  kernels::gemv(weight->value.data(), 4 * n, k, t.z.data(), bias->value.data(), a);
  for (std::size_t j = 0; j < n; ++j) {
    const T i = sigmoid(a[j]);
    const T f = sigmoid(a[n + j]);
    const T g = std::tanh(a[2 * n + j]);
    const T o = sigmoid(a[3 * n + j]);
    a[j] = i;
    a[n + j] = f;
    a[2 * n + j] = g;
    a[3 * n + j] = o;
    const T cj = f * c_prev[j] + i * g;
    const T tc = std::tanh(cj);
    t.tanh_c[j] = tc;
    c[j] = cj;
    h[j] = o * tc;
  }
}

template <typename T>
void LstmCell<T>::backward(const StepTape& tape, const T* dh, const T* dc_in, double* dx,
                           double* dh_prev, T* dc_prev) {
  const std::size_t n = hidden_;
  const std::size_t k = input_ + hidden_;
  std::vector<T> da(4 * n);
  const T* gates = tape.gates.data();
  for (std::size_t j = 0; j < n; ++j) {
    const T i = gates[j], f = gates[n + j], g = gates[2 * n + j], o = gates[3 * n + j];
    const T tc = tape.tanh_c[j];
    const T dc = dc_in[j] + dh[j] * o * (T(1) - tc * tc);
    da[j] = dc * g * i * (T(1) - i);
    da[n + j] = dc * tape.c_prev[j] * f * (T(1) - f);
    da[2 * n + j] = dc * i * (T(1) - g * g);
    da[3 * n + j] = dh[j] * tc * o * (T(1) - o);
    dc_prev[j] = dc * f;
  }
  kernels::ger_acc(weight->grad.data(), 4 * n, k, da.data(), tape.z.data());
  T* db = bias->grad.data();
  for (std::size_t r = 0; r < 4 * n; ++r) db[r] += da[r];

  std::vector<double> dz(k, 0.0);
  kernels::gemv_t_acc(weight->value.data(), 4 * n, k, da.data(), dz.data());
  if (dx) {
    for (std::size_t i = 0; i < input_; ++i) dx[i] += dz[i];
  }
  for (std::size_t j = 0; j < n; ++j) dh_prev[j] += dz[input_ + j];
}

template <typename T>
LstmState<T> lstm_cell_step(const LstmCell<T>& cell, std::span<const T> x, const LstmState<T>& prev) {
  if (x.size() != cell.input_size() || prev.h.size() != cell.hidden_size() ||
      prev.c.size() != cell.hidden_size()) {
    throw ShapeError("lstm_cell_step: operand sizes do not match the cell");
  }
  LstmState<T> next = LstmState<T>::zeros(cell.hidden_size());
  cell.step(x.data(), prev.h.data(), prev.c.data(), next.h.data(), next.c.data(), nullptr);
  return next;
}

// ---------------------------------------------------------------------------

template <typename T>
Lstm<T>::Lstm(ParamStore<T>& store, const std::string& name, std::size_t input, std::size_t hidden,
              bool reverse, SeededRng& rng)
    : cell_(store, name, input, hidden, rng), reverse_(reverse) {}

template <typename T>
BasicArray<T> Lstm<T>::forward(const BasicArray<T>* x, std::size_t steps, const LstmState<T>& init,
                               LstmState<T>& final_state, Tape* tape) const {
  const std::size_t n = hidden_size();
  const std::size_t in = input_size();
  if (steps == 0) throw ShapeError("lstm: sequence must have at least one step");
  if (x) {
    if (x->rank() != 2 || x->rows() != steps || x->cols() != in) {
      throw ShapeError("lstm: expected input [" + std::to_string(steps) + " x " +
                       std::to_string(in) + "], got " + shape_to_string(x->shape()));
    }
  } else if (in != 0) {
    throw ShapeError("lstm: input-free run requires input size 0");
  }
  if (init.h.size() != n || init.c.size() != n) throw ShapeError("lstm: initial state size mismatch");

  BasicArray<T> out({steps, n});
  if (tape) tape->steps.assign(steps, {});
  std::vector<T> h = init.h, c = init.c;
  std::vector<T> h_next(n), c_next(n);
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse_ ? steps - 1 - s : s;
    const T* xt = x ? x->row(t).data() : nullptr;
    cell_.step(xt, h.data(), c.data(), h_next.data(), c_next.data(), tape ? &tape->steps[s] : nullptr);
    h.swap(h_next);
    c.swap(c_next);
    std::copy(h.begin(), h.end(), out.row(t).begin());
  }
  final_state.h = std::move(h);
  final_state.c = std::move(c);
  return out;
}

template <typename T>
void Lstm<T>::backward(const Tape& tape, const BasicArray<T>* d_out, const LstmState<T>* d_final,
                       BasicArray<T>* dx, LstmState<T>& d_init) {
  const std::size_t n = hidden_size();
  const std::size_t in = input_size();
  const std::size_t steps = tape.steps.size();
  if (d_out && (d_out->rows() != steps || d_out->cols() != n)) {
    throw ShapeError("lstm backward: output gradient shape mismatch");
  }
  std::vector<double> dx_acc;
  if (dx && in > 0) dx_acc.assign(steps * in, 0.0);

  std::vector<T> dh(n, T(0)), dc(n, T(0));
  if (d_final) {
    dh = d_final->h;
    dc = d_final->c;
  }
  std::vector<double> dh_prev(n);
  std::vector<T> dc_prev(n);
  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = reverse_ ? steps - 1 - s : s;
    if (d_out) {
      const auto row = d_out->row(t);
      for (std::size_t j = 0; j < n; ++j) dh[j] += row[j];
    }
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    cell_.backward(tape.steps[s], dh.data(), dc.data(), dx_acc.empty() ? nullptr : dx_acc.data() + t * in,
                   dh_prev.data(), dc_prev.data());
    for (std::size_t j = 0; j < n; ++j) dh[j] = static_cast<T>(dh_prev[j]);
    dc.swap(dc_prev);
  }
  d_init.h = std::move(dh);
  d_init.c = std::move(dc);
  if (dx && in > 0) *dx = BasicArray<T>({steps, in}, std::vector<T>(dx_acc.begin(), dx_acc.end()));
}

// ---------------------------------------------------------------------------

template <typename T>
BiLstm<T>::BiLstm(ParamStore<T>& store, const std::string& name, std::size_t input,
                  std::size_t hidden, SeededRng& rng)
    : fwd_(store, name + ".fwd", input, hidden, false, rng),
      bwd_(store, name + ".bwd", input, hidden, true, rng) {}

template <typename T>
typename BiLstm<T>::Result BiLstm<T>::forward(const BasicArray<T>* x, std::size_t steps,
                                              const LstmState<T>& init_fwd,
                                              const LstmState<T>& init_bwd, Tape* tape) const {
  Result r;
  const auto of = fwd_.forward(x, steps, init_fwd, r.forward_final, tape ? &tape->fwd : nullptr);
  const auto ob = bwd_.forward(x, steps, init_bwd, r.backward_final, tape ? &tape->bwd : nullptr);
  const std::size_t n = hidden_size();
  r.outputs = BasicArray<T>({steps, 2 * n});
  for (std::size_t t = 0; t < steps; ++t) {
    auto row = r.outputs.row(t);
    std::copy(of.row(t).begin(), of.row(t).end(), row.begin());
    std::copy(ob.row(t).begin(), ob.row(t).end(), row.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return r;
}

template <typename T>
void BiLstm<T>::backward(const Tape& tape, const BasicArray<T>* d_out,
                         const LstmState<T>* d_final_fwd, const LstmState<T>* d_final_bwd,
                         BasicArray<T>* dx, LstmState<T>& d_init_fwd, LstmState<T>& d_init_bwd) {
  const std::size_t n = hidden_size();
  const std::size_t steps = tape.fwd.steps.size();
  BasicArray<T> d_of, d_ob;
  if (d_out) {
    if (d_out->rows() != steps || d_out->cols() != 2 * n) {
      throw ShapeError("bilstm backward: output gradient shape mismatch");
    }
    d_of = BasicArray<T>({steps, n});
    d_ob = BasicArray<T>({steps, n});
    for (std::size_t t = 0; t < steps; ++t) {
      const auto row = d_out->row(t);
      std::copy(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n), d_of.row(t).begin());
      std::copy(row.begin() + static_cast<std::ptrdiff_t>(n), row.end(), d_ob.row(t).begin());
    }
  }
  BasicArray<T> dx_f, dx_b;
  const bool want_dx = dx && input_size() > 0;
  fwd_.backward(tape.fwd, d_out ? &d_of : nullptr, d_final_fwd, want_dx ? &dx_f : nullptr, d_init_fwd);
  bwd_.backward(tape.bwd, d_out ? &d_ob : nullptr, d_final_bwd, want_dx ? &dx_b : nullptr, d_init_bwd);
  if (want_dx) {
    *dx = dx_f;
    for (std::size_t i = 0; i < dx->size(); ++i) (*dx)[i] += dx_b[i];
  }
}

template class LstmCell<float>;
template class LstmCell<double>;
template class Lstm<float>;
template class Lstm<double>;
template class BiLstm<float>;
template class BiLstm<double>;
template LstmState<float> lstm_cell_step(const LstmCell<float>&, std::span<const float>,
                                         const LstmState<float>&);
template LstmState<double> lstm_cell_step(const LstmCell<double>&, std::span<const double>,
                                          const LstmState<double>&);

}  // namespace mtad::nn
