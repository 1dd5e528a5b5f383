#include "kellylab/process_model.hpp"

#include <limits>
#include <string>

#include "kellylab/error.hpp"

namespace kellylab {

ConditionalKernel ConditionalKernel::filled(TableShape shape, Memory memory,
                                            const HistoryTable::RowFiller& rows) {
  ConditionalKernel kernel(shape, memory);
  kernel.table_.fill([&](std::span<const int> own, std::span<const int> other, std::span<double> row) {
    rows(own, other, row);
    validate_probability_row(row, "kernel row");
  });
  return kernel;
}

void ConditionalKernel::set_row(std::uint64_t key, std::span<const double> probs) {
  validate_probability_row(probs, "kernel row");
  table_.set_row(key, probs);
}

TableShape outcome_shape(ModelDims dims, std::size_t step) {
  return {dims.y, step, dims.x, step + 1, dims.y};
}

TableShape side_shape(ModelDims dims, std::size_t step) {
  return {dims.x, step, dims.y, step, dims.x};
}

ProcessModel::ProcessModel(std::size_t n, Alphabet y_alphabet, Alphabet x_alphabet,
                           std::vector<ConditionalKernel> y_kernels,
                           std::vector<ConditionalKernel> x_kernels)
    : n_(n),
      y_alphabet_(std::move(y_alphabet)),
      x_alphabet_(std::move(x_alphabet)),
      y_kernels_(std::move(y_kernels)),
      x_kernels_(std::move(x_kernels)) {
  if (n_ == 0) throw InvalidModel("a process model needs n >= 1");
  if (y_alphabet_.size() == 0 || x_alphabet_.size() == 0) throw InvalidModel("empty alphabet");
  if (y_kernels_.size() != n_ || x_kernels_.size() != n_) {
    throw InvalidModel("expected one outcome kernel and one side-information kernel per step");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (!(y_kernels_[i].table().shape() == outcome_shape(dims(), i))) {
      throw InvalidModel("outcome kernel at step " + std::to_string(i + 1) + " has the wrong shape");
    }
    if (!(x_kernels_[i].table().shape() == side_shape(dims(), i))) {
      throw InvalidModel("side-information kernel at step " + std::to_string(i + 1) +
                         " has the wrong shape");
    }
  }
}

ProcessModel ProcessModel::stationary(std::size_t n, Alphabet y_alphabet, Alphabet x_alphabet,
                                      Memory y_memory, const HistoryTable::RowFiller& y_rows,
                                      Memory x_memory, const HistoryTable::RowFiller& x_rows) {
  const ModelDims dims{y_alphabet.size(), x_alphabet.size()};
  std::vector<ConditionalKernel> ys;
  std::vector<ConditionalKernel> xs;
  for (std::size_t i = 0; i < n; ++i) {
    ys.push_back(ConditionalKernel::filled(outcome_shape(dims, i), y_memory, y_rows));
    xs.push_back(ConditionalKernel::filled(side_shape(dims, i), x_memory, x_rows));
  }
  return ProcessModel(n, std::move(y_alphabet), std::move(x_alphabet), std::move(ys), std::move(xs));
}

ProcessModel ProcessModel::without_side_information(std::size_t n, Alphabet y_alphabet,
                                                    Memory y_memory,
                                                    const HistoryTable::RowFiller& y_rows) {
  return stationary(
      n, std::move(y_alphabet), Alphabet::trivial(), Memory::markov(y_memory.own, 0), y_rows,
      Memory::markov(0, 0), [](auto, auto, std::span<double> row) { row[0] = 1.0; });
}

std::span<const double> ProcessModel::outcome_row(std::size_t step, std::span<const int> ys,
                                                  std::span<const int> xs) const {
  return y_kernels_.at(step).row(ys, xs);
}

std::span<const double> ProcessModel::side_row(std::size_t step, std::span<const int> xs,
                                               std::span<const int> ys) const {
  return x_kernels_.at(step).row(xs, ys);
}

double ProcessModel::history_probability(std::span<const int> ys, std::span<const int> xs) const {
  const std::size_t step = ys.size();
  if (xs.size() != step + 1 || step >= n_) {
    throw InvalidParameter("history must be (y^{i-1}, x^i) with i <= n");
  }
  double p = 1.0;
  for (std::size_t j = 0; j <= step; ++j) {
    p *= side_row(j, xs.first(j), ys.first(j))[static_cast<std::size_t>(xs[j])];
    if (p == 0.0) return 0.0;
    if (j == step) break;
    p *= outcome_row(j, ys.first(j), xs.first(j + 1))[static_cast<std::size_t>(ys[j])];
    if (p == 0.0) return 0.0;
  }
  return p;
}

std::uint64_t ProcessModel::sequence_count() const {
  const std::uint64_t per_step = static_cast<std::uint64_t>(x_alphabet_.size()) * y_alphabet_.size();
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n_; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / per_step) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= per_step;
  }
  return count;
}

}  // namespace kellylab
