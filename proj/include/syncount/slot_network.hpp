#pragma once

#include <stdexcept>
#include <vector>

#include "syncount/types.hpp"

namespace syncount {

// Scores slots from their multi-hot encodings:
//   h_0 = v,  h_i = tanh(W_i h_{i-1} [+ b_i]),  score = uᵀ h_k.
// With zero layers this is the linear scorer uᵀ v.
//
// Parameters live in a caller-owned flat array, laid out layer by layer:
// W_1 row-major, b_1 (if biases), ..., W_k, b_k, then u.
template <typename Scalar>
class SlotNetwork {
 public:
  using Index = Eigen::Index;
  using WeightMap = Eigen::Map<const RowMajorMatrix<Scalar>>;
  using WeightGradMap = Eigen::Map<RowMajorMatrix<Scalar>>;

  // Hidden activations of one forward pass, h_0 .. h_k, one column per slot.
  struct Activations {
    std::vector<Matrix<Scalar>> layers;
  };

  SlotNetwork(Index input_dim, int layers, Index hidden_dim, bool biases)
      : input_dim_(input_dim), layers_(layers), hidden_dim_(hidden_dim), biases_(biases) {
    if (layers < 0) throw std::invalid_argument("negative layer count");
    if (layers > 0 && hidden_dim < 1) throw std::invalid_argument("hidden width must be positive");
  }

  Index input_dim() const { return input_dim_; }
  int layers() const { return layers_; }
  Index hidden_dim() const { return hidden_dim_; }
  bool biases() const { return biases_; }

  Index layer_input_dim(int i) const { return i == 0 ? input_dim_ : hidden_dim_; }
  Index output_dim() const { return layers_ == 0 ? input_dim_ : hidden_dim_; }

  Index weight_offset(int i) const {
    Index off = 0;
    for (int j = 0; j < i; ++j) off += layer_size(j);
    return off;
  }
  Index bias_offset(int i) const { return weight_offset(i) + hidden_dim_ * layer_input_dim(i); }
  Index output_offset() const { return weight_offset(layers_); }
  Index parameter_count() const { return output_offset() + output_dim(); }

  // `features` is D × S; returns S scores.
  Vector<Scalar> forward(const Scalar* params, const Matrix<Scalar>& features,
                         Activations* trace = nullptr) const {
    Matrix<Scalar> h = features;
    if (trace) {
      trace->layers.clear();
      trace->layers.push_back(h);
    }
    for (int i = 0; i < layers_; ++i) {
      WeightMap w(params + weight_offset(i), hidden_dim_, layer_input_dim(i));
      Matrix<Scalar> z = w * h;
      if (biases_) {
        Eigen::Map<const Vector<Scalar>> b(params + bias_offset(i), hidden_dim_);
        z.colwise() += b;
      }
      h = z.array().tanh().matrix();
      if (trace) trace->layers.push_back(h);
    }
    Eigen::Map<const Vector<Scalar>> u(params + output_offset(), output_dim());
    return h.transpose() * u;
  }

  // Adds ∂(Σ_s g_s·score_s)/∂params into `grad`.
  void backward(const Scalar* params, const Activations& trace, const Vector<Scalar>& score_grad,
                Scalar* grad) const {
    const Matrix<Scalar>& top = trace.layers.back();
    Eigen::Map<const Vector<Scalar>> u(params + output_offset(), output_dim());
    Eigen::Map<Vector<Scalar>> du(grad + output_offset(), output_dim());
    du.noalias() += top * score_grad;

    Matrix<Scalar> dh = u * score_grad.transpose();
    for (int i = layers_ - 1; i >= 0; --i) {
      const Matrix<Scalar>& out = trace.layers[static_cast<std::size_t>(i) + 1];
      const Matrix<Scalar>& in = trace.layers[static_cast<std::size_t>(i)];
      Matrix<Scalar> dz = (dh.array() * (Scalar(1) - out.array().square())).matrix();
      WeightGradMap dw(grad + weight_offset(i), hidden_dim_, layer_input_dim(i));
      dw.noalias() += dz * in.transpose();
      if (biases_) {
        Eigen::Map<Vector<Scalar>> db(grad + bias_offset(i), hidden_dim_);
        db += dz.rowwise().sum();
      }
      if (i > 0) {
        WeightMap w(params + weight_offset(i), hidden_dim_, layer_input_dim(i));
        dh = w.transpose() * dz;
      }
    }
  }

 private:
  Index layer_size(int i) const {
    return hidden_dim_ * layer_input_dim(i) + (biases_ ? hidden_dim_ : 0);
  }

  Index input_dim_;
  int layers_;
  Index hidden_dim_;
  bool biases_;
};

}  // namespace syncount
