#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "svdrec/dense_matrix.hpp"

namespace svdrec {

// Two-layer perceptron with identity activation, shared between the user and
// item towers. A node's representation is the concatenation of its input
// embedding with both layer outputs; scores are dot products of two such
// representations.
struct ModelParams {
  std::int64_t input_dim = 0;  // d
  std::int64_t hidden = 0;     // h
  DenseMatrix w1;              // d x h
  std::vector<double> b1;      // h
  DenseMatrix w2;              // h x h
  std::vector<double> b2;      // h

  std::int64_t concat_dim() const { return input_dim + 2 * hidden; }

  // Weights uniform in (-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
  static ModelParams init(std::int64_t input_dim, std::int64_t hidden, std::uint64_t seed);
};

// Gradient (or optimizer moment) storage shaped like ModelParams.
struct ModelGrads {
  DenseMatrix w1;
  std::vector<double> b1;
  DenseMatrix w2;
  std::vector<double> b2;

  static ModelGrads zeros(std::int64_t input_dim, std::int64_t hidden);
  void scale(double factor);
};

// [x | w1^T x + b1 | w2^T m1 + b2], written into out (length d + 2h).
void forward(const ModelParams& p, std::span<const double> x, std::span<double> out);
std::vector<double> forward(const ModelParams& p, std::span<const double> x);

double score(const ModelParams& p, std::span<const double> x_user,
             std::span<const double> x_item);

struct BprTripleResult {
  double loss = 0.0;  // -ln sigmoid(score(u,i) - score(u,j))
  ModelGrads grads;
};

// Exact analytic gradients of the pairwise ranking loss for one
// (user, positive, negative) triple. Throws on non-finite intermediates.
BprTripleResult bpr_triple_gradients(const ModelParams& p, std::span<const double> x_user,
                                     std::span<const double> x_pos,
                                     std::span<const double> x_neg);

// Numerically stable -ln sigmoid(delta) and its building block.
double bpr_loss_term(double delta);
double sigmoid(double x);

}  // namespace svdrec
