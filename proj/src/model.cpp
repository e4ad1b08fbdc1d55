#include "svdrec/model.hpp"

#include <cmath>
#include <stdexcept>

#include "svdrec/rng.hpp"

namespace svdrec {

ModelParams ModelParams::init(std::int64_t input_dim, std::int64_t hidden, std::uint64_t seed) {
  ModelParams p;
  p.input_dim = input_dim;
  p.hidden = hidden;
  p.w1 = DenseMatrix(input_dim, hidden);
  p.w2 = DenseMatrix(hidden, hidden);
  p.b1.assign(hidden, 0.0);
  p.b2.assign(hidden, 0.0);

  Rng rng(seed);
  const double lim1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (double& x : p.w1.data) x = rng.uniform(-lim1, lim1);
  const double lim2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& x : p.w2.data) x = rng.uniform(-lim2, lim2);
  return p;
}

ModelGrads ModelGrads::zeros(std::int64_t input_dim, std::int64_t hidden) {
  ModelGrads g;
  g.w1 = DenseMatrix(input_dim, hidden);
  g.w2 = DenseMatrix(hidden, hidden);
  g.b1.assign(hidden, 0.0);
  g.b2.assign(hidden, 0.0);
  return g;
}

void ModelGrads::scale(double factor) {
  for (double& x : w1.data) x *= factor;
  for (double& x : b1) x *= factor;
  for (double& x : w2.data) x *= factor;
  for (double& x : b2) x *= factor;
}

namespace {

void affine_t(const DenseMatrix& w, const std::vector<double>& b, const double* x,
              double* out) {
  // out = w^T x + b for row-major w (in x out).
  const std::int64_t in = w.rows, n = w.cols;
  for (std::int64_t j = 0; j < n; ++j) out[j] = b[j];
  for (std::int64_t i = 0; i < in; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* wi = w.row(i);
    for (std::int64_t j = 0; j < n; ++j) out[j] += xi * wi[j];
  }
}

}  // namespace

void forward(const ModelParams& p, std::span<const double> x, std::span<double> out) {
  if (static_cast<std::int64_t>(x.size()) != p.input_dim)
    throw std::invalid_argument("forward: input length != input_dim");
  if (static_cast<std::int64_t>(out.size()) != p.concat_dim())
    throw std::invalid_argument("forward: output length != concat_dim");
  const std::int64_t d = p.input_dim, h = p.hidden;
  for (std::int64_t i = 0; i < d; ++i) out[i] = x[i];
  affine_t(p.w1, p.b1, x.data(), out.data() + d);
  affine_t(p.w2, p.b2, out.data() + d, out.data() + d + h);
}

std::vector<double> forward(const ModelParams& p, std::span<const double> x) {
  std::vector<double> out(p.concat_dim());
  forward(p, x, out);
  return out;
}

double score(const ModelParams& p, std::span<const double> x_user,
             std::span<const double> x_item) {
  const std::vector<double> cu = forward(p, x_user);
  const std::vector<double> ci = forward(p, x_item);
  double acc = 0.0;
  for (std::size_t k = 0; k < cu.size(); ++k) acc += cu[k] * ci[k];
  return acc;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double bpr_loss_term(double delta) {
  // -ln sigmoid(delta) = softplus(-delta), split to avoid overflow.
  return delta > 0.0 ? std::log1p(std::exp(-delta)) : -delta + std::log1p(std::exp(delta));
}

namespace {

struct Activations {
  std::vector<double> m1, m2;
};

Activations run_layers(const ModelParams& p, const double* x) {
  Activations a;
  a.m1.resize(p.hidden);
  a.m2.resize(p.hidden);
  affine_t(p.w1, p.b1, x, a.m1.data());
  affine_t(p.w2, p.b2, a.m1.data(), a.m2.data());
  return a;
}

double pair_score(std::int64_t d, const double* xa, const Activations& a, const double* xb,
                  const Activations& b) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < d; ++i) acc += xa[i] * xb[i];
  for (std::size_t j = 0; j < a.m1.size(); ++j) acc += a.m1[j] * b.m1[j];
  for (std::size_t j = 0; j < a.m2.size(); ++j) acc += a.m2[j] * b.m2[j];
  return acc;
}

// Accumulates coef * d score(a, b) / d params. With r_x = m1_x + w2 m2_x:
//   dW1 += x_a r_b^T + x_b r_a^T,  db1 += r_a + r_b,
//   dW2 += m1_a m2_b^T + m1_b m2_a^T,  db2 += m2_a + m2_b.
void add_pair_grad(const ModelParams& p, ModelGrads& g, double coef, const double* xa,
                   const Activations& a, const double* xb, const Activations& b) {
  const std::int64_t d = p.input_dim, h = p.hidden;
  std::vector<double> ra(a.m1), rb(b.m1);
  for (std::int64_t i = 0; i < h; ++i) {
    const double* w2i = p.w2.row(i);
    double acc_a = 0.0, acc_b = 0.0;
    for (std::int64_t j = 0; j < h; ++j) {
      acc_a += w2i[j] * a.m2[j];
      acc_b += w2i[j] * b.m2[j];
    }
    ra[i] += acc_a;
    rb[i] += acc_b;
  }
  for (std::int64_t i = 0; i < d; ++i) {
    double* gw1 = g.w1.row(i);
    const double ca = coef * xa[i], cb = coef * xb[i];
    for (std::int64_t j = 0; j < h; ++j) gw1[j] += ca * rb[j] + cb * ra[j];
  }
  for (std::int64_t j = 0; j < h; ++j) g.b1[j] += coef * (ra[j] + rb[j]);
  for (std::int64_t i = 0; i < h; ++i) {
    double* gw2 = g.w2.row(i);
    const double ma = coef * a.m1[i], mb = coef * b.m1[i];
    for (std::int64_t j = 0; j < h; ++j) gw2[j] += ma * b.m2[j] + mb * a.m2[j];
  }
  for (std::int64_t j = 0; j < h; ++j) g.b2[j] += coef * (a.m2[j] + b.m2[j]);
}

}  // namespace

BprTripleResult bpr_triple_gradients(const ModelParams& p, std::span<const double> x_user,
                                     std::span<const double> x_pos,
                                     std::span<const double> x_neg) {
  const std::int64_t d = p.input_dim;
  if (static_cast<std::int64_t>(x_user.size()) != d ||
      static_cast<std::int64_t>(x_pos.size()) != d ||
      static_cast<std::int64_t>(x_neg.size()) != d)
    throw std::invalid_argument("bpr_triple_gradients: embedding length != input_dim");

  const Activations au = run_layers(p, x_user.data());
  const Activations ai = run_layers(p, x_pos.data());
  const Activations aj = run_layers(p, x_neg.data());

  const double s_ui = pair_score(d, x_user.data(), au, x_pos.data(), ai);
  const double s_uj = pair_score(d, x_user.data(), au, x_neg.data(), aj);
  const double delta = s_ui - s_uj;
  if (!std::isfinite(delta))
    throw std::runtime_error("bpr_triple_gradients: non-finite score difference");

  BprTripleResult out;
  out.loss = bpr_loss_term(delta);
  out.grads = ModelGrads::zeros(d, p.hidden);
  const double g = sigmoid(delta) - 1.0;
  add_pair_grad(p, out.grads, g, x_user.data(), au, x_pos.data(), ai);
  add_pair_grad(p, out.grads, -g, x_user.data(), au, x_neg.data(), aj);
  return out;
}

}  // namespace svdrec
