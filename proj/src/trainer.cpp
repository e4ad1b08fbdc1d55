#include "svdrec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "svdrec/evaluator.hpp"

namespace svdrec {

AdamState AdamState::init(std::int64_t input_dim, std::int64_t hidden) {
  AdamState st;
  st.m = ModelGrads::zeros(input_dim, hidden);
  st.v = ModelGrads::zeros(input_dim, hidden);
  return st;
}

std::vector<Triple> sample_epoch_triples(const InteractionDataset& d, Rng& rng) {
  std::vector<Triple> triples;
  triples.reserve(static_cast<std::size_t>(d.train_interactions()));
  for (std::int64_t u = 0; u < d.num_users; ++u) {
    const auto& pos_items = d.train[static_cast<std::size_t>(u)];
    if (pos_items.empty()) continue;
    if (static_cast<std::int64_t>(pos_items.size()) == d.num_items) {
      throw std::runtime_error("sample_epoch_triples: user " + std::to_string(u) +
                               " interacts with every item; no negative exists");
    }
    for (std::int64_t pos : pos_items) {
      std::int64_t neg;
      do {
        neg = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(d.num_items)));
      } while (std::binary_search(pos_items.begin(), pos_items.end(), neg));
      triples.push_back(Triple{u, pos, neg});
    }
  }
  for (std::size_t i = triples.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(triples[i - 1], triples[j]);
  }
  return triples;
}

namespace {

DenseMatrix gather_rows(const EmbeddingTable& e, std::span<const Triple> batch,
                        std::int64_t Triple::* field, bool user_side) {
  DenseMatrix out(static_cast<std::int64_t>(batch.size()), e.dim);
  for (std::size_t t = 0; t < batch.size(); ++t) {
    const double* src = user_side ? e.user(batch[t].*field) : e.item(batch[t].*field);
    std::memcpy(out.row(static_cast<std::int64_t>(t)), src,
                static_cast<std::size_t>(e.dim) * sizeof(double));
  }
  return out;
}

void add_row_broadcast(DenseMatrix& a, const std::vector<double>& bias) {
  for (std::int64_t i = 0; i < a.rows; ++i) {
    double* r = a.row(i);
    for (std::int64_t j = 0; j < a.cols; ++j) r[j] += bias[static_cast<std::size_t>(j)];
  }
}

// diff = g[t] * (a[t] - b[t]) per row
DenseMatrix scaled_row_diff(const DenseMatrix& a, const DenseMatrix& b,
                            const std::vector<double>& g) {
  DenseMatrix out(a.rows, a.cols);
  for (std::int64_t i = 0; i < a.rows; ++i) {
    const double* ra = a.row(i);
    const double* rb = b.row(i);
    double* ro = out.row(i);
    double gi = g[static_cast<std::size_t>(i)];
    for (std::int64_t j = 0; j < a.cols; ++j) ro[j] = gi * (ra[j] - rb[j]);
  }
  return out;
}

std::vector<double> column_sums(const DenseMatrix& a) {
  std::vector<double> out(static_cast<std::size_t>(a.cols), 0.0);
  for (std::int64_t i = 0; i < a.rows; ++i) {
    const double* r = a.row(i);
    for (std::int64_t j = 0; j < a.cols; ++j) out[static_cast<std::size_t>(j)] += r[j];
  }
  return out;
}

double row_dot(const DenseMatrix& a, const DenseMatrix& b, std::int64_t i) {
  const double* ra = a.row(i);
  const double* rb = b.row(i);
  double acc = 0.0;
  for (std::int64_t j = 0; j < a.cols; ++j) acc += ra[j] * rb[j];
  return acc;
}

void add_into(DenseMatrix& dst, const DenseMatrix& src) {
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

double squared_norm(const DenseMatrix& a) {
  double acc = 0.0;
  for (double v : a.data) acc += v * v;
  return acc;
}

}  // namespace

BatchResult bpr_batch_loss(const ModelParams& p, std::span<const Triple> batch,
                           const EmbeddingTable& e, double l2) {
  if (e.dim != p.input_dim) throw std::invalid_argument("bpr_batch_loss: dim mismatch");
  BatchResult out;
  out.grads = ModelGrads::zeros(p.input_dim, p.hidden);
  if (batch.empty()) {
    out.loss = l2 * (squared_norm(p.w1) + squared_norm(p.w2));
    return out;
  }
  const std::int64_t n = static_cast<std::int64_t>(batch.size());

  DenseMatrix xu = gather_rows(e, batch, &Triple::user, true);
  DenseMatrix xi = gather_rows(e, batch, &Triple::pos, false);
  DenseMatrix xj = gather_rows(e, batch, &Triple::neg, false);

  auto layer1 = [&](const DenseMatrix& x) {
    DenseMatrix m1 = matmul(x, p.w1);
    add_row_broadcast(m1, p.b1);
    return m1;
  };
  auto layer2 = [&](const DenseMatrix& m1) {
    DenseMatrix m2 = matmul(m1, p.w2);
    add_row_broadcast(m2, p.b2);
    return m2;
  };
  DenseMatrix m1u = layer1(xu), m1i = layer1(xi), m1j = layer1(xj);
  DenseMatrix m2u = layer2(m1u), m2i = layer2(m1i), m2j = layer2(m1j);

  // r = m1 + w2 m2 collects both places m1 feeds the score
  auto residual = [&](const DenseMatrix& m1, const DenseMatrix& m2) {
    DenseMatrix r = matmul_nt(m2, p.w2);
    add_into(r, m1);
    return r;
  };
  DenseMatrix ru = residual(m1u, m2u);
  DenseMatrix ri = residual(m1i, m2i);
  DenseMatrix rj = residual(m1j, m2j);

  std::vector<double> g(static_cast<std::size_t>(n));
  double loss_sum = 0.0;
  for (std::int64_t t = 0; t < n; ++t) {
    double s_ui = row_dot(xu, xi, t) + row_dot(m1u, m1i, t) + row_dot(m2u, m2i, t);
    double s_uj = row_dot(xu, xj, t) + row_dot(m1u, m1j, t) + row_dot(m2u, m2j, t);
    double delta = s_ui - s_uj;
    if (!std::isfinite(delta)) {
      throw std::runtime_error("bpr_batch_loss: non-finite score difference (diverged?)");
    }
    loss_sum += bpr_loss_term(delta);
    g[static_cast<std::size_t>(t)] = sigmoid(delta) - 1.0;
  }

  DenseMatrix g_rij = scaled_row_diff(ri, rj, g);      // n x h
  DenseMatrix g_xij = scaled_row_diff(xi, xj, g);      // n x d
  DenseMatrix g_m2ij = scaled_row_diff(m2i, m2j, g);   // n x h
  DenseMatrix g_m1ij = scaled_row_diff(m1i, m1j, g);   // n x h

  out.grads.w1 = matmul_tn(xu, g_rij);
  add_into(out.grads.w1, matmul_tn(g_xij, ru));
  out.grads.b1 = column_sums(g_rij);
  out.grads.w2 = matmul_tn(m1u, g_m2ij);
  add_into(out.grads.w2, matmul_tn(g_m1ij, m2u));
  out.grads.b2 = column_sums(g_m2ij);

  out.grads.scale(1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < p.w1.data.size(); ++i) {
    out.grads.w1.data[i] += 2.0 * l2 * p.w1.data[i];
  }
  for (std::size_t i = 0; i < p.w2.data.size(); ++i) {
    out.grads.w2.data[i] += 2.0 * l2 * p.w2.data[i];
  }
  out.loss = loss_sum / static_cast<double>(n) + l2 * (squared_norm(p.w1) + squared_norm(p.w2));
  return out;
}

namespace {

void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 std::vector<double>& m, std::vector<double>& v, double lr, double beta1,
                 double beta2, double eps, double bc1, double bc2) {
  const std::int64_t n = static_cast<std::int64_t>(param.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    std::size_t s = static_cast<std::size_t>(i);
    m[s] = beta1 * m[s] + (1.0 - beta1) * grad[s];
    v[s] = beta2 * v[s] + (1.0 - beta2) * grad[s] * grad[s];
    double mhat = m[s] / bc1;
    double vhat = v[s] / bc2;
    param[s] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

void adam_step(ModelParams& p, const ModelGrads& grads, AdamState& st, double lr) {
  st.t += 1;
  double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
  double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
  adam_update(p.w1.data, grads.w1.data, st.m.w1.data, st.v.w1.data, lr, st.beta1, st.beta2,
              st.eps, bc1, bc2);
  adam_update(p.b1, grads.b1, st.m.b1, st.v.b1, lr, st.beta1, st.beta2, st.eps, bc1, bc2);
  adam_update(p.w2.data, grads.w2.data, st.m.w2.data, st.v.w2.data, lr, st.beta1, st.beta2,
              st.eps, bc1, bc2);
  adam_update(p.b2, grads.b2, st.m.b2, st.v.b2, lr, st.beta1, st.beta2, st.eps, bc1, bc2);
}

FitResult fit(const InteractionDataset& d, const EmbeddingTable& e, const TrainConfig& cfg,
              const EpochCallback& on_epoch) {
  if (e.num_users != d.num_users || e.num_items != d.num_items) {
    throw std::invalid_argument("fit: embedding table does not match dataset");
  }
  if (cfg.batch_size < 1) throw std::invalid_argument("fit: batch_size must be positive");
  if (cfg.epochs < 0) throw std::invalid_argument("fit: epochs must be non-negative");
  if (cfg.hidden < 1) throw std::invalid_argument("fit: hidden must be positive");

  Rng root(cfg.seed);
  std::uint64_t params_seed = root.next();
  std::uint64_t sample_seed = root.next();

  FitResult res;
  ModelParams params = ModelParams::init(e.dim, cfg.hidden, params_seed);
  AdamState st = AdamState::init(e.dim, cfg.hidden);
  Rng sampler(sample_seed);

  ModelParams best = params;
  bool have_best = false;

  for (std::int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<Triple> triples = sample_epoch_triples(d, sampler);
    const std::int64_t total = static_cast<std::int64_t>(triples.size());
    double loss_acc = 0.0;
    for (std::int64_t start = 0; start < total; start += cfg.batch_size) {
      std::int64_t len = std::min(cfg.batch_size, total - start);
      std::span<const Triple> batch(triples.data() + start, static_cast<std::size_t>(len));
      BatchResult br = bpr_batch_loss(params, batch, e, cfg.l2_reg);
      adam_step(params, br.grads, st, cfg.learning_rate);
      loss_acc += br.loss * static_cast<double>(len);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = total > 0 ? loss_acc / static_cast<double>(total) : 0.0;
    bool do_eval = cfg.eval_every > 0 && (epoch % cfg.eval_every == 0 || epoch == cfg.epochs);
    if (do_eval) {
      EvalReport rep = evaluate(params, e, d, cfg.eval_k);
      rec.has_eval = true;
      rec.recall = rep.recall;
      rec.ndcg = rep.ndcg;
      if (!have_best || rep.recall > res.best_recall) {
        have_best = true;
        res.best_recall = rep.recall;
        res.best_epoch = epoch;
        best = params;
      }
    }
    res.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }

  res.final_params = params;
  res.params = have_best ? best : params;
  if (!have_best) res.best_epoch = cfg.epochs;
  return res;
}

}  // namespace svdrec
