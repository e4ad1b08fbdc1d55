#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "svdrec/dataset.hpp"
#include "svdrec/embedding.hpp"
#include "svdrec/evaluator.hpp"
#include "svdrec/graph.hpp"
#include "svdrec/model.hpp"
#include "svdrec/sparse_matrix.hpp"
#include "svdrec/trainer.hpp"
#include "svdrec/tsvd.hpp"

namespace py = pybind11;
using namespace svdrec;

namespace {

py::array_t<double> to_numpy(const DenseMatrix& m) {
  py::array_t<double> out({m.rows, m.cols});
  std::memcpy(out.mutable_data(), m.data.data(), m.data.size() * sizeof(double));
  return out;
}

py::array_t<double> to_numpy(const std::vector<double>& v) {
  // Shape and strides spelled out; the count-only constructor of this
  // pybind11 version yields a zero-stride array.
  py::array_t<double> out({static_cast<py::ssize_t>(v.size())},
                          {static_cast<py::ssize_t>(sizeof(double))});
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

DenseMatrix dense_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  DenseMatrix m(a.shape(0), a.shape(1));
  std::memcpy(m.data.data(), a.data(), m.data.size() * sizeof(double));
  return m;
}

std::vector<double> vector_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  std::vector<double> v(static_cast<std::size_t>(a.shape(0)));
  std::memcpy(v.data(), a.data(), v.size() * sizeof(double));
  return v;
}

CandidateSet candidate_set_from_name(const std::string& name) {
  if (name == "all_non_train") return CandidateSet::all_non_train;
  if (name == "test_only") return CandidateSet::test_only;
  throw std::invalid_argument("candidates must be 'all_non_train' or 'test_only'");
}

}  // namespace

PYBIND11_MODULE(_svdrec, m) {
  m.doc() = "SVD-based collaborative filtering: sparse kernels, randomized "
            "truncated SVD, embeddings, pairwise training, and ranking metrics";

  py::class_<SparseMatrix>(m, "SparseMatrix")
      .def_readonly("rows", &SparseMatrix::rows)
      .def_readonly("cols", &SparseMatrix::cols)
      .def_property_readonly("nnz", &SparseMatrix::nnz)
      .def("at", &SparseMatrix::at, py::arg("row"), py::arg("col"))
      .def("to_dense", [](const SparseMatrix& s) { return to_numpy(to_dense(s)); })
      .def_static(
          "from_triplets",
          [](std::int64_t rows, std::int64_t cols,
             const std::vector<std::tuple<std::int64_t, std::int64_t, double>>& entries) {
            std::vector<std::int64_t> r, c;
            std::vector<double> v;
            for (const auto& [i, j, x] : entries) {
              r.push_back(i);
              c.push_back(j);
              v.push_back(x);
            }
            return SparseMatrix::from_triplets(rows, cols, r, c, v);
          },
          py::arg("rows"), py::arg("cols"), py::arg("entries"));

  py::class_<InteractionDataset>(m, "InteractionDataset")
      .def_readonly("num_users", &InteractionDataset::num_users)
      .def_readonly("num_items", &InteractionDataset::num_items)
      .def_readonly("train", &InteractionDataset::train)
      .def_readonly("test", &InteractionDataset::test)
      .def_property_readonly("train_interactions", &InteractionDataset::train_interactions)
      .def_property_readonly("test_interactions", &InteractionDataset::test_interactions);

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def_readonly("num_users", &EmbeddingTable::num_users)
      .def_readonly("num_items", &EmbeddingTable::num_items)
      .def_readonly("dim", &EmbeddingTable::dim)
      .def_property_readonly("method",
                             [](const EmbeddingTable& e) {
                               return e.method_tag == EmbeddingMethod::ssb ? "ssb" : "tsa";
                             })
      .def_property_readonly("user_rows",
                             [](const EmbeddingTable& e) { return to_numpy(e.user_rows); })
      .def_property_readonly("item_rows",
                             [](const EmbeddingTable& e) { return to_numpy(e.item_rows); });

  py::class_<ModelParams>(m, "ModelParams")
      .def_readonly("input_dim", &ModelParams::input_dim)
      .def_readonly("hidden", &ModelParams::hidden)
      .def_property_readonly("w1", [](const ModelParams& p) { return to_numpy(p.w1); })
      .def_property_readonly("b1", [](const ModelParams& p) { return to_numpy(p.b1); })
      .def_property_readonly("w2", [](const ModelParams& p) { return to_numpy(p.w2); })
      .def_property_readonly("b2", [](const ModelParams& p) { return to_numpy(p.b2); })
      .def_static("init", &ModelParams::init, py::arg("input_dim"), py::arg("hidden"),
                  py::arg("seed"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("l2_reg", &TrainConfig::l2_reg)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("hidden", &TrainConfig::hidden)
      .def_readwrite("eval_every", &TrainConfig::eval_every)
      .def_readwrite("eval_k", &TrainConfig::eval_k);

  py::class_<EpochRecord>(m, "EpochRecord")
      .def_readonly("epoch", &EpochRecord::epoch)
      .def_readonly("loss", &EpochRecord::loss)
      .def_readonly("has_eval", &EpochRecord::has_eval)
      .def_readonly("recall", &EpochRecord::recall)
      .def_readonly("ndcg", &EpochRecord::ndcg);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("params", &FitResult::params)
      .def_readonly("final_params", &FitResult::final_params)
      .def_readonly("log", &FitResult::log)
      .def_readonly("best_epoch", &FitResult::best_epoch)
      .def_readonly("best_recall", &FitResult::best_recall);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("k", &EvalReport::k)
      .def_readonly("recall", &EvalReport::recall)
      .def_readonly("ndcg", &EvalReport::ndcg)
      .def_readonly("users_evaluated", &EvalReport::users_evaluated);

  m.def("load_dataset", &load_dataset, py::arg("train_file"), py::arg("test_file"));
  m.def("build_adjacency", &build_adjacency, py::arg("dataset"));
  m.def("symmetrize", &symmetrize, py::arg("adjacency"));
  m.def("laplacian_normalize", &laplacian_normalize, py::arg("sym_adjacency"));
  m.def("matrix_power2", &matrix_power2, py::arg("norm_adjacency"), py::arg("drop_tol") = 0.0);

  m.def(
      "truncated_svd",
      [](const SparseMatrix& mat, std::int64_t k, std::int64_t oversampling,
         std::int64_t power_iters, std::uint64_t seed) {
        TsvdResult r = truncated_svd(mat, TsvdParams{k, oversampling, power_iters, seed});
        return py::make_tuple(to_numpy(r.u), to_numpy(r.s), to_numpy(r.v));
      },
      py::arg("matrix"), py::arg("k"), py::arg("oversampling") = 10, py::arg("power_iters") = 7,
      py::arg("seed") = 0);

  m.def(
      "ssb_embeddings",
      [](const SparseMatrix& norm_adj, std::int64_t k, std::int64_t num_users,
         std::int64_t num_items, std::int64_t oversampling, std::int64_t power_iters,
         std::uint64_t seed) {
        TsvdResult f = truncated_svd(norm_adj, TsvdParams{k, oversampling, power_iters, seed});
        return ssb_embeddings(f, num_users, num_items);
      },
      py::arg("norm_adjacency"), py::arg("k"), py::arg("num_users"), py::arg("num_items"),
      py::arg("oversampling") = 10, py::arg("power_iters") = 7, py::arg("seed") = 0);

  m.def(
      "tsa_embeddings",
      [](const SparseMatrix& norm_adj, const SparseMatrix& norm_adj_sq, std::int64_t per_hop_k,
         std::int64_t num_users, std::int64_t num_items, std::int64_t oversampling,
         std::int64_t power_iters, std::uint64_t seed1, std::uint64_t seed2) {
        TsvdResult f1 =
            truncated_svd(norm_adj, TsvdParams{per_hop_k, oversampling, power_iters, seed1});
        TsvdResult f2 =
            truncated_svd(norm_adj_sq, TsvdParams{per_hop_k, oversampling, power_iters, seed2});
        return tsa_embeddings(f1, f2, num_users, num_items);
      },
      py::arg("norm_adjacency"), py::arg("norm_adjacency_sq"), py::arg("per_hop_k"),
      py::arg("num_users"), py::arg("num_items"), py::arg("oversampling") = 10,
      py::arg("power_iters") = 7, py::arg("seed1") = 0, py::arg("seed2") = 1);

  m.def(
      "forward",
      [](const ModelParams& p, const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
        std::vector<double> xv = vector_from_numpy(x);
        return to_numpy(forward(p, xv));
      },
      py::arg("params"), py::arg("x"));

  m.def(
      "score",
      [](const ModelParams& p, const py::array_t<double, py::array::c_style | py::array::forcecast>& xu,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& xi) {
        std::vector<double> u = vector_from_numpy(xu);
        std::vector<double> i = vector_from_numpy(xi);
        return score(p, u, i);
      },
      py::arg("params"), py::arg("x_user"), py::arg("x_item"));

  m.def(
      "fit",
      [](const InteractionDataset& d, const EmbeddingTable& e, const TrainConfig& cfg) {
        py::gil_scoped_release release;
        return fit(d, e, cfg);
      },
      py::arg("dataset"), py::arg("embeddings"), py::arg("config"));

  m.def(
      "evaluate",
      [](const ModelParams& p, const EmbeddingTable& e, const InteractionDataset& d,
         std::int64_t k, const std::string& candidates) {
        return evaluate(p, e, d, k, candidate_set_from_name(candidates));
      },
      py::arg("params"), py::arg("embeddings"), py::arg("dataset"), py::arg("k") = 20,
      py::arg("candidates") = "all_non_train");

  m.def(
      "top_k_items",
      [](const ModelParams& p, const EmbeddingTable& e, std::int64_t u, std::int64_t k,
         const std::vector<std::int64_t>& exclude) {
        return top_k_items(p, e, u, k, exclude);
      },
      py::arg("params"), py::arg("embeddings"), py::arg("user"), py::arg("k"),
      py::arg("exclude") = std::vector<std::int64_t>{});

  m.def(
      "dense_from_numpy",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
        DenseMatrix d = dense_from_numpy(a);
        std::vector<std::int64_t> r, c;
        std::vector<double> v;
        for (std::int64_t i = 0; i < d.rows; ++i) {
          for (std::int64_t j = 0; j < d.cols; ++j) {
            if (d(i, j) != 0.0) {
              r.push_back(i);
              c.push_back(j);
              v.push_back(d(i, j));
            }
          }
        }
        return SparseMatrix::from_triplets(d.rows, d.cols, r, c, v);
      },
      py::arg("array"), "Dense 2-d array to CSR, dropping exact zeros");
}
