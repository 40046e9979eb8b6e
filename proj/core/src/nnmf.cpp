#include "skintone/nnmf.hpp"

#include "skintone/error.hpp"
#include "skintone/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace skintone {

namespace {

void check_input(const ColorMatrix& V, const NnmfOptions& options) {
  if (static_cast<std::size_t>(V.cols()) < options.min_columns) {
    throw Error(Errc::too_few_pixels, "NNMF needs at least " + std::to_string(options.min_columns) +
                                          " columns, got " + std::to_string(V.cols()));
  }
  if (!V.allFinite() || (V.array() < 0.0).any() || (V.array() > 1.0).any()) {
    throw Error(Errc::invalid_argument, "NNMF input entries must lie in [0, 1]");
  }
  if ((V.array() == 0.0).all()) throw Error(Errc::all_zero, "NNMF input is all zeros");
  if (options.max_iters < 0 || !(options.tol >= 0.0)) {
    throw Error(Errc::invalid_argument, "NNMF needs max_iters >= 0 and tol >= 0");
  }
}

Basis initial_basis(const ColorMatrix& V, std::uint64_t seed) {
  const Eigen::RowVectorXd sums = V.colwise().sum();
  std::vector<Eigen::Index> lit;
  lit.reserve(static_cast<std::size_t>(V.cols()));
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    if (sums(j) > 0.0) lit.push_back(j);
  }

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (auto j : lit) mean += V.col(j) / sums(j);
  mean /= static_cast<double>(lit.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (auto j : lit) {
    const Eigen::Vector3d d = V.col(j) / sums(j) - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(lit.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);

  Basis W;
  if (eig.eigenvalues()(2) > 1e-24) {
    const Eigen::Vector3d axis = eig.eigenvectors().col(2);
    Eigen::Index lo = lit.front(), hi = lit.front();
    double plo = std::numeric_limits<double>::infinity(), phi = -plo;
    for (auto j : lit) {
      const double p = axis.dot(V.col(j) / sums(j) - mean);
      if (p < plo) {
        plo = p;
        lo = j;
      }
      if (p > phi) {
        phi = p;
        hi = j;
      }
    }
    W.col(0) = V.col(lo) / sums(lo);
    W.col(1) = V.col(hi) / sums(hi);
  } else {
    Rng rng(seed);
    Eigen::Vector3d gray;
    for (int i = 0; i < 3; ++i) gray(i) = 1.0 / 3.0 + rng.uniform(0.0, 0.05);
    W.col(0) = gray / gray.sum();
    const Eigen::Vector3d total = V.rowwise().sum();
    W.col(1) = total / total.sum();
  }
  return W;
}

double objective(const ColorMatrix& V, const Basis& W, const Activations& H) {
  return (V - W * H).squaredNorm();
}

} // namespace

Activations nnls_activations(const Basis& W, const ColorMatrix& V) {
  const Eigen::Matrix2d G = W.transpose() * W;
  const Activations B = W.transpose() * V;
  const double det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
  const bool solvable = det > 1e-14 * G(0, 0) * G(1, 1);
  Activations H = Activations::Zero(2, V.cols());
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    if (solvable) {
      const double h0 = (G(1, 1) * B(0, j) - G(0, 1) * B(1, j)) / det;
      const double h1 = (G(0, 0) * B(1, j) - G(1, 0) * B(0, j)) / det;
      if (h0 >= 0.0 && h1 >= 0.0) {
        H(0, j) = h0;
        H(1, j) = h1;
        continue;
      }
    }
    // Active-set fallback: best single column (objective change -h*b).
    double best_gain = 0.0;
    for (int k = 0; k < 2; ++k) {
      if (G(k, k) <= 0.0 || B(k, j) <= 0.0) continue;
      const double h = B(k, j) / G(k, k);
      const double gain = h * B(k, j);
      if (gain > best_gain) {
        best_gain = gain;
        H.col(j).setZero();
        H(k, j) = h;
      }
    }
  }
  return H;
}

NnmfResult nnmf_from(const ColorMatrix& V, const Basis& W0, const NnmfOptions& options,
                     std::array<bool, 2> frozen) {
  check_input(V, options);
  if (!W0.allFinite() || (W0.array() < 0.0).any()) {
    throw Error(Errc::invalid_argument, "initial basis must be finite and nonnegative");
  }

  NnmfResult r;
  Basis W = W0;
  Activations H = nnls_activations(W, V);
  double prev = objective(V, W, H);
  r.objective.push_back(prev);
  r.stop = NnmfStop::max_iters;
  if (prev == 0.0) r.stop = NnmfStop::exact;

  for (int it = 0; it < options.max_iters && r.stop != NnmfStop::exact; ++it) {
    const Activations num_h = W.transpose() * V;
    const Activations den_h = (W.transpose() * W) * H;
    Activations Hn = H.array() * (den_h.array() > 0.0).select(num_h.array() / den_h.array(), 1.0);

    Basis Wn = W;
    const Basis num_w = V * Hn.transpose();
    const Basis den_w = W * (Hn * Hn.transpose());
    for (int k = 0; k < 2; ++k) {
      if (frozen[static_cast<std::size_t>(k)]) continue;
      for (int i = 0; i < 3; ++i) {
        if (den_w(i, k) > 0.0) Wn(i, k) = W(i, k) * (num_w(i, k) / den_w(i, k));
      }
    }

    const double obj = objective(V, Wn, Hn);
    if (!(obj <= prev)) {
      r.stop = NnmfStop::non_decrease;
      break;
    }
    W = Wn;
    H = std::move(Hn);
    r.objective.push_back(obj);
    ++r.iterations;
    if (obj == 0.0) {
      r.stop = NnmfStop::exact;
      break;
    }
    if (prev - obj < options.tol * prev) {
      r.stop = NnmfStop::converged;
      break;
    }
    prev = obj;
  }

  for (int k = 0; k < 2; ++k) {
    const double s = W.col(k).sum();
    if (s > 0.0) {
      W.col(k) /= s;
      H.row(k) *= s;
    }
  }
  r.W = W;
  r.H = std::move(H);
  r.rel_error = std::sqrt(r.objective.back()) / V.norm();
  return r;
}

NnmfResult nnmf(const ColorMatrix& V, const NnmfOptions& options) {
  check_input(V, options);
  return nnmf_from(V, initial_basis(V, options.seed), options);
}

} // namespace skintone
