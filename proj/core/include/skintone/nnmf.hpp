#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace skintone {

using ColorMatrix = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using Basis = Eigen::Matrix<double, 3, 2>;
using Activations = Eigen::Matrix<double, 2, Eigen::Dynamic>;

struct NnmfOptions {
  int max_iters = 500;
  double tol = 1e-6;            // stop when the relative objective decrease falls below this
  std::uint64_t seed = 0;       // only consumed by the zero-spread fallback initialization
  std::size_t min_columns = 64;
};

enum class NnmfStop {
  exact,         // objective reached 0
  converged,     // relative decrease < tol
  max_iters,
  non_decrease,  // a step failed to decrease the objective and was rejected
};

struct NnmfResult {
  Basis W = Basis::Zero();             // columns sum to 1
  Activations H;                       // rows rescaled to compensate
  std::vector<double> objective;       // squared Frobenius error, [0] = initialization
  int iterations = 0;                  // accepted multiplicative steps
  NnmfStop stop = NnmfStop::max_iters;
  double rel_error = 0.0;              // ||V - WH||_F / ||V||_F
};

/// Rank-2 nonnegative factorization V ~ W H of a 3 x N matrix with entries in
/// [0, 1] by Lee-Seung multiplicative updates on the Frobenius objective.
///
/// W starts at the chromaticities of the two pixels at the ends of the
/// principal axis of the chromaticity scatter (the edges of the data cone for
/// two-component data), H at the exact nonnegative least-squares activations
/// for that W. Data with no chromaticity spread falls back to a gray column
/// with seeded jitter plus the mean chromaticity.
NnmfResult nnmf(const ColorMatrix& V, const NnmfOptions& options = {});

/// Multiplicative updates from a caller-supplied basis. Columns flagged in
/// `frozen` keep their initial color; H starts at nnls_activations(W0, V).
NnmfResult nnmf_from(const ColorMatrix& V, const Basis& W0, const NnmfOptions& options,
                     std::array<bool, 2> frozen = {false, false});

/// Per-column nonnegative least squares against a 3 x 2 basis (closed form).
Activations nnls_activations(const Basis& W, const ColorMatrix& V);

} // namespace skintone
