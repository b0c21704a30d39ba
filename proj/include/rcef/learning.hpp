#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rcef/inference.hpp"
#include "rcef/intmodel.hpp"

namespace rcef {

struct LearnerState {
  IntParams params;
  DataSummary summary;
  int seen_rounds = 0;
};

/// Adds phi(x) for every x in the batch and |batch| to n.
DataSummary accumulate(DataSummary summary, std::span<const Assignment> batch, const StructureGraph& g);

/// Sign of E_P[phi_j] - counts_j / n for every j, by cross-multiplication:
/// sign(edge_weight_j * n - counts_j * z). Requires marginals without evidence.
std::vector<int> gradient_sign(const Marginals& marginals, const DataSummary& summary);

/// theta_j <- clamp(theta_j - sign_j, 0, 2^k - 1).
IntParams int_prox_step(IntParams params, std::span<const int> signs);

/// Runs up to `budget` rounds of sum-product, gradient sign and unit step.
/// Stops early once every sign is zero.
LearnerState fit(LearnerState state, int budget);

/// MAP label given evidence on the features; the label vertex must be free.
int predict(const IntParams& params, const Evidence& features);

/// Convenience: clamps every vertex of x except the label and predicts it.
int predict(const IntParams& params, const Assignment& x);

// Real-valued reference model with the same base-2 weights 2^theta.

struct FloatMarginals {
  double log2_z = 0.0;
  std::vector<std::vector<double>> vertex;
  std::vector<std::vector<double>> edge;  // row-major per edge, same layout as theta
};

/// Sum-product over real parameters with messages kept in the log2 domain.
FloatMarginals float_sum_product(const StructureGraph& g, std::span<const double> theta);

double float_neg_avg_log_likelihood(const StructureGraph& g, std::span<const double> theta, const DataSummary& summary);

/// Real-valued parameter score of x.
double float_score(const StructureGraph& g, std::span<const double> theta, const Assignment& x);

/// argmax over label states of the score with all features taken from x.
int float_predict(const StructureGraph& g, std::span<const double> theta, const Assignment& x);

struct FloatLearnerState {
  std::shared_ptr<const StructureGraph> structure;
  std::vector<double> params_real;
  DataSummary summary;
  double learning_rate = 1.0;
};

/// `budget` steps of theta <- theta - learning_rate * (E_P[phi] - counts / n).
/// Throws std::runtime_error if a parameter becomes non-finite.
FloatLearnerState float_fit(FloatLearnerState state, int budget);

}  // namespace rcef
