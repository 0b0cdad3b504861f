#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cal {

// Multinomial logistic regression, the induced model each iteration retrains.
// weights is C x (d+1); the last column is the intercept.
struct LogisticModel {
  Eigen::MatrixXd weights;
  double lambda = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;

  int class_count() const { return static_cast<int>(weights.rows()); }
  int dim() const { return static_cast<int>(weights.cols()) - 1; }
};

// Row-wise softmax of a score matrix, max-shifted for stability.
template <class Derived>
Eigen::MatrixXd softmax_rows(const Eigen::MatrixBase<Derived>& scores) {
  Eigen::MatrixXd p = scores;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::RowVectorXd row = p.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp();
    p.row(i) = row / row.sum();
  }
  return p;
}

// Uncertainty of a posterior vector: 1 - max entry.
template <class Derived>
double uncertainty_from_proba(const Eigen::MatrixBase<Derived>& proba) {
  return 1.0 - proba.maxCoeff();
}

// L2-regularized (intercept excluded) multinomial log-loss, minimized by
// full-batch gradient descent with backtracking line search. Zero
// initialization; deterministic given inputs.
LogisticModel fit(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                  int class_count, double lambda = 1e-3, int max_iters = 500,
                  double tol = 1e-6);

Eigen::VectorXd predict_proba(const LogisticModel& model, const Eigen::VectorXd& x);
Eigen::MatrixXd predict_proba(const LogisticModel& model, const Eigen::MatrixXd& X);

// 1 - max-class posterior.
double uncertainty(const LogisticModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd uncertainty(const LogisticModel& model, const Eigen::MatrixXd& X);

// Fraction of argmax predictions matching ground truth; ties break toward
// the lower class index.
double evaluate(const LogisticModel& model, const Eigen::MatrixXd& features,
                const std::vector<int>& labels);

// Loss and gradient at given weights; exposed for gradient checking.
double loss_at(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& features,
               const std::vector<int>& labels, double lambda);
Eigen::MatrixXd gradient_at(const Eigen::MatrixXd& weights,
                            const Eigen::MatrixXd& features,
                            const std::vector<int>& labels, double lambda);

}  // namespace cal
