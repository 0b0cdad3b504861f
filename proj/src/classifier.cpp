#include "cal/classifier.hpp"

#include <cmath>
#include <stdexcept>

namespace cal {

namespace {

// Features with an appended constant-1 column for the intercept.
Eigen::MatrixXd with_bias(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd Xb(X.rows(), X.cols() + 1);
  Xb.leftCols(X.cols()) = X;
  Xb.col(X.cols()).setOnes();
  return Xb;
}

void check_labels(const std::vector<int>& labels, Eigen::Index n, int class_count) {
  if (labels.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("labels length does not match feature rows");
  for (int y : labels)
    if (y < 0 || y >= class_count)
      throw std::invalid_argument("label out of class range");
}

}  // namespace

double loss_at(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X,
               const std::vector<int>& labels, double lambda) {
  const Eigen::Index n = X.rows();
  const Eigen::MatrixXd Xb = with_bias(X);
  const Eigen::MatrixXd scores = Xb * W.transpose();  // n x C
  double nll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = scores.row(i).maxCoeff();
    const double lse = m + std::log((scores.row(i).array() - m).exp().sum());
    nll += lse - scores(i, labels[i]);
  }
  const double penalty =
      0.5 * lambda * W.leftCols(W.cols() - 1).squaredNorm();
  return nll / static_cast<double>(n) + penalty;
}

Eigen::MatrixXd gradient_at(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X,
                            const std::vector<int>& labels, double lambda) {
  const Eigen::Index n = X.rows();
  const Eigen::MatrixXd Xb = with_bias(X);
  Eigen::MatrixXd P = softmax_rows(Xb * W.transpose());  // n x C
  for (Eigen::Index i = 0; i < n; ++i) P(i, labels[i]) -= 1.0;
  Eigen::MatrixXd grad = (P.transpose() * Xb) / static_cast<double>(n);
  grad.leftCols(grad.cols() - 1) += lambda * W.leftCols(W.cols() - 1);
  return grad;
}

LogisticModel fit(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                  int class_count, double lambda, int max_iters, double tol) {
  if (X.rows() == 0) throw std::invalid_argument("fit: empty training set");
  if (class_count < 2) throw std::invalid_argument("fit: class_count must be >= 2");
  check_labels(labels, X.rows(), class_count);

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(class_count, X.cols() + 1);
  double loss = loss_at(W, X, labels, lambda);
  double step = 1.0;
  int iters = 0;
  double grad_norm = 0.0;

  for (; iters < max_iters; ++iters) {
    const Eigen::MatrixXd grad = gradient_at(W, X, labels, lambda);
    grad_norm = grad.cwiseAbs().maxCoeff();
    if (!std::isfinite(loss) || !std::isfinite(grad_norm))
      throw std::runtime_error("fit: non-finite loss during optimization");
    if (grad_norm <= tol) break;

    // Armijo backtracking; step carries over between iterations.
    const double g2 = grad.squaredNorm();
    double t = std::min(step * 2.0, 1e4);
    double next_loss = 0.0;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      next_loss = loss_at(W - t * grad, X, labels, lambda);
      if (next_loss <= loss - 1e-4 * t * g2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no descent at machine precision
    W -= t * grad;
    loss = next_loss;
    step = t;
  }

  LogisticModel model;
  model.weights = std::move(W);
  model.lambda = lambda;
  model.iterations = iters;
  model.grad_norm = grad_norm;
  return model;
}

Eigen::MatrixXd predict_proba(const LogisticModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.dim())
    throw std::invalid_argument("predict_proba: feature dimension mismatch");
  return softmax_rows(with_bias(X) * model.weights.transpose());
}

Eigen::VectorXd predict_proba(const LogisticModel& model, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd p = predict_proba(model, Eigen::MatrixXd(x.transpose()));
  return p.row(0).transpose();
}

double uncertainty(const LogisticModel& model, const Eigen::VectorXd& x) {
  return uncertainty_from_proba(predict_proba(model, x));
}

Eigen::VectorXd uncertainty(const LogisticModel& model, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd P = predict_proba(model, X);
  return 1.0 - P.rowwise().maxCoeff().array();
}

double evaluate(const LogisticModel& model, const Eigen::MatrixXd& X,
                const std::vector<int>& labels) {
  if (X.rows() == 0) throw std::invalid_argument("evaluate: empty test set");
  check_labels(labels, X.rows(), model.class_count());
  const Eigen::MatrixXd P = predict_proba(model, X);
  int correct = 0;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < model.class_count(); ++c)
      if (P(i, c) > P(i, best)) best = c;  // ties keep the lower index
    if (best == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(P.rows());
}

}  // namespace cal
