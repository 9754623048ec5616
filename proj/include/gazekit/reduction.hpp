#ifndef GAZEKIT_REDUCTION_HPP
#define GAZEKIT_REDUCTION_HPP

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gazekit/image.hpp"

namespace gazekit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// PCA-then-LDA projection. Output dimension is class_count - 1.
struct ReductionModel {
    int input_dim = 0;
    int class_count = 0;
    Vector pca_mean;   // input_dim
    Matrix pca_basis;  // input_dim x p, orthonormal columns
    Matrix lda_basis;  // p x (class_count - 1)

    int output_dim() const { return static_cast<int>(lda_basis.cols()); }
};

namespace detail {

/// Flip each column so its largest-magnitude entry is positive; makes
/// eigenvector signs reproducible across solvers.
inline void fix_signs(Matrix& basis) {
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
        Eigen::Index imax;
        basis.col(c).cwiseAbs().maxCoeff(&imax);
        if (basis(imax, c) < 0) basis.col(c) = -basis.col(c);
    }
}

}  // namespace detail

struct PcaResult {
    Vector mean;
    Matrix basis;        // dim x target
    Vector eigenvalues;  // target, non-increasing
};

/// Principal components of X (samples x dim) via thin SVD of the
/// centered data. Eigenvalues are covariance eigenvalues (divisor n-1).
inline PcaResult fit_pca(const Matrix& X, int target) {
    const int n = static_cast<int>(X.rows());
    const int dim = static_cast<int>(X.cols());
    if (n < 2) throw std::invalid_argument("fit_pca: need at least 2 samples");
    if (target < 1 || target > std::min(n - 1, dim))
        throw std::domain_error("fit_pca: target out of range");
    PcaResult res;
    res.mean = X.colwise().mean();
    Matrix centered = X.rowwise() - res.mean.transpose();
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    res.basis = svd.matrixV().leftCols(target);
    res.eigenvalues = svd.singularValues().head(target).array().square() / (n - 1);
    detail::fix_signs(res.basis);
    return res;
}

/// Fisher discriminant directions: top c-1 generalized eigenvectors of
/// (S_W + eps I)^-1 S_B, eps = 1e-6 tr(S_W)/p. Solved via Cholesky
/// whitening of S_W so a symmetric eigensolver applies.
inline Matrix fit_lda(const Matrix& Z, const std::vector<int>& labels) {
    const int n = static_cast<int>(Z.rows());
    const int p = static_cast<int>(Z.cols());
    if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("fit_lda: label count mismatch");

    std::vector<int> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const int c = static_cast<int>(classes.size());
    if (c < 2) throw std::invalid_argument("fit_lda: need at least 2 classes");

    Vector global_mean = Z.colwise().mean();
    Matrix sw = Matrix::Zero(p, p), sb = Matrix::Zero(p, p);
    for (int cls : classes) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (labels[i] == cls) idx.push_back(i);
        Vector mean = Vector::Zero(p);
        for (int i : idx) mean += Z.row(i).transpose();
        mean /= static_cast<double>(idx.size());
        for (int i : idx) {
            Vector d = Z.row(i).transpose() - mean;
            sw += d * d.transpose();
        }
        Vector dm = mean - global_mean;
        sb += static_cast<double>(idx.size()) * dm * dm.transpose();
    }
    // Tikhonov guard; singleton classes contribute nothing to S_W, so
    // fall back to an absolute floor when the trace vanishes
    double eps = 1e-6 * sw.trace() / p;
    if (eps <= 0.0) eps = 1e-12 * std::max(1.0, sb.trace() / p);
    sw += eps * Matrix::Identity(p, p);

    Eigen::LLT<Matrix> llt(sw);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("fit_lda: within-class scatter not positive definite");
    Matrix l = llt.matrixL();
    Matrix m = l.triangularView<Eigen::Lower>().solve(sb);
    m = l.triangularView<Eigen::Lower>().solve(m.transpose()).transpose();
    m = (m + m.transpose()) / 2.0;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    if (eig.info() != Eigen::Success) throw std::runtime_error("fit_lda: eigensolver failed");
    const int out = std::min(c - 1, p);
    Matrix basis(p, out);
    for (int j = 0; j < out; ++j) {
        // eigenvalues ascending; take from the top
        Vector u = eig.eigenvectors().col(p - 1 - j);
        basis.col(j) = l.transpose().triangularView<Eigen::Upper>().solve(u);
    }
    detail::fix_signs(basis);
    return basis;
}

/// PCA target: capped by n - c (keeps S_W nonsingular) and floored at
/// min(200, per-class count) to preserve information.
inline int pca_target_dim(int dim, int n_total, int class_count, int min_class_count) {
    int p = std::min({dim, n_total - class_count, std::max(min_class_count, 200)});
    return std::max(p, 1);
}

inline ReductionModel fit_reduction(const Matrix& X, const std::vector<int>& labels) {
    const int n = static_cast<int>(X.rows());
    if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("fit_reduction: label count mismatch");
    std::set<int> classes(labels.begin(), labels.end());
    const int c = static_cast<int>(classes.size());
    if (c < 2) throw std::domain_error("fit_reduction: need at least 2 classes");
    if (n <= c) throw std::domain_error("fit_reduction: need more samples than classes");
    int min_count = n;
    for (int cls : classes)
        min_count = std::min(min_count, static_cast<int>(std::count(labels.begin(), labels.end(), cls)));

    const int p = pca_target_dim(static_cast<int>(X.cols()), n, c, min_count);
    PcaResult pca = fit_pca(X, p);
    Matrix Z = (X.rowwise() - pca.mean.transpose()) * pca.basis;

    ReductionModel model;
    model.input_dim = static_cast<int>(X.cols());
    model.class_count = c;
    model.pca_mean = pca.mean;
    model.pca_basis = pca.basis;
    model.lda_basis = fit_lda(Z, labels);
    return model;
}

inline Vector project(const ReductionModel& model, const Vector& x) {
    if (x.size() != model.input_dim) throw std::invalid_argument("project: dimension mismatch");
    return model.lda_basis.transpose() * (model.pca_basis.transpose() * (x - model.pca_mean));
}

/// trace((B'S_W B)^-1 (B'S_B B)) for a candidate basis; used by the
/// dominance property tests.
inline double fisher_ratio(const Matrix& Z, const std::vector<int>& labels, const Matrix& basis) {
    const int n = static_cast<int>(Z.rows());
    const int p = static_cast<int>(Z.cols());
    std::vector<int> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    Vector global_mean = Z.colwise().mean();
    Matrix sw = Matrix::Zero(p, p), sb = Matrix::Zero(p, p);
    for (int cls : classes) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (labels[i] == cls) idx.push_back(i);
        Vector mean = Vector::Zero(p);
        for (int i : idx) mean += Z.row(i).transpose();
        mean /= static_cast<double>(idx.size());
        for (int i : idx) {
            Vector d = Z.row(i).transpose() - mean;
            sw += d * d.transpose();
        }
        Vector dm = mean - global_mean;
        sb += static_cast<double>(idx.size()) * dm * dm.transpose();
    }
    sw += (1e-6 * sw.trace() / p) * Matrix::Identity(p, p);
    Matrix a = basis.transpose() * sw * basis;
    Matrix b = basis.transpose() * sb * basis;
    return (a.ldlt().solve(b)).trace();
}

}  // namespace gazekit

#endif
