#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ssgl_gam {

struct SelectionCounts {
    long tp = 0;
    long tn = 0;
    long fp = 0;
    long fn = 0;

    long total() const { return tp + tn + fp + fn; }
};

/// Confusion counts of a selected set against the true support (both 0-based).
SelectionCounts selection_counts(const std::vector<int>& selected, const std::vector<int>& truth, int p);

/// Mean squared difference.
double mse_f(const Eigen::VectorXd& fhat, const Eigen::VectorXd& ftrue);

/// Matthews correlation; 0 when any marginal total is 0.
double mcc(const SelectionCounts& c);

/// Mann-Whitney AUC with midranks for ties. y must hold 0/1 and both classes.
double auc(const Eigen::VectorXd& y, const Eigen::VectorXd& scores);

/// Mean of (y - mean_hat)^2.
double mspe(const Eigen::VectorXd& y, const Eigen::VectorXd& mean_hat);

}  // namespace ssgl_gam
