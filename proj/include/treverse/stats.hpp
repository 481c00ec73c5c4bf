#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "treverse/errors.hpp"

namespace treverse {

/// Mean and jackknife standard error, column by column.
struct JackknifeResult {
    Eigen::VectorXd mean;
    Eigen::VectorXd se;
};

/// Rows are independent blocks; leave-one-out means over blocks.
inline JackknifeResult jackknife(const Eigen::MatrixXd& blocks) {
    const Eigen::Index n = blocks.rows();
    if (n < 2) throw InvalidArgument("jackknife: need at least two blocks");
    JackknifeResult r;
    const Eigen::RowVectorXd total = blocks.colwise().sum();
    r.mean = (total / static_cast<double>(n)).transpose();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(blocks.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd loo = ((total - blocks.row(i)) / static_cast<double>(n - 1)).transpose();
        acc += (loo - r.mean).array().square().matrix();
    }
    r.se = (acc * (static_cast<double>(n - 1) / static_cast<double>(n))).array().sqrt().matrix();
    return r;
}

inline JackknifeResult jackknife(const Eigen::VectorXd& blocks) { return jackknife(Eigen::MatrixXd(blocks)); }

}  // namespace treverse
