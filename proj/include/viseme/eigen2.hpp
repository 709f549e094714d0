#pragma once

namespace viseme {

// Eigen decomposition of a symmetric 2x2 covariance [[rxx, rxy], [rxy, ryy]].
struct Eigen2 {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double theta = 0.0;  // direction of the lambda1 axis, [0, pi)
};

Eigen2 cov_eigen(double rxx, double rxy, double ryy);

}  // namespace viseme
