#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "trinopo/gaussian.hpp"

namespace testutil {

// Random N-mode physical covariance: a random symplectic (squeezers,
// phase rotations, beam splitters) applied to a thermal diagonal with
// symplectic eigenvalues >= 1.
inline trinopo::CovarianceMatrix random_physical_cov(std::mt19937_64& rng, int n_modes,
                                                     int first_id = 2) {
    using Eigen::MatrixXd;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int dim = 2 * n_modes;
    MatrixXd v = MatrixXd::Zero(dim, dim);
    for (int m = 0; m < n_modes; ++m) {
        const double nu = 1.0 + 2.0 * unif(rng);
        v(2 * m, 2 * m) = nu;
        v(2 * m + 1, 2 * m + 1) = nu;
    }
    const int n_ops = 6 + n_modes;
    for (int k = 0; k < n_ops; ++k) {
        MatrixXd s = MatrixXd::Identity(dim, dim);
        const int choice = static_cast<int>(unif(rng) * 3);
        if (choice == 0) {  // single-mode squeezer
            const int m = static_cast<int>(unif(rng) * n_modes);
            const double r = (unif(rng) - 0.5) * 1.6;
            s(2 * m, 2 * m) = std::exp(r);
            s(2 * m + 1, 2 * m + 1) = std::exp(-r);
        } else if (choice == 1) {  // phase rotation
            const int m = static_cast<int>(unif(rng) * n_modes);
            const double th = unif(rng) * 6.283185307179586;
            s(2 * m, 2 * m) = std::cos(th);
            s(2 * m, 2 * m + 1) = std::sin(th);
            s(2 * m + 1, 2 * m) = -std::sin(th);
            s(2 * m + 1, 2 * m + 1) = std::cos(th);
        } else if (n_modes >= 2) {  // beam splitter between two modes
            int a = static_cast<int>(unif(rng) * n_modes);
            int b = static_cast<int>(unif(rng) * n_modes);
            if (a == b) b = (a + 1) % n_modes;
            const double th = unif(rng) * 6.283185307179586;
            const double c = std::cos(th), sn = std::sin(th);
            for (int q = 0; q < 2; ++q) {
                s(2 * a + q, 2 * a + q) = c;
                s(2 * a + q, 2 * b + q) = sn;
                s(2 * b + q, 2 * a + q) = -sn;
                s(2 * b + q, 2 * b + q) = c;
            }
        }
        v = s * v * s.transpose();
    }
    v = 0.5 * (v + v.transpose());
    std::vector<trinopo::ModeLabel> modes;
    for (int m = 0; m < n_modes; ++m)
        modes.push_back({first_id + m, 800.0 + 100.0 * m, "m" + std::to_string(first_id + m)});
    return trinopo::CovarianceMatrix(std::move(modes), std::move(v));
}

}  // namespace testutil
