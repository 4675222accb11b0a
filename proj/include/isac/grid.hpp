#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace isac {

/// N x M frequency/slow-time grid, column-major so that the linear index
/// n + N*m matches column-stacking vec() with the subcarrier index fastest.
using CGrid = Eigen::MatrixXcd;
using RGrid = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;

struct GridIndex {
    int subcarrier = 0;
    int symbol = 0;

    friend bool operator==(GridIndex, GridIndex) = default;
    friend auto operator<=>(GridIndex a, GridIndex b) {
        // Ordered like the linear (column-major) index.
        if (auto c = a.symbol <=> b.symbol; c != 0) return c;
        return a.subcarrier <=> b.subcarrier;
    }
};

}  // namespace isac
