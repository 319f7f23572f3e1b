#ifndef CAPLB_LATTICE_HPP
#define CAPLB_LATTICE_HPP

/// D3Q15 velocity set: rest vector, 6 face neighbours, 8 corner neighbours.

#include <Eigen/Dense>
#include <array>
#include <cstdint>

namespace caplb {

struct D3Q15 {
    static constexpr int Q = 15;

    // clang-format off
    static constexpr std::array<std::array<int, 3>, Q> c = {{
        { 0, 0, 0},
        { 1, 0, 0}, {-1, 0, 0},
        { 0, 1, 0}, { 0,-1, 0},
        { 0, 0, 1}, { 0, 0,-1},
        { 1, 1, 1}, {-1,-1,-1},
        { 1, 1,-1}, {-1,-1, 1},
        { 1,-1, 1}, {-1, 1,-1},
        {-1, 1, 1}, { 1,-1,-1},
    }};
    static constexpr std::array<double, Q> w = {
        2.0 / 9.0,
        1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0,
        1.0 / 72.0, 1.0 / 72.0, 1.0 / 72.0, 1.0 / 72.0,
        1.0 / 72.0, 1.0 / 72.0, 1.0 / 72.0, 1.0 / 72.0,
    };
    static constexpr std::array<int, Q> opposite = {0, 2, 1, 4, 3, 6, 5,
                                                    8, 7, 10, 9, 12, 11, 14, 13};
    // clang-format on

    static constexpr double cs2 = 1.0 / 3.0;

    static Eigen::Vector3d dir(int i) {
        return Eigen::Vector3d(c[i][0], c[i][1], c[i][2]);
    }
    /// |c_i| in lattice spacings (1 for faces, sqrt(3) for corners, 0 rest).
    static double length(int i) {
        return std::sqrt(double(c[i][0] * c[i][0] + c[i][1] * c[i][1] + c[i][2] * c[i][2]));
    }
};

}  // namespace caplb

#endif
