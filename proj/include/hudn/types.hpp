#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hudn {

#ifdef HUDN_REAL32
using real = float;
#else
using real = double;
#endif

using Mat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<real, Eigen::Dynamic, 1>;
using RowVec = Eigen::Matrix<real, 1, Eigen::Dynamic>;
using VecI = Eigen::VectorXi;

// Error taxonomy; the CLI maps these to distinct exit codes.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hudn
