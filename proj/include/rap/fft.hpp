#pragma once

#include <Eigen/Dense>

namespace rap {

/// Full-spectrum DFT of a real signal. Mixed-radix; any length >= 1.
Eigen::VectorXcd fft_forward(const Eigen::VectorXd& x);

/// Inverse DFT of a conjugate-symmetric spectrum, returning the real part.
/// Includes the 1/N scaling.
Eigen::VectorXd fft_inverse_real(const Eigen::VectorXcd& spectrum);

/// Inverse DFT of an arbitrary spectrum. Includes the 1/N scaling.
Eigen::VectorXcd fft_inverse(const Eigen::VectorXcd& spectrum);

}  // namespace rap
