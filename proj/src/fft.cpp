#include "rap/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace rap {

namespace {
// Eigen::FFT caches plans per length and is not thread safe; one instance
// per thread keeps parallel per-frame transforms race-free.
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}
}  // namespace

Eigen::VectorXcd fft_forward(const Eigen::VectorXd& x) {
  Eigen::VectorXcd spectrum;
  engine().fwd(spectrum, x);
  return spectrum;
}

Eigen::VectorXd fft_inverse_real(const Eigen::VectorXcd& spectrum) {
  Eigen::VectorXcd time;
  engine().inv(time, spectrum);
  return time.real();
}

Eigen::VectorXcd fft_inverse(const Eigen::VectorXcd& spectrum) {
  Eigen::VectorXcd time;
  engine().inv(time, spectrum);
  return time;
}

}  // namespace rap
