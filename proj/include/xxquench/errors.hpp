#ifndef XXQUENCH_ERRORS_HPP
#define XXQUENCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace xxquench {

/// A numerical routine failed (eigensolver non-convergence, invariant
/// violation beyond tolerance). Distinct from bad user input, which is
/// reported as std::invalid_argument / std::out_of_range.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
public:
  ConvergenceError(const std::string& what, int sweeps, double off_norm)
      : NumericalError(what + " (sweeps=" + std::to_string(sweeps) +
                       ", off-diagonal norm=" + std::to_string(off_norm) + ")"),
        sweeps_(sweeps),
        off_norm_(off_norm) {}

  int sweeps() const noexcept { return sweeps_; }
  double off_norm() const noexcept { return off_norm_; }

private:
  int sweeps_;
  double off_norm_;
};

}  // namespace xxquench

#endif
