#pragma once

#include <stdexcept>
#include <string>

namespace khl {

// An output or search space would exceed a configured cap.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No polynomial within the degree cap met the requested error.
class approximation_error : public std::runtime_error {
 public:
  approximation_error(const std::string& what, double best_error, int best_degree)
      : std::runtime_error(what), best_error(best_error), best_degree(best_degree) {}
  double best_error;
  int best_degree;
};

// An iterative solve produced a non-finite objective.
class divergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace khl
