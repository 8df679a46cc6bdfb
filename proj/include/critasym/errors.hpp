#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace critasym {

// Base of every error raised by the library. The `kind()` tag is what the
// command line maps onto exit codes and error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate = {})
      : Error("convergence", what), last_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_; }

 private:
  std::vector<double> last_;
};

class SingularJacobianError : public Error {
 public:
  explicit SingularJacobianError(const std::string& what) : Error("singular_jacobian", what) {}
};

class AmbiguityError : public Error {
 public:
  AmbiguityError(const std::string& what, std::vector<double> branches)
      : Error("ambiguity", what), branches_(std::move(branches)) {}
  const std::vector<double>& branches() const noexcept { return branches_; }

 private:
  std::vector<double> branches_;
};

class GenericityError : public Error {
 public:
  explicit GenericityError(const std::string& what) : Error("genericity", what) {}
};

class AccuracyError : public Error {
 public:
  explicit AccuracyError(const std::string& what) : Error("accuracy", what) {}
};

class BranchError : public Error {
 public:
  explicit BranchError(const std::string& what) : Error("branch", what) {}
};

class ResolutionError : public Error {
 public:
  explicit ResolutionError(const std::string& what) : Error("resolution", what) {}
};

class StabilityError : public Error {
 public:
  explicit StabilityError(const std::string& what) : Error("stability", what) {}
};

class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, int failing_n)
      : Error("precision", what), n_(failing_n) {}
  int failing_n() const noexcept { return n_; }

 private:
  int n_;
};

class NotOneCutError : public Error {
 public:
  explicit NotOneCutError(const std::string& what) : Error("not_one_cut", what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

}  // namespace critasym
