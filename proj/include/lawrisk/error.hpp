#pragma once

#include <stdexcept>
#include <string>

namespace lawrisk {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument, violated precondition, or malformed input text.
class domain_error : public error {
 public:
  using error::error;
};

/// An integral defining the requested quantity diverges (or could not be
/// resolved within the quadrature budget). `sign()` is the direction of the
/// divergence: +1, -1, or 0 when unknown.
class non_integrable_error : public error {
 public:
  explicit non_integrable_error(const std::string& what, int sign = 0)
      : error(what), sign_(sign) {}
  int sign() const noexcept { return sign_; }

 private:
  int sign_;
};

/// The Luxemburg norm is infinite: no scale gives a finite moment <= 1.
class outside_orlicz_space_error : public domain_error {
 public:
  using domain_error::domain_error;
};

/// A sequence did not get close enough to its limit within the given prefix.
class insufficient_convergence_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class io_error : public error {
 public:
  using error::error;
};

}  // namespace lawrisk
