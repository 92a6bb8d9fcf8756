#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sumtails {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The power family with l = 1 (Cauchy) has no second moment.
class DivergentVariance : public Error {
 public:
  DivergentVariance()
      : Error("variance diverges for the power family with l = 1") {}
};

// The pole sum left an imaginary part that cannot be round-off.
class NonRealCharFunction : public Error {
 public:
  NonRealCharFunction(double omega, double imag)
      : Error("characteristic function has imaginary part " +
              std::to_string(imag) + " at omega = " + std::to_string(omega)),
        omega_(omega),
        imag_(imag) {}

  double omega() const noexcept { return omega_; }
  double imag() const noexcept { return imag_; }

 private:
  double omega_;
  double imag_;
};

class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& reason, double z, double error_estimate,
                    std::size_t panels)
      : Error(reason + " (z = " + std::to_string(z) +
              ", error estimate = " + std::to_string(error_estimate) +
              ", panels = " + std::to_string(panels) + ")"),
        z_(z),
        error_estimate_(error_estimate),
        panels_(panels) {}

  double z() const noexcept { return z_; }
  double error_estimate() const noexcept { return error_estimate_; }
  std::size_t panels() const noexcept { return panels_; }

 private:
  double z_;
  double error_estimate_;
  std::size_t panels_;
};

class NoCrossover : public Error {
 public:
  using Error::Error;
};

class PrecisionGuard : public Error {
 public:
  using Error::Error;
};

class GridTooNarrow : public Error {
 public:
  GridTooNarrow(const std::string& reason, double boundary_mass)
      : Error(reason + " (boundary mass = " + std::to_string(boundary_mass) +
              ")"),
        boundary_mass_(boundary_mass) {}

  double boundary_mass() const noexcept { return boundary_mass_; }

 private:
  double boundary_mass_;
};

}  // namespace sumtails
