#pragma once

#include <string>
#include <vector>

namespace cusploc {

// The smooth part h of a cusp model, drawn from a closed registry:
// constant(c), linear(b) meaning h(x) = -b x, and gaussian_bump(c, sigma).
class Nuisance {
 public:
  enum class Kind { Constant, Linear, GaussianBump };

  static Nuisance constant(double c);
  static Nuisance linear(double b);
  static Nuisance gaussian_bump(double c, double sigma);

  // Registry lookup; throws DomainError for unknown names or bad parameters.
  static Nuisance from_name(const std::string& name, const std::vector<double>& params);

  Kind kind() const { return kind_; }
  const std::string& name() const;
  std::vector<double> params() const;

  double operator()(double x) const;
  double derivative(double x) const;
  double derivative_bound() const;
  // Integral of h from 0 to x.
  double antiderivative(double x) const;

  // Whether h times a bounded-growth cusp factor is integrable over the real line.
  bool normalizable() const { return kind_ == Kind::GaussianBump; }
  // Standard deviation of the Gaussian proposal used for rejection sampling.
  double envelope_sd() const;

  bool operator==(const Nuisance&) const = default;

 private:
  Nuisance(Kind kind, double p0, double p1) : kind_(kind), p0_(p0), p1_(p1) {}
  Kind kind_;
  double p0_;
  double p1_;
};

}  // namespace cusploc
