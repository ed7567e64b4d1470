#include "cusploc/nuisance.hpp"

#include <cmath>
#include <numbers>

#include "cusploc/error.hpp"

namespace cusploc {

Nuisance Nuisance::constant(double c) {
  if (!std::isfinite(c)) throw DomainError("constant nuisance requires a finite value");
  return {Kind::Constant, c, 0.0};
}

Nuisance Nuisance::linear(double b) {
  if (!std::isfinite(b)) throw DomainError("linear nuisance requires a finite slope");
  return {Kind::Linear, b, 0.0};
}

Nuisance Nuisance::gaussian_bump(double c, double sigma) {
  if (!std::isfinite(c) || !(sigma > 0) || !std::isfinite(sigma))
    throw DomainError("gaussian_bump requires finite c and sigma > 0");
  return {Kind::GaussianBump, c, sigma};
}

Nuisance Nuisance::from_name(const std::string& name, const std::vector<double>& p) {
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (p.size() < lo || p.size() > hi)
      throw DomainError("nuisance '" + name + "' takes " + std::to_string(lo) + ".." + std::to_string(hi) +
                        " parameters, got " + std::to_string(p.size()));
  };
  if (name == "constant") {
    need(1, 1);
    return constant(p[0]);
  }
  if (name == "linear") {
    need(1, 1);
    return linear(p[0]);
  }
  if (name == "gaussian_bump") {
    need(0, 2);
    return gaussian_bump(p.size() > 0 ? p[0] : 1.0, p.size() > 1 ? p[1] : 1.0);
  }
  throw DomainError("unknown nuisance function '" + name + "' (known: constant, linear, gaussian_bump)");
}

const std::string& Nuisance::name() const {
  static const std::string names[] = {"constant", "linear", "gaussian_bump"};
  return names[static_cast<int>(kind_)];
}

std::vector<double> Nuisance::params() const {
  if (kind_ == Kind::GaussianBump) return {p0_, p1_};
  return {p0_};
}

double Nuisance::operator()(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return p0_;
    case Kind::Linear:
      return -p0_ * x;
    case Kind::GaussianBump:
      return p0_ * std::exp(-0.5 * (x / p1_) * (x / p1_));
  }
  return 0.0;
}

double Nuisance::derivative(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return 0.0;
    case Kind::Linear:
      return -p0_;
    case Kind::GaussianBump:
      return -x / (p1_ * p1_) * (*this)(x);
  }
  return 0.0;
}

double Nuisance::derivative_bound() const {
  switch (kind_) {
    case Kind::Constant:
      return 0.0;
    case Kind::Linear:
      return std::abs(p0_);
    case Kind::GaussianBump:
      return std::abs(p0_) / (p1_ * std::sqrt(std::numbers::e));
  }
  return 0.0;
}

double Nuisance::antiderivative(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return p0_ * x;
    case Kind::Linear:
      return -0.5 * p0_ * x * x;
    case Kind::GaussianBump:
      return p0_ * p1_ * std::sqrt(std::numbers::pi / 2) * std::erf(x / (p1_ * std::numbers::sqrt2));
  }
  return 0.0;
}

double Nuisance::envelope_sd() const {
  if (kind_ != Kind::GaussianBump) throw ModelError("nuisance '" + name() + "' has no rejection envelope");
  return p1_ * std::numbers::sqrt2;
}

}  // namespace cusploc
