#include "cusploc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <spdlog/spdlog.h>

#include "cusploc/constants.hpp"
#include "cusploc/error.hpp"
#include "cusploc/fft.hpp"

namespace cusploc {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Prior Prior::truncated_gaussian(double mean, double sd) {
  if (!(sd > 0) || !std::isfinite(mean)) throw DomainError("truncated Gaussian prior needs sd > 0");
  Prior p;
  p.kind = Kind::TruncatedGaussian;
  p.mean = mean;
  p.sd = sd;
  return p;
}

Prior Prior::from_name(const std::string& name, double mean, double sd) {
  if (name == "uniform") return uniform();
  if (name == "truncated_gaussian") return truncated_gaussian(mean, sd);
  throw DomainError("unknown prior '" + name + "' (uniform, truncated_gaussian)");
}

double Prior::operator()(double theta) const {
  if (kind == Kind::Uniform) return scale;
  const double z = (theta - mean) / sd;
  return scale * std::exp(-0.5 * z * z);
}

struct LikelihoodEvaluator::Impl {
  const Trajectory* path = nullptr;
  const EventRecord* events = nullptr;
  const Sample* sample = nullptr;
  std::unique_ptr<IidSampler> iid;
  std::vector<double> phases;
  double inv_eps_sq = 1.0;
};

LikelihoodEvaluator::LikelihoodEvaluator(const CuspModelSpec& spec, const ObservedData& data)
    : spec_(spec), data_(&data), impl_(std::make_unique<Impl>()) {
  spec_.validate();
  switch (spec_.variant) {
    case Variant::GaussianSignal:
    case Variant::ErgodicDiffusion:
    case Variant::SmallNoiseDynamical:
      impl_->path = std::get_if<Trajectory>(&data);
      if (!impl_->path || impl_->path->increments() < 1)
        throw DomainError(to_string(spec_.variant) + " needs trajectory data");
      if (spec_.small_noise()) {
        if (!(spec_.epsilon > 0)) throw DomainError("likelihood needs a positive noise level epsilon");
        impl_->inv_eps_sq = 1.0 / (spec_.epsilon * spec_.epsilon);
      }
      break;
    case Variant::IidDensity:
      impl_->sample = std::get_if<Sample>(&data);
      if (!impl_->sample || impl_->sample->values.empty()) throw DomainError("i.i.d. model needs a nonempty sample");
      impl_->iid = std::make_unique<IidSampler>(spec_);
      break;
    case Variant::PoissonPeriodic:
      impl_->events = std::get_if<EventRecord>(&data);
      if (!impl_->events) throw DomainError("Poisson model needs an event record");
      if (std::abs(impl_->events->tau - spec_.tau) > 1e-12 * spec_.tau)
        throw DomainError("event record period differs from the model period");
      impl_->phases.reserve(impl_->events->events.size());
      for (double t : impl_->events->events) impl_->phases.push_back(t - spec_.tau * std::floor(t / spec_.tau));
      break;
  }
}

LikelihoodEvaluator::~LikelihoodEvaluator() = default;
LikelihoodEvaluator::LikelihoodEvaluator(LikelihoodEvaluator&&) noexcept = default;

double LikelihoodEvaluator::asymptotic_parameter() const {
  switch (spec_.variant) {
    case Variant::GaussianSignal:
    case Variant::SmallNoiseDynamical:
      return spec_.epsilon;
    case Variant::IidDensity:
      return static_cast<double>(impl_->sample->values.size());
    case Variant::PoissonPeriodic:
      return static_cast<double>(impl_->events->n_periods);
    case Variant::ErgodicDiffusion:
      return impl_->path->horizon();
  }
  return 0.0;
}

double LikelihoodEvaluator::operator()(double theta) const {
  switch (spec_.variant) {
    case Variant::GaussianSignal: {
      const Trajectory& p = *impl_->path;
      const std::size_t n = p.increments();
      double stoch = 0.0, comp = 0.0;
      for (std::size_t i = 0; i <= n; ++i) {
        const double s = signal_value(spec_, theta, p.time(i));
        if (i < n) stoch += s * (p.values[i + 1] - p.values[i]);
        comp += (i == 0 || i == n) ? 0.5 * s * s : s * s;
      }
      return impl_->inv_eps_sq * (stoch - 0.5 * p.step * comp);
    }
    case Variant::ErgodicDiffusion:
    case Variant::SmallNoiseDynamical: {
      const Trajectory& p = *impl_->path;
      const std::size_t n = p.increments();
      double stoch = 0.0, comp = 0.0;
      for (std::size_t i = 0; i <= n; ++i) {
        const double s = cusp_function(spec_, p.values[i] - theta);
        if (i < n) stoch += s * (p.values[i + 1] - p.values[i]);
        comp += (i == 0 || i == n) ? 0.5 * s * s : s * s;
      }
      return impl_->inv_eps_sq * (stoch - 0.5 * p.step * comp);
    }
    case Variant::IidDensity: {
      double sum = 0.0;
      for (double x : impl_->sample->values) {
        const double l = impl_->iid->log_density(theta, x);
        if (l == kNegInf) return kNegInf;
        sum += l;
      }
      return sum;
    }
    case Variant::PoissonPeriodic: {
      double sum = 0.0;
      for (double ph : impl_->phases) {
        const double lambda = cusp_function(spec_, ph - theta);
        if (!(lambda > 0)) throw ModelError("Poisson intensity is not positive at an observed event");
        sum += std::log(lambda);
      }
      const double n = static_cast<double>(impl_->events->n_periods);
      return sum - n * (poisson_period_mass(spec_, theta) - spec_.tau);
    }
  }
  return 0.0;
}

LikelihoodCurve LikelihoodEvaluator::curve(std::span<const double> thetas) const {
  LikelihoodCurve c;
  c.thetas.assign(thetas.begin(), thetas.end());
  c.loglik.reserve(thetas.size());
  for (double th : thetas) {
    const double l = (*this)(th);
    if (l == kNegInf) ++c.excluded;
    c.loglik.push_back(l);
  }
  return c;
}

LikelihoodCurve LikelihoodEvaluator::coarse_curve(double max_step, std::size_t max_points) const {
  if (!(max_step > 0)) throw DomainError("coarse step must be positive");
  const double width = spec_.beta - spec_.alpha;
  if (width / max_step > static_cast<double>(max_points)) {
    const double wider = width / static_cast<double>(max_points);
    spdlog::warn("coarse grid capped at {} points: step {:.3g} instead of {:.3g}", max_points, wider, max_step);
    max_step = wider;
  }

  if (spec_.variant != Variant::GaussianSignal) {
    const auto k = static_cast<std::size_t>(std::ceil(width / max_step));
    const double h = width / static_cast<double>(k);
    std::vector<double> thetas;
    for (std::size_t i = 1; i < k; ++i) thetas.push_back(spec_.alpha + h * static_cast<double>(i));
    if (thetas.empty()) thetas.push_back(0.5 * (spec_.alpha + spec_.beta));
    return curve(thetas);
  }

  // theta = t0 + (k + j/m) step; the signal depends on t - theta only, so each sub-offset j
  // is a correlation of the increments with a fixed kernel.
  const Trajectory& p = *impl_->path;
  const std::size_t n = p.increments();
  const double dt = p.step;
  const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(dt / max_step - 1e-9)));
  const long k_lo = static_cast<long>(std::floor((spec_.alpha - p.t0) / dt));
  const long k_hi = static_cast<long>(std::ceil((spec_.beta - p.t0) / dt));
  const long first = std::max(0L, k_lo);
  const long last = std::min(static_cast<long>(n), k_hi);
  if (last < first) throw DomainError("empty feasible grid");
  const std::size_t count = static_cast<std::size_t>(last - first + 1);

  std::vector<double> dx(n);
  for (std::size_t i = 0; i < n; ++i) dx[i] = p.values[i + 1] - p.values[i];
  const std::size_t klen = 2 * n + 1;
  FftCorrelator corr(dx, klen);

  std::map<double, double> points;
  std::vector<double> kernel(klen);
  std::vector<long double> prefix(klen + 1);
  for (std::size_t j = 0; j < m; ++j) {
    const double shift = static_cast<double>(j) / static_cast<double>(m);
    for (std::size_t d = 0; d < klen; ++d) {
      const double lag = (static_cast<double>(d) - static_cast<double>(n) - shift) * dt;
      kernel[d] = signal_value(spec_, 0.0, lag);
    }
    prefix[0] = 0;
    for (std::size_t d = 0; d < klen; ++d)
      prefix[d + 1] = prefix[d] + static_cast<long double>(kernel[d]) * kernel[d];
    const auto stoch = corr.correlate(kernel, static_cast<long>(n), first, count);
    for (std::size_t c = 0; c < count; ++c) {
      const long k = first + static_cast<long>(c);
      const double theta = p.t0 + (static_cast<double>(k) + shift) * dt;
      if (!(theta > spec_.alpha && theta < spec_.beta)) continue;
      // Trapezoid sum over i = 0..n of K[i - k]^2, with K[d] stored at index d + n.
      const auto lo = static_cast<std::size_t>(static_cast<long>(n) - k);
      const auto hi = static_cast<std::size_t>(2 * static_cast<long>(n) - k);
      const long double full = prefix[hi + 1] - prefix[lo];
      const long double ends = 0.5L * (static_cast<long double>(kernel[lo]) * kernel[lo] +
                                       static_cast<long double>(kernel[hi]) * kernel[hi]);
      const double comp = static_cast<double>(full - ends);
      points[theta] = impl_->inv_eps_sq * (stoch[c] - 0.5 * dt * comp);
    }
  }
  if (points.empty()) throw DomainError("empty feasible grid");
  LikelihoodCurve out;
  for (const auto& [th, l] : points) {
    out.thetas.push_back(th);
    out.loglik.push_back(l);
  }
  return out;
}

double log_likelihood(const CuspModelSpec& spec, const ObservedData& data, double theta) {
  if (!(theta > spec.alpha && theta < spec.beta)) throw DomainError("theta must lie inside (alpha, beta)");
  return LikelihoodEvaluator(spec, data)(theta);
}

namespace {

// Index of the largest finite value; ties go to the smallest theta (curves are sorted).
std::size_t best_index(const LikelihoodCurve& c) {
  std::size_t best = c.loglik.size();
  for (std::size_t i = 0; i < c.loglik.size(); ++i) {
    const double l = c.loglik[i];
    if (l == kNegInf || std::isnan(l)) continue;
    if (best == c.loglik.size() || l > c.loglik[best]) best = i;
  }
  if (best == c.loglik.size()) throw NumericalError("log-likelihood is -infinity on the whole grid");
  return best;
}

}  // namespace

double posterior_mean(const LikelihoodCurve& c, const Prior& prior) {
  const double top = c.loglik[best_index(c)];
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i < c.thetas.size(); ++i) {
    auto weight = [&](std::size_t k) {
      const double l = c.loglik[k];
      return l == kNegInf ? 0.0 : prior(c.thetas[k]) * std::exp(l - top);
    };
    const double w0 = weight(i - 1), w1 = weight(i);
    const double h = 0.5 * (c.thetas[i] - c.thetas[i - 1]);
    den += h * (w0 + w1);
    num += h * (w0 * c.thetas[i - 1] + w1 * c.thetas[i]);
  }
  if (c.thetas.size() == 1) return c.thetas[0];
  if (!(den > 0)) throw NumericalError("posterior weights underflow");
  return num / den;
}

EstimationResult estimate(const CuspModelSpec& spec, const ObservedData& data, const EstimationOptions& opt,
                          std::optional<double> theta0) {
  LikelihoodEvaluator eval(spec, data);
  const double p = eval.asymptotic_parameter();
  const double scale = opt.scale ? *opt.scale : effective_scale(spec, p);
  if (!(scale > 0)) throw DomainError("fluctuation scale must be positive");
  const double coarse_target = opt.coarse_step ? *opt.coarse_step : scale / opt.coarse_divisor;
  const double final_target = scale / opt.final_divisor;

  const LikelihoodCurve coarse = eval.coarse_curve(coarse_target, opt.max_coarse_points);
  const std::size_t kc = best_index(coarse);
  double h = coarse.thetas.size() > 1 ? (coarse.thetas.back() - coarse.thetas.front()) /
                                            static_cast<double>(coarse.thetas.size() - 1)
                                      : (spec.beta - spec.alpha) / 2;
  const double coarse_step = h;

  EstimationResult r;
  r.coarse_step = coarse_step;
  r.excluded = coarse.excluded;
  double best = coarse.thetas[kc];
  double best_l = coarse.loglik[kc];
  auto inside = [&](double th) { return th > spec.alpha && th < spec.beta; };
  while (h > final_target) {
    h /= 3.0;
    const double center = best;
    for (double off : {-2.0, -1.0, 1.0, 2.0}) {
      const double th = center + off * h;
      if (!inside(th)) continue;
      const double l = eval(th);
      if (l == kNegInf) {
        ++r.excluded;
        continue;
      }
      if (l > best_l || (l == best_l && th < best)) {
        best = th;
        best_l = l;
      }
    }
  }
  r.theta_mle = best;
  r.loglik_at_mle = best_l;
  r.grid_step_final = h;

  LikelihoodCurve post = coarse;
  const int refine = std::max(1, opt.bayes_refinement);
  const double hb = coarse_step / refine;
  std::vector<std::pair<double, double>> merged;
  merged.reserve(coarse.thetas.size() + 2 * refine);
  for (std::size_t i = 0; i < coarse.thetas.size(); ++i) merged.emplace_back(coarse.thetas[i], coarse.loglik[i]);
  for (int i = -(refine - 1); i <= refine - 1; ++i) {
    if (i == 0) continue;
    const double th = coarse.thetas[kc] + i * hb;
    if (!inside(th)) continue;
    const double l = eval(th);
    if (l == kNegInf) ++r.excluded;
    merged.emplace_back(th, l);
  }
  std::sort(merged.begin(), merged.end());
  post.thetas.clear();
  post.loglik.clear();
  for (const auto& [th, l] : merged) {
    post.thetas.push_back(th);
    post.loglik.push_back(l);
  }
  r.theta_bayes = posterior_mean(post, opt.prior);
  if (r.excluded > 0) spdlog::debug("{} likelihood evaluations were -infinity and excluded", r.excluded);
  if (theta0) r.normalized_errors = normalized_errors(spec, r.theta_mle, r.theta_bayes, *theta0, p);
  return r;
}

double mle(const CuspModelSpec& spec, const ObservedData& data, const EstimationOptions& options) {
  return estimate(spec, data, options).theta_mle;
}

double bayes_estimate(const CuspModelSpec& spec, const ObservedData& data, const Prior& prior,
                      const EstimationOptions& options) {
  EstimationOptions o = options;
  o.prior = prior;
  return estimate(spec, data, o).theta_bayes;
}

std::pair<double, double> normalized_errors(const CuspModelSpec& spec, double theta_mle, double theta_bayes,
                                            double theta0, double asymptotic_parameter) {
  const double phi = normalizing_rate(spec, asymptotic_parameter);
  return {(theta_mle - theta0) / phi, (theta_bayes - theta0) / phi};
}

}  // namespace cusploc
