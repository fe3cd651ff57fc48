#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "esbas/core/errors.hpp"
#include "esbas/core/rng.hpp"

namespace esbas {

template <class Obs>
struct BaseFeature {
  std::string name;
  std::function<double(const Obs&)> eval;
};

// zeta fresh U[0,1] values, one per call.
inline std::vector<double> noise_features(int zeta, RngStream& rng) {
  if (zeta < 0) throw ConfigError("noise feature count must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(zeta));
  for (double& v : out) v = rng.uniform();
  return out;
}

/// State projection Phi of a linear learner.
///
/// Layout: [1 if constant] [base features] [squares] [pairwise products i<j]
/// [zeta noise features]. The quadratic blocks are present only when
/// `quadratic` is set, giving every monomial of degree <= 2 of the base set.
template <class Obs>
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::string name, std::vector<BaseFeature<Obs>> base, bool quadratic, int zeta,
             bool constant = true)
      : name_(std::move(name)), base_(std::move(base)), quadratic_(quadratic), zeta_(zeta),
        constant_(constant) {
    if (zeta < 0) throw ConfigError("noise feature count must be >= 0");
    const std::size_t m = base_.size();
    dimension_ = (constant_ ? 1 : 0) + m + (quadratic_ ? m + m * (m - (m > 0 ? 1 : 0)) / 2 : 0) +
                 static_cast<std::size_t>(zeta_);
    if (dimension_ == 0) throw ConfigError("feature set " + name_ + " is empty");
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dimension_; }
  int zeta() const noexcept { return zeta_; }
  bool quadratic() const noexcept { return quadratic_; }

  void evaluate(const Obs& obs, RngStream& rng, std::span<double> out) const {
    std::size_t i = 0;
    if (constant_) out[i++] = 1.0;
    const std::size_t first = i;
    for (const auto& f : base_) out[i++] = f.eval(obs);
    if (quadratic_) {
      const std::size_t m = base_.size();
      for (std::size_t a = 0; a < m; ++a) out[i++] = out[first + a] * out[first + a];
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) out[i++] = out[first + a] * out[first + b];
      }
    }
    for (int z = 0; z < zeta_; ++z) out[i++] = rng.uniform();
  }

  std::vector<double> evaluate(const Obs& obs, RngStream& rng) const {
    std::vector<double> out(dimension_);
    evaluate(obs, rng, out);
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    if (constant_) out.push_back("1");
    for (const auto& f : base_) out.push_back(f.name);
    if (quadratic_) {
      for (const auto& f : base_) out.push_back(f.name + "^2");
      for (std::size_t a = 0; a < base_.size(); ++a) {
        for (std::size_t b = a + 1; b < base_.size(); ++b) {
          out.push_back(base_[a].name + "*" + base_[b].name);
        }
      }
    }
    for (int z = 0; z < zeta_; ++z) out.push_back("noise" + std::to_string(z));
    return out;
  }

 private:
  std::string name_;
  std::vector<BaseFeature<Obs>> base_;
  bool quadratic_ = false;
  int zeta_ = 0;
  bool constant_ = true;
  std::size_t dimension_ = 0;
};

}  // namespace esbas
