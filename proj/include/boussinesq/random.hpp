#pragma once

#include <cstdint>
#include <string>

namespace boussinesq {

/// Seeds of the two independent probability spaces: ω drives the function
/// randomization g^{(1)}, ω̃ the eigenvalue randomization g^{(2)}.
struct RandomSeedPair {
  std::uint64_t omega = 1;
  std::uint64_t omega_tilde = 2;
};

enum class VariateKind { Gaussian, Rademacher };

std::string to_string(VariateKind kind);
VariateKind variate_from_string(const std::string& name);

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based stream of i.i.d. zero-mean unit-variance variates: draw(i)
/// depends only on (key, i), so results do not depend on evaluation order or
/// thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, VariateKind kind = VariateKind::Gaussian);

  /// Independent stream derived from this one, e.g. one per Monte-Carlo sample.
  CounterRng substream(std::uint64_t index) const;

  /// Uniform in (0, 1).
  double uniform(std::uint64_t counter) const;
  double gaussian(std::int64_t index) const;
  double rademacher(std::int64_t index) const;
  /// Variate of the configured kind at an integer (possibly negative) index.
  double draw(std::int64_t index) const;

  std::uint64_t key() const { return key_; }
  VariateKind kind() const { return kind_; }

 private:
  std::uint64_t key_;
  VariateKind kind_;
};

}  // namespace boussinesq
