#include "boussinesq/random.hpp"

#include "boussinesq/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace boussinesq {

std::string to_string(VariateKind kind) { return kind == VariateKind::Gaussian ? "gaussian" : "rademacher"; }

VariateKind variate_from_string(const std::string& name) {
  if (name == "gaussian") return VariateKind::Gaussian;
  if (name == "rademacher") return VariateKind::Rademacher;
  throw std::invalid_argument("unknown variate kind '" + name + "' (expected gaussian or rademacher)");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t zigzag(std::int64_t i) {
  return (static_cast<std::uint64_t>(i) << 1) ^ static_cast<std::uint64_t>(i >> 63);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t key, VariateKind kind) : key_(splitmix64(key)), kind_(kind) {}

CounterRng CounterRng::substream(std::uint64_t index) const {
  CounterRng child(0, kind_);
  child.key_ = splitmix64(key_ ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  return child;
}

double CounterRng::uniform(std::uint64_t counter) const {
  const std::uint64_t bits = splitmix64(key_ + splitmix64(counter));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian(std::int64_t index) const {
  const std::uint64_t c = zigzag(index) << 1;
  const double u1 = uniform(c);
  const double u2 = uniform(c + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double CounterRng::rademacher(std::int64_t index) const {
  return uniform(zigzag(index) << 1) < 0.5 ? -1.0 : 1.0;
}

double CounterRng::draw(std::int64_t index) const {
  return kind_ == VariateKind::Gaussian ? gaussian(index) : rademacher(index);
}

}  // namespace boussinesq
