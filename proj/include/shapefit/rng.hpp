#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace shapefit {

namespace detail {

constexpr std::uint64_t
mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t
hash_tag(std::string_view tag)
{
  std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace detail

//! Counter-based generator keyed by (seed, stream, purpose tag).
//!
//! The k-th output is a pure function of the key and k, so streams for
//! different replications can be created in any order and on any thread.
class CounterRng
{
public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::string_view tag)
    : key_(detail::mix64(detail::mix64(seed ^ 0x6a09e667f3bcc909ULL) +
                         detail::mix64(stream + 0x3c6ef372fe94f82bULL) +
                         detail::hash_tag(tag)))
  {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max()
  {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()()
  {
    const std::uint64_t x = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    return detail::mix64(detail::mix64(x) ^ key_);
  }

  //! Uniform on the open interval (0,1).
  double uniform()
  {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace shapefit
