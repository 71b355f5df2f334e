#pragma once

#include "shapefit/current_status.hpp"
#include "shapefit/error.hpp"
#include "shapefit/incubation.hpp"
#include "shapefit/laws.hpp"
#include "shapefit/log.hpp"
#include "shapefit/rng.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>

namespace shapefit {

//! Current status sample: X ~ truth, T ~ observation law, delta = 1{X <= T}.
//! Replication r draws from its own stream, so samples can be generated in
//! any order.
inline CurrentStatusData
gen_current_status(std::size_t n,
                   const TruthSpec& truth,
                   const ObservationLaw& obs,
                   std::uint64_t seed,
                   std::uint64_t replication = 0)
{
  obs.validate();
  CounterRng rng(seed, replication, "current-status");
  CurrentStatusData data;
  data.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = truth.quantile(rng.uniform());
    const double t = obs.sample(rng.uniform());
    data.records.push_back({ t, x <= t ? 1 : 0 });
  }
  return data;
}

//! Incubation sample: E ~ exposure law, U ~ Unif[0, E], V ~ truth,
//! S = U + V.
inline IncubationData
gen_incubation(std::size_t n,
               const TruthSpec& truth,
               const ExposureLaw& exposure,
               std::uint64_t seed,
               std::uint64_t replication = 0)
{
  exposure.validate();
  if (exposure.hi <= 0.0)
    throw UsageError("exposure law must have positive support");
  if (exposure.lo <= 0.0) {
    static std::atomic<bool> warned{ false };
    if (!warned.exchange(true))
      log::warn("exposure law is not bounded away from 0; the separation condition fails");
  }
  CounterRng rng(seed, replication, "incubation");
  IncubationData data;
  data.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = exposure.sample(rng.uniform());
    const double u = e * rng.uniform();
    const double v = truth.quantile(rng.uniform());
    data.records.push_back({ e, u + v });
  }
  return data;
}

} // namespace shapefit
