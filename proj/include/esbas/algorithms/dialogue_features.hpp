#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "esbas/algorithms/features.hpp"
#include "esbas/envs/dialogue.hpp"

namespace esbas {

// phi_t = 0.1 t / (0.1 t + 1)
double time_feature(int turn);

double asr_feature(const DialogueObservation& obs);

// Cost of the understood user proposition minus the cost of the option the
// system would propose next.
double cost_difference_feature(const DialogueObservation& obs);

/// Feature sets of the dialogue learners:
///   simple      {1, asr, dif, t}
///   fast        {1, asr, dif}
///   simple-2    every monomial of degree <= 2 of simple (10 features)
///   fast-2      every monomial of degree <= 2 of fast (6 features)
///   n-Z-<base>  <base> followed by Z fresh U[0,1] noise features
FeatureSet<DialogueObservation> dialogue_feature_set(std::string_view name);

}  // namespace esbas
