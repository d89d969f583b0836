#pragma once

#include <optional>

namespace core {

// fault-frequency filter: one judgment per detector label.
// judgment 1 (deviation) adds 1, judgment 0 (correct) multiplies by factor.
// label gaps count as implicit judgment-0 rounds.
struct AlphaCounter {
  double value = 0.0;
  double factor = 0.4;
  double threshold = 3.0;
  long long last_label = -1;  // -1: no judgment seen yet
};

enum class Assessment { ok, transient, permanent_or_intermittent };

// nullopt: label not beyond last_label, judgment rejected (duplicate or
// reordered detector message), counter untouched.
std::optional<Assessment> alpha_update(AlphaCounter& c, int judgment, long long label);

Assessment alpha_assess(const AlphaCounter& c);

}  // namespace core
