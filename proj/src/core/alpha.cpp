#include "core/alpha.h"

#include <cmath>

namespace core {

Assessment alpha_assess(const AlphaCounter& c) {
  if (c.value >= c.threshold) return Assessment::permanent_or_intermittent;
  if (c.value > 0.0) return Assessment::transient;
  return Assessment::ok;
}

std::optional<Assessment> alpha_update(AlphaCounter& c, int judgment, long long label) {
  if (c.last_label >= 0 && label <= c.last_label) return std::nullopt;

  if (c.last_label >= 0) {
    // labels skipped between two judgments count as correct rounds
    long long gap = label - c.last_label;
    if (gap > 1) c.value *= std::pow(c.factor, double(gap - 1));
  }
  if (judgment == 0)
    c.value *= c.factor;
  else
    c.value += 1.0;
  c.last_label = label;
  return alpha_assess(c);
}

}  // namespace core
