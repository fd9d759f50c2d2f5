#pragma once

#include <string_view>

namespace mixsmooth {

enum class Verdict { Pass, Fail, Inconclusive };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

/// Overall verdict of a list of checks: any FAIL wins, then any INCONCLUSIVE.
constexpr Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Pass;
}

}  // namespace mixsmooth
