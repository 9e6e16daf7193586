#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace rankup {

enum class UpdateMethod { DI, ISM, WMI, AUTO };

// How AUTO is resolved.
enum class SelectionRule { EXPERIMENTAL, THEORETICAL };

inline const char* to_string(UpdateMethod m) noexcept {
  switch (m) {
    case UpdateMethod::DI: return "DI";
    case UpdateMethod::ISM: return "ISM";
    case UpdateMethod::WMI: return "WMI";
    case UpdateMethod::AUTO: return "AUTO";
  }
  return "?";
}

// Case-insensitive: "di", "ISM", "wmi", "auto".
inline std::optional<UpdateMethod> parse_method(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "di") return UpdateMethod::DI;
  if (lower == "ism") return UpdateMethod::ISM;
  if (lower == "wmi") return UpdateMethod::WMI;
  if (lower == "auto") return UpdateMethod::AUTO;
  return std::nullopt;
}

}  // namespace rankup
