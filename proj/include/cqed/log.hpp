#pragma once

#include <functional>
#include <string_view>

namespace cqed {

using WarningSink = std::function<void(std::string_view)>;

/// Replaces the warning sink (default: one line on stderr). Returns the old one.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

} // namespace cqed
