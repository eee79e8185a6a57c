#include "cqed/log.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace cqed {

namespace {

std::mutex sink_mutex;

WarningSink& sink() {
  static WarningSink s = [](std::string_view m) {
    std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(m.size()), m.data());
  };
  return s;
}

} // namespace

WarningSink set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex);
  return std::exchange(sink(), std::move(s));
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  if (sink()) sink()(message);
}

} // namespace cqed
