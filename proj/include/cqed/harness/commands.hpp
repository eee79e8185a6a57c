#pragma once

#include <iosfwd>

#include "cqed/harness/cache.hpp"
#include "cqed/harness/config.hpp"

namespace cqed::harness {

enum ExitCode : int { exit_ok = 0, exit_config_error = 1, exit_engine_error = 2 };

/// Payload builders (JSON objects of outcome fields).
Json fluorescence_payload(const FluorescenceOutcome& o);
Json reflection_payload(const ReflectionOutcome& o);

/// Dry-run report: {"valid": bool, "issues": [...]}.
Json validation_report(const RunConfig& rc);

/// Executes one command. JSON goes to `out`, diagnostics to `err`.
int run(const RunConfig& rc, std::ostream& out, std::ostream& err);

} // namespace cqed::harness
