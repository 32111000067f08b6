#pragma once

#include <spdlog/spdlog.h>

#include <memory>

namespace driftguard {

/// Shared stderr logger. Level comes from DRIFTGUARD_LOG
/// (trace|debug|info|warn|error|off), default warn.
std::shared_ptr<spdlog::logger> logger();

}  // namespace driftguard
