#include "driftguard/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <mutex>

namespace driftguard {

std::shared_ptr<spdlog::logger> logger() {
    static std::once_flag once;
    static std::shared_ptr<spdlog::logger> instance;
    std::call_once(once, [] {
        instance = spdlog::stderr_color_mt("driftguard");
        auto level = spdlog::level::warn;
        if (const char* env = std::getenv("DRIFTGUARD_LOG")) {
            level = spdlog::level::from_str(env);
        }
        instance->set_level(level);
    });
    return instance;
}

}  // namespace driftguard
