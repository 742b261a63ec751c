#include "svc/log.hpp"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <string>

namespace svc {

void init_logging() {
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("SVC_SIM_LOG"); env && *env)
        level = spdlog::level::from_str(env);
    spdlog::set_level(level);
    spdlog::set_pattern("[%l] %v");
}

} // namespace svc
