#pragma once

namespace svc {

/// Sets the log level from SVC_SIM_LOG (trace, debug, info, warn, error,
/// critical, off). Defaults to warn.
void init_logging();

} // namespace svc
