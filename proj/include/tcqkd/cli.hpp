#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcqkd {

inline constexpr const char* kToolVersion = "0.1.0";

/// Environment variable naming the default output directory for `run`.
inline constexpr const char* kOutDirEnv = "TCQKD_OUT_DIR";

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kAuditFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kIo = 3;
}  // namespace exit_code

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcqkd
