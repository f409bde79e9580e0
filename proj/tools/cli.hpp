#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aoi::cli {

/// Exit codes: 0 success, 1 domain error (DivergentAge, ZeroSuccessProbability, ...),
/// 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name. Default seed comes from AOI_SEED when set.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoi::cli
