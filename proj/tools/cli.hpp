#pragma once

#include <ostream>

namespace coeye::cli {

// Exit codes: 0 ok, 2 usage or data, 3 training, 4 shape mismatch.
inline constexpr int kOk = 0;
inline constexpr int kUsageOrData = 2;
inline constexpr int kTraining = 3;
inline constexpr int kShape = 4;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace coeye::cli
