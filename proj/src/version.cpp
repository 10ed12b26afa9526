#include "cqed/version.hpp"

namespace cqed {

const char* version() noexcept { return CQED_VERSION; }

} // namespace cqed
