#pragma once

namespace cqed {

const char* version() noexcept;

} // namespace cqed
