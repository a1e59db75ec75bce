#ifndef MIRS_VERSION_HPP
#define MIRS_VERSION_HPP

namespace mirs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mirs

#endif  // MIRS_VERSION_HPP
