#ifndef LQZ_HARNESS_FORMAT_HPP
#define LQZ_HARNESS_FORMAT_HPP

#include <cstdio>
#include <string>

namespace lqz {

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

}  // namespace lqz

#endif
