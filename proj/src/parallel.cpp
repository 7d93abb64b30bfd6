#include "knockoffs/parallel.hpp"

#include <cstdlib>
#include <string>

namespace knockoffs {

int resolve_threads(int requested) {
  if (const char* env = std::getenv("KNOCKOFF_THREADS"); env != nullptr && *env != '\0') {
    try {
      requested = std::stoi(env);
    } catch (const std::exception&) {
      // Ignore malformed overrides and keep the requested count.
    }
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace knockoffs
