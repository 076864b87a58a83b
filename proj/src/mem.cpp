#include "evth/mem.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace evth {

void retain_large_allocations() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

}  // namespace evth
