#pragma once

namespace evth {

/// Field buffers of several MB are allocated and freed every step; glibc
/// serves them with mmap/munmap by default and the page faults end up
/// dominating the stencil work. Raising the mmap and trim thresholds keeps
/// the blocks on the heap for reuse. Call once at program start.
void retain_large_allocations();

}  // namespace evth
