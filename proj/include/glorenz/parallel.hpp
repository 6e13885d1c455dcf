#pragma once

namespace glorenz {

/// Worker threads used by shardable loops. 0 restores the default
/// (hardware concurrency).
void set_worker_threads(unsigned n);
unsigned worker_threads();

}  // namespace glorenz
