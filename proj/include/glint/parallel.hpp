// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace glint {

/// Hardware thread count, at least 1.
int default_thread_count();

// Runs fn(i) for i in [0, count). Work items must be independent and write
// only to their own slots; results are then identical for any thread count.
// n_threads <= 0 selects default_thread_count(); 1 runs inline.
void parallel_for(size_t count, const std::function<void(size_t)>& fn, int n_threads = 0);

}  // namespace glint
