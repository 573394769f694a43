#pragma once

#include <functional>

namespace wgeit {

/// Upper bound on worker threads for internal loops. 0 selects the number of
/// available cores.
void set_num_threads(int n);
int num_threads();

/// Runs fn(i) for i in [0, n). Each index must write only its own output slot
/// so the result does not depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace wgeit
