#pragma once

namespace msdc {

/// Worker count for parallel loops: MSDC_THREADS when set, otherwise the
/// number of hardware threads. Never less than 1.
int worker_threads();

}  // namespace msdc
