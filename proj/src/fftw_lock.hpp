#pragma once

#include <mutex>

namespace splitsea::detail {

/// FFTW's planner is not reentrant.
std::mutex &fftw_planner_mutex();

} // namespace splitsea::detail
