#pragma once

#include <stdexcept>
#include <string>

namespace ccdyn {

/// Base class for everything that can go wrong while building a schedule.
struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The window construction for the index sets needs t_bar + alpha_bar <= P.
struct UnsupportedRegimeError : ScheduleError {
    using ScheduleError::ScheduleError;
};

/// The constraint search for t_bar > 1 packet assignment found no solution.
struct InfeasibleScheduleError : ScheduleError {
    using ScheduleError::ScheduleError;
};

/// A stream would need more than alpha - 1 nulling directions.
struct SuppressionBudgetError : ScheduleError {
    using ScheduleError::ScheduleError;
};

} // namespace ccdyn
