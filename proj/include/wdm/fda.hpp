#pragma once

#include <vector>

#include "wdm/admission.hpp"

namespace wdm {

/// Network-wide average packet delay under an M/M/1 model per lightpath,
/// rates in Gbps acting as normalized service rates:
///
///   T = (1/gamma) * sum_e [ f_e / (C_e - f_e) + f_e * prop_e ]
///
/// with gamma the total reserved rate of Active flows. +infinity if some
/// lightpath has f_e >= C_e. Throws NoTrafficError when gamma == 0.
double average_packet_delay(const NetworkState& state);

/// One lightpath's contribution f/(C-f) + f*prop to gamma*T (+inf if f >= C).
double lightpath_delay_term(double capacity, double load, double prop_s);

/// d/df of lightpath_delay_term: C/(C-f)^2 + prop, +infinity for f >= C.
double marginal_delay_length(double capacity, double load, double prop_s);

inline constexpr double kDefaultFdaTolerance = 1e-4;
inline constexpr int kDefaultFdaMaxPasses = 10;

struct FdaReport {
    int passes = 0;
    double delay_before_s = 0.0;
    double delay_after_s = 0.0;
    int moves = 0;
    /// Average delay after each completed pass.
    std::vector<double> delay_per_pass_s;
    /// True when the last pass made no move.
    bool converged = false;
    /// Lightpaths left without flows by moves, torn down at the end.
    std::vector<LightpathId> reclaimed;
};

/// Flow-granular flow deviation over the existing virtual topology.
///
/// Each pass visits Active flows by descending reserved rate (tie: ascending
/// id). For a flow, loads are taken with the flow itself removed and the
/// shortest feasible path (residual >= rate) is found under marginal delay
/// lengths. If that path does not lower T by more than tol*T, the path that
/// minimizes the exact delay increase of placing the flow is tried as well.
/// Moves are accepted only on a strict improvement above tol*T. Stops after a
/// pass without moves or after max_passes.
FdaReport fda_reroute(NetworkState& state, double tol = kDefaultFdaTolerance,
                      int max_passes = kDefaultFdaMaxPasses);

} // namespace wdm
