#pragma once

#include <stdexcept>
#include <string>

namespace wfsim {

/// Invalid user input: bad bounds, unknown profile rows, malformed documents.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A task was allocated on a node that cannot hold it. Always a scheduler bug.
struct PlacementError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Queue protocol misuse (double disconnect, push after done, pull after Empty).
struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A plan cannot be executed on the given cluster.
struct PlanningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateFitError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace wfsim
