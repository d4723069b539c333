#pragma once

#include <stdexcept>
#include <string>

namespace collage {

// Shape or resolution disagreement between operands.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid configuration value, missing resource or empty corpus.
struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// API called in a state that does not allow it (untrained model, empty batch).
struct UsageError : std::logic_error {
  using std::logic_error::logic_error;
};

// Episode stepped after termination.
struct LifecycleError : std::logic_error {
  using std::logic_error::logic_error;
};

struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IncompatibleVersion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace collage
