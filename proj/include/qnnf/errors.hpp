#ifndef QNNF_ERRORS_HPP
#define QNNF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qnnf {

// Error taxonomy, mapped to process exit codes by the CLI:
//   ConfigError  -> 2 (bad flags, invalid model/gate configuration, misuse of an API)
//   WeightsError -> 3 (weights file missing/corrupt/schema mismatch)
//   DataError    -> 4 (unusable input data)
//   TrainingError (train.hpp) -> 5 (divergence)
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct WeightsError : Error {
    using Error::Error;
};

}  // namespace qnnf

#endif
