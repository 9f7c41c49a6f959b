#pragma once

#include <stdexcept>
#include <string>

namespace climkit {

// Exit-code categories used by the CLI: config=2, data=3, solver=4.
enum class ErrorKind { config = 2, data = 3, solver = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct SolverError : Error {
    explicit SolverError(const std::string& what) : Error(ErrorKind::solver, what) {}
};

// carbon-cycle construction
struct TopologyError : ConfigError {
    using ConfigError::ConfigError;
};
struct TopologyMismatch : ConfigError {
    using ConfigError::ConfigError;
};
struct InadmissibleSpectrum : SolverError {
    using SolverError::SolverError;
};
struct CapacityExhausted : SolverError {
    using SolverError::SolverError;
};

// data ingestion
struct ContiguityError : DataError {
    using DataError::DataError;
};
struct SchemaError : DataError {
    using DataError::DataError;
};

// calibration / optimisation
struct NoAdmissibleSolution : SolverError {
    using SolverError::SolverError;
};
struct SolverNotConverged : SolverError {
    using SolverError::SolverError;
};
struct StepSizeUnstable : SolverError {
    using SolverError::SolverError;
};

// scenarios
struct BudgetUnreachable : SolverError {
    using SolverError::SolverError;
};
struct TargetNotReached : SolverError {
    using SolverError::SolverError;
};

// gridded fields
struct DegenerateRegressor : DataError {
    using DataError::DataError;
};
struct EmptyRegion : DataError {
    using DataError::DataError;
};

}  // namespace climkit
