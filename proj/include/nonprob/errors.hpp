#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nonprob {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument values: non-finite inputs, probabilities outside (0,1), ...
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, int iteration = -1)
        : Error(what), iteration_(iteration) {}

    // Newton iteration at which the factorization failed, -1 outside an iteration.
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

class NotConvergedError : public Error {
public:
    NotConvergedError(const std::string& what, Eigen::VectorXd last, double score_norm, int iterations)
        : Error(what), last_(std::move(last)), score_norm_(score_norm), iterations_(iterations) {}

    const Eigen::VectorXd& last_estimate() const noexcept { return last_; }
    double score_norm() const noexcept { return score_norm_; }
    int iterations() const noexcept { return iterations_; }

private:
    Eigen::VectorXd last_;
    double score_norm_;
    int iterations_;
};

// Malformed input files. `row` is the 1-based data row (header excluded), 0 when not row specific.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, long row = 0) : Error(what), row_(row) {}
    long row() const noexcept { return row_; }

private:
    long row_;
};

}  // namespace nonprob

namespace nonprob {

// Inconsistent configuration, e.g. an estimator that needs N requested without it.
class UsageError : public Error {
public:
    using Error::Error;
};

// Monte Carlo run stopped because too many replicates failed.
class SimulationAborted : public Error {
public:
    using Error::Error;
};

}  // namespace nonprob
