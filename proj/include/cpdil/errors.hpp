#pragma once

#include <stdexcept>
#include <string>

namespace cpdil {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct NotHermitian : Error {
    explicit NotHermitian(double defect)
        : Error("matrix is not Hermitian (defect " + std::to_string(defect) + ")"),
          defect(defect) {}
    double defect;
};

struct NotCP : Error {
    explicit NotCP(double min_eig)
        : Error("map is not completely positive (Choi min eig " + std::to_string(min_eig) + ")"),
          min_eig(min_eig) {}
    double min_eig;
};

struct NotCommuting : Error {
    explicit NotCommuting(double defect)
        : Error("maps do not commute (Choi defect " + std::to_string(defect) + ")"),
          defect(defect) {}
    double defect;
};

struct WitnessResidual : Error {
    explicit WitnessResidual(double residual)
        : Error("flip witness residual too large (" + std::to_string(residual) + ")"),
          residual(residual) {}
    double residual;
};

struct NegativeTime : Error {
    NegativeTime() : Error("semigroup sampled at negative time") {}
};

struct DimTooLarge : Error {
    explicit DimTooLarge(int n, int limit)
        : Error("algebra dimension " + std::to_string(n) + " exceeds limit " + std::to_string(limit)) {}
};

struct SeedsNotCommuting : Error {
    explicit SeedsNotCommuting(double defect)
        : Error("seed matrices do not commute (defect " + std::to_string(defect) + ")") {}
};

struct CoherenceDefect : Error {
    CoherenceDefect(const std::string& where, double defect)
        : Error("coherence diagram fails at " + where + " (defect " + std::to_string(defect) + ")"),
          defect(defect) {}
    double defect;
};

struct Infeasible : Error {
    explicit Infeasible(double residual)
        : Error("no bimodule unitary within tolerance (residual " + std::to_string(residual) + ")"),
          residual(residual) {}
    double residual;
};

struct HorizonExceeded : Error {
    explicit HorizonExceeded(const std::string& msg) : Error("horizon exceeded: " + msg) {}
};

struct NotPD : Error {
    explicit NotPD(double min_eig)
        : Error("kernel is not positive definite (min eig " + std::to_string(min_eig) + ")"),
          min_eig(min_eig) {}
    double min_eig;
};

struct OutOfHorizon : Error {
    OutOfHorizon(int depth, int budget)
        : Error("operand support depth " + std::to_string(depth) +
                " exceeds horizon budget " + std::to_string(budget)) {}
};

struct BadProjection : Error {
    explicit BadProjection(double defect)
        : Error("matrix is not a projection (defect " + std::to_string(defect) + ")") {}
};

struct EpsilonViolated : Error {
    EpsilonViolated(double val, double eps)
        : Error("omega(1-p) = " + std::to_string(val) + " exceeds epsilon " + std::to_string(eps)) {}
};

struct InsufficientTable : Error {
    explicit InsufficientTable(const std::string& msg) : Error("sample table insufficient: " + msg) {}
};

struct NotCauchy : Error {
    explicit NotCauchy(const std::string& msg) : Error("approximants not Cauchy: " + msg) {}
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error("schema error: " + msg) {}
};

}  // namespace cpdil
