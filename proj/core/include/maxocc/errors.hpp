#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace maxocc {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

/// Base class for all maxocc exceptions.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A transition row whose probabilities do not add up to one (or carry
/// negative mass).
class RowSumError : public Error {
public:
    RowSumError(StateId state, ActionId action, double sum, const std::string& detail = "")
        : Error("transition row (" + std::to_string(state) + "," + std::to_string(action) +
                ") sums to " + std::to_string(sum) + (detail.empty() ? "" : ": " + detail)),
          state(state), action(action), sum(sum) {}
    StateId state;
    ActionId action;
    double sum;
};

/// A state with no available action at all.
class NoActionError : public Error {
public:
    explicit NoActionError(StateId state)
        : Error("state " + std::to_string(state) + " has no available action"), state(state) {}
    StateId state;
};

/// Transition mass attached to an action that is not available.
class GhostTransitionError : public Error {
public:
    GhostTransitionError(StateId state, ActionId action)
        : Error("unavailable action (" + std::to_string(state) + "," + std::to_string(action) +
                ") carries transition mass"),
          state(state), action(action) {}
    StateId state;
    ActionId action;
};

/// A vector that was supposed to be a probability distribution is not.
class NotADistribution : public Error {
public:
    explicit NotADistribution(double sum)
        : Error("probabilities sum to " + std::to_string(sum)), sum(sum) {}
    double sum;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// An input that must be strictly positive is not.
class NonPositiveInput : public Error {
public:
    explicit NonPositiveInput(const std::string& what) : Error(what) {}
};

/// A specialized solver was handed a model it does not cover.
class NotDeterministic : public Error {
public:
    NotDeterministic(StateId state, ActionId action)
        : Error("row (" + std::to_string(state) + "," + std::to_string(action) +
                ") has more than one successor"),
          state(state), action(action) {}
    StateId state;
    ActionId action;
};

/// An action was requested in a state where it is not available.
class UnavailableAction : public Error {
public:
    UnavailableAction(StateId state, ActionId action)
        : Error("action " + std::to_string(action) + " not available in state " +
                std::to_string(state)),
          state(state), action(action) {}
    StateId state;
    ActionId action;
};

/// A logged trajectory step has zero probability under the supplied policy
/// or transition kernel.
class ZeroProbabilityStep : public Error {
public:
    explicit ZeroProbabilityStep(std::size_t step)
        : Error("trajectory step " + std::to_string(step) + " has zero probability"), step(step) {}
    std::size_t step;
};

}  // namespace maxocc
