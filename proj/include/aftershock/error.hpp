#pragma once

#include <stdexcept>
#include <string>

namespace aftershock {

/// Input data that cannot be analysed: malformed rows, too few events,
/// degenerate samples. Parameter-domain violations use std::invalid_argument.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rethrows module errors with the pipeline stage prefixed to the message.
template <class Fn>
decltype(auto) in_stage(const std::string& stage, Fn&& fn) {
    try {
        return fn();
    } catch (const DataError& e) {
        throw DataError(stage + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(stage + ": " + e.what());
    }
}

}  // namespace aftershock
