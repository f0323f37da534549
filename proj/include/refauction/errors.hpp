#pragma once

#include <stdexcept>
#include <string>

namespace refauction {

/// Malformed input: unknown child ids, duplicate agents, negative bids, etc.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The market has no agent able to receive the item.
class NoBiddersError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An accounting identity that holds by construction was violated. Always a bug.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace refauction
