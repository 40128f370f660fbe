#pragma once

#include <stdexcept>
#include <string>

namespace evoman {

/// Raised when a caller breaks an operation's precondition (e.g. stepping a finished match).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid configuration: unknown archetype ids, bad rates, missing blocks.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or truncated file (replays, genomes, archetype documents).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGenome : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace evoman
