#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mixprobe {

using UserId = std::uint32_t;
using MessageId = std::uint64_t;
using LinkId = std::uint32_t;
using NodeIndex = std::uint32_t;

// Virtual time in "seconds". Users send on integer seconds, Poisson nodes
// release messages at arbitrary real offsets.
using VirtualTime = double;

// Invalid configuration or parameters supplied by the operator.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Internal inconsistency detected while simulating (should never fire).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Message {
  MessageId id = 0;
  UserId sender = 0;
  UserId recipient = 0;
  VirtualTime ingress_time = 0.0;
};

}  // namespace mixprobe
