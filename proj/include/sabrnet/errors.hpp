#pragma once

#include <stdexcept>
#include <string>

namespace sabrnet {

/// Base of every error raised by the library. Each subclass names one
/// failure mode so callers can route them (skip a sample, abort a run, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PriceOutOfBounds : public Error { public: using Error::Error; };
class NoConvergence : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class NegativeVol : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class NonFinite : public Error { public: using Error::Error; };
class ShapeMismatch : public Error { public: using Error::Error; };
class Diverged : public Error { public: using Error::Error; };
class DegenerateReference : public Error { public: using Error::Error; };
class EmptyRegion : public Error { public: using Error::Error; };

}  // namespace sabrnet
