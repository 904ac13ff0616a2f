#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace topodyn {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed config text or descriptor field.
struct ParseError : Error {
  using Error::Error;
};

/// Structurally valid input that violates a documented precondition.
struct ValidationError : Error {
  using Error::Error;
};

/// Two points (or a point and a system) of incompatible variants.
struct TypeError : Error {
  using Error::Error;
};

/// A symbolic point was asked for symbols beyond its certified horizon.
struct HorizonError : Error {
  HorizonError(std::size_t needed, std::size_t have)
      : Error("symbolic horizon exhausted: need " + std::to_string(needed) +
              " symbols, have " + std::to_string(have)),
        needed(needed),
        have(have) {}
  std::size_t needed;
  std::size_t have;
};

/// Operation requested on a system kind that cannot support it.
struct UnsupportedSystemError : Error {
  using Error::Error;
};

/// Numeric argument outside the operation's domain.
struct DomainError : Error {
  using Error::Error;
};

/// A search or enumeration exceeded its configured budget. Carries the
/// consumed amount and, where meaningful, a cursor describing how far the
/// search got so a caller can resume or report partial progress.
struct BudgetError : Error {
  BudgetError(std::uint64_t limit, std::uint64_t used, std::string cursor = {})
      : Error("budget exhausted: " + std::to_string(used) + "/" +
              std::to_string(limit) +
              (cursor.empty() ? std::string() : " at " + cursor)),
        limit(limit),
        used(used),
        cursor(std::move(cursor)) {}
  std::uint64_t limit;
  std::uint64_t used;
  std::string cursor;
};

/// Witness search ran out of horizon before finding the required defect.
/// The achieved maximum is reported as evidence of rigid-like behavior.
struct WitnessNotFoundError : Error {
  WitnessNotFoundError(long step, double achieved)
      : Error("no defect witness for step " + std::to_string(step) +
              "; max defect achieved " + std::to_string(achieved)),
        step(step),
        achieved(achieved) {}
  long step;
  double achieved;
};

/// Simple consumable work budget. charge() throws once the limit is hit.
class Budget {
 public:
  explicit Budget(std::uint64_t limit = UINT64_MAX) : limit_(limit) {}

  void charge(std::uint64_t units, const std::string& cursor = {}) {
    used_ += units;
    if (used_ > limit_) throw BudgetError(limit_, used_, cursor);
  }

  std::uint64_t used() const { return used_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

}  // namespace topodyn
