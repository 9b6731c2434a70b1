#ifndef CLASSFORGE_ERRORS_HPP
#define CLASSFORGE_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace classforge {

// Rejected argument: domain violation, malformed request, unusable value.
// `code` is a stable machine-readable slug, `what()` a human sentence.
class invalid_input : public std::invalid_argument {
 public:
  invalid_input(std::string code, const std::string& msg)
      : std::invalid_argument(msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// A computation ran into its work budget.  The request was well formed,
// the answer is simply not reachable within the configured effort.
class limit_exceeded : public std::runtime_error {
 public:
  limit_exceeded(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Process-wide default budget, in abstract work units (roughly inner-loop
// iterations).  The CLI maps --budget onto this.
std::uint64_t work_budget() noexcept;
void set_work_budget(std::uint64_t units) noexcept;

// Per-call meter.  Cheap enough to charge in batches inside hot loops.
class WorkMeter {
 public:
  WorkMeter() : limit_(work_budget()) {}
  explicit WorkMeter(std::uint64_t limit) : limit_(limit) {}

  void charge(std::uint64_t units, const char* where) {
    used_ += units;
    if (used_ > limit_)
      throw limit_exceeded("work-budget",
                           std::string(where) + ": work budget exhausted");
  }
  std::uint64_t used() const noexcept { return used_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t used_ = 0;
  std::uint64_t limit_;
};

}  // namespace classforge

#endif
