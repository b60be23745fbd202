#pragma once

#include <stdexcept>
#include <string>

namespace metaboot {

// Every failure mode gets a stable code so callers (and the CLI) can react
// without parsing message text.
enum class errc {
  invalid_count,
  degenerate_spread,
  boundary_correlation,
  all_zero,
  missing_raw,
  singular_design,
  non_convergence,
  empty_input,
  empty_dataset,
  schema_error,
  row_error,
  degenerate_sample,
  bad_config,
};

const char* errc_name(errc c) noexcept;

class error : public std::runtime_error {
 public:
  error(errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw error(code, std::string(errc_name(code)) + ": " + message);
}

}  // namespace metaboot
