#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rap {

/// Base class of everything this library throws.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An argument violates the operation's parameter domain.
struct parameter_error : error {
  using error::error;
};

/// An operation that needs at least one element got none.
struct empty_input_error : error {
  using error::error;
};

/// Degenerate geometry: zero-length segment, undefined palm plane, ...
struct geometry_error : error {
  using error::error;
};

/// Frames arrived out of order or with holes where a gap is not allowed.
struct sequencing_error : error {
  using error::error;
};

/// Two time-stamped streams do not overlap.
struct sync_error : error {
  using error::error;
};

/// Operation on a model or stream that is not in a usable state.
struct state_error : error {
  using error::error;
};

/// Malformed text record. `line` is 1-based.
struct parse_error : error {
  parse_error(const std::string& msg, std::size_t line_no)
      : error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  std::size_t line;
};

/// File could not be opened / read / written.
struct io_error : error {
  using error::error;
};

// Binary container / codec failures. Kept distinct so callers can tell a
// stale file from a damaged one.
struct bad_magic_error : error {
  using error::error;
};
struct version_error : error {
  using error::error;
};
struct truncation_error : error {
  using error::error;
};
struct integrity_error : error {
  using error::error;
};
struct framing_error : error {
  using error::error;
};

}  // namespace rap
