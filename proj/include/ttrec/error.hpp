// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Typed errors: every failure carries a machine-parseable code plus human text.

#pragma once

#include <stdexcept>
#include <string>

namespace ttrec {

enum class Errc {
  config_parse,       // malformed config / document syntax
  config_invalid,     // well-formed but violates an invariant
  invalid_argument,   // bad value passed to an operation
  dimension_mismatch, // incompatible shapes or id universes
  singular,           // degenerate constants (e.g. W*B == 1)
  io,                 // file system failure
  training_failure,   // optimizer produced non-finite state
  internal,           // should-not-happen
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::config_parse: return "E_CONFIG_PARSE";
    case Errc::config_invalid: return "E_CONFIG_INVALID";
    case Errc::invalid_argument: return "E_INVALID_ARGUMENT";
    case Errc::dimension_mismatch: return "E_DIMENSION_MISMATCH";
    case Errc::singular: return "E_SINGULAR";
    case Errc::io: return "E_IO";
    case Errc::training_failure: return "E_TRAINING_FAILURE";
    case Errc::internal: return "E_INTERNAL";
  }
  return "E_INTERNAL";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

inline void require(bool ok, Errc c, const std::string& msg) {
  if (!ok) fail(c, msg);
}

}  // namespace ttrec
