// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// File helpers. All writers are atomic: content goes to a temp file in the
// same directory which is then renamed over the target, so partially written
// outputs never exist under their final name.

#pragma once

#include <string>

namespace ttrec::io {

std::string read_text_file(const std::string& path);

void atomic_write_text_file(const std::string& path, const std::string& content);

bool file_exists(const std::string& path);

void ensure_directory(const std::string& path);

// Full-precision decimal rendering of a double ("%.17g"): parsing it back
// yields the identical bit pattern. Used by every CSV/text writer.
std::string format_double(double v);

}  // namespace ttrec::io
