/* Copyright 2026 The gsacert Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef GSACERT_ERRORS_H_
#define GSACERT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace gsacert {

enum class ErrorKind {
  kInput,       // non-finite entries, malformed arguments
  kRange,       // rank or index outside its admissible window
  kFitDomain,   // nonpositive singular value inside a fit range
  kDegenerate,  // zero matrix, empty interval, degenerate pair
  kContainer,   // GSAM magic/version/length problems
  kManifest,    // chain manifest unreadable or inconsistent
  kConfig,      // protocol config unreadable or inconsistent
  kDimension,   // layers not composable
  kIo,          // file cannot be opened or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for each error kind. 0 and 1 are reserved for success and
// usage errors.
int exit_code(ErrorKind kind);
const char* kind_name(ErrorKind kind);

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace gsacert

#endif  // GSACERT_ERRORS_H_
