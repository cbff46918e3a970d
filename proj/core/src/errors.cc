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

#include "gsacert/errors.h"

namespace gsacert {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kContainer: return 2;
    case ErrorKind::kManifest: return 3;
    case ErrorKind::kConfig: return 4;
    case ErrorKind::kDimension: return 5;
    case ErrorKind::kInput: return 6;
    case ErrorKind::kRange: return 7;
    case ErrorKind::kFitDomain: return 8;
    case ErrorKind::kDegenerate: return 9;
    case ErrorKind::kIo: return 10;
  }
  return 1;
}

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput: return "input error";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kFitDomain: return "fit-domain error";
    case ErrorKind::kDegenerate: return "degenerate input";
    case ErrorKind::kContainer: return "container error";
    case ErrorKind::kManifest: return "manifest error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kDimension: return "dimension mismatch";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace gsacert
