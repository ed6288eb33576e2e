// Copyright 2026 The radcmp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RADCMP_ERROR_H_
#define RADCMP_ERROR_H_

#include <stdexcept>
#include <string>

namespace radcmp {

// Bad input from the caller: corpus records, flags, config, lexicon files,
// preconditions. The CLI maps these to exit status 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures of an external backend: LLM transport, unparseable completions,
// NER worker protocol violations and timeouts. Exit status 2.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radcmp

#endif  // RADCMP_ERROR_H_
