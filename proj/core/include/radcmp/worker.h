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

#ifndef RADCMP_WORKER_H_
#define RADCMP_WORKER_H_

// Client side of the newline-delimited JSON protocol spoken by external NER
// workers.
//
//   worker -> engine   {"ready": true, "protocol": 1}          (once)
//   engine -> worker   {"id": "...", "text": "..."}
//   worker -> engine   {"id": "...", "entities": [{"text": "...",
//                        "start": 0, "end": 4, "label": null}]}
//                   or {"id": "...", "error": "..."}
//
// Offsets on the wire count Unicode code points; they are converted to byte
// offsets on receipt. Responses may arrive in any order but must echo a
// pending request id exactly once.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radcmp/extraction.h"

namespace radcmp {

inline constexpr int kNerProtocolVersion = 1;

class LineChannel {
 public:
  virtual ~LineChannel() = default;
  // Writes `line` followed by '\n'. Throws BackendError on failure.
  virtual void WriteLine(std::string_view line) = 0;
  // Next line without its terminator; std::nullopt at end of stream. Throws
  // BackendError when nothing arrives within `timeout`.
  virtual std::optional<std::string> ReadLine(
      std::chrono::milliseconds timeout) = 0;
};

// Launches argv[0] with its stdin/stdout connected to the channel. Stderr is
// inherited.
std::unique_ptr<LineChannel> SpawnProcessChannel(
    const std::vector<std::string>& argv);

std::unique_ptr<LineChannel> ConnectTcpChannel(const std::string& host,
                                               std::uint16_t port);

// Replays a recorded session. Transcript lines starting with "<<< " are
// produced by the worker; lines starting with ">>> " are what the engine is
// expected to send, byte for byte. A mismatching write throws BackendError.
std::unique_ptr<LineChannel> MakeReplayChannel(std::string_view transcript);

// Validates one worker response against the request it answers. Throws
// BackendError ("invalid span", "worker error: ...", ...) on any violation.
EntitySet ParseNerResponse(std::string_view response_line,
                           std::string_view expected_id,
                           std::string_view text);

// Converts a code-point offset to a byte offset; std::nullopt when past the
// end of `text`.
std::optional<std::size_t> CodePointToByteOffset(std::string_view text,
                                                 std::size_t code_points);

// One connection to a worker; one batch in flight at a time.
class NerWorker {
 public:
  // Reads the handshake and refuses any protocol other than 1.
  NerWorker(std::unique_ptr<LineChannel> channel,
            std::chrono::milliseconds timeout);

  EntitySet Extract(std::string_view text);
  // Pipelines all requests, then collects responses in whatever order the
  // worker produces them. Results are in input order.
  std::vector<EntitySet> ExtractBatch(const std::vector<std::string>& texts);

 private:
  std::unique_ptr<LineChannel> channel_;
  std::chrono::milliseconds timeout_;
  std::uint64_t next_id_ = 1;
};

using WorkerFactory = std::function<std::unique_ptr<NerWorker>()>;

// A bounded pool of worker connections shared by concurrent callers. A
// connection that fails mid-request is discarded and reopened on demand.
class ExternalExtractor : public Extractor {
 public:
  ExternalExtractor(WorkerFactory factory, int connections);
  EntitySet Extract(std::string_view text) const override;

 private:
  std::unique_ptr<NerWorker> Acquire() const;

  WorkerFactory factory_;
  int capacity_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable std::vector<std::unique_ptr<NerWorker>> idle_;
  mutable int live_ = 0;
};

}  // namespace radcmp

#endif  // RADCMP_WORKER_H_
