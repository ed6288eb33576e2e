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

#include "radcmp/worker.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "radcmp/error.h"
#include "test_support.h"

namespace radcmp {
namespace {

using namespace std::chrono_literals;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

template <typename F>
std::string BackendErrorOf(F&& f) {
  try {
    f();
  } catch (const BackendError& e) {
    return e.what();
  }
  return "";
}

std::unique_ptr<NerWorker> SpawnFake(std::vector<std::string> extra = {}) {
  std::vector<std::string> argv = {testing::FakeWorkerPath(), "--lexicon",
                                   testing::LexiconPath().string()};
  argv.insert(argv.end(), extra.begin(), extra.end());
  return std::make_unique<NerWorker>(SpawnProcessChannel(argv), 5000ms);
}

TEST(CodePointTest, ConvertsToBytes) {
  const std::string text = "\xC3\x98" "d\xC3\xA8me";  // Ødème
  EXPECT_EQ(CodePointToByteOffset(text, 0), 0u);
  EXPECT_EQ(CodePointToByteOffset(text, 1), 2u);
  EXPECT_EQ(CodePointToByteOffset(text, 3), 5u);
  EXPECT_EQ(CodePointToByteOffset(text, 5), 7u);
  EXPECT_FALSE(CodePointToByteOffset(text, 6));
}

TEST(ParseNerResponseTest, AcceptsValidResponse) {
  const EntitySet s = ParseNerResponse(
      R"({"id":"req-1","entities":[{"text":"pleural effusion","start":6,"end":22,"label":"FINDING"}]})",
      "req-1", "small pleural effusion");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.entities()[0].surface, "pleural effusion");
  EXPECT_EQ(s.entities()[0].span, (Span{6, 22}));
  EXPECT_EQ(s.entities()[0].label, "FINDING");
}

TEST(ParseNerResponseTest, RejectsViolations) {
  const std::string text = "small pleural effusion";
  auto err = [&](std::string_view line) {
    return BackendErrorOf([&] { ParseNerResponse(line, "req-1", text); });
  };
  EXPECT_EQ(err(R"({"id":"req-1","entities":[{"start":6,"end":6}]})"),
            "invalid span (6, 6)");
  EXPECT_EQ(err(R"({"id":"req-1","entities":[{"start":-1,"end":3}]})"),
            "invalid span (-1, 3)");
  EXPECT_EQ(err(R"({"id":"req-1","entities":[{"start":6,"end":40}]})"),
            "invalid span (6, 40): out of bounds");
  EXPECT_EQ(err(R"({"id":"req-1","error":"model failure"})"),
            "worker error: model failure");
  EXPECT_THAT(err(R"({"id":"req-2","entities":[]})"),
              HasSubstr("response id does not match"));
  EXPECT_THAT(err("not json"), HasSubstr("non-JSON"));
  EXPECT_THAT(err(R"({"id":"req-1"})"), HasSubstr("missing entities"));
  EXPECT_THAT(err(R"({"id":"req-1","entities":[{"start":"a","end":3}]})"),
              HasSubstr("offsets not integers"));
  EXPECT_THAT(err(R"({"id":"req-1","entities":[{"start":5,"end":6}]})"),
              HasSubstr("degenerate entity"));
}

TEST(ReplayTest, GoldenTranscriptReplays) {
  NerWorker worker(
      MakeReplayChannel(
          testing::ReadFile(testing::FixturePath("pleural_effusion.transcript"))),
      1000ms);
  const EntitySet a = worker.Extract("small pleural effusion");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a.entities()[0].normalized, "pleural effusion");
  EXPECT_EQ(a.entities()[0].span, (Span{6, 22}));
  const std::string text = "\xC3\x98" "d\xC3\xA8me: no effusion";
  const EntitySet b = worker.Extract(text);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b.entities()[0].span, (Span{12, 20}));
  EXPECT_EQ(b.entities()[0].surface, "effusion");
  EXPECT_FALSE(b.entities()[0].label);
}

TEST(ReplayTest, MismatchedRequestFails) {
  NerWorker worker(
      MakeReplayChannel(
          testing::ReadFile(testing::FixturePath("pleural_effusion.transcript"))),
      1000ms);
  EXPECT_THAT(BackendErrorOf([&] { worker.Extract("something else"); }),
              HasSubstr("request mismatch"));
}

TEST(ReplayTest, HandshakeChecks) {
  EXPECT_THAT(BackendErrorOf([] {
                NerWorker(MakeReplayChannel("<<< {\"ready\":true,\"protocol\":2}"),
                          100ms);
              }),
              HasSubstr("unsupported NER protocol 2"));
  EXPECT_THAT(BackendErrorOf([] {
                NerWorker(MakeReplayChannel("<<< {\"ready\":false}"), 100ms);
              }),
              HasSubstr("bad handshake"));
  EXPECT_THAT(BackendErrorOf([] { NerWorker(MakeReplayChannel(""), 100ms); }),
              HasSubstr("closed before handshake"));
  EXPECT_THROW(MakeReplayChannel("garbage"), InputError);
}

TEST(ProcessWorkerTest, ExtractsThroughSubprocess) {
  auto worker = SpawnFake();
  const EntitySet s = worker->Extract("Small pleural effusion. No atelectasis.");
  EXPECT_THAT(s.distinct(), ElementsAre("atelectasis", "pleural effusion"));
  EXPECT_EQ(s.entities()[0].label, "FINDING");
}

TEST(ProcessWorkerTest, MultibyteOffsetsRoundTrip) {
  auto worker = SpawnFake();
  const std::string text = "\xC3\x98" "d\xC3\xA8me: no effusion";
  const EntitySet s = worker->Extract(text);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.entities()[0].span, (Span{12, 20}));
}

TEST(ProcessWorkerTest, OutOfOrderBatch) {
  auto worker = SpawnFake({"--hold", "3"});
  const auto out = worker->ExtractBatch(
      {"pleural effusion", "atelectasis", "no acute infarct"});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_THAT(out[0].distinct(), ElementsAre("pleural effusion"));
  EXPECT_THAT(out[1].distinct(), ElementsAre("atelectasis"));
  EXPECT_THAT(out[2].distinct(), ElementsAre("infarct"));
}

TEST(ProcessWorkerTest, Misbehaviour) {
  EXPECT_THAT(BackendErrorOf([] { SpawnFake({"--protocol", "2"}); }),
              HasSubstr("unsupported NER protocol"));
  EXPECT_THAT(BackendErrorOf([] { SpawnFake({"--bad-span"})->Extract("effusion"); }),
              HasSubstr("invalid span"));
  EXPECT_THAT(BackendErrorOf([] { SpawnFake({"--error"})->Extract("effusion"); }),
              HasSubstr("worker error: model failure"));
  EXPECT_THAT(BackendErrorOf([] { SpawnFake({"--wrong-id"})->Extract("effusion"); }),
              HasSubstr("unexpected response id"));
  EXPECT_THAT(BackendErrorOf([] { SpawnFake({"--garbage"})->Extract("effusion"); }),
              HasSubstr("non-JSON"));
  EXPECT_THAT(
      BackendErrorOf([] { SpawnFake({"--exit-after", "0"})->Extract("effusion"); }),
      HasSubstr("closed"));
}

TEST(ProcessWorkerTest, SilentWorkerTimesOut) {
  std::vector<std::string> argv = {testing::FakeWorkerPath(), "--lexicon",
                                   testing::LexiconPath().string(), "--silent"};
  NerWorker worker(SpawnProcessChannel(argv), 200ms);
  const auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(worker.Extract("effusion"), BackendError);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 3s);
}

TEST(ProcessWorkerTest, MissingExecutable) {
  EXPECT_THROW(
      NerWorker(SpawnProcessChannel({"/nonexistent/ner-worker"}), 1000ms),
      BackendError);
}

TEST(ExternalExtractorTest, PoolServesConcurrentCallers) {
  std::atomic<int> spawned{0};
  ExternalExtractor ex(
      [&] {
        ++spawned;
        return SpawnFake();
      },
      3);
  EXPECT_EQ(spawned.load(), 1);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 5; ++i) {
        if (ex.Extract("Large pleural effusion.").distinct().count(
                "pleural effusion")) {
          ++ok;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 30);
  EXPECT_LE(spawned.load(), 3);
}

TEST(ExternalExtractorTest, FailedConnectionIsReplaced) {
  std::atomic<int> spawned{0};
  ExternalExtractor ex(
      [&] {
        // The first worker dies after one request; later ones are healthy.
        return ++spawned == 1 ? SpawnFake({"--exit-after", "1"}) : SpawnFake();
      },
      1);
  EXPECT_EQ(ex.Extract("effusion").size(), 1u);
  EXPECT_THROW(ex.Extract("effusion"), BackendError);
  EXPECT_EQ(ex.Extract("effusion").size(), 1u);
  EXPECT_EQ(spawned.load(), 2);
}

TEST(ExternalExtractorTest, HandshakeFailureSurfacesAtConstruction) {
  EXPECT_THROW(ExternalExtractor([] { return SpawnFake({"--protocol", "9"}); }, 2),
               BackendError);
  EXPECT_THROW(ExternalExtractor([] { return SpawnFake(); }, 0), InputError);
}

// Minimal one-connection worker on a loopback port.
class LoopbackWorker {
 public:
  LoopbackWorker() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    ::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
    ::listen(listen_fd_, 1);
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { Serve(); });
  }
  ~LoopbackWorker() {
    thread_.join();
    ::close(listen_fd_);
  }
  std::uint16_t port() const { return port_; }

 private:
  void Serve() {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) return;
    Send(fd, R"({"ready":true,"protocol":1})");
    std::string buffer;
    char chunk[256];
    while (true) {
      const ssize_t n = ::read(fd, chunk, sizeof(chunk));
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t nl;
      while ((nl = buffer.find('\n')) != std::string::npos) {
        const std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        const auto id_pos = line.find("req-");
        const std::string id = line.substr(id_pos, line.find('"', id_pos) - id_pos);
        Send(fd, R"({"id":")" + id +
                     R"(","entities":[{"text":"effusion","start":0,"end":8,"label":null}]})");
      }
    }
    ::close(fd);
  }
  static void Send(int fd, const std::string& line) {
    const std::string out = line + "\n";
    ASSERT_EQ(::write(fd, out.data(), out.size()),
              static_cast<ssize_t>(out.size()));
  }

  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread thread_;
};

TEST(TcpWorkerTest, ExtractsOverLoopback) {
  LoopbackWorker server;
  {
    NerWorker worker(ConnectTcpChannel("127.0.0.1", server.port()), 2000ms);
    const EntitySet s = worker.Extract("effusion, small");
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.entities()[0].normalized, "effusion");
    EXPECT_EQ(worker.ExtractBatch({"effusion", "effusion"}).size(), 2u);
  }
}

TEST(TcpWorkerTest, RefusedConnection) {
  // Bind and close to obtain a port nobody listens on.
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  EXPECT_THROW(ConnectTcpChannel("127.0.0.1", ntohs(addr.sin_port)),
               BackendError);
}

}  // namespace
}  // namespace radcmp
