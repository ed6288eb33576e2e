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

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <deque>
#include <map>
#include <thread>

#include "json.hpp"
#include "radcmp/error.h"

namespace radcmp {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string ErrnoText(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

// Buffered line reader over a file descriptor.
class FdChannel : public LineChannel {
 public:
  std::optional<std::string> ReadLine(
      std::chrono::milliseconds timeout) override {
    const auto deadline = Clock::now() + timeout;
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (eof_) {
        if (buffer_.empty()) return std::nullopt;
        std::string line = std::move(buffer_);
        buffer_.clear();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - Clock::now());
      if (left.count() <= 0) throw BackendError("NER worker timeout");
      pollfd pfd{read_fd(), POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw BackendError(ErrnoText("poll"));
      }
      if (rc == 0) throw BackendError("NER worker timeout");
      char chunk[4096];
      const ssize_t n = ::read(read_fd(), chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw BackendError(ErrnoText("read"));
      }
      if (n == 0) {
        eof_ = true;
      } else {
        buffer_.append(chunk, static_cast<std::size_t>(n));
      }
    }
  }

 protected:
  virtual int read_fd() const = 0;

 private:
  std::string buffer_;
  bool eof_ = false;
};

// Writes to a pipe with SIGPIPE blocked for this thread, so a dead worker
// surfaces as EPIPE instead of terminating the process.
void WriteAllToPipe(int fd, std::string_view data) {
  sigset_t block;
  sigset_t old;
  sigemptyset(&block);
  sigaddset(&block, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &block, &old);
  bool failed = false;
  int saved = 0;
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      failed = true;
      saved = errno;
      break;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  if (failed && saved == EPIPE) {
    timespec zero{0, 0};
    sigtimedwait(&block, nullptr, &zero);
  }
  pthread_sigmask(SIG_SETMASK, &old, nullptr);
  if (failed) {
    errno = saved;
    throw BackendError(ErrnoText("write to NER worker"));
  }
}

class ProcessChannel : public FdChannel {
 public:
  explicit ProcessChannel(const std::vector<std::string>& argv) {
    if (argv.empty()) throw InputError("empty worker command");
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw BackendError(ErrnoText("pipe"));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw BackendError(ErrnoText("pipe"));
    }
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_ = ::fork();
    if (pid_ < 0) throw BackendError(ErrnoText("fork"));
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execvp(args[0], args.data());
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  ~ProcessChannel() override {
    if (write_fd_ >= 0) ::close(write_fd_);
    // Closing stdin asks the worker to exit; give it a moment, then kill.
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    if (read_fd_ >= 0) ::close(read_fd_);
  }

  void WriteLine(std::string_view line) override {
    std::string data(line);
    data += '\n';
    WriteAllToPipe(write_fd_, data);
  }

 protected:
  int read_fd() const override { return read_fd_; }

 private:
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
};

class TcpChannel : public FdChannel {
 public:
  TcpChannel(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res);
        rc != 0) {
      throw BackendError("resolve " + host + ": " + ::gai_strerror(rc));
    }
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
      int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC,
                        ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) {
      throw BackendError("cannot connect to NER worker at " + host + ":" +
                         service);
    }
  }

  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void WriteLine(std::string_view line) override {
    std::string data(line);
    data += '\n';
    std::string_view rest = data;
    while (!rest.empty()) {
      const ssize_t n = ::send(fd_, rest.data(), rest.size(), MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw BackendError(ErrnoText("send to NER worker"));
      }
      rest.remove_prefix(static_cast<std::size_t>(n));
    }
  }

 protected:
  int read_fd() const override { return fd_; }

 private:
  int fd_ = -1;
};

class ReplayChannel : public LineChannel {
 public:
  explicit ReplayChannel(std::string_view transcript) {
    std::size_t pos = 0;
    while (pos < transcript.size()) {
      std::size_t nl = transcript.find('\n', pos);
      if (nl == std::string_view::npos) nl = transcript.size();
      std::string_view line = transcript.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.empty()) continue;
      if (line.starts_with(">>> ")) {
        steps_.push_back({true, std::string(line.substr(4))});
      } else if (line.starts_with("<<< ")) {
        steps_.push_back({false, std::string(line.substr(4))});
      } else if (!line.starts_with("#")) {
        throw InputError("bad transcript line: " + std::string(line));
      }
    }
  }

  void WriteLine(std::string_view line) override {
    if (steps_.empty() || !steps_.front().outgoing) {
      throw BackendError("replay: unexpected request " + std::string(line));
    }
    if (steps_.front().payload != line) {
      throw BackendError("replay: request mismatch: expected " +
                         steps_.front().payload + ", got " + std::string(line));
    }
    steps_.pop_front();
  }

  std::optional<std::string> ReadLine(std::chrono::milliseconds) override {
    if (steps_.empty()) return std::nullopt;
    if (steps_.front().outgoing) {
      throw BackendError("replay: engine read while a request was expected: " +
                         steps_.front().payload);
    }
    std::string line = std::move(steps_.front().payload);
    steps_.pop_front();
    return line;
  }

 private:
  struct Step {
    bool outgoing;
    std::string payload;
  };
  std::deque<Step> steps_;
};

json ParseJsonLine(std::string_view line) {
  try {
    return json::parse(line);
  } catch (const json::parse_error&) {
    throw BackendError("protocol violation: worker sent non-JSON line");
  }
}

}  // namespace

std::unique_ptr<LineChannel> SpawnProcessChannel(
    const std::vector<std::string>& argv) {
  return std::make_unique<ProcessChannel>(argv);
}

std::unique_ptr<LineChannel> ConnectTcpChannel(const std::string& host,
                                               std::uint16_t port) {
  return std::make_unique<TcpChannel>(host, port);
}

std::unique_ptr<LineChannel> MakeReplayChannel(std::string_view transcript) {
  return std::make_unique<ReplayChannel>(transcript);
}

std::optional<std::size_t> CodePointToByteOffset(std::string_view text,
                                                 std::size_t code_points) {
  std::size_t i = 0;
  for (std::size_t n = 0; n < code_points; ++n) {
    if (i >= text.size()) return std::nullopt;
    ++i;
    while (i < text.size() &&
           (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) {
      ++i;
    }
  }
  return i;
}

EntitySet ParseNerResponse(std::string_view response_line,
                           std::string_view expected_id,
                           std::string_view text) {
  const json r = ParseJsonLine(response_line);
  if (!r.is_object()) {
    throw BackendError("protocol violation: response is not an object");
  }
  auto id = r.find("id");
  if (id == r.end() || !id->is_string() || *id != expected_id) {
    throw BackendError("protocol violation: response id does not match " +
                       std::string(expected_id));
  }
  if (auto err = r.find("error"); err != r.end()) {
    throw BackendError("worker error: " +
                       (err->is_string() ? err->get<std::string>()
                                         : err->dump()));
  }
  auto list = r.find("entities");
  if (list == r.end() || !list->is_array()) {
    throw BackendError("protocol violation: missing entities array");
  }
  std::vector<Entity> entities;
  for (const auto& e : *list) {
    if (!e.is_object()) {
      throw BackendError("protocol violation: entity is not an object");
    }
    auto s = e.find("start");
    auto en = e.find("end");
    if (s == e.end() || en == e.end() || !s->is_number_integer() ||
        !en->is_number_integer()) {
      throw BackendError("protocol violation: entity offsets not integers");
    }
    const auto start = s->get<std::int64_t>();
    const auto end = en->get<std::int64_t>();
    if (start < 0 || end <= start) {
      throw BackendError("invalid span (" + std::to_string(start) + ", " +
                         std::to_string(end) + ")");
    }
    auto bs = CodePointToByteOffset(text, static_cast<std::size_t>(start));
    auto be = CodePointToByteOffset(text, static_cast<std::size_t>(end));
    if (!bs || !be) {
      throw BackendError("invalid span (" + std::to_string(start) + ", " +
                         std::to_string(end) + "): out of bounds");
    }
    std::optional<std::string> label;
    if (auto l = e.find("label"); l != e.end() && l->is_string()) {
      label = l->get<std::string>();
    }
    std::string surface(text.substr(*bs, *be - *bs));
    std::string normalized;
    try {
      normalized = NormalizeEntity(surface);
    } catch (const InputError&) {
      throw BackendError("protocol violation: degenerate entity \"" +
                         surface + "\"");
    }
    entities.push_back(
        {std::move(surface), std::move(normalized), {*bs, *be}, label});
  }
  return EntitySet(std::move(entities));
}

NerWorker::NerWorker(std::unique_ptr<LineChannel> channel,
                     std::chrono::milliseconds timeout)
    : channel_(std::move(channel)), timeout_(timeout) {
  auto line = channel_->ReadLine(timeout_);
  if (!line) throw BackendError("NER worker closed before handshake");
  const json h = ParseJsonLine(*line);
  if (!h.is_object() || h.value("ready", false) != true) {
    throw BackendError("protocol violation: bad handshake " + *line);
  }
  auto p = h.find("protocol");
  if (p == h.end() || !p->is_number_integer() ||
      p->get<int>() != kNerProtocolVersion) {
    throw BackendError("unsupported NER protocol " +
                       (p == h.end() ? std::string("<missing>") : p->dump()));
  }
}

EntitySet NerWorker::Extract(std::string_view text) {
  return std::move(ExtractBatch({std::string(text)}).front());
}

std::vector<EntitySet> NerWorker::ExtractBatch(
    const std::vector<std::string>& texts) {
  std::map<std::string, std::size_t> pending;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const std::string id = "req-" + std::to_string(next_id_++);
    json req = json::object();
    req["id"] = id;
    req["text"] = texts[i];
    channel_->WriteLine(req.dump());
    pending.emplace(id, i);
  }
  std::vector<EntitySet> out(texts.size());
  while (!pending.empty()) {
    auto line = channel_->ReadLine(timeout_);
    if (!line) throw BackendError("NER worker closed the connection");
    const json r = ParseJsonLine(*line);
    std::string id;
    if (r.is_object()) {
      if (auto it = r.find("id"); it != r.end() && it->is_string()) {
        id = it->get<std::string>();
      }
    }
    auto it = pending.find(id);
    if (it == pending.end()) {
      throw BackendError("protocol violation: unexpected response id \"" + id +
                         "\"");
    }
    out[it->second] = ParseNerResponse(*line, id, texts[it->second]);
    pending.erase(it);
  }
  return out;
}

ExternalExtractor::ExternalExtractor(WorkerFactory factory, int connections)
    : factory_(std::move(factory)), capacity_(connections) {
  if (connections < 1) throw InputError("worker pool needs >= 1 connection");
  // Open one connection eagerly so handshake failures surface at startup.
  idle_.push_back(factory_());
  live_ = 1;
}

std::unique_ptr<NerWorker> ExternalExtractor::Acquire() const {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return !idle_.empty() || live_ < capacity_; });
  if (!idle_.empty()) {
    auto worker = std::move(idle_.back());
    idle_.pop_back();
    return worker;
  }
  ++live_;
  lock.unlock();
  try {
    return factory_();
  } catch (...) {
    lock.lock();
    --live_;
    cv_.notify_one();
    throw;
  }
}

EntitySet ExternalExtractor::Extract(std::string_view text) const {
  std::unique_ptr<NerWorker> worker = Acquire();
  try {
    EntitySet result = worker->Extract(text);
    std::lock_guard lock(mu_);
    idle_.push_back(std::move(worker));
    cv_.notify_one();
    return result;
  } catch (...) {
    worker.reset();
    std::lock_guard lock(mu_);
    --live_;
    cv_.notify_one();
    throw;
  }
}

}  // namespace radcmp
