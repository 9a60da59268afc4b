// Copyright 2026 The Pseudokit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pseudokit/detect.h"
#include "pseudokit/error.h"
#include "pseudokit/text.h"

extern char** environ;

namespace pseudokit {

// One child process speaking the line protocol over a socketpair. Sockets
// rather than pipes so writes can use MSG_NOSIGNAL instead of touching the
// process-wide SIGPIPE disposition.
class ExternalDetector::Worker {
 public:
  Worker(const std::string& command, int timeout_ms)
      : command_(command), timeout_ms_(timeout_ms) {
    char tmpl[] = "/tmp/pseudokit-ner-stderr-XXXXXX";
    int err_fd = mkostemp(tmpl, O_CLOEXEC);
    if (err_fd < 0) throw DetectorError("mkstemp failed: " + errno_text());
    stderr_path_ = tmpl;

    int fds[2];
    if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
      close(err_fd);
      throw DetectorError("socketpair failed: " + errno_text());
    }
    fd_ = fds[0];

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err_fd, STDERR_FILENO);
    const char* argv[] = {"/bin/sh", "-c", command_.c_str(), nullptr};
    int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr,
                         const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(fds[1]);
    close(err_fd);
    if (rc != 0) {
      pid_ = -1;
      close(fd_);
      unlink(stderr_path_.c_str());
      throw DetectorError("cannot launch '" + command_ +
                          "': " + std::strerror(rc));
    }
  }

  // Reads the {"proto": 1} line the child prints at startup.
  void handshake() {
    std::string line = read_line();
    nlohmann::json hello;
    try {
      hello = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      fail("bad handshake line: " + line);
    }
    if (!hello.is_object() || !hello.contains("proto") ||
        hello["proto"] != 1) {
      fail("unsupported handshake: " + line);
    }
  }

  ~Worker() {
    if (fd_ >= 0) {
      shutdown(fd_, SHUT_WR);
      close(fd_);
    }
    if (pid_ > 0) {
      int status = 0;
      // Give the child a moment to exit on EOF before forcing it.
      for (int i = 0; i < 200; ++i) {
        if (waitpid(pid_, &status, WNOHANG) == pid_) {
          pid_ = -1;
          break;
        }
        usleep(5000);
      }
      if (pid_ > 0) {
        kill(pid_, SIGKILL);
        waitpid(pid_, &status, 0);
      }
    }
    if (!stderr_path_.empty()) unlink(stderr_path_.c_str());
  }

  bool healthy() const { return healthy_; }

  std::vector<EntitySpan> detect(const Document& doc) {
    nlohmann::ordered_json request;
    request["id"] = doc.id;
    request["text"] = doc.text;
    write_line(request.dump());
    std::string line = read_line();

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      fail("response is not JSON: " + line);
    }
    if (!reply.is_object() || !reply.contains("id") ||
        !reply.contains("entities") || !reply["entities"].is_array()) {
      fail("response missing id/entities: " + line);
    }
    if (reply["id"] != doc.id) {
      fail("response id " + reply["id"].dump() + " does not match '" +
           doc.id + "'");
    }
    std::u32string text = utf8_decode(doc.text);
    std::vector<EntitySpan> spans;
    for (const auto& e : reply["entities"]) {
      if (!e.is_object() || !e.contains("start") || !e.contains("end") ||
          !e.contains("category") || !e["start"].is_number_integer() ||
          !e["end"].is_number_integer() || !e["category"].is_string()) {
        fail("malformed entity " + e.dump());
      }
      auto start = e["start"].get<std::int64_t>();
      auto end = e["end"].get<std::int64_t>();
      auto category = parse_category(e["category"].get<std::string>());
      if (!category || start < 0 || end <= start ||
          static_cast<std::size_t>(end) > text.size()) {
        fail("invalid entity " + e.dump());
      }
      spans.push_back(EntitySpan{
          static_cast<std::size_t>(start), static_cast<std::size_t>(end),
          *category,
          utf8_encode(std::u32string_view(text).substr(start, end - start))});
    }
    return resolve_overlaps(std::move(spans));
  }

 private:
  static std::string errno_text() { return std::strerror(errno); }

  [[noreturn]] void fail(const std::string& what) {
    healthy_ = false;
    std::string diag = "command: " + command_;
    if (pid_ > 0) {
      int status = 0;
      pid_t r = waitpid(pid_, &status, WNOHANG);
      if (r == pid_) {
        pid_ = -1;
        if (WIFEXITED(status)) {
          diag += "\nexit status: " + std::to_string(WEXITSTATUS(status));
        } else if (WIFSIGNALED(status)) {
          diag += "\nkilled by signal " + std::to_string(WTERMSIG(status));
        }
      }
    }
    std::ifstream err(stderr_path_);
    std::stringstream buf;
    buf << err.rdbuf();
    if (!buf.str().empty()) diag += "\nstderr:\n" + buf.str();
    throw DetectorError("external detector: " + what, diag);
  }

  void write_line(const std::string& payload) {
    std::string data = payload + "\n";
    std::size_t sent = 0;
    while (sent < data.size()) {
      ssize_t n = send(fd_, data.data() + sent, data.size() - sent,
                       MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail("write failed: " + errno_text());
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    while (true) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      pollfd pfd{fd_, POLLIN, 0};
      int ready = poll(&pfd, 1, timeout_ms_);
      if (ready == 0) fail("timed out waiting for response");
      if (ready < 0) {
        if (errno == EINTR) continue;
        fail("poll failed: " + errno_text());
      }
      char chunk[4096];
      ssize_t n = recv(fd_, chunk, sizeof(chunk), 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail("read failed: " + errno_text());
      }
      if (n == 0) {
        // Reap so the diagnostics carry the exit status.
        if (pid_ > 0) {
          int status = 0;
          if (waitpid(pid_, &status, 0) == pid_) {
            pid_ = -1;
            std::string why =
                WIFEXITED(status)
                    ? "exit status " + std::to_string(WEXITSTATUS(status))
                    : "signal " + std::to_string(WTERMSIG(status));
            healthy_ = false;
            std::ifstream err(stderr_path_);
            std::stringstream buf;
            buf << err.rdbuf();
            throw DetectorError(
                "external detector: process ended unexpectedly (" + why + ")",
                "command: " + command_ +
                    (buf.str().empty() ? "" : "\nstderr:\n" + buf.str()));
          }
        }
        fail("process closed its output");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  std::string command_;
  int timeout_ms_;
  pid_t pid_ = -1;
  int fd_ = -1;
  std::string stderr_path_;
  std::string buffer_;
  bool healthy_ = true;
};

ExternalDetector::ExternalDetector(std::string command,
                                   ExternalDetectorOptions options)
    : command_(std::move(command)), options_(options) {
  if (command_.empty()) throw UsageError("external detector needs a command");
  if (options_.pool_size == 0) options_.pool_size = 1;
  // Launch one worker eagerly so a bad command fails at construction.
  auto first = std::make_unique<Worker>(command_, options_.timeout_ms);
  first->handshake();
  idle_.push_back(std::move(first));
  live_ = 1;
}

ExternalDetector::~ExternalDetector() = default;

std::unique_ptr<ExternalDetector::Worker> ExternalDetector::acquire() const {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] {
    return !idle_.empty() || live_ < options_.pool_size;
  });
  if (!idle_.empty()) {
    auto w = std::move(idle_.back());
    idle_.pop_back();
    return w;
  }
  ++live_;
  lock.unlock();
  try {
    auto w = std::make_unique<Worker>(command_, options_.timeout_ms);
    w->handshake();
    return w;
  } catch (...) {
    std::lock_guard relock(mu_);
    --live_;
    cv_.notify_one();
    throw;
  }
}

void ExternalDetector::release(std::unique_ptr<Worker> worker) const {
  {
    std::lock_guard lock(mu_);
    if (worker && worker->healthy()) {
      idle_.push_back(std::move(worker));
    } else {
      --live_;
    }
    cv_.notify_one();
  }
  // A broken worker is torn down outside the lock.
  worker.reset();
}

std::vector<EntitySpan> ExternalDetector::detect(const Document& doc) const {
  if (doc.text.empty()) {
    throw DetectorError("external detector: document '" + doc.id +
                        "' has empty text");
  }
  auto worker = acquire();
  try {
    auto spans = worker->detect(doc);
    release(std::move(worker));
    return spans;
  } catch (...) {
    release(std::move(worker));
    throw;
  }
}

}  // namespace pseudokit
