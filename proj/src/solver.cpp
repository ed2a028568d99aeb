/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>

extern char** environ;

namespace iml {

std::string default_solver_command() {
  if (const char* s = std::getenv("MINI_IMANDRA_SOLVER"); s && *s) return s;
  return "z3 -in";
}

SolverSession::SolverSession(SolverConfig config) : config_(std::move(config)) {
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
    throw SolverStartError(std::string("cannot create pipes: ") + std::strerror(errno));

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
  int devnull = ::open("/dev/null", O_WRONLY);
  if (devnull >= 0) posix_spawn_file_actions_adddup2(&actions, devnull, STDERR_FILENO);

  std::string shell_cmd = "exec " + config_.command;
  const char* argv[] = {"/bin/sh", "-c", shell_cmd.c_str(), nullptr};
  pid_t pid = -1;
  int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (devnull >= 0) ::close(devnull);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw SolverStartError("cannot start solver `" + config_.command + "`: " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  try {
    command("(set-option :print-success true)");
  } catch (const Error& e) {
    kill_child();
    throw SolverStartError("solver `" + config_.command + "` did not answer: " + e.what());
  }
  command("(set-option :produce-models true)");
  command("(set-option :produce-unsat-assumptions true)");
  if (config_.timeout_ms > 0) {
    // Solver-specific; a solver that rejects the option still gets the wall-clock guard.
    SExpr r = query("(set-option :timeout " + std::to_string(config_.timeout_ms) + ")");
    (void)r;
  }
  // Smaller cores mean fewer needless expansions; optional for other solvers.
  (void)query("(set-option :smt.core.minimize true)");
  command("(set-logic ALL)");
}

SolverSession::~SolverSession() {
  if (pid_ > 0) {
    std::string bye = "(exit)\n";
    [[maybe_unused]] auto n = ::write(to_child_, bye.data(), bye.size());
    ::close(to_child_);
    ::close(from_child_);
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      ::usleep(2000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void SolverSession::kill_child() {
  if (pid_ <= 0) return;
  ::close(to_child_);
  ::close(from_child_);
  ::kill(pid_, SIGKILL);
  int status = 0;
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
}

void SolverSession::write(const std::string& text) {
  if (pid_ <= 0) throw SolverError("solver session is closed");
  script_ += text;
  script_ += '\n';
  std::string line = text + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t n = ::write(to_child_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      kill_child();
      throw SolverError(std::string("solver pipe closed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

SExpr SolverSession::read_reply() {
  using clock = std::chrono::steady_clock;
  const bool limited = config_.timeout_ms > 0;
  const auto deadline = clock::now() + std::chrono::milliseconds(config_.timeout_ms * 2 + 2000);
  for (;;) {
    if (std::size_t n = complete_sexpr_length(buffer_)) {
      std::string text = buffer_.substr(0, n);
      buffer_.erase(0, n);
      return parse_sexpr(text);
    }
    int wait_ms = -1;
    if (limited) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
      if (left <= 0) {
        kill_child();
        throw SolverError("solver timed out");
      }
      wait_ms = static_cast<int>(left);
    }
    pollfd p{from_child_, POLLIN, 0};
    int rc = ::poll(&p, 1, wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      kill_child();
      throw SolverError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      kill_child();
      throw SolverError("solver exited unexpectedly");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

SExpr SolverSession::query(const std::string& cmd) {
  write(cmd);
  return read_reply();
}

void SolverSession::command(const std::string& cmd) {
  SExpr r = query(cmd);
  if (r.is_atom("success")) return;
  if (r.head() == "error") {
    std::string msg = r.list.size() > 1 ? r.list[1].atom : to_string(r);
    throw SolverError("solver rejected `" + cmd + "`: " + msg);
  }
  throw SolverError("unexpected solver reply to `" + cmd + "`: " + to_string(r));
}

SolverVerdict SolverSession::check_sat_assuming(const std::vector<std::string>& assumptions) {
  std::string cmd = "(check-sat-assuming (";
  for (std::size_t i = 0; i < assumptions.size(); ++i) cmd += (i ? " " : "") + assumptions[i];
  cmd += "))";
  SExpr r = query(cmd);
  SolverVerdict v;
  if (r.is_atom("sat")) {
    v.kind = SolverVerdict::Kind::Sat;
  } else if (r.is_atom("unsat")) {
    v.kind = SolverVerdict::Kind::Unsat;
    SExpr core = query("(get-unsat-assumptions)");
    if (!core.is_list) throw SolverError("malformed unsat assumptions: " + to_string(core));
    for (const auto& a : core.list) v.core.push_back(to_string(a));
  } else if (r.is_atom("unknown")) {
    v.kind = SolverVerdict::Kind::Unknown;
    SExpr why = query("(get-info :reason-unknown)");
    v.reason = why.is_list && why.list.size() > 1 ? to_string(why.list[1]) : to_string(why);
    if (!v.reason.empty() && v.reason.front() == '"') v.reason = v.reason.substr(1, v.reason.size() - 2);
  } else {
    throw SolverError("unexpected reply to check-sat-assuming: " + to_string(r));
  }
  return v;
}

std::map<std::string, SExpr> SolverSession::get_model() {
  SExpr r = query("(get-model)");
  if (r.head() == "error") throw SolverError("get-model failed: " + to_string(r));
  std::map<std::string, SExpr> out;
  std::size_t start = r.head() == "model" ? 1 : 0;
  for (std::size_t i = start; i < r.list.size(); ++i) {
    const auto& d = r.list[i];
    // (define-fun name () Sort value)
    if (d.head() != "define-fun" || d.list.size() != 5) continue;
    if (!d.list[2].is_list || !d.list[2].list.empty()) continue;
    out[d.list[1].atom] = d.list[4];
  }
  return out;
}

std::vector<SExpr> SolverSession::get_value(const std::vector<std::string>& terms) {
  if (terms.empty()) return {};
  std::string cmd = "(get-value (";
  for (std::size_t i = 0; i < terms.size(); ++i) cmd += (i ? " " : "") + terms[i];
  cmd += "))";
  SExpr r = query(cmd);
  if (!r.is_list || r.head() == "error" || r.list.size() != terms.size())
    throw SolverError("get-value failed: " + to_string(r));
  std::vector<SExpr> out;
  for (const auto& pair : r.list) {
    if (!pair.is_list || pair.list.size() != 2) throw SolverError("malformed get-value reply: " + to_string(r));
    out.push_back(pair.list[1]);
  }
  return out;
}

}  // namespace iml
