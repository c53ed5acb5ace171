#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "prpmi/solver.hpp"

extern char** environ;

namespace prpmi {

namespace {

constexpr double kGraceSeconds = 2.0;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

ParsedSolution parse_solution(const std::string& text) {
  ParsedSolution sol;
  if (text.find("<variable") != std::string::npos) {
    static const std::regex var_re(R"re(<variable\b([^>]*)>)re");
    static const std::regex name_re(R"re(\bname\s*=\s*"([^"]*)")re");
    static const std::regex value_re(R"re(\bvalue\s*=\s*"([^"]*)")re");
    static const std::regex status_re(R"re(solutionStatusString\s*=\s*"([^"]*)")re");
    std::smatch m;
    if (std::regex_search(text, m, status_re)) sol.status = lower(m[1]);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), var_re); it != std::sregex_iterator(); ++it) {
      const std::string attrs = (*it)[1];
      std::smatch n, v;
      if (!std::regex_search(attrs, n, name_re) || !std::regex_search(attrs, v, value_re))
        throw std::runtime_error("variable entry without name or value: " + it->str());
      sol.values.emplace_back(n[1], std::stod(v[1]));
    }
    return sol;
  }
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    std::istringstream ls(line);
    std::string name, value;
    if (!(ls >> name) || name[0] == '#') continue;
    if (!(ls >> value)) throw std::runtime_error("solution line " + std::to_string(number) + " has no value");
    if (lower(name) == "status") {
      sol.status = lower(value);
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size()) throw std::runtime_error("solution line " + std::to_string(number) + ": bad number " + value);
    sol.values.emplace_back(name, v);
  }
  return sol;
}

SolveOutcome run_external(const MilpModel& model, const std::string& command, const SolveLimits& limits,
                          const std::filesystem::path& work_dir) {
  namespace fs = std::filesystem;
  static std::atomic<int> counter{0};
  SolveOutcome out;
  const auto start = std::chrono::steady_clock::now();
  fs::path dir = work_dir;
  if (dir.empty())
    dir = fs::temp_directory_path() /
          ("prpmi-ext-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(dir);
  const fs::path lp = dir / "model.lp", sol = dir / "model.sol", log = dir / "solver.log";
  fs::remove(sol);
  try {
    export_lp(model, lp);
  } catch (const std::exception& e) {
    out.diagnostic = e.what();
    return out;
  }

  char secs[32];
  std::snprintf(secs, sizeof secs, "%g", limits.wall_clock);
  std::vector<std::string> args{command, lp.string(), "--time-limit", secs, "--sol", sol.string()};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, command.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    out.diagnostic = "cannot start " + command + ": " + std::strerror(rc);
    return out;
  }

  const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(limits.wall_clock + kGraceSeconds));
  int wstatus = 0;
  bool killed = false;
  while (true) {
    const pid_t r = ::waitpid(pid, &wstatus, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) {
      out.diagnostic = std::string("waitpid failed: ") + std::strerror(errno);
      return out;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &wstatus, 0);
      killed = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string raw = slurp(log);

  if (!killed && !(WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 0)) {
    out.diagnostic = command + " failed (status " + std::to_string(WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -1) +
                     "); output:\n" + raw;
    return out;
  }
  if (!fs::exists(sol)) {
    out.hit_wall_clock = killed;
    out.diagnostic = (killed ? "time limit reached without a solution file; output:\n" : "no solution file; output:\n") + raw;
    return out;
  }

  ParsedSolution parsed;
  try {
    parsed = parse_solution(slurp(sol));
  } catch (const std::exception& e) {
    out.diagnostic = std::string("unparsable solution: ") + e.what() + "\noutput:\n" + raw;
    return out;
  }
  if (parsed.status.find("infeasible") != std::string::npos) {
    out.status = SolveStatus::Infeasible;
    return out;
  }
  std::vector<double> x(model.variable_count(), 0.0);
  for (const auto& [name, value] : parsed.values) {
    const auto v = model.find_variable(name);
    if (!v) {
      if (name.rfind("obj_const", 0) == 0) continue;
      out.diagnostic = "solution names unknown variable " + name + "\noutput:\n" + raw;
      return out;
    }
    x[*v] = value;
  }
  const double viol = incumbent_violation(model, x);
  if (viol > 1e-6) {
    out.diagnostic = "solution violates the model by " + std::to_string(viol) + "\noutput:\n" + raw;
    return out;
  }
  out.value = model.evaluate_objective(x);
  out.x = std::move(x);
  out.hit_wall_clock = killed;
  const bool proven = !killed && (parsed.status.empty() || parsed.status.rfind("optimal", 0) == 0 ||
                                   parsed.status.rfind("integer optimal", 0) == 0);
  out.status = proven ? SolveStatus::Optimal : SolveStatus::FeasibleTimeLimit;
  out.bound = proven ? *out.value : -kInfinity;
  return out;
}

}  // namespace prpmi
