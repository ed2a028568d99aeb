/* SPDX-License-Identifier: Apache-2.0 */

// mini-imandra: batch checker and REPL.
//
//   mini-imandra file.iml            batch; exit 0/1/2/3
//   mini-imandra                     interactive

#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "iml/session.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Recursive function verifier with bounded unrolling and an induction waterfall"};
  iml::SessionConfig cfg;
  std::vector<std::string> files;
  app.add_option("files", files, ".iml files to check (REPL when absent)");
  app.add_option("--solver-cmd", cfg.solver_cmd, "SMT solver command line (SMT-LIB 2 on stdin)");
  app.add_option("--unroll-limit", cfg.unroll_limit, "default unrolling budget")->check(CLI::PositiveNumber);
  app.add_option("--induct-depth", cfg.induct_depth, "nested induction limit")->check(CLI::PositiveNumber);
  app.add_option("--timeout-ms", cfg.timeout_ms, "per-query solver timeout")->check(CLI::PositiveNumber);
  app.add_flag("--machine", cfg.machine, "one JSON record per directive");
  app.add_flag("--trace-unroll", cfg.trace_unroll, "log each unrolling iteration");
  app.add_flag("--trace-waterfall", cfg.trace_waterfall, "log waterfall moves");
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.validate();
    if (!files.empty()) {
      int code = 0;
      for (const auto& f : files) code = std::max(code, iml::run_batch(f, cfg, std::cout));
      return code;
    }
    iml::Session s(cfg, std::cout);
    const bool tty = isatty(STDIN_FILENO);
    std::string buffer, line;
    for (;;) {
      if (tty) std::cout << (buffer.empty() ? "# " : "  ") << std::flush;
      if (!std::getline(std::cin, line)) break;
      buffer += line;
      buffer += '\n';
      if (iml::Session::incomplete(buffer)) continue;
      std::string input;
      input.swap(buffer);
      if (!s.command(input)) break;
    }
    if (!buffer.empty()) s.command(buffer);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "mini-imandra: " << e.what() << "\n";
    return 3;
  }
}
