/* SPDX-License-Identifier: Apache-2.0 */

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "helpers.hpp"
#include "iml/session.hpp"

namespace iml {
namespace {

int exit_of(const std::string& text) {
  std::ostringstream out;
  Session s(SessionConfig{}, out);
  s.run_text(text);
  return s.exit_code();
}

TEST(Session, ExitCodes) {
  EXPECT_EQ(exit_of("verify (fun x -> x = x)"), 0);
  EXPECT_EQ(exit_of("verify (fun l -> List.rev l = l)"), 1);
  EXPECT_EQ(exit_of("theorem same_len l = List.length (List.map (fun x -> x + 1) l) = List.length l [@@auto]"), 0);
  EXPECT_EQ(exit_of("verify upto 3 (fun l -> List.rev (List.rev l) = l)"), 2);
  EXPECT_EQ(exit_of("let rec loop x = loop x"), 3);
  EXPECT_EQ(exit_of("let f x = x +"), 3);
  EXPECT_EQ(exit_of("let f x = if x then 1 else true"), 3);
  EXPECT_EQ(exit_of("verify (fun l -> List.rev l = l)\nlet rec loop x = loop x"), 3);
  EXPECT_EQ(exit_of("instance (fun b -> b && not b)"), 1);
  EXPECT_EQ(exit_of(""), 0);
}

TEST(Session, RecordsAreDeterministicApartFromTiming) {
  const std::string text = "verify (fun l -> List.rev l = l)\ninstance (fun x -> x * x = 49)\n"
                           "verify upto 4 (fun l -> List.rev (List.rev l) = l)\n";
  std::vector<std::string> runs;
  for (int i = 0; i < 2; ++i) {
    std::ostringstream out;
    SessionConfig cfg;
    cfg.machine = true;
    Session s(cfg, out);
    s.run_text(text);
    std::string joined;
    for (const auto& r : s.records()) joined += to_json(r, false) + "\n";
    runs.push_back(joined);
    ASSERT_EQ(s.records().size(), 3u);
    EXPECT_NE(to_json(s.records()[0]).find("\"millis\""), std::string::npos);
  }
  EXPECT_EQ(runs[0], runs[1]);
  EXPECT_EQ(runs[0].find("millis"), std::string::npos);
}

TEST(Session, JsonShape) {
  DirectiveRecord r;
  r.directive = "verify (fun l -> List.rev l = l)";
  r.verdict = Outcome::Refuted;
  r.bindings = {{"l", "[1; 2]"}};
  r.expansions = 4;
  EXPECT_EQ(to_json(r, false),
            "{\"directive\":\"verify (fun l -> List.rev l = l)\",\"verdict\":\"refuted\","
            "\"bindings\":{\"l\":\"[1; 2]\"},\"expansions\":4}");
}

TEST(Session, CounterexampleIsBound) {
  std::ostringstream out;
  Session s(SessionConfig{}, out);
  s.run_text("verify (fun l -> List.rev l = l)");
  ASSERT_TRUE(s.cx().count("l"));
  s.command("List.rev CX.l = CX.l");
  EXPECT_NE(out.str().find("- : bool = false"), std::string::npos) << out.str();
}

TEST(Session, RewriteInstalledOnlyAfterProof) {
  std::ostringstream out;
  Session s(SessionConfig{}, out);
  s.run_text("theorem bad l = List.rev l = l [@@auto] [@@rewrite]");
  EXPECT_TRUE(s.world().rules.empty());
  s.run_text("theorem rev_append l x = List.rev (List.append l [x]) = x :: List.rev l [@@auto] [@@rewrite]");
  ASSERT_EQ(s.world().rules.size(), 1u);
  EXPECT_EQ(s.world().rules[0]->name, "rev_append");
  EXPECT_TRUE(s.world().theorems.at("rev_append")->proved);
}

TEST(Session, ReplMatchesBatch) {
  const std::string text = std::string(test::kFact) +
                           "let rec left_pad c n xs =\n  if List.length xs >= n then xs\n  else left_pad c n (c :: xs)\n"
                           "[@@measure Ordinal.of_int (n - List.length xs)]\n"
                           "verify (fun x -> fact 4 = 24)\nverify (fun l -> List.rev l = l)\ninstance (fun x -> fact x = 120)\n";
  std::ostringstream a, b;
  Session batch(SessionConfig{}, a);
  batch.run_text(text);
  Session repl(SessionConfig{}, b);
  std::istringstream in(text);
  std::string line, pending;
  while (std::getline(in, line)) {
    pending += (pending.empty() ? "" : "\n") + line;
    if (Session::incomplete(pending)) continue;
    repl.command(pending);
    pending.clear();
  }
  if (!pending.empty()) repl.command(pending);
  EXPECT_EQ(batch.world().order, repl.world().order);
  ASSERT_EQ(batch.records().size(), repl.records().size());
  for (std::size_t i = 0; i < batch.records().size(); ++i)
    EXPECT_EQ(to_json(batch.records()[i], false), to_json(repl.records()[i], false));
  EXPECT_EQ(batch.exit_code(), repl.exit_code());
}

TEST(Session, ConfigValidation) {
  SessionConfig c;
  c.unroll_limit = 0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NO_THROW(SessionConfig{}.validate());
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  std::string cmd = std::string(IML_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string text;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) text.append(buf, n);
  int status = pclose(p);
  if (output) *output = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, CorpusExitCodes) {
  std::filesystem::path dir = std::filesystem::path(IML_SOURCE_DIR) / "examples/iml";
  EXPECT_EQ(run_cli((dir / "paper_examples.iml").string()), 0);
  EXPECT_EQ(run_cli((dir / "lists.iml").string()), 1);
  EXPECT_EQ(run_cli((dir / "loop.iml").string()), 3);
  EXPECT_EQ(run_cli("/nonexistent.iml"), 3);
}

TEST(Cli, MachineOutputIsJsonLines) {
  std::string out;
  run_cli("--machine " + (std::filesystem::path(IML_SOURCE_DIR) / "examples/iml/lists.iml").string(), &out);
  std::istringstream in(out);
  std::string line;
  int n = 0;
  std::regex shape(R"(^\{"directive":".*","verdict":"[A-Za-z]+","bindings":\{.*\},"expansions":[0-9]+,"millis":[0-9.]+.*\}$)");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '{') continue;
    EXPECT_TRUE(std::regex_match(line, shape)) << line;
    ++n;
  }
  EXPECT_GE(n, 6);
}

TEST(Cli, ReplFromPipe) {
  std::filesystem::path tmp = std::filesystem::temp_directory_path() / "iml_repl_input.txt";
  std::ofstream(tmp) << "let rec fact x = if x > 1 then x * fact (x - 1) else 1\n"
                        "fact 5\n#show fact\nverify (fun l -> List.rev l = l)\nList.rev CX.l\n#bogus\n#quit\n";
  std::string out;
  EXPECT_EQ(run_cli("< " + tmp.string(), &out), 0);
  EXPECT_NE(out.find("- : int = 120"), std::string::npos) << out;
  EXPECT_NE(out.find("let rec fact"), std::string::npos) << out;
  EXPECT_NE(out.find("refuted"), std::string::npos) << out;
  EXPECT_NE(out.find("unknown command #bogus"), std::string::npos) << out;
  std::filesystem::remove(tmp);
}

}  // namespace
}  // namespace iml
