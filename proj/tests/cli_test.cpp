// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// End-to-end runs of the kgcd binary.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with `args`; stderr goes to `err_file` when given.
Run kgcd(const std::string& args, const fs::path& err_file = "/dev/null") {
  const std::string cmd =
      std::string(KGCD_CLI) + " " + args + " 2>" + err_file.string();
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kgcd_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, GenerateAndBuild) {
  ASSERT_EQ(kgcd("generate --out " + p("fx") +
                 " --entities 25 --relations 3 --density 2 --seed 4")
                .status,
            0);
  const auto r = kgcd("build-index --triples " + p("fx/triples.tsv") + " --labels " +
                      p("fx/labels.tsv") + " --out " + p("idx.bin"));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "entities\t25\nrelations\t3\ntriples\t50\n");
  EXPECT_TRUE(fs::exists(p("idx.bin")));
}

TEST_F(Cli, EmptyGraph) {
  std::ofstream(p("empty.tsv")).close();
  const auto r = kgcd("build-index --triples " + p("empty.tsv") + " --out " + p("e.bin"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "entities\t0\nrelations\t0\ntriples\t0\n");
}

TEST_F(Cli, ErrorsNameTheProblem) {
  {
    std::ofstream(p("t.tsv")) << "A\tr\tB\n";
    std::ofstream(p("l.tsv")) << "Ghost\tghost\n";
  }
  auto r = kgcd("build-index --triples " + p("t.tsv") + " --labels " + p("l.tsv") +
                    " --out " + p("i.bin"),
                p("err"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(slurp(p("err")).find("Ghost"), std::string::npos) << slurp(p("err"));

  {
    std::ofstream(p("bad.tsv")) << "A\tr\tB\nA\tr\n";
  }
  r = kgcd("build-index --triples " + p("bad.tsv") + " --out " + p("i.bin"), p("err"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(slurp(p("err")).find(":2"), std::string::npos) << slurp(p("err"));

  r = kgcd("decode --index " + p("missing.bin") + " -q x", p("err"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(slurp(p("err")).find("missing.bin"), std::string::npos);
  EXPECT_NE(kgcd("frobnicate").status, 0);
  EXPECT_NE(kgcd("decode --index x --mode sideways -q y").status, 0);
}

class FigureOneCli : public Cli {
 protected:
  void SetUp() override {
    Cli::SetUp();
    ASSERT_EQ(kgcd("generate --figure1 --out " + p("fx")).status, 0);
    ASSERT_EQ(kgcd("build-index --triples " + p("fx/triples.tsv") + " --labels " +
                   p("fx/labels.tsv") + " --out " + p("idx.bin"))
                  .status,
              0);
  }
};

TEST_F(FigureOneCli, DecodeNeverWritesForMichaelBay) {
  const auto r = kgcd("decode --index " + p("idx.bin") + " --scorer uniform --beam 10 " +
                      "-q 'what did michael bay write?'");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.find("question\twhat did michael bay write?\n1\t"), 0u) << r.out;
  EXPECT_EQ(r.out.find("[ michael bay (director) ] [ write ]"), std::string::npos);
  EXPECT_NE(r.out.find("\nanswer\t"), std::string::npos);

  const auto unc = kgcd("decode --index " + p("idx.bin") + " --gold " + p("fx/dataset.tsv") +
                        " --scorer noisy-oracle:0 --beam 1 --expand-iris " +
                        "-q 'what did michael bay direct?'");
  ASSERT_EQ(unc.status, 0);
  EXPECT_NE(unc.out.find("SELECT DISTINCT ?var0 WHERE { <Michael_Bay> <direct> ?var0 . }"),
            std::string::npos)
      << unc.out;
  EXPECT_NE(unc.out.find("answer\t1\tPearl_Harbor;Transformers\n"), std::string::npos);
}

TEST_F(FigureOneCli, BatchEqualsSequential) {
  const std::string q1 = "what did michael bay direct?";
  const std::string q2 = "how many movies did michael bay direct?";
  {
    std::ofstream(p("qs.txt")) << q1 << "\n" << q2 << "\n";
  }
  const std::string common = "decode --index " + p("idx.bin") + " --gold " +
                             p("fx/dataset.tsv") + " --scorer noisy-oracle:0.3 --json ";
  const auto seq = kgcd(common + "-q '" + q1 + "' -q '" + q2 + "'");
  const auto bat = kgcd(common + "--threads 2 --batch " + p("qs.txt"));
  ASSERT_EQ(seq.status, 0);
  ASSERT_EQ(bat.status, 0);
  EXPECT_EQ(seq.out, bat.out);
  EXPECT_EQ(std::count(seq.out.begin(), seq.out.end(), '\n'), 2);
}

TEST_F(FigureOneCli, UnfinishedDecodeIsNotAnError) {
  const auto r = kgcd("decode --index " + p("idx.bin") + " --max-len 3 -q x", p("err"));
  // Nothing finishes within three tokens, which is not an error.
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("answer\tnone"), std::string::npos);
}

TEST_F(Cli, EvalIsReproducible) {
  ASSERT_EQ(kgcd("generate --out " + p("fx") +
                 " --entities 30 --one-hop 1 --two-hop 1 --count 1 --ask 1 --questions 20 "
                 "--seed 2")
                .status,
            0);
  ASSERT_EQ(kgcd("build-index --triples " + p("fx/triples.tsv") + " --labels " +
                 p("fx/labels.tsv") + " --out " + p("idx.bin"))
                .status,
            0);
  const std::string cmd = "eval --index " + p("idx.bin") + " --dataset " +
                          p("fx/dataset.tsv") + " --scorer noisy-oracle:0.3 --beams 1-3 ";
  ASSERT_EQ(kgcd(cmd + "--report " + p("a.csv") + " --plot " + p("a.svg")).status, 0);
  ASSERT_EQ(kgcd(cmd + "--report " + p("b.csv")).status, 0);
  const auto a = slurp(p("a.csv"));
  EXPECT_EQ(a, slurp(p("b.csv")));
  EXPECT_NE(slurp(p("a.svg")).find("<svg"), std::string::npos);
  std::istringstream lines(a);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "mode,beam,f1,hits1,inexec_rate,mean_ms,inexec_rate_all,skipped");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    if (line.rfind("full,", 0) == 0) {
      std::vector<std::string> cols;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
      ASSERT_EQ(cols.size(), 8u);
      EXPECT_EQ(std::stod(cols[4]), 0.0) << line;
      EXPECT_EQ(cols[5], "-");
    }
  }
  EXPECT_EQ(rows, 9);
}

TEST_F(Cli, SwapDemo) {
  ASSERT_EQ(kgcd("generate --evolution --out " + p("ev") +
                 " --entities 30 --new-entities 3 --new-edges 3 --seed 6")
                .status,
            0);
  for (const char* t : {"t0", "t1"}) {
    ASSERT_EQ(kgcd("build-index --triples " + p(std::string("ev/") + t + "/triples.tsv") +
                   " --labels " + p(std::string("ev/") + t + "/labels.tsv") + " --out " +
                   p(std::string(t) + ".bin"))
                  .status,
              0);
  }
  const auto r = kgcd("swap-demo --index-t0 " + p("t0.bin") + " --index-t1 " + p("t1.bin") +
                      " --delta " + p("ev/delta.tsv") + " --scorer noisy-oracle:0");
  ASSERT_EQ(r.status, 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "question\tbefore\tafter\ttransition");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_NE(line.find("\tunanswered->answered"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 6);
}

}  // namespace
