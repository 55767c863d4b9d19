#include "pual/dataset.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status{-1};
    std::string output;
};

Run run(const std::string &args) {
    const std::string cmd = std::string(PUAL_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) {
        r.output += buf.data();
    }
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("pual_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    void write(const std::string &name, const std::string &text) const {
        std::ofstream out(path(name));
        out << text;
    }

  private:
    fs::path dir_;
};

int line_count(const std::string &s) {
    int n = 0;
    for (const char c : s) {
        n += c == '\n' ? 1 : 0;
    }
    return n;
}

}  // namespace

TEST_F(Cli, SeparableToyEndToEnd) {
    write("toy.csv", "x,label\n2,p\n2.5,p\n-2,u\n-2.5,u\n");
    write("probe.csv", "x,label\n3,1\n-3,-1\n");
    auto r = run("train --model pual-linear --data " + path("toy.csv") + " --knn 1 --out " + path("m.json"));
    ASSERT_EQ(r.status, 0) << r.output;
    r = run("predict --model " + path("m.json") + " --data " + path("probe.csv") + " --out " + path("p.csv"));
    ASSERT_EQ(r.status, 0) << r.output;
    std::ifstream in(path("p.csv"));
    std::string header;
    std::string first;
    std::string second;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    EXPECT_EQ(header, "score,label");
    EXPECT_EQ(first.substr(first.find(',') + 1), "1");
    EXPECT_EQ(second.substr(second.find(',') + 1), "-1");
    r = run("eval --preds " + path("p.csv") + " --truth " + path("probe.csv"));
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(r.output, "f1=1 tp=1 fp=0 fn=0 tn=1\n");
}

TEST_F(Cli, SynthSplitTrainAllKinds) {
    ASSERT_EQ(run("synth --mean-p2 50 --seed 7 --out " + path("s.csv")).status, 0);
    const auto data = pual::load_eval_csv(path("s.csv"));
    EXPECT_EQ(data.n(), 800);
    ASSERT_EQ(run("split --mode single-training-set --labeled-fraction 1/4 --seed 1 --in " + path("s.csv") +
                  " --train-out " + path("tr.csv") + " --test-out " + path("te.csv"))
                  .status,
              0);
    EXPECT_EQ(pual::load_eval_csv(path("te.csv")).n(), 240);
    for (const std::string model : {"pual-linear", "gllc-linear", "pual-kernel", "gllc-kernel"}) {
        const auto r = run("train --model " + model + " --data " + path("tr.csv") + " --lambda 1 --sigma 1 --cu 0.1" +
                           " --out " + path(model + ".json"));
        ASSERT_EQ(r.status, 0) << model << ": " << r.output;
        ASSERT_EQ(run("predict --model " + path(model + ".json") + " --data " + path("te.csv") + " --out " +
                      path(model + ".csv"))
                      .status,
                  0);
        const auto e = run("eval --preds " + path(model + ".csv") + " --truth " + path("te.csv"));
        ASSERT_EQ(e.status, 0);
        EXPECT_EQ(e.output.rfind("f1=", 0), 0u);
        EXPECT_EQ(line_count(e.output), 1);
    }
}

TEST_F(Cli, CaseControlSplit) {
    ASSERT_EQ(run("synth --seed 2 --out " + path("s.csv")).status, 0);
    const auto r = run("split --mode case-control --gamma-prime 7/17 --in " + path("s.csv") + " --train-out " +
                       path("tr.csv") + " --test-out " + path("te.csv"));
    EXPECT_EQ(r.status, 0) << r.output;
}

TEST_F(Cli, ExitCodes) {
    write("toy.csv", "x,label\n2,p\n2.5,p\n-2,u\n-2.5,u\n");
    write("bad.csv", "x,label\n2,q\n");

    auto r = run("train --model bogus --data " + path("toy.csv") + " --out " + path("m.json"));
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(line_count(r.output), 1);
    EXPECT_NE(r.output.find("--model"), std::string::npos) << r.output;

    r = run("train --model pual-linear --cu -1 --data " + path("toy.csv") + " --out " + path("m.json"));
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(line_count(r.output), 1);
    EXPECT_NE(r.output.find("--cu"), std::string::npos) << r.output;

    r = run("train --model pual-linear --data " + path("missing.csv") + " --out " + path("m.json"));
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("missing.csv"), std::string::npos) << r.output;

    r = run("train --model pual-linear --knn 1 --data " + path("bad.csv") + " --out " + path("m.json"));
    EXPECT_EQ(r.status, 2);
    EXPECT_EQ(line_count(r.output), 1);
    EXPECT_NE(r.output.find("bad.csv"), std::string::npos) << r.output;

    // the default K = 5 needs more than four rows
    r = run("train --model pual-linear --data " + path("toy.csv") + " --out " + path("m.json"));
    EXPECT_EQ(r.status, 1) << r.output;

    write("gram.csv", "1,0\n0,1\n");
    r = run("train --model pual-kernel --kernel precomputed --gram " + path("gram.csv") + " --knn 1 --data " +
            path("toy.csv") + " --out " + path("m.json"));
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("--gram"), std::string::npos) << r.output;

    // rank-deficient linear-via-B Gram: n_p = m
    write("rank.csv", "a,b,label\n1,0,p\n0,1,p\n-1,0,u\n0,-1,u\n-1,-1,u\n");
    r = run("train --model gllc-kernel --kernel linear-via-b --knn 1 --data " + path("rank.csv") + " --out " +
            path("m.json"));
    EXPECT_EQ(r.status, 3) << r.output;

    r = run("predict --model " + path("nothing.json") + " --data " + path("toy.csv") + " --out " + path("p.csv"));
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("nothing.json"), std::string::npos) << r.output;
}

TEST_F(Cli, ConfigFileSuppliesDefaults) {
    write("toy.csv", "x,label\n2,p\n2.5,p\n-2,u\n-2.5,u\n");
    write("cfg.json", "{\"train\": {\"model\": \"pual-linear\", \"knn\": 1, \"cu\": 0.3}}");
    auto r = run("--config " + path("cfg.json") + " train --data " + path("toy.csv") + " --out " + path("a.json"));
    ASSERT_EQ(r.status, 0) << r.output;
    r = run("train --model pual-linear --knn 1 --cu 0.3 --data " + path("toy.csv") + " --out " + path("b.json"));
    ASSERT_EQ(r.status, 0) << r.output;
    std::ifstream a(path("a.json"));
    std::ifstream b(path("b.json"));
    std::stringstream sa;
    std::stringstream sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());

    // explicit flags win over the file
    r = run("--config " + path("cfg.json") + " train --cu 0.2 --data " + path("toy.csv") + " --out " + path("c.json"));
    ASSERT_EQ(r.status, 0) << r.output;
    std::ifstream c(path("c.json"));
    std::stringstream sc;
    sc << c.rdbuf();
    EXPECT_NE(sc.str().find("\"cu\": 0.2"), std::string::npos);
}

TEST_F(Cli, TuneWritesJson) {
    ASSERT_EQ(run("synth --seed 3 --out " + path("s.csv")).status, 0);
    ASSERT_EQ(run("split --mode single-training-set --in " + path("s.csv") + " --train-out " + path("tr.csv") +
                  " --test-out " + path("te.csv"))
                  .status,
              0);
    const auto r = run("tune --data " + path("tr.csv") + " --model gllc-linear --preset reduced --out " +
                       path("t.json"));
    ASSERT_EQ(r.status, 0) << r.output;
    std::ifstream in(path("t.json"));
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_NE(ss.str().find("\"best\""), std::string::npos);
}
