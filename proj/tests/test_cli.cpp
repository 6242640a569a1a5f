#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "weylsum");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = weylsum::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

nlohmann::ordered_json json_of(const Run& r) { return nlohmann::ordered_json::parse(r.out); }

}  // namespace

TEST(Cli, CompleteSumExample) {
    const auto r = run({"csum", "--q", "3", "--a1", "0", "--ak", "1", "--k", "3", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto row = json_of(r)["rows"][0];
    EXPECT_NEAR(row["re"].get<double>(), 0.0, 1e-9);
    EXPECT_NEAR(row["im"].get<double>(), 0.0, 1e-9);
}

TEST(Cli, TrivialWeylSum) {
    const auto r = run({"weyl", "--k", "3", "--alpha1", "0", "--alphak", "0", "--P", "100", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto row = json_of(r)["rows"][0];
    EXPECT_NEAR(row["re"].get<double>(), 100.0, 1e-9);
    EXPECT_NEAR(row["im"].get<double>(), 0.0, 1e-9);
}

TEST(Cli, ThetaExample) {
    const auto r = run({"theta", "--k", "2", "--gamma", "sqrt2", "--mode", "witness", "--qmin", "100", "--scales", "8..16",
                        "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json_of(r);
    ASSERT_EQ(doc["rows"].size(), 9u);
    EXPECT_GE(doc["rows"][0]["slope"].get<double>(), 0.70);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"csum", "--q", "3", "--bogus", "1"}).code, 2);
    EXPECT_EQ(run({"nosuchcommand"}).code, 2);
    EXPECT_EQ(run({"csum", "--q", "0"}).code, 2);
    EXPECT_EQ(run({"integral", "--interval", "2,1"}).code, 2);
    EXPECT_EQ(run({"dio", "--mode", "odd", "--gamma", "1/3", "--qmin", "100"}).code, 3);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, CsvShape) {
    const auto r = run({"dio", "--mode", "cf", "--gamma", "sqrt2", "--n", "4", "--precision", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("index,c,q,err\r\n", 0), 0u) << r.out;
    std::size_t lines = 0;
    for (std::size_t p = 0; (p = r.out.find("\r\n", p)) != std::string::npos; p += 2) ++lines;
    EXPECT_EQ(lines, 5u);
    EXPECT_EQ(weylsum::cli::csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(weylsum::cli::csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(weylsum::cli::csv_escape("plain"), "plain");
    EXPECT_EQ(weylsum::cli::format_double(-0.0, 2), "0.00");
}

TEST(Cli, JsonSections) {
    const auto r = run({"moment", "--mode", "parseval", "--k", "2", "--gamma", "golden", "--Q", "20", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json_of(r);
    EXPECT_TRUE(doc.contains("config"));
    EXPECT_TRUE(doc.contains("rows"));
    EXPECT_TRUE(doc.contains("diagnostics"));
    EXPECT_EQ(doc["config"]["command"], "moment");
}

TEST(Cli, SeededRunsAreByteIdentical) {
    const std::vector<std::string> args = {"--seed", "9", "delta-scan", "--samples", "5", "--Pmax", "800"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    auto other = args;
    other[1] = "10";
    EXPECT_NE(run(other).out, a.out);
}

TEST(Cli, OutWritesFile) {
    const auto path = std::filesystem::temp_directory_path() / "weylsum_cli_out.csv";
    std::filesystem::remove(path);
    const auto r = run({"csum", "--q", "25", "--ak", "2", "--k", "2", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path, std::ios::binary);
    const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(body.rfind("q,a1,ak,k,re,im,abs\r\n", 0), 0u);
    std::filesystem::remove(path);
}
