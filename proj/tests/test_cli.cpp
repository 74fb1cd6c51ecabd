#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(WMTERRAIN_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("wmterrain_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("--size nope generate"), 1);
    EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, InvalidConfigIsUsage)
{
    const auto dir = scratch("badcfg");
    std::ofstream(dir / "bad.ini") << "[vehicle]\nwheels = 6\n";
    EXPECT_EQ(run("-c " + (dir / "bad.ini").string() + " config"), 1);
    std::ofstream(dir / "dims.ini") << "[experiment]\nfractal_dims = 3.5\n";
    EXPECT_EQ(run("-c " + (dir / "dims.ini").string() + " config"), 1);
    fs::remove_all(dir);
}

TEST(Cli, MissingInputs)
{
    const auto dir = scratch("missing");
    const std::string out = " --out " + dir.string() + " --size 33 --maps 1 --missions 1 ";
    EXPECT_EQ(run(out + "analyze"), 2);
    EXPECT_EQ(run(out + "sample"), 2);
    EXPECT_EQ(run(out + "simulate"), 2);
    EXPECT_EQ(run(out + "report"), 2);
    EXPECT_EQ(run("-c " + (dir / "absent.ini").string() + " config"), 2);
    fs::remove_all(dir);
}

TEST(Cli, EndToEndSmallRun)
{
    const auto dir = scratch("run");
    std::ofstream(dir / "small.ini") << "[experiment]\nfractal_dims = 2.3, 2.6\nsize = 65\n";
    const std::string base = "-c " + (dir / "small.ini").string() + " --out " + (dir / "out").string()
                             + " --maps 1 --missions 2 ";
    EXPECT_EQ(run(base + "config"), 0);
    EXPECT_EQ(run(base + "run"), 0);
    for (const char* f : {"composition.csv", "results.csv", "summary.csv", "plots/trials.csv", "maps/d2.6_000.png",
                          "roughness/d2.3_000.png", "missions/d2.3_000.jsonl"})
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    // Resuming a finished run is a no-op.
    EXPECT_EQ(run(base + "simulate --max-trials 1"), 0);
    fs::remove_all(dir);
}
