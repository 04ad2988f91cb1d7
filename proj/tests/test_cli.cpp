#include <gtest/gtest.h>

#include <json.hpp>

#include "cli_helpers.hpp"
#include "wgm/temporal.hpp"

using namespace wgm;
using namespace wgm::testing;

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::filesystem::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST(Cli, ResonancesContainPumpMode) {
    const auto dir = scratch("cli_res");
    const auto r = run({"resonances", "--out-dir", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto rows = csv_rows(dir / "resonances.csv");
    ASSERT_GT(rows.size(), 2u);
    EXPECT_EQ(rows[0][0], "l");
    bool found = false;
    for (const auto& row : rows)
        if (row[0] == "774") {
            found = true;
            EXPECT_NEAR(std::stod(row[3]), 1549.9726, 1e-3);
        }
    EXPECT_TRUE(found);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const std::vector<std::vector<std::string>> commands = {
        {"resonances"},
        {"channels"},
        {"fit-airy", "--seed", "5"},
        {"spectrogram", "--seed", "5"},
        {"phasematch"},
    };
    for (const auto& cmd : commands) {
        const auto dir = scratch("cli_det");
        auto args = cmd;
        args.insert(args.end(), {"--out-dir", dir.string()});
        ASSERT_EQ(run(args).code, kExitOk) << cmd[0];
        const auto first = snapshot(dir);
        EXPECT_FALSE(first.empty()) << cmd[0];
        scratch("cli_det");
        ASSERT_EQ(run(args).code, kExitOk) << cmd[0];
        EXPECT_EQ(first, snapshot(dir)) << cmd[0];
    }
}

TEST(Cli, SeedChangesSyntheticOutput) {
    const auto a = scratch("cli_seed_a"), b = scratch("cli_seed_b");
    ASSERT_EQ(run({"spectrogram", "--seed", "1", "--out-dir", a.string()}).code, kExitOk);
    ASSERT_EQ(run({"spectrogram", "--seed", "2", "--out-dir", b.string()}).code, kExitOk);
    EXPECT_NE(snapshot(a), snapshot(b));
}

TEST(Cli, CombPeaksNarrowWithQ) {
    double previous = 1e300;
    for (const char* q : {"1e6", "1e7"}) {
        const auto dir = scratch(std::string("cli_comb_") + q);
        const auto r = run({"comb", "--q", q, "--pairs", "1", "--out-dir", dir.string()});
        ASSERT_EQ(r.code, kExitOk) << r.err;
        const auto rows = csv_rows(dir / "comb_peaks.csv");
        ASSERT_EQ(rows.size(), 4u);
        const double central = std::stod(rows[2][3]);
        EXPECT_LT(central, previous);
        previous = central;
    }
}

TEST(Cli, AnalyzeReadsSpectrogramOutput) {
    const auto dir = scratch("cli_analyze");
    ASSERT_EQ(run({"spectrogram", "--out-dir", dir.string()}).code, kExitOk);
    const auto r = run({"analyze", "--input", (dir / "spectrogram.txt").string(), "--out-dir", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "analysis.json"));
    EXPECT_NEAR(j.at("linewidth_hz").get<double>() / 3.376e6, 1.0, 0.1);
    EXPECT_TRUE(j.at("energy_check").at("ok").get<bool>());
    for (const char* f : {"spectral_marginal.csv", "temporal_marginal.csv", "ted_envelope.csv", "lineshape.csv"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
}

TEST(Cli, HeraldWidthReadsTedOutput) {
    const auto dir = scratch("cli_herald");
    ASSERT_EQ(run({"ted", "--q", "1e6", "--out-dir", dir.string()}).code, kExitOk);
    const auto ted = TedTrace::read_csv((dir / "ted.csv").string());
    EXPECT_GT(ted.size(), 100);
    const auto r = run({"herald-width", "--input", (dir / "ted.csv").string(), "--idler-nm", "1549.97", "--out-dir",
                        dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "herald_width.json"));
    EXPECT_NEAR(j.at("linewidth_hz").get<double>() / 130.7e6, 1.0, 0.05);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli_exit");
    EXPECT_EQ(run({}).code, kExitFormat);
    EXPECT_EQ(run({"comb", "--q", "not-a-number"}).code, kExitFormat);
    EXPECT_EQ(run({"no-such-command"}).code, kExitFormat);
    EXPECT_EQ(run({"resonances", "--radius-um", "-5", "--out-dir", dir.string()}).code, kExitFormat);
    EXPECT_EQ(run({"channels", "--index", "99", "--out-dir", dir.string()}).code, kExitDomain);
    EXPECT_EQ(run({"comb", "--q", "1e6", "--step-hz", "1e9", "--out-dir", dir.string()}).code, kExitFormat);
    EXPECT_EQ(run({"herald-width", "--input", "/nonexistent.csv", "--idler-nm", "1562", "--out-dir", dir.string()}).code,
              kExitFormat);
    const auto bad = dir / "scan.csv";
    std::ofstream(bad) << "freq_offset_Hz,transmittance_normalized\n";
    for (int i = 0; i < 50; ++i) std::ofstream(bad, std::ios::app) << i << ",1\n";
    EXPECT_EQ(run({"fit-airy", "--input", bad.string(), "--out-dir", dir.string()}).code, kExitPrecondition);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, InitConfigIsLoadable) {
    const auto dir = scratch("cli_init");
    ASSERT_EQ(run({"init-config", "--q", "3e7", "--out-dir", dir.string()}).code, kExitOk);
    const auto cfg = (dir / "config.json").string();
    const auto out = scratch("cli_init_out");
    const auto r = run({"resonances", "--config", cfg, "--out-dir", out.string()});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "config.json"));
    EXPECT_DOUBLE_EQ(j.at("couplings").at("q_signal").get<double>(), 3e7);
}
