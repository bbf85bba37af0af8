#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "cpe/experiment.hpp"

namespace {

struct Outcome {
    int code;
    std::string out;
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string(CPE_BENCH_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), pipe) != nullptr) out += buf;
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string temp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen-config then run") {
    const std::string yaml = temp("cpe_cli.yaml");
    const std::string csv = temp("cpe_cli.csv");
    REQUIRE(run("gen-config --out " + yaml).code == 0);
    std::string text;
    {
        std::ifstream is(yaml);
        std::stringstream ss;
        ss << is.rdbuf();
        text = ss.str();
    }
    const auto cfg = cpe::parse_config(text);
    CHECK(cfg.K == 3);
    CHECK(cfg.grid.n == 500);

    // same file with a desk-sized grid
    auto replace = [&](const std::string& from, const std::string& to) {
        const auto pos = text.find(from);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, from.size(), to);
    };
    replace("trials: 25", "trials: 1");
    replace("kappa: [0.1, 0.2, 0.3, 0.4, 0.5]", "kappa: [0.5]");
    replace("snr: [10, 100, 1000, 10000]", "snr: [100]");
    replace("tde_music]", "tde_music]\nK: 1");
    replace("K: 3\n", "");
    std::ofstream(yaml) << text;
    CHECK(run("run --config " + yaml + " --out " + csv + " --jobs 1 --seed 4").code == 0);
    std::ifstream is(csv);
    std::string header;
    std::getline(is, header);
    CHECK(header == cpe::kCsvHeader);
    int rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == 6);

    std::ofstream(yaml) << "trials: 0\n";
    CHECK(run("run --config " + yaml).code == 1);
    std::filesystem::remove(yaml);
    std::filesystem::remove(csv);
}

TEST_CASE("zeta table") {
    const auto r = run("zeta --problem tde --c 1..10");
    REQUIRE(r.code == 0);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "c,zeta,bomp_max_error,b_worst,samples");
    int rows = 0;
    double last = 1e9;
    while (std::getline(is, line)) {
        const double z = std::stod(line.substr(line.find(',') + 1));
        CHECK(z <= last * 1.05);
        last = z;
        ++rows;
    }
    CHECK(rows == 10);
}

TEST_CASE("usage and configuration errors") {
    CHECK(run("").code == 2);
    CHECK(run("zeta --bogus").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("run --config /nonexistent.yaml").code == 2);
    CHECK(run("zeta --c 0").code == 1);
    CHECK(run("--help").code == 0);
}

}
