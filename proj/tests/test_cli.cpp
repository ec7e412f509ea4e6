// Drives the installed CLI binary end to end: format contract, exit codes,
// reproducibility. Takes the binary path as argv[1].

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int failures = 0;

#define CHECK_MSG(cond, msg)                                                          \
    do {                                                                              \
        if (!(cond)) {                                                                \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg       \
                      << "\n";                                                        \
            ++failures;                                                               \
        }                                                                             \
    } while (0)

std::string g_cli;

int run(const std::string& args)
{
    const std::string cmd = g_cli + " " + args;
    const int status = std::system(cmd.c_str());
    if (status == -1)
        return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: test_cli <path-to-grbm-binary>\n";
        return 1;
    }
    g_cli = argv[1];

    const std::string small =
        "--n-visible 6 --n-hidden 4 --trials 3 --sd-grid 0.1,0.3 --seed 7";

    // sweep: format contract
    CHECK_MSG(run("sweep --vary w " + small + " --out cli_fe.csv > /dev/null 2>&1") == 0,
              "free-energy sweep should succeed");
    {
        const std::string text = slurp("cli_fe.csv");
        std::istringstream is(text);
        std::string header;
        std::getline(is, header);
        CHECK_MSG(header == "sd,f_exact_mean,f1_mean,f2_mean,n_unconverged,n_trials",
                  "unexpected header: " + header);
        int rows = 0;
        for (std::string line; std::getline(is, line);)
            if (!line.empty())
                ++rows;
        CHECK_MSG(rows == 2, "expected 2 data rows");
        CHECK_MSG(text.find('\r') == std::string::npos, "CR found in CSV");
    }

    // byte-identical rerun
    CHECK_MSG(run("sweep --vary w " + small + " --out cli_fe2.csv > /dev/null 2>&1") == 0,
              "second sweep run failed");
    CHECK_MSG(slurp("cli_fe.csv") == slurp("cli_fe2.csv"),
              "same command and seed must reproduce the CSV byte for byte");

    // mse mode and tsv format
    CHECK_MSG(run("sweep --mode mse --vary b " + small +
                  " --format tsv --out cli_mse.tsv > /dev/null 2>&1") == 0,
              "mse sweep should succeed");
    {
        const std::string text = slurp("cli_mse.tsv");
        CHECK_MSG(text.rfind("sd\tmse1_h\tmse1_v\tmse2_h\tmse2_v\tn_unconverged\tn_trials\n",
                             0) == 0,
                  "unexpected tsv header");
    }

    // stdout output
    CHECK_MSG(run("sweep --vary c " + small + " > cli_stdout.csv 2> /dev/null") == 0,
              "stdout sweep failed");
    CHECK_MSG(slurp("cli_stdout.csv").rfind("sd,", 0) == 0, "stdout did not start with header");

    // custom alphabet
    CHECK_MSG(run("sweep --vary w --space custom:-1,0,0.5,1 --n-visible 5 --n-hidden 3 "
                  "--trials 2 --sd-grid 0.2 --seed 3 --out cli_custom.csv > /dev/null 2>&1") == 0,
              "custom-alphabet sweep failed");

    // usage errors -> exit 2
    CHECK_MSG(run("sweep --vary q " + small + " > /dev/null 2>&1") == 2,
              "bad --vary should exit 2");
    CHECK_MSG(run("sweep " + small + " > /dev/null 2>&1") == 2, "missing --vary should exit 2");
    CHECK_MSG(run("sweep --vary w --bogus 1 " + small + " > /dev/null 2>&1") == 2,
              "unknown flag should exit 2");
    CHECK_MSG(run("sweep --vary w --space custom:1,1 " + small + " > /dev/null 2>&1") == 2,
              "duplicate alphabet values should exit 2");
    CHECK_MSG(run("nonsense > /dev/null 2>&1") == 2, "unknown subcommand should exit 2");

    // capacity error -> exit 3
    CHECK_MSG(run("sweep --vary w --n-visible 4 --n-hidden 30 --trials 1 --sd-grid 0.1 "
                  "> /dev/null 2>&1") == 3,
              "oversized enumeration should exit 3");

    // check subcommand
    CHECK_MSG(run("check --instances 10 --n-visible 6 --n-hidden 4 --sd-w 0.3 --seed 1 "
                  "> cli_check.txt 2>&1") == 0,
              "check should pass on a small healthy run");
    {
        const std::string text = slurp("cli_check.txt");
        CHECK_MSG(text.find("instances: F1 >= F2 >= F") != std::string::npos,
                  "check summary line missing");
    }

    // gibbs-check subcommand
    CHECK_MSG(run("gibbs-check --n-visible 4 --n-hidden 3 --sweeps 20000 --burnin 500 "
                  "--reps 2 --seed 3 > /dev/null 2>&1") == 0,
              "gibbs-check should pass");

    // inspect subcommand
    CHECK_MSG(run("inspect --seed 5 --n-visible 4 --n-hidden 3 > cli_inspect.txt 2>&1") == 0,
              "inspect failed");
    {
        const std::string text = slurp("cli_inspect.txt");
        CHECK_MSG(text.find("F_exact") != std::string::npos, "inspect output missing F_exact");
        CHECK_MSG(text.find("marginal Boltzmann machine") != std::string::npos,
                  "inspect output missing marginal section");
    }

    // help exits cleanly
    CHECK_MSG(run("--help > /dev/null 2>&1") == 0, "--help should exit 0");

    if (failures == 0) {
        std::cout << "test_cli: all checks passed\n";
        return 0;
    }
    std::cerr << "test_cli: " << failures << " check(s) failed\n";
    return 1;
}
