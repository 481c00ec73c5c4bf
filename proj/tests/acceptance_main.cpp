// Acceptance suite: one PASS/FAIL line per criterion.
//
// usage: acceptance <path-to-treverse> <scratch-dir>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "treverse/testing/acceptance.hpp"

namespace fs = std::filesystem;
using namespace treverse;

namespace {

// Wall-clock budgets in seconds; criteria without an entry are untimed.
const std::map<int, double> kBudget = {{1, 1.0}, {2, 10.0}, {5, 30.0}, {7, 300.0}};

// Criterion 9 asks every catalog op to reverse L; only R = +-I do (see README).
const std::set<int> kKnownFailures = {9};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <treverse> <scratch-dir>\n";
        return 1;
    }
    const std::string cli = argv[1];
    const fs::path scratch = argv[2];

    acceptance::Options opt;
    opt.seed = 42;
    std::map<int, bool> verdict;
    const auto all = acceptance::criteria();
    for (std::size_t k = 0; k < all.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = all[k](opt);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto budget = kBudget.find(r.id);
        if (budget != kBudget.end() && secs > budget->second) r.require(false, "runtime budget exceeded");
        verdict[r.id] = r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " " << r.name << " (" << secs << " s)\n";
        for (const auto& m : r.metrics) std::cout << "    " << m.name << " = " << m.value << "\n";
        for (const auto& n : r.notes) std::cout << "    " << n << "\n";
        std::cout.flush();
    }

    // Criterion 10: two separate processes, byte-identical reports.
    fs::remove_all(scratch);
    const fs::path a = scratch / "a", b = scratch / "b";
    const int ca = run("\"" + cli + "\" verify --seed 42 --out \"" + a.string() + "\"");
    const int cb = run("\"" + cli + "\" verify --seed 42 --out \"" + b.string() + "\"");
    const fs::path ra = a / "verify.json", rb = b / "verify.json";
    const bool produced = fs::exists(ra) && fs::exists(rb) && fs::file_size(ra) > 0;
    const bool same = produced && ca == cb && slurp(ra) == slurp(rb);
    verdict[10] = same;
    std::cout << (same ? "PASS" : "FAIL") << " criterion 10 determinism\n";
    std::cout << "    exit codes = " << ca << ", " << cb << "\n";
    std::cout << "    report bytes = " << (produced ? fs::file_size(ra) : 0) << "\n";

    int unexpected = 0;
    for (const auto& [id, ok] : verdict) {
        const bool known = kKnownFailures.count(id) != 0;
        if (ok == known) {
            ++unexpected;
            std::cout << "unexpected " << (ok ? "pass" : "failure") << ": criterion " << id << "\n";
        }
    }
    std::cout << (unexpected == 0 ? "acceptance: all outcomes as recorded\n" : "acceptance: unexpected outcomes\n");
    return unexpected == 0 ? 0 : 1;
}
