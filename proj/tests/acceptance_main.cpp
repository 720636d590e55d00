#include <cstdio>
#include <string>

#include "qgp/verify.hpp"

int main(int argc, char** argv) {
    std::string filter = argc > 1 ? argv[1] : "";
    auto results = qgp::run_acceptance(filter);
    bool all = true;
    for (const auto& r : results) {
        std::printf("%s  criterion %s%s%s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                    r.pass || r.detail.empty() ? "" : "  ", r.pass ? "" : r.detail.c_str());
        all = all && r.pass;
    }
    if (results.empty()) {
        std::printf("no checks matched filter '%s'\n", filter.c_str());
        return 2;
    }
    return all ? 0 : 1;
}
